#include "sigt/cli/commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>

#include "sigt/cli/csv.hpp"
#include "sigt/cli/experiment.hpp"
#include "sigt/model/checkpoint.hpp"
#include "sigt/phy/dataset_io.hpp"
#include "sigt/rx/classic.hpp"
#include "sigt/train/loss.hpp"

namespace sigt::cli {

namespace {

namespace fs = std::filesystem;

std::optional<rx::Detector> classic_detector(const std::string& name);

// Raw option values; strings are parsed after CLI11 so errors carry our
// field names.
struct Options {
  ExperimentSpec spec;
  std::uint64_t seed = 1;
  std::string data_dir;
  std::string out_dir = "sigt_out";
  std::string model = "sigt", agg = "conv", pool_kind = "avg", opt = "adam";
  std::string fcdnn_hidden = "1000,500,250", csinet_channels = "8,16";
  bool overwrite = false;
  bool verbose = false;
  std::string format = "binary";
  // eval
  std::string checkpoint, receiver = "model";
  // sweep
  std::string axis, values, models;
  std::size_t seeds = 3;

  std::vector<CLI::Option*> generation_opts;  // across all subcommands; unparsed ones have count 0
};

void add_frame_options(CLI::App* c, Options& o) {
  FrameConfig& f = o.spec.gen.cfg;
  const std::vector<CLI::Option*> opts{
      c->add_option("--ns", f.n_s, "Subcarriers N_s (power of two)")->capture_default_str(),
      c->add_option("--nt", f.n_t, "Transmit antennas N_t")->capture_default_str(),
      c->add_option("--nr", f.n_r, "Receive antennas N_r")->capture_default_str(),
      c->add_option("--ni", f.n_i, "Repeated symbols N_i")->capture_default_str(),
      c->add_option("--cp", f.cp_len, "Cyclic prefix length")->capture_default_str(),
      c->add_option("--taps", f.n_taps, "Channel taps")->capture_default_str(),
      c->add_option("--snr", o.spec.gen.snr_db, "SNR in dB (inf for noiseless)")->capture_default_str(),
      c->add_option("--pool", o.spec.gen.pool_size, "Channel pool size")->capture_default_str(),
      c->add_option("--train", o.spec.gen.n_train, "Training samples")->capture_default_str(),
      c->add_option("--test", o.spec.gen.n_test, "Test samples")->capture_default_str(),
  };
  o.generation_opts.insert(o.generation_opts.end(), opts.begin(), opts.end());
  c->add_option("--seed", o.seed, "Seed for data, initialisation and shuffling")->capture_default_str();
}

void add_data_option(CLI::App* c, Options& o) {
  c->add_option("--data", o.data_dir, "Directory written by `generate` (else data is generated in memory)");
}

void add_model_options(CLI::App* c, Options& o) {
  ModelConfig& m = o.spec.model;
  c->add_option("--model", o.model, "sigt | fcdnn | csinet | lstm")->capture_default_str();
  c->add_option("--depth", m.depth, "Encoder layers")->capture_default_str();
  c->add_option("--heads", m.heads, "Attention heads")->capture_default_str();
  c->add_option("--d-model", m.d_model, "Token width after projection")->capture_default_str();
  c->add_option("--d-ff", m.d_ff, "Feed-forward width")->capture_default_str();
  c->add_option("--mlp-hidden", m.mlp_hidden, "Head hidden width")->capture_default_str();
  c->add_option("--agg", o.agg, "conv | pool")->capture_default_str();
  c->add_option("--pool-kind", o.pool_kind, "avg | max (with --agg pool)")->capture_default_str();
  c->add_option("--fcdnn-hidden", o.fcdnn_hidden, "FC-DNN hidden widths")->capture_default_str();
  c->add_option("--csinet-blocks", m.csinet_blocks, "CSINet refine blocks")->capture_default_str();
  c->add_option("--csinet-channels", o.csinet_channels, "CSINet block channels")->capture_default_str();
  c->add_option("--dropout", m.dropout_p, "Dropout probability")->capture_default_str();
}

void add_run_options(CLI::App* c, Options& o) {
  RunConfig& r = o.spec.run;
  c->add_option("--opt", o.opt, "adam | sgd")->capture_default_str();
  c->add_option("--lr", r.adam.lr, "Learning rate")->capture_default_str();
  c->add_option("--beta1", r.adam.beta1, "Adam beta1")->capture_default_str();
  c->add_option("--beta2", r.adam.beta2, "Adam beta2")->capture_default_str();
  c->add_option("--eps", r.adam.eps, "Adam epsilon")->capture_default_str();
  c->add_option("--batch", r.batch_size, "Minibatch size")->capture_default_str();
  c->add_option("--micro-batch", r.micro_batch, "Samples per forward pass (memory only)")->capture_default_str();
  c->add_option("--epochs", r.epochs, "Training epochs (0 evaluates only)")->capture_default_str();
  c->add_option("--nb", r.nb, "Use nb * batch training samples (0 uses all)")->capture_default_str();
  c->add_flag("--time", r.record_time, "Record wall-clock seconds (makes output non-reproducible)");
  c->add_flag("-v,--verbose", o.verbose, "Per-epoch progress on stderr");
}

void add_output_options(CLI::App* c, Options& o) {
  c->add_option("--out", o.out_dir, "Output directory")->capture_default_str();
  c->add_option("--name", o.spec.name, "Run name (output file prefix)")->capture_default_str();
  c->add_flag("--overwrite", o.overwrite, "Replace existing outputs with the same name");
}

std::vector<std::uint32_t> parse_widths(const std::string& s, const std::string& what) {
  std::vector<std::uint32_t> out;
  for (const auto& item : split_list(s, what)) out.push_back(static_cast<std::uint32_t>(parse_uint(item, what)));
  return out;
}

// Folds the string options into the spec and validates every part.
void finalize(Options& o, bool needs_model) {
  ExperimentSpec& s = o.spec;
  if (!o.data_dir.empty()) {
    for (const CLI::Option* opt : o.generation_opts)
      if (opt->count() > 0)
        throw UsageError(opt->get_name() + " cannot be combined with --data (the dataset fixes it)");
    s.data_dir = o.data_dir;
    s.gen = read_manifest(*s.data_dir);
  } else {
    s.gen.seed = o.seed;
  }
  s.run.seed = o.seed;
  s.model.init_seed = o.seed;
  s.run.optimizer = parse_optimizer(o.opt);
  if (needs_model) {
    if (!classic_detector(o.model)) s.model.kind = parse_model_kind(o.model);
    s.model.aggregation = parse_aggregation(o.agg);
    s.model.pool_kind = parse_pool_kind(o.pool_kind);
    s.model.fcdnn_hidden = parse_widths(o.fcdnn_hidden, "fcdnn_hidden");
    s.model.csinet_channels = parse_widths(o.csinet_channels, "csinet_channels");
  }
  if (!s.data_dir && s.run.nb > 0) s.gen.n_train = s.run.nb * s.run.batch_size;
  s.gen.validate();
  if (needs_model) s.model.validate(s.gen.cfg);
  s.run.validate();
}

std::string run_id(const ExperimentSpec& spec) {
  return hex64(fnv1a64(hex64(config_hash(spec)) + ":" + std::to_string(spec.run.seed))).substr(0, 12);
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot write " + path.string());
  return f;
}

void prepare_outputs(const fs::path& dir, const std::string& name, bool overwrite) {
  const fs::path summary = dir / (name + ".summary.csv");
  if (!overwrite && fs::exists(summary))
    throw UsageError(summary.string() + " already exists; choose another --name or pass --overwrite");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create " + dir.string() + ": " + ec.message());
}

void write_run_manifest(const fs::path& path, const ExperimentSpec& spec, const KeyValues& extra) {
  std::ofstream f = open_output(path);
  f << "# sigt run manifest\n";
  KeyValues kv = describe(spec);
  kv.emplace_back("seed", std::to_string(spec.run.seed));
  kv.insert(kv.end(), extra.begin(), extra.end());
  kv.emplace_back("commit", commit_id());
  write_key_values(f, kv);
}

// ---- generate -------------------------------------------------------------

int cmd_generate(Options& o, std::ostream& out) {
  if (!o.data_dir.empty()) throw UsageError("generate does not take --data");
  if (o.format != "binary" && o.format != "csv") throw UsageError("format: expected binary or csv, got '" + o.format + "'");
  GenerationParams& g = o.spec.gen;
  g.seed = o.seed;
  g.validate();
  const fs::path dir = o.out_dir;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create " + dir.string() + ": " + ec.message());

  const GeneratedData d = generate_dataset(g);
  try {
    if (o.format == "csv") {
      write_dataset_csv(dir / "train.csv", d.train);
      write_dataset_csv(dir / "test.csv", d.test);
    } else {
      write_dataset(dir / "train.sigt", d.train);
      write_dataset(dir / "test.sigt", d.test);
    }
  } catch (const std::ios_base::failure& e) {
    throw DataError(std::string("writing dataset: ") + e.what());
  }
  std::ofstream m = open_output(dir / "manifest.txt");
  m << "# sigt dataset manifest (format version " << kDatasetVersion << ", commit " << commit_id() << ")\n";
  write_key_values(m, dataset_manifest(g));
  if (!m) throw DataError("cannot write " + (dir / "manifest.txt").string());
  out << "wrote " << d.train.size() << " train and " << d.test.size() << " test samples (" << g.cfg.describe()
      << ") to " << dir.string() << '\n';
  return kOk;
}

// ---- train ----------------------------------------------------------------

TrainResult run_one(ExperimentSpec& spec, const std::function<void(const EpochMetrics&)>& on_epoch,
                    std::unique_ptr<Model>* keep = nullptr) {
  const DataSplits data = load_data(spec);
  check_frame(data.train, spec.gen.cfg, "training set");
  check_frame(data.test, spec.gen.cfg, "test set");
  std::unique_ptr<Model> model = make_model(spec.gen.cfg, spec.model);
  TrainResult result = train(*model, data.train, data.test, spec.run, on_epoch);
  if (keep) *keep = std::move(model);
  return result;
}

void print_summary(std::ostream& out, const std::vector<Summary>& rows) {
  CsvWriter w(out);
  w.row(summary_header());
  for (const auto& s : rows) w.row(summary_row(s));
}

int cmd_train(Options& o, std::ostream& out, std::ostream& err) {
  if (classic_detector(o.model))
    throw UsageError("classical receivers are not trained; use `eval --receiver " + o.model + "` or a sweep");
  finalize(o, true);
  ExperimentSpec& spec = o.spec;
  const fs::path dir = o.out_dir;
  prepare_outputs(dir, spec.name, o.overwrite);

  const std::string id = run_id(spec);
  std::ofstream metrics = open_output(dir / (spec.name + ".metrics.csv"));
  CsvWriter mw(metrics);
  mw.row(metrics_header());
  std::unique_ptr<Model> model;
  const TrainResult result = run_one(
      spec,
      [&](const EpochMetrics& m) {
        mw.row(metrics_row(id, spec, m));
        metrics.flush();
        if (o.verbose)
          err << "epoch " << m.epoch << " loss " << m.train_loss << " train " << m.train_aacc << " test "
              << m.test_aacc << '\n';
      },
      &model);

  load_parameters(*model, result.best_params);
  save_checkpoint(dir / (spec.name + ".ckpt"), *model);
  write_run_manifest(dir / (spec.name + ".manifest.txt"), spec, {{"best_epoch", std::to_string(result.best_epoch)}});

  Summary s{id, spec, 1, result.final().train_aacc, result.final().test_aacc, result.best_test_aacc, "ok"};
  std::ostringstream text;
  print_summary(text, {s});
  open_output(dir / (spec.name + ".summary.csv")) << text.str();
  out << text.str();
  return kOk;
}

// ---- classical receivers ----------------------------------------------------

std::optional<rx::Detector> classic_detector(const std::string& name) {
  if (name == "zf") return rx::Detector::zf;
  if (name == "mmse" || name == "classic") return rx::Detector::mmse;
  return std::nullopt;
}

// Pilots are not stored, so frames are regenerated from the generation
// parameters; their data part is bit-identical to the stored samples.
double classic_aacc(const GenerationParams& gen, const std::vector<ChannelRealization>& pool, Split split,
                    const Dataset& stored, rx::Detector mode) {
  const double nv = noise_variance(gen.cfg, gen.snr_db);
  std::size_t wrong = 0, bits = 0;
  for (std::size_t i = 0; i < stored.size(); ++i) {
    const Frame f = regenerate_frame(gen, pool, split, i, true);
    if (f.sample.x != stored.samples[i].x)
      throw DataError("sample " + std::to_string(i) + " does not match its generation parameters");
    const Bits got = rx::receive(gen.cfg, f, mode, nv);
    for (std::size_t b = 0; b < got.size(); ++b) wrong += got[b] != f.sample.x[b];
    bits += got.size();
  }
  return 1.0 - static_cast<double>(wrong) / static_cast<double>(bits);
}

// ---- eval -----------------------------------------------------------------

int cmd_eval(Options& o, std::ostream& out) {
  const auto detector = classic_detector(o.receiver);
  const bool classic = detector.has_value();
  if (!classic && o.receiver != "model")
    throw UsageError("receiver: unknown receiver '" + o.receiver + "' (model|classic|zf|mmse)");
  if (classic) {
    if (!o.checkpoint.empty()) throw UsageError("--checkpoint only applies to --receiver model");
  } else if (o.checkpoint.empty()) {
    throw UsageError("eval needs --checkpoint (or --receiver classic|zf|mmse)");
  }
  finalize(o, false);
  ExperimentSpec& spec = o.spec;
  const DataSplits data = load_data(spec);
  const Dataset& test = data.test;

  KeyValues kv = dataset_manifest(spec.gen);
  std::string loss_field;
  double acc = 0.0;
  if (classic) {
    acc = classic_aacc(spec.gen, make_pool(spec.gen), Split::test, test, *detector);
    kv.emplace_back("receiver", o.receiver);
  } else {
    std::unique_ptr<Model> model;
    try {
      model = load_checkpoint(fs::path(o.checkpoint));
    } catch (const io::FormatError& e) {
      throw DataError(e.what());
    }
    check_frame(test, model->frame(), "test set");
    const Evaluation ev = evaluate(*model, test);
    loss_field = format_double(ev.loss);
    acc = ev.aacc;
    spec.model = model->config();
    for (const auto& p : describe(spec)) kv.push_back(p);
  }
  std::string canon;
  for (const auto& [k, v] : kv) canon += k + '=' + v + '\n';

  CsvWriter w(out);
  w.row({"receiver", "samples", "snr_db", "test_loss", "test_aacc", "ber", "seed", "config_hash", "commit"});
  w.row({classic ? o.receiver : to_string(spec.model.kind), std::to_string(test.size()),
         format_double(spec.gen.snr_db), loss_field, format_double(acc), format_double(1.0 - acc),
         std::to_string(spec.gen.seed), hex64(fnv1a64(canon)), commit_id()});
  return kOk;
}

// ---- sweep ----------------------------------------------------------------

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

void apply_axis(ExperimentSpec& s, const std::string& axis, const std::string& value, bool from_files) {
  if (axis == "snr") {
    if (from_files) throw UsageError("axis snr needs in-memory generation; drop --data");
    s.gen.snr_db = parse_double(value, "snr");
  } else if (axis == "nb") {
    s.run.nb = parse_uint(value, "nb");
    if (!from_files && s.run.nb > 0) s.gen.n_train = s.run.nb * s.run.batch_size;
  } else if (axis == "model") {
    s.model.kind = parse_model_kind(value);
  } else if (axis == "aggregation") {
    s.model.aggregation = parse_aggregation(value);
  } else if (axis == "optimizer") {
    s.run.optimizer = parse_optimizer(value);
  } else if (axis == "dropout") {
    s.model.dropout_p = parse_double(value, "dropout");
  } else {
    throw UsageError("axis: unknown axis '" + axis + "' (snr|nb|model|aggregation|optimizer|dropout)");
  }
}

int cmd_sweep(Options& o, std::ostream& out, std::ostream& err) {
  if (o.axis.empty()) throw UsageError("sweep needs --axis");
  finalize(o, true);
  if (o.seeds < 1) throw UsageError("seeds: need at least one seed");
  const std::vector<std::string> values = split_list(o.values, "values");
  std::vector<std::string> models = o.models.empty() ? std::vector<std::string>{o.model} : split_list(o.models, "models");
  if (o.axis == "model") {
    if (!o.models.empty()) throw UsageError("--models cannot be combined with --axis model");
    models = {""};
  }

  // Build and validate every cell before anything is written. Classical
  // receivers (classic|zf|mmse) may appear among the models; they are
  // evaluated on both splits instead of trained.
  std::vector<ExperimentSpec> cells;
  for (const auto& value : values)
    for (const auto& model : models) {
      ExperimentSpec s = o.spec;
      const std::string name = o.axis == "model" ? value : model;
      const bool classic = classic_detector(name).has_value();
      if (!classic) s.model.kind = parse_model_kind(name);
      if (o.axis != "model") apply_axis(s, o.axis, value, s.data_dir.has_value());
      s.gen.validate();
      if (!classic) s.model.validate(s.gen.cfg);
      s.run.validate();
      if (classic) s.receiver = name;
      cells.push_back(s);
    }

  const fs::path dir = o.out_dir;
  prepare_outputs(dir, o.spec.name, o.overwrite);
  std::ofstream metrics = open_output(dir / (o.spec.name + ".metrics.csv"));
  CsvWriter mw(metrics);
  mw.row(metrics_header());

  std::vector<Summary> rows;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    Summary sum{run_id(cells[c]), cells[c], o.seeds, 0, 0, 0, "ok"};
    std::vector<double> train_acc, test_acc, best_acc;
    for (std::size_t r = 0; r < o.seeds; ++r) {
      ExperimentSpec rep = cells[c];
      if (!rep.data_dir) rep.gen.seed += r;
      rep.run.seed += r;
      rep.model.init_seed += r;
      const std::string id = run_id(rep);
      try {
        if (const auto det = classic_detector(rep.receiver)) {
          const DataSplits data = load_data(rep);
          const auto pool = make_pool(rep.gen);
          train_acc.push_back(classic_aacc(rep.gen, pool, Split::train, data.train, *det));
          test_acc.push_back(classic_aacc(rep.gen, pool, Split::test, data.test, *det));
          best_acc.push_back(test_acc.back());
          continue;
        }
        const TrainResult res = run_one(rep, [&](const EpochMetrics& m) {
          mw.row(metrics_row(id, rep, m));
          if (o.verbose)
            err << "cell " << c << " seed " << rep.run.seed << " epoch " << m.epoch << " test " << m.test_aacc
                << '\n';
        });
        train_acc.push_back(res.final().train_aacc);
        test_acc.push_back(res.final().test_aacc);
        best_acc.push_back(res.best_test_aacc);
      } catch (const std::exception& e) {
        sum.status = "failed (seed " + std::to_string(rep.run.seed) + "): " + e.what();
        err << "sweep cell " << c << ": " << sum.status << '\n';
        break;
      }
    }
    if (sum.status == "ok") {
      sum.train_aacc = median(train_acc);
      sum.test_aacc = median(test_acc);
      sum.best_test_aacc = median(best_acc);
    }
    rows.push_back(sum);
  }
  metrics.flush();

  write_run_manifest(dir / (o.spec.name + ".manifest.txt"), o.spec,
                     {{"axis", o.axis}, {"values", o.values}, {"models", o.models}, {"seeds", std::to_string(o.seeds)}});
  std::ostringstream text;
  print_summary(text, rows);
  open_output(dir / (o.spec.name + ".summary.csv")) << text.str();
  out << text.str();
  return kOk;
}

// Fills options not given on the command line from a flat key = value
// file. Keys are long option names; '_' and '-' are interchangeable.
void apply_config_file(CLI::App* sub, const std::string& file) {
  for (const auto& [key, value] : read_key_values(file)) {
    std::string name = key;
    std::replace(name.begin(), name.end(), '_', '-');
    CLI::Option* opt = sub->get_option_no_throw("--" + name);
    if (!opt || name == "config") throw UsageError(file + ": unknown key '" + key + "' for " + sub->get_name());
    if (opt->count() > 0) continue;
    opt->add_result(value);
    try {
      opt->run_callback();
    } catch (const CLI::Error& e) {
      throw UsageError(file + ": " + key + ": " + e.what());
    }
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"SigT MIMO-OFDM receiver: data generation, training, evaluation and sweeps", "sigt"};
  app.require_subcommand(1);
  Options o;

  std::string config_file;
  auto config_opt = [&](CLI::App* c) {
    c->add_option("--config", config_file, "Flat `key = value` file of long option names; flags on the command line win");
  };

  CLI::App* gen = app.add_subcommand("generate", "Write train/test dataset files and a manifest");
  config_opt(gen);
  add_frame_options(gen, o);
  gen->add_option("--out", o.out_dir, "Output directory")->required();
  gen->add_option("--format", o.format, "binary (readable by train/eval) | csv (export)")->capture_default_str();

  CLI::App* tr = app.add_subcommand("train", "Train a receiver; write per-epoch metrics, summary and checkpoint");
  config_opt(tr);
  add_frame_options(tr, o);
  add_data_option(tr, o);
  add_model_options(tr, o);
  add_run_options(tr, o);
  add_output_options(tr, o);

  CLI::App* ev = app.add_subcommand("eval", "Test-set AACC of a checkpoint or a classical receiver");
  config_opt(ev);
  add_frame_options(ev, o);
  add_data_option(ev, o);
  ev->add_option("--checkpoint", o.checkpoint, "Checkpoint written by train");
  ev->add_option("--receiver", o.receiver, "model | classic (= mmse) | zf | mmse")->capture_default_str();

  CLI::App* sw = app.add_subcommand("sweep", "Train the cross-product of an axis and models; median over seeds");
  config_opt(sw);
  add_frame_options(sw, o);
  add_data_option(sw, o);
  add_model_options(sw, o);
  add_run_options(sw, o);
  add_output_options(sw, o);
  sw->add_option("--axis", o.axis, "snr | nb | model | aggregation | optimizer | dropout");
  sw->add_option("--values", o.values, "Comma-separated axis values");
  sw->add_option("--models", o.models,
                 "Comma-separated models crossed with the axis (classic, zf, mmse evaluate LS-pilot receivers)");
  sw->add_option("--seeds", o.seeds, "Replicates per cell (seed, seed+1, ...)")->capture_default_str();

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    if (!config_file.empty()) apply_config_file(sub, config_file);
    if (gen->parsed()) return cmd_generate(o, out);
    if (tr->parsed()) return cmd_train(o, out, err);
    if (ev->parsed()) return cmd_eval(o, out);
    return cmd_sweep(o, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const ConfigError& e) {
    err << "invalid configuration: " << e.what() << '\n';
    return kUsage;
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << '\n';
    return kNumeric;
  } catch (const std::exception& e) {
    err << "data error: " << e.what() << '\n';
    return kData;
  }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  return run(std::vector<std::string>(argv + 1, argv + argc), out, err);
}

}  // namespace sigt::cli
