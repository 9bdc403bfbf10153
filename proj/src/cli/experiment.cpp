#include "sigt/cli/experiment.hpp"

#include "sigt/cli/csv.hpp"
#include "sigt/phy/dataset_io.hpp"

#ifndef SIGT_COMMIT_ID
#define SIGT_COMMIT_ID "unversioned"
#endif

namespace sigt::cli {

const char* commit_id() { return SIGT_COMMIT_ID; }

namespace {

std::string join(const std::vector<std::uint32_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

std::string num(std::uint64_t v) { return std::to_string(v); }

}  // namespace

KeyValues dataset_manifest(const GenerationParams& gen) {
  const FrameConfig& f = gen.cfg;
  return {{"ns", num(f.n_s)},     {"nt", num(f.n_t)},         {"nr", num(f.n_r)},
          {"ni", num(f.n_i)},     {"cp", num(f.cp_len)},      {"taps", num(f.n_taps)},
          {"qam_bits", num(f.qam_bits)}, {"snr", format_double(gen.snr_db)}, {"pool", num(gen.pool_size)},
          {"train", num(gen.n_train)}, {"test", num(gen.n_test)}, {"seed", num(gen.seed)}};
}

GenerationParams read_manifest(const std::filesystem::path& dir) {
  const auto kv = read_key_values(dir / "manifest.txt");
  auto get = [&](const std::string& key) -> const std::string& {
    const auto it = kv.find(key);
    if (it == kv.end()) throw DataError((dir / "manifest.txt").string() + ": missing key '" + key + "'");
    return it->second;
  };
  auto u32 = [&](const std::string& key) {
    try {
      return static_cast<std::uint32_t>(parse_uint(get(key), key));
    } catch (const UsageError& e) {
      throw DataError((dir / "manifest.txt").string() + ": " + e.what());
    }
  };
  GenerationParams g;
  g.cfg.n_s = u32("ns");
  g.cfg.n_t = u32("nt");
  g.cfg.n_r = u32("nr");
  g.cfg.n_i = u32("ni");
  g.cfg.cp_len = u32("cp");
  g.cfg.n_taps = u32("taps");
  g.cfg.qam_bits = u32("qam_bits");
  g.pool_size = u32("pool");
  g.n_train = u32("train");
  g.n_test = u32("test");
  try {
    g.snr_db = parse_double(get("snr"), "snr");
    g.seed = parse_uint(get("seed"), "seed");
  } catch (const UsageError& e) {
    throw DataError((dir / "manifest.txt").string() + ": " + e.what());
  }
  return g;
}

KeyValues describe(const ExperimentSpec& spec) {
  KeyValues kv;
  for (const auto& [k, v] : dataset_manifest(spec.gen)) kv.emplace_back(k == "seed" ? "data_seed" : k, v);
  if (!spec.receiver.empty()) {
    kv.emplace_back("model", spec.receiver);
    return kv;
  }
  const ModelConfig& m = spec.model;
  kv.insert(kv.end(), {{"model", to_string(m.kind)},
                       {"depth", num(m.depth)},
                       {"heads", num(m.heads)},
                       {"d_model", num(m.d_model)},
                       {"d_ff", num(m.d_ff)},
                       {"mlp_hidden", num(m.mlp_hidden)},
                       {"agg", to_string(m.aggregation)},
                       {"pool_kind", to_string(m.pool_kind)},
                       {"fcdnn_hidden", join(m.fcdnn_hidden)},
                       {"csinet_blocks", num(m.csinet_blocks)},
                       {"csinet_channels", join(m.csinet_channels)},
                       {"dropout", format_double(m.dropout_p)},
                       {"init_seed", num(m.init_seed)}});
  const RunConfig& r = spec.run;
  kv.insert(kv.end(), {{"opt", to_string(r.optimizer)},
                       {"lr", format_double(r.adam.lr)},
                       {"beta1", format_double(r.adam.beta1)},
                       {"beta2", format_double(r.adam.beta2)},
                       {"eps", format_double(r.adam.eps)},
                       {"batch", num(r.batch_size)},
                       {"epochs", num(r.epochs)},
                       {"nb", num(r.nb)}});
  // micro_batch and record_time do not change results (seconds aside).
  return kv;
}

std::uint64_t config_hash(const ExperimentSpec& spec) {
  std::string canon;
  for (const auto& [k, v] : describe(spec)) canon += k + '=' + v + '\n';
  return fnv1a64(canon);
}

void check_frame(const Dataset& ds, const FrameConfig& frame, const std::string& what) {
  if (!(ds.cfg == frame))
    throw DataError(what + " frame (" + ds.cfg.describe() + ") is incompatible with the configured frame (" +
                    frame.describe() + ")");
}

DataSplits load_data(ExperimentSpec& spec) {
  if (!spec.data_dir) {
    GenerationParams g = spec.gen;
    GeneratedData d = generate_dataset(g);
    return {std::move(d.train), std::move(d.test)};
  }
  const auto& dir = *spec.data_dir;
  spec.gen = read_manifest(dir);
  DataSplits out;
  try {
    out.train = read_dataset(dir / "train.sigt");
    out.test = read_dataset(dir / "test.sigt");
  } catch (const io::FormatError& e) {
    throw DataError(e.what());
  }
  check_frame(out.train, spec.gen.cfg, (dir / "train.sigt").string());
  check_frame(out.test, spec.gen.cfg, (dir / "test.sigt").string());
  if (out.train.size() != spec.gen.n_train || out.test.size() != spec.gen.n_test)
    throw DataError(dir.string() + ": sample counts disagree with manifest.txt");
  return out;
}

std::vector<std::string> summary_header() {
  return {"run_id", "model",     "snr_db",     "nb",         "agg",            "opt",    "dropout", "epochs",
          "seeds",  "train_aacc", "test_aacc", "best_test_aacc", "status", "seed",    "config_hash", "commit"};
}

std::vector<std::string> summary_row(const Summary& s) {
  const ExperimentSpec& e = s.spec;
  const bool ok = s.status == "ok";
  auto metric = [&](double v) { return ok ? format_double(v) : std::string(); };
  return {s.run_id,
          e.receiver.empty() ? to_string(e.model.kind) : e.receiver,
          format_double(e.gen.snr_db),
          num(e.run.nb),
          to_string(e.model.aggregation),
          to_string(e.run.optimizer),
          format_double(e.model.dropout_p),
          num(e.run.epochs),
          num(s.seeds),
          metric(s.train_aacc),
          metric(s.test_aacc),
          metric(s.best_test_aacc),
          s.status,
          num(e.run.seed),
          hex64(config_hash(e)),
          commit_id()};
}

std::vector<std::string> metrics_header() {
  return {"run_id", "epoch", "train_loss", "train_aacc", "test_aacc", "seconds", "seed", "config_hash", "commit"};
}

std::vector<std::string> metrics_row(const std::string& run_id, const ExperimentSpec& spec, const EpochMetrics& m) {
  return {run_id,
          num(m.epoch),
          format_double(m.train_loss),
          format_double(m.train_aacc),
          format_double(m.test_aacc),
          format_double(m.seconds),
          num(spec.run.seed),
          hex64(config_hash(spec)),
          commit_id()};
}

}  // namespace sigt::cli
