// Acceptance suite: one PASS/FAIL/NOT RUN line per criterion.
//
//   acceptance [--long] [--only 1,4,8]
//
// Criteria 5-7 train default-size models on thousands of samples for 200
// epochs and take many CPU hours on one core; they run only with --long or
// SIGT_ACCEPTANCE_LONG=1.

#include <CLI11.hpp>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "gradcheck.hpp"
#include "sigt/cli/commands.hpp"
#include "sigt/model/factory.hpp"
#include "sigt/model/sigt.hpp"
#include "sigt/rx/classic.hpp"
#include "sigt/tensor/attention.hpp"
#include "sigt/train/loss.hpp"
#include "sigt/train/trainer.hpp"

namespace sigt::acceptance {
namespace {

// ---- pinned tolerances and budgets -----------------------------------------
constexpr double kGradRelTol = 1e-4;
constexpr double kGradBudget = 120.0;
constexpr std::size_t kPhyFrames = 1000;
constexpr std::size_t kAwgnBits = 1000000;
constexpr double kAwgnSnrDb = 10.0;
constexpr double kAwgnRelTol = 0.10;
constexpr double kPhyBudget = 120.0;
constexpr std::size_t kPropertyCases = 100;
constexpr double kAttentionTol = 1e-12;
constexpr double kAttentionBudget = 60.0;
constexpr std::size_t kOverfitSamples = 64;
constexpr std::size_t kOverfitEpochs = 300;
constexpr double kOverfitAacc = 0.99;
constexpr double kOverfitBudget = 15 * 60.0;
constexpr std::size_t kDeskPool = 50;
constexpr std::size_t kDeskTrain = 4096;
constexpr std::size_t kDeskTest = 512;
constexpr double kDeskSnrDb = 10.0;
constexpr std::size_t kDeskEpochs = 200;
constexpr double kDeskAacc = 0.60;
constexpr double kDeskBudget = 2 * 3600.0;
constexpr std::size_t kSeeds = 3;
constexpr double kOrderingMargin = 0.02;
constexpr double kLstmChanceBand = 0.05;
constexpr double kTrendTolerance = 0.01;
constexpr std::size_t kTrendBatch = 64;

using Clock = std::chrono::steady_clock;
using testing::check_gradients;
using testing::random_projection;
using testing::random_tensor;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

FrameConfig mini_frame() {
  FrameConfig f;
  f.n_s = 8;
  f.n_t = 2;
  f.n_r = 4;
  f.cp_len = 4;
  f.n_taps = 2;
  return f;
}

ModelConfig mini_model(ModelKind kind) {
  ModelConfig c;
  c.kind = kind;
  c.depth = 2;
  c.heads = 2;
  c.d_model = 8;
  c.d_ff = 12;
  c.mlp_hidden = 10;
  c.fcdnn_hidden = {6, 5, 4};
  c.csinet_channels = {3, 4};
  c.init_seed = 3;
  return c;
}

// ---- 1. gradient integrity ---------------------------------------------------

Outcome gradient_integrity() {
  std::mt19937_64 rng(1);
  double worst = 0.0;
  std::string worst_name;
  std::size_t checks = 0, coords = 0;
  auto record = [&](const std::string& name, const testing::GradCheckResult& r) {
    ++checks;
    coords += r.checked;
    if (worst_name.empty() || r.max_rel_error > worst) {
      worst = r.max_rel_error;
      worst_name = name + " " + r.worst;
    }
  };
  auto t = [&](Shape s) { return random_tensor(std::move(s), rng); };
  using Fn = std::function<Tensor()>;
  auto op = [&](const std::string& name, const Fn& f, std::vector<Tensor> in) {
    record(name, check_gradients([&] { return random_projection(f(), checks + 1); }, std::move(in)));
  };

  for (const Shape& s : {Shape{5}, Shape{3, 4}, Shape{2, 3, 2}}) {
    Tensor a = t(s), b = t(s);
    op("add", [&] { return add(a, b); }, {a, b});
    op("sub", [&] { return sub(a, b); }, {a, b});
    op("mul", [&] { return mul(a, b); }, {a, b});
    op("scale", [&] { return scale(a, -1.7); }, {a});
    op("relu", [&] { return relu(a); }, {a});
    op("sigmoid", [&] { return sigmoid(a); }, {a});
    op("tanh", [&] { return tanh(a); }, {a});
    op("sum", [&] { return scale(sum(a), 1.0); }, {a});
    op("mean", [&] { return scale(mean(a), 1.0); }, {a});
    op("sum_axis", [&] { return sum_axis(a, 0); }, {a});
    op("softmax", [&] { return softmax(a, s.size() - 1); }, {a});
    op("reshape", [&] { return reshape(a, {a.numel()}); }, {a});
    Tensor bias = t({s.back()}), gain = t({s.back()});
    op("add_bias", [&] { return add_bias(a, bias); }, {a, bias});
    op("layer_norm", [&] { return layer_norm(a, gain, bias); }, {a, gain, bias});
    op("concat", [&] { return concat({a, b}, 0); }, {a, b});
    op("slice", [&] { return slice(a, 0, 1, s[0] - 1); }, {a});
    op("dropout", [&] {
      Rng mask(99);  // same mask on every evaluation
      return dropout(a, 0.3, true, mask);
    }, {a});
  }
  {
    Tensor a = t({3, 4}), b = t({4, 2}), w = t({5, 4}), bias = t({5});
    op("matmul", [&] { return matmul(a, b); }, {a, b});
    op("transpose", [&] { return transpose(a); }, {a});
    op("linear", [&] { return linear(a, w, bias); }, {a, w, bias});
    Tensor x = t({2, 3, 4}), y = t({2, 4, 3}), z = t({2, 5, 4});
    op("bmm", [&] { return bmm(x, y); }, {x, y});
    op("bmm_t", [&] { return bmm(x, z, true); }, {x, z});
    op("permute", [&] { return permute(x, {2, 0, 1}); }, {x});
    Tensor gx = t({3, 2, 4}), gw = t({3, 5, 4}), gb = t({3, 5});
    op("grouped_linear", [&] { return grouped_linear(gx, gw, gb); }, {gx, gw, gb});
    Tensor cx = t({2, 7, 3}), cw = t({4, 3, 3}), cb = t({4});
    op("conv1d_tokens", [&] { return conv1d_tokens(cx, cw, cb, 2); }, {cx, cw, cb});
    op("pool1d_avg", [&] { return pool1d_tokens(cx, 2, 2, PoolKind::avg); }, {cx});
    op("pool1d_max", [&] { return pool1d_tokens(cx, 2, 2, PoolKind::max); }, {cx});
    Tensor ix = t({2, 2, 4, 3}), iw = t({3, 2, 3, 3}), ib = t({3});
    op("conv2d_same", [&] { return conv2d_same(ix, iw, ib); }, {ix, iw, ib});
    AttentionParams p;
    std::vector<Tensor> leaves;
    for (int h = 0; h < 2; ++h) {
      p.heads.push_back({t({3, 4}), t({3, 4}), t({2, 4})});
      leaves.insert(leaves.end(), {p.heads.back().w_query, p.heads.back().w_key, p.heads.back().w_value});
    }
    p.w_out = t({4, 4});
    Tensor tokens = t({2, 5, 4});
    leaves.insert(leaves.end(), {p.w_out, tokens});
    op("self_attention", [&] { return self_attention(tokens, p.heads[0]); },
       {tokens, p.heads[0].w_query, p.heads[0].w_key, p.heads[0].w_value});
    op("multi_head_attention", [&] { return multi_head_attention(tokens, p); }, leaves);
    Tensor pred = t({2, 3}), target = Tensor::from_data({2, 3}, {0, 1, 1, 0, 0, 1});
    record("mse_loss", check_gradients([&] { return mse_loss(pred, target); }, {pred}));
  }

  const FrameConfig f = mini_frame();
  std::vector<std::pair<std::string, ModelConfig>> models{{"SigT(conv)", mini_model(ModelKind::sigt)},
                                                          {"FC-DNN", mini_model(ModelKind::fcdnn)},
                                                          {"CSINet", mini_model(ModelKind::csinet)},
                                                          {"LSTM", mini_model(ModelKind::lstm)}};
  models.push_back({"SigT(pool)", mini_model(ModelKind::sigt)});
  models.back().second.aggregation = Aggregation::pool;
  for (const auto& [name, cfg] : models) {
    auto m = make_model(f, cfg);
    const Tensor y = random_tensor({2, f.n_s, f.n_r, f.n_i, 2}, rng, -1.5, 1.5, false);
    std::vector<double> bits(2 * f.x_size());
    for (double& b : bits) b = double(rng() & 1u);
    const Tensor x = Tensor::from_data({2, f.n_s, f.n_t, 2}, bits);
    // Zero biases make exact ReLU kinks (a group whose inputs are all
    // inactive sits at 0), where central differences are meaningless; check
    // at a generic point nearby instead.
    std::uniform_real_distribution<double> jitter(-0.1, 0.1);
    std::vector<Tensor> leaves;
    for (auto& p : m->parameters()) {
      for (double& v : p.tensor.mutable_data()) v += jitter(rng);
      leaves.push_back(p.tensor);
    }
    // Every coordinate of every parameter.
    record(name, check_gradients([&] { return mse_loss(m->forward(y), x); }, leaves));
  }

  return {worst < kGradRelTol, std::to_string(checks) + " checks (" + std::to_string(coords) +
                                   " coordinates, 5 model variants), max rel err " + fmt("%.2e", worst) + " < " +
                                   fmt("%.0e", kGradRelTol) + " [worst: " + worst_name + "]"};
}

// ---- 2. PHY oracle -------------------------------------------------------------

Outcome phy_oracle() {
  GenerationParams p;  // default frame
  p.pool_size = 50;
  p.snr_db = INFINITY;
  p.seed = 2;
  const auto pool = make_pool(p);
  std::size_t perfect_errors = 0, ls_errors = 0, bits = 0;
  for (std::size_t i = 0; i < kPhyFrames; ++i) {
    const Frame fr = regenerate_frame(p, pool, Split::test, i, true);
    const rx::ChannelEstimate csi = rx::perfect_csi(pool.at(fr.sample.channel_id), p.cfg.n_s);
    const Bits a = rx::qam_demodulate(rx::detect_frame(p.cfg, fr.grid, csi, rx::Detector::zf, 0.0));
    const Bits b = rx::receive(p.cfg, fr, rx::Detector::zf, 0.0);
    for (std::size_t k = 0; k < a.size(); ++k) {
      perfect_errors += a[k] != fr.sample.x[k];
      ls_errors += b[k] != fr.sample.x[k];
    }
    bits += a.size();
  }

  FrameConfig c;
  c.n_s = 256;
  c.n_t = 1;
  c.n_r = 1;
  c.n_taps = 1;
  const ChannelRealization chan = identity_channel(c);
  std::mt19937_64 rng(3);
  std::size_t awgn_errors = 0, awgn_bits = 0;
  while (awgn_bits < kAwgnBits) {
    const Frame fr = simulate_frame(c, chan, kAwgnSnrDb, rng);
    const Bits got = rx::qam_demodulate(rx::detect_frame(c, fr.grid, rx::perfect_csi(chan, c.n_s), rx::Detector::zf, 0.0));
    for (std::size_t k = 0; k < got.size(); ++k) awgn_errors += got[k] != fr.sample.x[k];
    awgn_bits += got.size();
  }
  // Gray QPSK at Es/N0 = snr: per-bit error Q(sqrt(snr)).
  const double theory = 0.5 * std::erfc(std::sqrt(std::pow(10.0, kAwgnSnrDb / 10.0)) / std::sqrt(2.0));
  const double ber = double(awgn_errors) / double(awgn_bits);
  const double rel = std::abs(ber - theory) / theory;
  const bool pass = perfect_errors == 0 && ls_errors == 0 && rel <= kAwgnRelTol;
  return {pass, "noiseless " + std::to_string(kPhyFrames) + " frames / " + std::to_string(bits) +
                    " bits: " + std::to_string(perfect_errors) + " errors (perfect CSI), " +
                    std::to_string(ls_errors) + " errors (LS); AWGN BER " + fmt("%.4e", ber) + " vs Q(sqrt(SNR)) " +
                    fmt("%.4e", theory) + " (" + fmt("%.1f", 100 * rel) + "% <= " +
                    fmt("%.0f", 100 * kAwgnRelTol) + "%, " + std::to_string(awgn_bits) + " bits)"};
}

// ---- 3. attention invariants ---------------------------------------------------

Tensor permute_rows(const Tensor& x, const std::vector<std::size_t>& sigma, std::size_t axis) {
  std::vector<Tensor> parts;
  for (std::size_t i : sigma) parts.push_back(slice(x, axis, i, 1));
  return concat(parts, axis);
}

Outcome attention_invariants() {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<std::size_t> pick(1, 9);
  double softmax_err = 0, single_err = 0, perm_err = 0;

  for (std::size_t c = 0; c < kPropertyCases; ++c) {
    const Shape s{pick(rng), pick(rng), pick(rng)};
    const std::size_t axis = rng() % 3;
    const Tensor x = random_tensor(s, rng, -30, 30, false);
    const Tensor totals = sum_axis(softmax(x, axis), axis);
    for (double v : Tensor(totals).data()) softmax_err = std::max(softmax_err, std::abs(v - 1.0));
  }

  for (std::size_t c = 0; c < kPropertyCases; ++c) {
    const std::size_t d = pick(rng), dk = pick(rng), dv = pick(rng);
    const AttentionHead h{random_tensor({dk, d}, rng, -1, 1, false), random_tensor({dk, d}, rng, -1, 1, false),
                          random_tensor({dv, d}, rng, -1, 1, false)};
    const Tensor tok = random_tensor({1, d}, rng, -1, 1, false);
    const Tensor out = self_attention(tok, h);
    // Oracle: with one token the softmax weight is exactly 1, so out = W^V t.
    for (std::size_t i = 0; i < dv; ++i) {
      double ref = 0;
      for (std::size_t j = 0; j < d; ++j) ref += h.w_value.at({i, j}) * tok.at({0, j});
      single_err = std::max(single_err, std::abs(out.at({0, i}) - ref));
    }
  }

  // Default-size encoder: 5 initialisations x 20 permutations.
  const FrameConfig f;
  for (std::size_t c = 0; c < kPropertyCases; ++c) {
    static std::unique_ptr<SigT> model;
    if (c % 20 == 0) {
      ModelConfig mc;
      mc.init_seed = 100 + c;
      model = std::make_unique<SigT>(f, mc);
    }
    const Tensor tok = tokenize(random_tensor({1, f.n_s, f.n_r, f.n_i, 2}, rng, -2, 2, false));
    std::vector<std::size_t> sigma(f.n_r);
    std::iota(sigma.begin(), sigma.end(), 0);
    std::shuffle(sigma.begin(), sigma.end(), rng);
    NoGradGuard no_grad;
    const Tensor lhs = model->backbone(permute_rows(tok, sigma, 1));
    const Tensor rhs = permute_rows(model->backbone(tok), sigma, 1);
    for (std::size_t i = 0; i < lhs.numel(); ++i)
      perm_err = std::max(perm_err, std::abs(lhs.data()[i] - rhs.data()[i]));
  }
  const bool pass = softmax_err <= kAttentionTol && single_err <= kAttentionTol && perm_err <= kAttentionTol;
  return {pass, std::to_string(kPropertyCases) + " cases each: softmax |sum-1| " + fmt("%.1e", softmax_err) +
                    ", single-token |out - W^V t| " + fmt("%.1e", single_err) + ", encoder permutation " +
                    fmt("%.1e", perm_err) + " (tol " + fmt("%.0e", kAttentionTol) + ", d_model 512)"};
}

// ---- 4. overfit smoke test ------------------------------------------------------

struct Reached {
  EpochMetrics at;
};

Outcome overfit() {
  GenerationParams g;  // default frame
  g.pool_size = 1;
  g.n_train = kOverfitSamples;
  g.n_test = 1;  // unused by the criterion
  g.snr_db = INFINITY;
  g.seed = 4;
  const GeneratedData data = generate_dataset(g);
  auto model = make_model(g.cfg, ModelConfig{});
  RunConfig run;
  run.epochs = kOverfitEpochs;
  run.seed = 4;
  double best = 0.0;
  try {
    train(*model, data.train, data.test, run, [&](const EpochMetrics& m) {
      best = std::max(best, m.train_aacc);
      if (m.train_aacc >= kOverfitAacc) throw Reached{m};
    });
  } catch (const Reached& r) {
    return {true, "default SigT, " + std::to_string(kOverfitSamples) + " noiseless samples, 1 channel: train AACC " +
                      fmt("%.4f", r.at.train_aacc) + " >= " + fmt("%.2f", kOverfitAacc) + " at epoch " +
                      std::to_string(r.at.epoch) + " (limit " + std::to_string(kOverfitEpochs) + ")"};
  }
  return {false, "train AACC peaked at " + fmt("%.4f", best) + " < " + fmt("%.2f", kOverfitAacc) + " after " +
                     std::to_string(kOverfitEpochs) + " epochs"};
}

// ---- 5-7. desk-scale learning ----------------------------------------------------

struct DeskKey {
  ModelKind kind = ModelKind::sigt;
  Aggregation agg = Aggregation::conv;
  OptimizerKind opt = OptimizerKind::adam;
  std::size_t nb = 0;
  std::uint64_t seed = 1;
  auto operator<=>(const DeskKey&) const = default;
};

struct DeskResult {
  double final_test = 0.0;
  double best_test = 0.0;
};

std::map<DeskKey, DeskResult>& desk_cache() {
  static std::map<DeskKey, DeskResult> cache;
  return cache;
}

DeskResult desk_run(const DeskKey& k) {
  auto& cache = desk_cache();
  if (auto it = cache.find(k); it != cache.end()) return it->second;
  GenerationParams g;
  g.pool_size = kDeskPool;
  g.n_train = k.nb > 0 ? k.nb * kTrendBatch : kDeskTrain;
  g.n_test = kDeskTest;
  g.snr_db = kDeskSnrDb;
  g.seed = k.seed;
  const GeneratedData data = generate_dataset(g);
  ModelConfig mc;
  mc.kind = k.kind;
  mc.aggregation = k.agg;
  mc.init_seed = k.seed;
  auto model = make_model(g.cfg, mc);
  RunConfig run;
  run.optimizer = k.opt;
  run.epochs = kDeskEpochs;
  run.seed = k.seed;
  if (k.nb > 0) {
    run.batch_size = kTrendBatch;
    run.nb = k.nb;
  }
  const TrainResult r = train(*model, data.train, data.test, run);
  return cache[k] = {r.final().test_aacc, r.best_test_aacc};
}

double median_over_seeds(DeskKey k, bool best) {
  std::vector<double> v;
  for (std::uint64_t s = 1; s <= kSeeds; ++s) {
    k.seed = s;
    const DeskResult r = desk_run(k);
    v.push_back(best ? r.best_test : r.final_test);
  }
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

Outcome desk_learning() {
  const auto t0 = Clock::now();
  const double m = median_over_seeds({}, true);
  const double secs = seconds_since(t0);
  const bool pass = m >= kDeskAacc && secs <= kDeskBudget;
  return {pass, "SigT median best test AACC " + fmt("%.4f", m) + " (>= " + fmt("%.2f", kDeskAacc) +
                    ") within " + std::to_string(kDeskEpochs) + " epochs, " + fmt("%.0f", secs) + " s (budget " +
                    fmt("%.0f", kDeskBudget) + " s)"};
}

Outcome orderings() {
  const double sigt = median_over_seeds({}, false);
  const double fcdnn = median_over_seeds({.kind = ModelKind::fcdnn}, false);
  const double csinet = median_over_seeds({.kind = ModelKind::csinet}, false);
  const double pool = median_over_seeds({.agg = Aggregation::pool}, false);
  const double sgd = median_over_seeds({.opt = OptimizerKind::sgd}, false);
  const double lstm = median_over_seeds({.kind = ModelKind::lstm}, false);
  const bool a = sigt - fcdnn >= kOrderingMargin && sigt - csinet >= kOrderingMargin;
  const bool b = sigt >= pool;
  const bool c = sigt > sgd;
  const bool d = std::abs(lstm - 0.5) <= kLstmChanceBand;
  auto mark = [](bool ok) { return ok ? "ok" : "FAILED"; };
  return {a && b && c && d, std::string("(a) SigT ") + fmt("%.4f", sigt) + " vs FC-DNN " + fmt("%.4f", fcdnn) +
                                " / CSINet " + fmt("%.4f", csinet) + " " + mark(a) + "; (b) conv vs pool " +
                                fmt("%.4f", pool) + " " + mark(b) + "; (c) Adam vs SGD " + fmt("%.4f", sgd) + " " +
                                mark(c) + "; (d) LSTM " + fmt("%.4f", lstm) + " " + mark(d)};
}

Outcome dataset_trend() {
  std::string detail = "NB ->";
  bool pass = true;
  double prev = -1.0;
  for (std::size_t nb : {10, 50, 100, 200}) {
    const double m = median_over_seeds({.nb = nb}, false);
    detail += " " + std::to_string(nb) + ":" + fmt("%.4f", m);
    if (prev >= 0 && m < prev - kTrendTolerance) pass = false;
    prev = m;
  }
  return {pass, detail + " (non-decreasing up to " + fmt("%.2f", kTrendTolerance) + ")"};
}

// ---- 8. determinism ---------------------------------------------------------------

Outcome determinism() {
  namespace fs = std::filesystem;
  const fs::path root = fs::temp_directory_path() / ("sigt_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(root);
  const std::vector<std::string> frame{"--ns", "8", "--nt", "2", "--nr", "4", "--cp", "4", "--taps", "2"};
  const std::vector<std::string> model{"--d-model", "16", "--d-ff", "32", "--mlp-hidden", "32",
                                       "--heads",   "2",  "--batch", "16", "--epochs", "3", "--dropout", "0.1"};
  auto cat = [](std::vector<std::string> a, const std::vector<std::string>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
  };
  std::vector<std::string> outputs;
  bool all_ok = true;
  for (const char* rep : {"a", "b"}) {
    const fs::path d = root / rep;
    auto run = [&](const std::vector<std::string>& args) {
      std::ostringstream out, err;
      all_ok &= cli::run(args, out, err) == 0;
      // Messages may name the (replicate-specific) output directory.
      std::string text = out.str();
      for (auto at = text.find(d.string()); at != std::string::npos; at = text.find(d.string()))
        text.replace(at, d.string().size(), "<dir>");
      outputs.push_back(text);
    };
    run(cat(cat({"generate", "--train", "64", "--test", "32", "--pool", "5", "--seed", "9", "--out",
                 (d / "data").string()},
                frame),
            {}));
    run(cat({"train", "--data", (d / "data").string(), "--seed", "9", "--out", (d / "train").string()}, model));
    run(cat({"sweep", "--axis", "model", "--values", "sigt,fcdnn,csinet,lstm", "--fcdnn-hidden", "6,5,4",
             "--csinet-channels", "3,4", "--seeds", "2", "--data", (d / "data").string(), "--out",
             (d / "sweep").string()},
            model));
    run({"eval", "--data", (d / "data").string(), "--checkpoint", (d / "train" / "run.ckpt").string()});
    run({"eval", "--data", (d / "data").string(), "--receiver", "mmse"});
    run(cat(cat({"generate", "--train", "16", "--test", "8", "--seed", "9", "--format", "csv", "--out",
                 (d / "csv").string()},
                frame),
            {}));
  }
  std::size_t files = 0, mismatches = 0;
  for (const auto& e : fs::recursive_directory_iterator(root / "a")) {
    if (!e.is_regular_file()) continue;
    const fs::path other = root / "b" / fs::relative(e.path(), root / "a");
    auto slurp = [](const fs::path& p) {
      std::ifstream in(p, std::ios::binary);
      return std::string(std::istreambuf_iterator<char>(in), {});
    };
    ++files;
    mismatches += slurp(e.path()) != slurp(other);
  }
  const std::size_t half = outputs.size() / 2;
  std::size_t stdout_mismatch = 0;
  for (std::size_t i = 0; i < half; ++i) stdout_mismatch += outputs[i] != outputs[half + i];
  fs::remove_all(root);
  const bool pass = all_ok && files > 0 && mismatches == 0 && stdout_mismatch == 0;
  return {pass, "generate/train/sweep/eval run twice: " + std::to_string(files) + " output files, " +
                    std::to_string(mismatches) + " differ; " + std::to_string(half) + " stdout streams, " +
                    std::to_string(stdout_mismatch) + " differ" + (all_ok ? "" : "; a command failed")};
}

struct Criterion {
  int id;
  const char* title;
  double budget;
  bool long_only;
  std::function<Outcome()> run;
};

}  // namespace
}  // namespace sigt::acceptance

int main(int argc, char** argv) {
  using namespace sigt::acceptance;
  CLI::App app{"SigT acceptance suite"};
  bool long_mode = false;
  std::vector<int> only;
  app.add_flag("--long", long_mode, "Also run the multi-hour desk-scale criteria (5-7)");
  app.add_option("--only", only, "Criteria to run")->delimiter(',');
  CLI11_PARSE(app, argc, argv);
  if (const char* env = std::getenv("SIGT_ACCEPTANCE_LONG"); env && std::string(env) == "1") long_mode = true;

  const std::vector<Criterion> criteria{
      {1, "gradient integrity", kGradBudget, false, gradient_integrity},
      {2, "PHY oracle", kPhyBudget, false, phy_oracle},
      {3, "attention invariants", kAttentionBudget, false, attention_invariants},
      {4, "overfit smoke test", kOverfitBudget, false, overfit},
      {5, "desk-scale learning", kDeskBudget, true, desk_learning},
      {6, "qualitative orderings", 0, true, orderings},
      {7, "dataset-size trend", 0, true, dataset_trend},
      {8, "determinism", 0, false, determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    if (c.long_only && !long_mode) {
      std::printf("NOT RUN  %d %s: needs --long (multi-hour CPU run)\n", c.id, c.title);
      std::fflush(stdout);
      continue;
    }
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = seconds_since(t0);
    std::string timing = fmt("%.1f s", secs);
    if (c.budget > 0) {
      timing += fmt(" of %.0f s budget", c.budget);
      if (secs > c.budget) o.pass = false;
    }
    std::printf("%s  %d %s: %s [%s]\n", o.pass ? "PASS   " : "FAIL   ", c.id, c.title, o.detail.c_str(),
                timing.c_str());
    std::fflush(stdout);
    failures += !o.pass;
  }
  return failures == 0 ? 0 : 1;
}
