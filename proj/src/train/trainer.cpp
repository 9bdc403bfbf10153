#include "sigt/train/trainer.hpp"

#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>

#include "sigt/train/loss.hpp"

namespace sigt {

std::string to_string(OptimizerKind kind) { return kind == OptimizerKind::adam ? "adam" : "sgd"; }

OptimizerKind parse_optimizer(const std::string& s) {
  if (s == "adam") return OptimizerKind::adam;
  if (s == "sgd") return OptimizerKind::sgd;
  throw ConfigError("opt: unknown optimizer '" + s + "' (adam|sgd)");
}

void RunConfig::validate() const {
  if (batch_size < 1) throw ConfigError("batch: batch size must be at least 1");
  if (micro_batch < 1) throw ConfigError("micro_batch: must be at least 1");
  if (!(adam.lr > 0.0) || !std::isfinite(adam.lr)) throw ConfigError("lr: learning rate must be positive");
  if (!(adam.beta1 >= 0.0 && adam.beta1 < 1.0)) throw ConfigError("beta1: must lie in [0, 1)");
  if (!(adam.beta2 >= 0.0 && adam.beta2 < 1.0)) throw ConfigError("beta2: must lie in [0, 1)");
  if (!(adam.eps > 0.0)) throw ConfigError("eps: must be positive");
}

Tensor batch_inputs(const Dataset& ds, std::span<const std::size_t> indices) {
  const FrameConfig& f = ds.cfg;
  const std::size_t ny = f.y_size();
  std::vector<double> v(indices.size() * ny);
  for (std::size_t b = 0; b < indices.size(); ++b) {
    const auto& y = ds.samples.at(indices[b]).y;
    std::copy(y.begin(), y.end(), v.begin() + static_cast<std::ptrdiff_t>(b * ny));
  }
  return Tensor::from_data({indices.size(), f.n_s, f.n_r, f.n_i, 2}, std::move(v));
}

Tensor batch_targets(const Dataset& ds, std::span<const std::size_t> indices) {
  const FrameConfig& f = ds.cfg;
  const std::size_t nx = f.x_size();
  std::vector<double> v(indices.size() * nx);
  for (std::size_t b = 0; b < indices.size(); ++b) {
    const auto& x = ds.samples.at(indices[b]).x;
    std::copy(x.begin(), x.end(), v.begin() + static_cast<std::ptrdiff_t>(b * nx));
  }
  return Tensor::from_data({indices.size(), f.n_s, f.n_t, 2}, std::move(v));
}

Evaluation evaluate(Model& model, const Dataset& ds, std::size_t chunk) {
  NoGradGuard no_grad;
  const bool was_training = model.training();
  model.set_training(false);
  double loss_sum = 0.0;
  std::size_t wrong = 0, bits = 0;
  std::vector<std::size_t> idx;
  for (std::size_t start = 0; start < ds.size(); start += chunk) {
    idx.resize(std::min(chunk, ds.size() - start));
    std::iota(idx.begin(), idx.end(), start);
    const Tensor x = batch_targets(ds, idx);
    const Tensor x_hat = model.forward(batch_inputs(ds, idx));
    loss_sum += mse_loss(x_hat, x).item() * static_cast<double>(idx.size());
    const double acc = aacc(hard_decision(x_hat), x);
    wrong += static_cast<std::size_t>(std::llround((1.0 - acc) * static_cast<double>(x.numel())));
    bits += x.numel();
  }
  model.set_training(was_training);
  return {loss_sum / static_cast<double>(ds.size()), 1.0 - static_cast<double>(wrong) / static_cast<double>(bits)};
}

void load_parameters(Model& model, const std::vector<std::vector<double>>& values) {
  auto& params = model.parameters();
  if (values.size() != params.size()) throw ContractError("load_parameters: parameter count mismatch");
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto data = params[i].tensor.mutable_data();
    if (values[i].size() != data.size()) throw ContractError("load_parameters: size mismatch for " + params[i].name);
    std::copy(values[i].begin(), values[i].end(), data.begin());
  }
}

namespace {

std::vector<std::vector<double>> snapshot(const Model& model) {
  std::vector<std::vector<double>> out;
  for (const auto& p : model.parameters()) out.emplace_back(p.tensor.data().begin(), p.tensor.data().end());
  return out;
}

void check_compatible(const Model& model, const Dataset& ds, const char* which) {
  if (!(ds.cfg == model.frame()))
    throw ConfigError(std::string(which) + " set frame (" + ds.cfg.describe() + ") does not match the model (" +
                      model.frame().describe() + ")");
  if (ds.size() == 0) throw ConfigError(std::string(which) + " set is empty");
}

}  // namespace

TrainResult train(Model& model, const Dataset& train_set, const Dataset& test_set, const RunConfig& cfg,
                  const std::function<void(const EpochMetrics&)>& on_epoch) {
  cfg.validate();
  check_compatible(model, train_set, "training");
  check_compatible(model, test_set, "test");

  // With nb set, the run sees only a prefix of the training set.
  Dataset prefix;
  if (cfg.nb > 0) {
    const std::size_t n_used = cfg.nb * cfg.batch_size;
    if (n_used > train_set.size())
      throw ConfigError("nb: " + std::to_string(cfg.nb) + " minibatches of " + std::to_string(cfg.batch_size) +
                        " need " + std::to_string(n_used) + " training samples, dataset has " +
                        std::to_string(train_set.size()));
    prefix = Dataset{train_set.cfg, train_set.snr_db, train_set.seed,
                     {train_set.samples.begin(), train_set.samples.begin() + static_cast<std::ptrdiff_t>(n_used)}};
  }
  const Dataset& train = cfg.nb > 0 ? prefix : train_set;

  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  auto elapsed = [&] {
    return cfg.record_time ? std::chrono::duration<double>(Clock::now() - start).count() : 0.0;
  };

  TrainResult result;
  auto record = [&](EpochMetrics m) {
    m.test_aacc = evaluate(model, test_set).aacc;
    m.seconds = elapsed();
    result.history.push_back(m);
    if (result.history.size() == 1 || m.test_aacc > result.best_test_aacc) {
      result.best_test_aacc = m.test_aacc;
      result.best_epoch = m.epoch;
      result.best_params = snapshot(model);
    }
    if (on_epoch) on_epoch(m);
  };

  {
    const Evaluation init = evaluate(model, train);
    record({0, init.loss, init.aacc, 0.0, 0.0});
  }

  AdamState adam;
  Rng shuffle_rng(derive_seed(cfg.seed, Split::train, 0x5EED));
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    model.set_training(true);
    double loss_sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t b0 = 0; b0 < order.size(); b0 += cfg.batch_size, ++batches) {
      const std::size_t bsize = std::min(cfg.batch_size, order.size() - b0);
      model.zero_grad();
      double batch_loss = 0.0;
      for (std::size_t m0 = 0; m0 < bsize; m0 += cfg.micro_batch) {
        const std::size_t msize = std::min(cfg.micro_batch, bsize - m0);
        const std::span<const std::size_t> idx(order.data() + b0 + m0, msize);
        const Tensor loss = scale(mse_loss(model.forward(batch_inputs(train, idx)), batch_targets(train, idx)),
                                  static_cast<double>(msize) / static_cast<double>(bsize));
        batch_loss += loss.item();
        backward(loss);
      }
      if (!std::isfinite(batch_loss)) {
        std::ostringstream msg;
        msg << "non-finite training loss " << batch_loss << " at epoch " << epoch << ", batch " << batches;
        throw NumericError(msg.str());
      }
      for (const auto& p : model.parameters())
        for (double g : p.tensor.grad())
          if (!std::isfinite(g)) {
            std::ostringstream msg;
            msg << "non-finite gradient for " << p.name << " at epoch " << epoch << ", batch " << batches
                << " (loss " << batch_loss << ")";
            throw NumericError(msg.str());
          }
      loss_sum += batch_loss;
      if (cfg.optimizer == OptimizerKind::adam)
        adam_step(model.parameters(), adam, cfg.adam);
      else
        sgd_step(model.parameters(), cfg.adam.lr);
    }
    model.set_training(false);
    const double train_aacc = evaluate(model, train).aacc;
    record({epoch, loss_sum / static_cast<double>(batches), train_aacc, 0.0, 0.0});
  }
  return result;
}

}  // namespace sigt
