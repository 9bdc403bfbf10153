#include "sigt/phy/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace sigt {

void GenerationParams::validate() const {
  cfg.validate();
  if (pool_size < 1) throw ConfigError("pool: channel pool size must be at least 1");
  if (n_train < 1) throw ConfigError("train: need at least one training sample");
  if (n_test < 1) throw ConfigError("test: need at least one test sample");
  if (std::isnan(snr_db) || snr_db == -INFINITY) throw ConfigError("snr: must be a number or +inf");
}

std::uint64_t derive_seed(std::uint64_t seed, Split split, std::uint64_t index) {
  // splitmix64 finaliser over a combination of the three inputs.
  std::uint64_t z = seed * 0x9E3779B97F4A7C15ull + (static_cast<std::uint64_t>(split) << 56) + index;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::vector<ChannelRealization> make_pool(const GenerationParams& params) {
  return draw_channel_pool(params.cfg, params.pool_size, derive_seed(params.seed, Split::pool, 0));
}

Frame regenerate_frame(const GenerationParams& params, const std::vector<ChannelRealization>& pool, Split split,
                       std::size_t index, bool with_pilots) {
  std::mt19937_64 rng(derive_seed(params.seed, split, index));
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  const ChannelRealization& chan = pool[pick(rng)];
  return simulate_frame(params.cfg, chan, params.snr_db, rng, with_pilots);
}

namespace {

Dataset make_split(const GenerationParams& params, const std::vector<ChannelRealization>& pool, Split split,
                   std::size_t count, unsigned threads) {
  Dataset ds{params.cfg, params.snr_db, params.seed, std::vector<Sample>(count)};
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  {
    std::vector<std::jthread> pool_threads;
    for (unsigned w = 0; w < workers; ++w)
      pool_threads.emplace_back([&, w] {
        for (std::size_t i = w; i < count; i += workers)
          ds.samples[i] = regenerate_frame(params, pool, split, i).sample;
      });
  }
  return ds;
}

}  // namespace

GeneratedData generate_dataset(const GenerationParams& params, unsigned threads) {
  params.validate();
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  GeneratedData out;
  out.pool = make_pool(params);
  out.train = make_split(params, out.pool, Split::train, params.n_train, threads);
  out.test = make_split(params, out.pool, Split::test, params.n_test, threads);
  return out;
}

}  // namespace sigt
