#pragma once

// Seeded dataset generation. Each sample owns a random stream derived from
// (seed, split, index), so any sample can be regenerated on its own and the
// result does not depend on how generation is spread over threads.

#include <cstdint>
#include <vector>

#include "sigt/phy/frame.hpp"

namespace sigt {

enum class Split : std::uint64_t { train = 0, test = 1, pool = 2 };

struct Dataset {
  FrameConfig cfg;
  double snr_db = 0.0;
  std::uint64_t seed = 0;
  std::vector<Sample> samples;

  std::size_t size() const { return samples.size(); }
};

struct GenerationParams {
  FrameConfig cfg;
  std::size_t pool_size = 500;
  std::size_t n_train = 25600;
  std::size_t n_test = 2560;
  double snr_db = 10.0;
  std::uint64_t seed = 1;

  void validate() const;
};

struct GeneratedData {
  Dataset train;
  Dataset test;
  std::vector<ChannelRealization> pool;
};

std::uint64_t derive_seed(std::uint64_t seed, Split split, std::uint64_t index);

std::vector<ChannelRealization> make_pool(const GenerationParams& params);

/// Regenerates sample `index` of `split` exactly as generate_dataset does,
/// optionally with pilot symbols appended.
Frame regenerate_frame(const GenerationParams& params, const std::vector<ChannelRealization>& pool, Split split,
                       std::size_t index, bool with_pilots = false);

/// `threads` == 0 uses the hardware concurrency. Output is independent of it.
GeneratedData generate_dataset(const GenerationParams& params, unsigned threads = 0);

}  // namespace sigt
