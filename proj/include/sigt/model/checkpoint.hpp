#pragma once

// Checkpoint container (little-endian):
//   "SGTC" | u16 version | u32 kind | FrameConfig (7 x u32)
//   | u32 depth heads d_model d_ff mlp_hidden aggregation pool_kind
//   | u32 n, n x u32 fcdnn_hidden | u32 csinet_blocks | u32 n, n x u32 csinet_channels
//   | f64 dropout_p | u64 init_seed
//   | u32 block count, then per block: u32 name length, name, u32 rank,
//     rank x u64 dims, f64 payload

#include <filesystem>
#include <iosfwd>
#include <memory>

#include "sigt/model/factory.hpp"
#include "sigt/util/binary_io.hpp"

namespace sigt {

inline constexpr std::uint16_t kCheckpointVersion = 1;

void save_checkpoint(std::ostream& out, const Model& model);
void save_checkpoint(const std::filesystem::path& path, const Model& model);

/// Rebuilds the model from the stored configuration and loads every block.
/// Throws io::FormatError on missing, extra or mis-shaped blocks.
std::unique_ptr<Model> load_checkpoint(std::istream& in);
std::unique_ptr<Model> load_checkpoint(const std::filesystem::path& path);

}  // namespace sigt
