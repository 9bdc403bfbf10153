#pragma once

// Dataset file format (little-endian):
//   "SIGT" | u16 version | u32 n_s n_t n_r n_i cp_len n_taps qam_bits
//   | u64 count | f64 snr_db | u64 seed
//   then per sample: f32 y[y_size] | x packed LSB-first into ceil(x_size/8) bytes
// Channel ids are not stored; samples read back carry kUnknownChannel.

#include <filesystem>
#include <iosfwd>

#include "sigt/phy/dataset.hpp"
#include "sigt/util/binary_io.hpp"

namespace sigt {

inline constexpr std::uint16_t kDatasetVersion = 1;

void write_dataset(std::ostream& out, const Dataset& ds);
Dataset read_dataset(std::istream& in);

void write_dataset(const std::filesystem::path& path, const Dataset& ds);
Dataset read_dataset(const std::filesystem::path& path);

/// One row per sample: index, then y_0..y_{n-1}, then x_0..x_{m-1}.
void write_dataset_csv(std::ostream& out, const Dataset& ds);
void write_dataset_csv(const std::filesystem::path& path, const Dataset& ds);

}  // namespace sigt
