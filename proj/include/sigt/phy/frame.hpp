#pragma once

// One OFDM frame through transmitter, channel and receiver front-end.
//
// Layouts (row-major):
//   bits     [k][t][2]        k subcarrier, t transmit stream
//   symbols  [k][t]
//   grid     [i][k][r]        complex receive grid, 64-bit
//   y        [k][r][i][2]     real view of grid, stored as f32
//   pilot_rx [p][k][r]        p-th pilot symbol (only antenna p active)

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "sigt/phy/channel.hpp"
#include "sigt/phy/qam.hpp"

namespace sigt {

/// Unitary IFFT of one antenna's subcarriers, then the last cp_len samples
/// prepended.
std::vector<cplx> ifft_cp_add(std::span<const cplx> freq, std::size_t cp_len);

/// rx [n_r][n_s + cp_len] -> frequency grid [n_r][n_s].
std::vector<cplx> receive_frontend(std::span<const cplx> rx, std::size_t n_r, std::size_t n_s, std::size_t cp_len);

inline constexpr std::uint32_t kUnknownChannel = 0xFFFFFFFFu;

struct Sample {
  std::vector<float> y;
  Bits x;
  double snr_db = 0.0;
  std::uint32_t channel_id = kUnknownChannel;
};

struct Frame {
  Sample sample;
  std::vector<cplx> symbols;
  std::vector<cplx> grid;
  std::vector<cplx> pilot_rx;
};

/// Sends `bits` over `chan`. Data noise is drawn first (symbol 0..n_i-1),
/// pilot noise afterwards, so the data part is identical with or without
/// pilots for a given rng state. Repeated symbols (n_i > 1) carry the same
/// grid with independent noise.
Frame transmit(const FrameConfig& cfg, const ChannelRealization& chan, std::span<const std::uint8_t> bits,
               double snr_db, std::mt19937_64& rng, bool with_pilots = false);

/// Draws i.i.d. uniform bits from rng, then transmits them.
Frame simulate_frame(const FrameConfig& cfg, const ChannelRealization& chan, double snr_db, std::mt19937_64& rng,
                     bool with_pilots = false);

/// Complex grid [i][k][r] -> real y [k][r][i][2] rounded to f32.
std::vector<float> grid_to_y(const FrameConfig& cfg, std::span<const cplx> grid);

}  // namespace sigt
