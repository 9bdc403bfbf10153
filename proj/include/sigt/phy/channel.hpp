#pragma once

// Multipath MIMO channel: every (receive, transmit) pair has an independent
// Rayleigh impulse response with an exponential power-delay profile.

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "sigt/phy/fft.hpp"
#include "sigt/phy/frame_config.hpp"

namespace sigt {

struct ChannelRealization {
  std::size_t n_r = 0, n_t = 0, n_taps = 0;
  std::vector<cplx> taps;  // [r][t][l]
  std::uint32_t pool_id = 0;

  cplx tap(std::size_t r, std::size_t t, std::size_t l) const { return taps[(r * n_t + t) * n_taps + l]; }
};

/// Tap powers p_l proportional to e^{-l/4}, summing to 1.
std::vector<double> power_delay_profile(std::size_t n_taps);

ChannelRealization draw_channel(const FrameConfig& cfg, std::mt19937_64& rng, std::uint32_t pool_id = 0);

/// `size` realisations drawn once from `seed`; member i has pool_id i.
std::vector<ChannelRealization> draw_channel_pool(const FrameConfig& cfg, std::size_t size, std::uint64_t seed);

/// Single unit tap on the diagonal (r == t), zero elsewhere.
ChannelRealization identity_channel(const FrameConfig& cfg);

/// Per-subcarrier response H_k[r][t] = sum_l h_l e^{-j 2 pi k l / n_s}, laid
/// out [k][r][t]. This is what the receiver sees after CP removal and the
/// unitary FFT when the transmitter used the unitary IFFT.
std::vector<cplx> true_channel_response(const ChannelRealization& chan, std::size_t n_s);

/// Complex noise variance for a requested per-receive-antenna SNR. With unit
/// power symbols and normalised taps each antenna receives power n_t.
/// +inf dB gives 0.
double noise_variance(const FrameConfig& cfg, double snr_db);

/// tx is [n_t][len] (row-major). Returns [n_r][len]: per receive antenna the
/// sum over transmit antennas of the linear convolution with the taps,
/// truncated to len, plus CN(0, noise_var) noise.
std::vector<cplx> apply_channel(std::span<const cplx> tx, std::size_t len, const ChannelRealization& chan,
                                double noise_var, std::mt19937_64& rng);

/// Adds CN(0, noise_var) to every entry.
void add_noise(std::span<cplx> signal, double noise_var, std::mt19937_64& rng);

}  // namespace sigt
