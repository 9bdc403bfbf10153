#include "sigt/phy/channel.hpp"

#include <cmath>
#include <limits>

#include "sigt/tensor/tensor.hpp"

namespace sigt {

std::vector<double> power_delay_profile(std::size_t n_taps) {
  std::vector<double> p(n_taps);
  double total = 0.0;
  for (std::size_t l = 0; l < n_taps; ++l) total += p[l] = std::exp(-static_cast<double>(l) / 4.0);
  for (double& v : p) v /= total;
  return p;
}

ChannelRealization draw_channel(const FrameConfig& cfg, std::mt19937_64& rng, std::uint32_t pool_id) {
  ChannelRealization c;
  c.n_r = cfg.n_r;
  c.n_t = cfg.n_t;
  c.n_taps = cfg.n_taps;
  c.pool_id = pool_id;
  c.taps.resize(c.n_r * c.n_t * c.n_taps);
  const std::vector<double> pdp = power_delay_profile(c.n_taps);
  std::normal_distribution<double> normal;
  for (std::size_t i = 0; i < c.taps.size(); ++i) {
    const double sd = std::sqrt(pdp[i % c.n_taps] / 2.0);
    const double re = normal(rng);
    const double im = normal(rng);
    c.taps[i] = {sd * re, sd * im};
  }
  return c;
}

std::vector<ChannelRealization> draw_channel_pool(const FrameConfig& cfg, std::size_t size, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<ChannelRealization> pool;
  pool.reserve(size);
  for (std::size_t i = 0; i < size; ++i) pool.push_back(draw_channel(cfg, rng, static_cast<std::uint32_t>(i)));
  return pool;
}

ChannelRealization identity_channel(const FrameConfig& cfg) {
  ChannelRealization c;
  c.n_r = cfg.n_r;
  c.n_t = cfg.n_t;
  c.n_taps = cfg.n_taps;
  c.taps.assign(c.n_r * c.n_t * c.n_taps, cplx{});
  for (std::size_t r = 0; r < std::min(c.n_r, c.n_t); ++r) c.taps[(r * c.n_t + r) * c.n_taps] = 1.0;
  return c;
}

std::vector<cplx> true_channel_response(const ChannelRealization& chan, std::size_t n_s) {
  std::vector<cplx> h(n_s * chan.n_r * chan.n_t);
  std::vector<cplx> buf(n_s);
  const double root_n = std::sqrt(static_cast<double>(n_s));
  for (std::size_t r = 0; r < chan.n_r; ++r)
    for (std::size_t t = 0; t < chan.n_t; ++t) {
      std::fill(buf.begin(), buf.end(), cplx{});
      for (std::size_t l = 0; l < chan.n_taps; ++l) buf[l] = chan.tap(r, t, l);
      fft_inplace(buf, false);
      for (std::size_t k = 0; k < n_s; ++k) h[(k * chan.n_r + r) * chan.n_t + t] = buf[k] * root_n;
    }
  return h;
}

double noise_variance(const FrameConfig& cfg, double snr_db) {
  if (std::isinf(snr_db) && snr_db > 0) return 0.0;
  return static_cast<double>(cfg.n_t) / std::pow(10.0, snr_db / 10.0);
}

void add_noise(std::span<cplx> signal, double noise_var, std::mt19937_64& rng) {
  if (noise_var == 0.0) return;
  std::normal_distribution<double> normal;
  const double sd = std::sqrt(noise_var / 2.0);
  for (cplx& v : signal) {
    const double re = normal(rng);
    const double im = normal(rng);
    v += cplx(sd * re, sd * im);
  }
}

std::vector<cplx> apply_channel(std::span<const cplx> tx, std::size_t len, const ChannelRealization& chan,
                                double noise_var, std::mt19937_64& rng) {
  if (tx.size() != chan.n_t * len)
    throw DimensionError("apply_channel: tx has " + std::to_string(tx.size()) + " samples, expected " +
                         std::to_string(chan.n_t) + " x " + std::to_string(len));
  if (len < chan.n_taps) throw FrameError("apply_channel: frame shorter than the channel");
  std::vector<cplx> rx(chan.n_r * len, cplx{});
  for (std::size_t r = 0; r < chan.n_r; ++r) {
    cplx* out = rx.data() + r * len;
    for (std::size_t t = 0; t < chan.n_t; ++t) {
      const cplx* in = tx.data() + t * len;
      for (std::size_t l = 0; l < chan.n_taps; ++l) {
        const cplx h = chan.tap(r, t, l);
        if (h == cplx{}) continue;
        // Spelled out: std::complex operator* takes the slow Annex G path.
        const double hr = h.real(), hi = h.imag();
        for (std::size_t n = l; n < len; ++n) {
          const double xr = in[n - l].real(), xi = in[n - l].imag();
          out[n] += cplx(hr * xr - hi * xi, hr * xi + hi * xr);
        }
      }
    }
  }
  add_noise(rx, noise_var, rng);
  return rx;
}

}  // namespace sigt
