#include "sigt/phy/frame.hpp"

#include "sigt/tensor/tensor.hpp"

namespace sigt {

std::vector<cplx> ifft_cp_add(std::span<const cplx> freq, std::size_t cp_len) {
  const std::size_t n = freq.size();
  if (cp_len > n) throw FrameError("ifft_cp_add: cyclic prefix longer than the symbol");
  const std::vector<cplx> body = ifft(freq);
  std::vector<cplx> out;
  out.reserve(n + cp_len);
  out.insert(out.end(), body.end() - static_cast<std::ptrdiff_t>(cp_len), body.end());
  out.insert(out.end(), body.begin(), body.end());
  return out;
}

std::vector<cplx> receive_frontend(std::span<const cplx> rx, std::size_t n_r, std::size_t n_s, std::size_t cp_len) {
  const std::size_t len = n_s + cp_len;
  if (rx.size() != n_r * len)
    throw FrameError("receive_frontend: got " + std::to_string(rx.size()) + " samples, expected " +
                     std::to_string(n_r) + " x " + std::to_string(len));
  std::vector<cplx> out(n_r * n_s);
  for (std::size_t r = 0; r < n_r; ++r) {
    std::span<cplx> dst(out.data() + r * n_s, n_s);
    std::copy_n(rx.data() + r * len + cp_len, n_s, dst.begin());
    fft_inplace(dst, false);
  }
  return out;
}

std::vector<float> grid_to_y(const FrameConfig& cfg, std::span<const cplx> grid) {
  const std::size_t n_s = cfg.n_s, n_r = cfg.n_r, n_i = cfg.n_i;
  if (grid.size() != n_i * n_s * n_r) throw FrameError("grid_to_y: grid size does not match the frame");
  std::vector<float> y(cfg.y_size());
  for (std::size_t i = 0; i < n_i; ++i)
    for (std::size_t k = 0; k < n_s; ++k)
      for (std::size_t r = 0; r < n_r; ++r) {
        const cplx v = grid[(i * n_s + k) * n_r + r];
        const std::size_t at = ((k * n_r + r) * n_i + i) * 2;
        y[at] = static_cast<float>(v.real());
        y[at + 1] = static_cast<float>(v.imag());
      }
  return y;
}

namespace {

// Time-domain transmit block [n_t][len] for a frequency grid [k][t].
std::vector<cplx> modulate_ofdm(const FrameConfig& cfg, std::span<const cplx> freq_kt) {
  const std::size_t n_s = cfg.n_s, n_t = cfg.n_t, len = cfg.symbol_len();
  std::vector<cplx> tx(n_t * len);
  std::vector<cplx> column(n_s);
  for (std::size_t t = 0; t < n_t; ++t) {
    for (std::size_t k = 0; k < n_s; ++k) column[k] = freq_kt[k * n_t + t];
    const std::vector<cplx> td = ifft_cp_add(column, cfg.cp_len);
    std::copy(td.begin(), td.end(), tx.begin() + static_cast<std::ptrdiff_t>(t * len));
  }
  return tx;
}

// [r][k] -> appended to dst as [k][r].
void append_transposed(std::vector<cplx>& dst, std::span<const cplx> rk, std::size_t n_r, std::size_t n_s) {
  const std::size_t base = dst.size();
  dst.resize(base + n_r * n_s);
  for (std::size_t r = 0; r < n_r; ++r)
    for (std::size_t k = 0; k < n_s; ++k) dst[base + k * n_r + r] = rk[r * n_s + k];
}

}  // namespace

Frame transmit(const FrameConfig& cfg, const ChannelRealization& chan, std::span<const std::uint8_t> bits,
               double snr_db, std::mt19937_64& rng, bool with_pilots) {
  cfg.validate();
  if (bits.size() != cfg.x_size())
    throw DimensionError("transmit: " + std::to_string(bits.size()) + " bits, frame carries " +
                         std::to_string(cfg.x_size()));
  if (chan.n_r != cfg.n_r || chan.n_t != cfg.n_t || chan.n_taps > cfg.cp_len)
    throw ConfigError("transmit: channel dimensions do not match the frame configuration");

  Frame f;
  f.sample.x.assign(bits.begin(), bits.end());
  f.sample.snr_db = snr_db;
  f.sample.channel_id = chan.pool_id;
  f.symbols = qam_modulate(bits);
  const double nv = noise_variance(cfg, snr_db);
  const std::size_t len = cfg.symbol_len();

  const std::vector<cplx> tx = modulate_ofdm(cfg, f.symbols);
  f.grid.reserve(std::size_t(cfg.n_i) * cfg.n_s * cfg.n_r);
  for (std::size_t i = 0; i < cfg.n_i; ++i) {
    const std::vector<cplx> rx = apply_channel(tx, len, chan, nv, rng);
    append_transposed(f.grid, receive_frontend(rx, cfg.n_r, cfg.n_s, cfg.cp_len), cfg.n_r, cfg.n_s);
  }
  f.sample.y = grid_to_y(cfg, f.grid);

  if (with_pilots) {
    f.pilot_rx.reserve(std::size_t(cfg.n_t) * cfg.n_s * cfg.n_r);
    std::vector<cplx> pilot(std::size_t(cfg.n_s) * cfg.n_t);
    for (std::size_t p = 0; p < cfg.n_t; ++p) {
      std::fill(pilot.begin(), pilot.end(), cplx{});
      for (std::size_t k = 0; k < cfg.n_s; ++k) pilot[k * cfg.n_t + p] = 1.0;
      const std::vector<cplx> rx = apply_channel(modulate_ofdm(cfg, pilot), len, chan, nv, rng);
      append_transposed(f.pilot_rx, receive_frontend(rx, cfg.n_r, cfg.n_s, cfg.cp_len), cfg.n_r, cfg.n_s);
    }
  }
  return f;
}

Frame simulate_frame(const FrameConfig& cfg, const ChannelRealization& chan, double snr_db, std::mt19937_64& rng,
                     bool with_pilots) {
  Bits bits(cfg.x_size());
  for (std::size_t i = 0; i < bits.size(); i += 64) {
    const std::uint64_t word = rng();
    for (std::size_t j = 0; j < 64 && i + j < bits.size(); ++j) bits[i + j] = (word >> j) & 1u;
  }
  return transmit(cfg, chan, bits, snr_db, rng, with_pilots);
}

}  // namespace sigt
