#include "sigt/rx/classic.hpp"

#include <Eigen/Dense>

#include "sigt/tensor/tensor.hpp"

namespace sigt::rx {

ChannelEstimate ls_estimate(const FrameConfig& cfg, std::span<const cplx> pilot_rx, std::span<const cplx> pilot_tx) {
  const std::size_t n_s = cfg.n_s, n_r = cfg.n_r, n_t = cfg.n_t;
  if (pilot_rx.size() != n_t * n_s * n_r || pilot_tx.size() != n_t * n_s)
    throw DimensionError("ls_estimate: pilot buffers do not match the frame (" + cfg.describe() + ")");
  ChannelEstimate est{n_s, n_r, n_t, std::vector<cplx>(n_s * n_r * n_t)};
  for (std::size_t p = 0; p < n_t; ++p)
    for (std::size_t k = 0; k < n_s; ++k) {
      const cplx x = pilot_tx[p * n_s + k];
      if (x == cplx{})
        throw DomainError("ls_estimate: zero pilot on antenna " + std::to_string(p) + ", subcarrier " +
                          std::to_string(k));
      for (std::size_t r = 0; r < n_r; ++r) est.h[(k * n_r + r) * n_t + p] = pilot_rx[(p * n_s + k) * n_r + r] / x;
    }
  return est;
}

ChannelEstimate ls_estimate(const FrameConfig& cfg, std::span<const cplx> pilot_rx) {
  const std::vector<cplx> ones(std::size_t(cfg.n_t) * cfg.n_s, cplx(1.0));
  return ls_estimate(cfg, pilot_rx, ones);
}

ChannelEstimate perfect_csi(const ChannelRealization& chan, std::size_t n_s) {
  return {n_s, chan.n_r, chan.n_t, true_channel_response(chan, n_s)};
}

std::vector<cplx> detect(std::span<const cplx> y, std::span<const cplx> h, std::size_t n_r, std::size_t n_t,
                         Detector mode, double noise_var, std::size_t subcarrier) {
  if (y.size() != n_r || h.size() != n_r * n_t)
    throw DimensionError("detect: y has " + std::to_string(y.size()) + " entries and H " + std::to_string(h.size()) +
                         ", expected " + std::to_string(n_r) + " and " + std::to_string(n_r) + "x" +
                         std::to_string(n_t));
  using Mat = Eigen::MatrixXcd;
  using Vec = Eigen::VectorXcd;
  const Eigen::Map<const Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> H(h.data(), n_r, n_t);
  const Eigen::Map<const Vec> Y(y.data(), n_r);
  Mat gram = H.adjoint() * H;
  const Vec rhs = H.adjoint() * Y;
  Vec x;
  if (mode == Detector::zf) {
    const Eigen::FullPivLU<Mat> lu(gram);
    if (lu.rank() < static_cast<Eigen::Index>(n_t))
      throw RankError(subcarrier, "detect: H^H H is singular on subcarrier " + std::to_string(subcarrier) +
                                      " (rank " + std::to_string(lu.rank()) + " < " + std::to_string(n_t) + ")");
    x = lu.solve(rhs);
  } else {
    gram.diagonal().array() += noise_var;
    x = gram.ldlt().solve(rhs);
  }
  return {x.data(), x.data() + x.size()};
}

Bits qam_demodulate(std::span<const cplx> symbols) {
  Bits bits(symbols.size() * 2);
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    // A component of exactly zero decodes to bit 0.
    bits[2 * i] = symbols[i].real() < 0.0 ? 1 : 0;
    bits[2 * i + 1] = symbols[i].imag() < 0.0 ? 1 : 0;
  }
  return bits;
}

std::vector<cplx> detect_frame(const FrameConfig& cfg, std::span<const cplx> grid, const ChannelEstimate& est,
                               Detector mode, double noise_var) {
  const std::size_t n_s = cfg.n_s, n_r = cfg.n_r, n_t = cfg.n_t, n_i = cfg.n_i;
  if (grid.size() != n_i * n_s * n_r) throw DimensionError("detect_frame: grid does not match the frame");
  if (est.n_s != n_s || est.n_r != n_r || est.n_t != n_t)
    throw DimensionError("detect_frame: channel estimate does not match the frame");
  std::vector<cplx> out(n_s * n_t);
  std::vector<cplx> y(n_r * n_i), h(n_r * n_i * n_t);
  for (std::size_t k = 0; k < n_s; ++k) {
    const std::span<const cplx> hk = est.at(k);
    for (std::size_t i = 0; i < n_i; ++i) {
      std::copy_n(grid.data() + (i * n_s + k) * n_r, n_r, y.begin() + static_cast<std::ptrdiff_t>(i * n_r));
      std::copy(hk.begin(), hk.end(), h.begin() + static_cast<std::ptrdiff_t>(i * n_r * n_t));
    }
    const std::vector<cplx> xk = detect(y, h, n_r * n_i, n_t, mode, noise_var, k);
    std::copy(xk.begin(), xk.end(), out.begin() + static_cast<std::ptrdiff_t>(k * n_t));
  }
  return out;
}

Bits receive(const FrameConfig& cfg, const Frame& frame, Detector mode, double noise_var) {
  if (frame.pilot_rx.empty()) throw ContractError("receive: frame was generated without pilots");
  const ChannelEstimate est = ls_estimate(cfg, frame.pilot_rx);
  return qam_demodulate(detect_frame(cfg, frame.grid, est, mode, noise_var));
}

}  // namespace sigt::rx
