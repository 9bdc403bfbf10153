#pragma once

// Pilot-based receiver: LS channel estimation from time-orthogonal pilots,
// per-subcarrier ZF or MMSE detection and hard QPSK demapping.

#include <span>
#include <stdexcept>
#include <vector>

#include "sigt/phy/frame.hpp"

namespace sigt::rx {

/// H^H H is singular on some subcarrier, so ZF is undefined there.
class RankError : public std::runtime_error {
 public:
  RankError(std::size_t subcarrier, const std::string& message)
      : std::runtime_error(message), subcarrier_(subcarrier) {}
  std::size_t subcarrier() const { return subcarrier_; }

 private:
  std::size_t subcarrier_;
};

struct ChannelEstimate {
  std::size_t n_s = 0, n_r = 0, n_t = 0;
  std::vector<cplx> h;  // [k][r][t]

  std::span<const cplx> at(std::size_t k) const { return {h.data() + k * n_r * n_t, n_r * n_t}; }
};

/// pilot_rx [p][k][r] as produced by transmit(..., with_pilots = true);
/// pilot_tx [p][k] is the value antenna p sent on subcarrier k.
/// Throws DomainError on a zero pilot value.
ChannelEstimate ls_estimate(const FrameConfig& cfg, std::span<const cplx> pilot_rx, std::span<const cplx> pilot_tx);

/// All-ones pilots.
ChannelEstimate ls_estimate(const FrameConfig& cfg, std::span<const cplx> pilot_rx);

ChannelEstimate perfect_csi(const ChannelRealization& chan, std::size_t n_s);

enum class Detector { zf, mmse };

/// y [n_r], h [n_r][n_t] -> x_hat [n_t].
///   ZF:   (H^H H)^-1 H^H y
///   MMSE: (H^H H + noise_var I)^-1 H^H y
/// `subcarrier` only labels a RankError.
std::vector<cplx> detect(std::span<const cplx> y, std::span<const cplx> h, std::size_t n_r, std::size_t n_t,
                         Detector mode, double noise_var, std::size_t subcarrier = 0);

/// Sign decisions; a component of exactly 0 maps to bit 0.
Bits qam_demodulate(std::span<const cplx> symbols);

/// Detects every subcarrier of a receive grid [i][k][r]. Repeated symbols
/// (n_i > 1) are stacked into one n_r * n_i observation per subcarrier.
/// Returns symbols [k][t].
std::vector<cplx> detect_frame(const FrameConfig& cfg, std::span<const cplx> grid, const ChannelEstimate& est,
                               Detector mode, double noise_var);

/// LS from the frame's pilots, detection and demapping.
Bits receive(const FrameConfig& cfg, const Frame& frame, Detector mode, double noise_var);

}  // namespace sigt::rx
