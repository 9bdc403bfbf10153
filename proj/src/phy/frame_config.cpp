#include "sigt/phy/frame_config.hpp"

namespace sigt {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

namespace {
void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}
}  // namespace

void FrameConfig::validate() const {
  require(is_power_of_two(n_s), "ns: subcarrier count " + std::to_string(n_s) + " is not a power of two");
  require(n_t >= 1, "nt: need at least one transmit antenna");
  require(n_r >= 1, "nr: need at least one receive antenna");
  require(n_i >= 1, "ni: need at least one symbol per subcarrier");
  require(n_taps >= 1, "taps: need at least one channel tap");
  require(n_taps <= cp_len, "taps: " + std::to_string(n_taps) + " taps exceed the cyclic prefix of " +
                                std::to_string(cp_len) + " samples");
  require(cp_len <= n_s, "cp: cyclic prefix longer than the symbol");
  require(qam_bits == 2, "qam_bits: only QPSK (2 bits per symbol) is supported, got " + std::to_string(qam_bits));
}

std::string FrameConfig::describe() const {
  return "ns=" + std::to_string(n_s) + " nt=" + std::to_string(n_t) + " nr=" + std::to_string(n_r) +
         " ni=" + std::to_string(n_i) + " cp=" + std::to_string(cp_len) + " taps=" + std::to_string(n_taps) +
         " qam_bits=" + std::to_string(qam_bits);
}

}  // namespace sigt
