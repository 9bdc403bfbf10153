#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace sigt {

/// Invalid configuration value; the message names the offending field.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A time- or frequency-domain buffer does not have the frame's length.
class FrameError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct FrameConfig {
  std::uint32_t n_s = 256;  // subcarriers
  std::uint32_t n_t = 4;    // transmit antennas
  std::uint32_t n_r = 16;   // receive antennas
  std::uint32_t n_i = 1;    // symbols per subcarrier
  std::uint32_t cp_len = 16;
  std::uint32_t n_taps = 8;
  std::uint32_t qam_bits = 2;

  void validate() const;

  std::size_t y_size() const { return std::size_t(n_s) * n_r * n_i * 2; }
  std::size_t x_size() const { return std::size_t(n_s) * n_t * 2; }
  std::size_t symbol_len() const { return std::size_t(n_s) + cp_len; }

  std::string describe() const;
  bool operator==(const FrameConfig&) const = default;
};

bool is_power_of_two(std::size_t n);

}  // namespace sigt
