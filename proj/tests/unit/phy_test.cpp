#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "sigt/phy/dataset.hpp"
#include "sigt/phy/dataset_io.hpp"
#include "sigt/tensor/tensor.hpp"

namespace sigt {
namespace {

std::vector<cplx> random_complex(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  std::vector<cplx> v(n);
  for (cplx& c : v) {
    const double re = normal(rng);
    c = {re, normal(rng)};
  }
  return v;
}

// O(n^2) unitary DFT straight from the definition.
std::vector<cplx> naive_dft(const std::vector<cplx>& x, bool inverse) {
  const std::size_t n = x.size();
  const double sign = inverse ? 1.0 : -1.0;
  std::vector<cplx> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    cplx acc{};
    for (std::size_t m = 0; m < n; ++m)
      acc += x[m] * std::polar(1.0, sign * 2.0 * std::numbers::pi * double(k * m % n) / double(n));
    out[k] = acc / std::sqrt(double(n));
  }
  return out;
}

double max_abs_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double energy(std::span<const cplx> v) {
  double e = 0.0;
  for (const cplx& c : v) e += std::norm(c);
  return e;
}

FrameConfig small_config() {
  FrameConfig c;
  c.n_s = 16;
  c.n_t = 2;
  c.n_r = 4;
  c.cp_len = 4;
  c.n_taps = 3;
  return c;
}

// ---- frame config -----------------------------------------------------------

TEST(FrameConfig, DefaultsAreValid) {
  const FrameConfig c;
  EXPECT_NO_THROW(c.validate());
  EXPECT_EQ(c.n_s, 256u);
  EXPECT_EQ(c.n_t, 4u);
  EXPECT_EQ(c.n_r, 16u);
  EXPECT_EQ(c.n_i, 1u);
  EXPECT_EQ(c.y_size(), 256u * 16 * 2);
  EXPECT_EQ(c.x_size(), 256u * 4 * 2);
}

TEST(FrameConfig, RejectsBadFieldsWithFieldName) {
  FrameConfig c;
  c.n_s = 100;
  try {
    c.validate();
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("ns"), std::string::npos);
  }
  c = {};
  c.n_taps = 20;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.qam_bits = 4;
  EXPECT_THROW(c.validate(), ConfigError);
}

// ---- QPSK ---------------------------------------------------------------------

TEST(Qam, GrayMappingCorners) {
  const double a = 1.0 / std::sqrt(2.0);
  const std::vector<std::uint8_t> bits{0, 0, 1, 1, 1, 0, 0, 1};
  const std::vector<cplx> s = qam_modulate(bits);
  EXPECT_EQ(s[0], cplx(a, a));
  EXPECT_EQ(s[1], cplx(-a, -a));
  EXPECT_EQ(s[2], cplx(-a, a));
  EXPECT_EQ(s[3], cplx(a, -a));
  for (const cplx& v : s) EXPECT_NEAR(std::norm(v), 1.0, 1e-15);
}

TEST(Qam, RejectsNonBinary) {
  const std::vector<std::uint8_t> bits{0, 2};
  EXPECT_THROW(qam_modulate(bits), DomainError);
}

// ---- FFT ----------------------------------------------------------------------

TEST(Fft, MatchesNaiveDft) {
  std::mt19937_64 rng(1);
  for (std::size_t n : {1u, 2u, 4u, 8u, 64u, 256u}) {
    const std::vector<cplx> x = random_complex(n, rng);
    EXPECT_LT(max_abs_diff(fft(x), naive_dft(x, false)), 1e-10) << n;
    EXPECT_LT(max_abs_diff(ifft(x), naive_dft(x, true)), 1e-10) << n;
  }
}

TEST(Fft, RoundTripAndParsevalProperty) {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<int> log_n(0, 11);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = std::size_t(1) << log_n(rng);
    const std::vector<cplx> x = random_complex(n, rng);
    const std::vector<cplx> back = fft(ifft(x));
    EXPECT_LT(max_abs_diff(back, x), 1e-9);
    EXPECT_NEAR(std::sqrt(energy(fft(x))), std::sqrt(energy(x)), 1e-9);
  }
}

TEST(Fft, SingleSubcarrierGivesConstantModulus) {
  const std::size_t n = 64;
  std::vector<cplx> e(n);
  e[5] = 1.0;
  for (const cplx& v : ifft(e)) EXPECT_NEAR(std::abs(v), 1.0 / std::sqrt(double(n)), 1e-15);
}

TEST(Fft, NonPowerOfTwoIsAConfigError) {
  std::vector<cplx> x(12);
  EXPECT_THROW(fft_inplace(x, false), ConfigError);
}

TEST(Ofdm, CyclicPrefixCopiesTail) {
  std::mt19937_64 rng(3);
  const std::vector<cplx> freq = random_complex(32, rng);
  const std::vector<cplx> td = ifft_cp_add(freq, 8);
  ASSERT_EQ(td.size(), 40u);
  for (std::size_t i = 0; i < 8; ++i) EXPECT_EQ(td[i], td[32 + i]);
}

TEST(Ofdm, FrontendRejectsWrongLength) {
  std::vector<cplx> rx(2 * 39);
  EXPECT_THROW(receive_frontend(rx, 2, 32, 8), FrameError);
}

// ---- channel --------------------------------------------------------------------

TEST(Channel, IdentityTapSumsTransmitAntennas) {
  ChannelRealization chan;
  chan.n_r = 3;
  chan.n_t = 2;
  chan.n_taps = 1;
  chan.taps.assign(6, cplx(1.0));
  std::mt19937_64 rng(4);
  const std::vector<cplx> tx = random_complex(2 * 10, rng);
  const std::vector<cplx> rx = apply_channel(tx, 10, chan, 0.0, rng);
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t n = 0; n < 10; ++n) EXPECT_EQ(rx[r * 10 + n], tx[n] + tx[10 + n]);
}

TEST(Channel, ConvolutionMatchesDirectSum) {
  const FrameConfig c = small_config();
  std::mt19937_64 rng(5);
  const ChannelRealization chan = draw_channel(c, rng);
  const std::size_t len = 20;
  const std::vector<cplx> tx = random_complex(c.n_t * len, rng);
  const std::vector<cplx> rx = apply_channel(tx, len, chan, 0.0, rng);
  for (std::size_t r = 0; r < c.n_r; ++r)
    for (std::size_t n = 0; n < len; ++n) {
      cplx ref{};
      for (std::size_t t = 0; t < c.n_t; ++t)
        for (std::size_t l = 0; l < c.n_taps && l <= n; ++l) ref += chan.tap(r, t, l) * tx[t * len + n - l];
      EXPECT_LT(std::abs(rx[r * len + n] - ref), 1e-12);
    }
}

TEST(Channel, NoiseOnlyVarianceWithinFivePercent) {
  FrameConfig c = small_config();
  const ChannelRealization chan = identity_channel(c);
  const std::size_t len = 100000 / c.n_r;
  const std::vector<cplx> tx(c.n_t * len);
  std::mt19937_64 rng(6);
  const double nv = 0.37;
  const std::vector<cplx> rx = apply_channel(tx, len, chan, nv, rng);
  EXPECT_NEAR(energy(rx) / double(rx.size()), nv, 0.05 * nv);
}

TEST(Channel, FixedSeedIsBitIdentical) {
  const FrameConfig c = small_config();
  std::mt19937_64 a(7), b(7);
  const ChannelRealization ca = draw_channel(c, a), cb = draw_channel(c, b);
  const std::vector<cplx> tx = random_complex(c.n_t * 20, a);
  EXPECT_EQ(random_complex(c.n_t * 20, b), tx);
  const std::vector<cplx> ra = apply_channel(tx, 20, ca, 0.5, a);
  const std::vector<cplx> rb = apply_channel(tx, 20, cb, 0.5, b);
  EXPECT_EQ(ca.taps, cb.taps);
  EXPECT_EQ(ra, rb);
}

TEST(Channel, PoolTapEnergyNormalised) {
  const FrameConfig c;
  const std::vector<ChannelRealization> pool = draw_channel_pool(c, 500, 8);
  double total = 0.0;
  std::size_t pairs = 0;
  for (const auto& ch : pool)
    for (std::size_t r = 0; r < ch.n_r; ++r)
      for (std::size_t t = 0; t < ch.n_t; ++t, ++pairs)
        for (std::size_t l = 0; l < ch.n_taps; ++l) total += std::norm(ch.tap(r, t, l));
  EXPECT_NEAR(total / double(pairs), 1.0, 0.02);
  const std::vector<double> pdp = power_delay_profile(8);
  EXPECT_NEAR(pdp[1] / pdp[0], std::exp(-0.25), 1e-15);
}

TEST(Channel, EmpiricalSnrWithinFifthOfADecibel) {
  const FrameConfig c;
  const std::vector<ChannelRealization> pool = draw_channel_pool(c, 500, 9);
  std::mt19937_64 rng(10);
  double signal = 0.0;
  std::size_t n_signal = 0;
  for (std::size_t f = 0; f < 200; ++f) {
    const Frame fr = simulate_frame(c, pool[f], INFINITY, rng);
    signal += energy(fr.grid);
    n_signal += fr.grid.size();
  }
  const double snr_db = 10.0;
  const std::size_t len = 1000000 / c.n_r;
  const std::vector<cplx> zeros(c.n_t * len);
  const std::vector<cplx> noise = apply_channel(zeros, len, identity_channel(c), noise_variance(c, snr_db), rng);
  const double measured = 10.0 * std::log10((signal / double(n_signal)) / (energy(noise) / double(noise.size())));
  EXPECT_NEAR(measured, snr_db, 0.2);
}

// ---- full chain -----------------------------------------------------------------

TEST(Frame, NoiselessGridIsChannelTimesSymbols) {
  const FrameConfig c = small_config();
  std::mt19937_64 rng(11);
  const ChannelRealization chan = draw_channel(c, rng);
  const Frame f = simulate_frame(c, chan, INFINITY, rng);
  const std::vector<cplx> h = true_channel_response(chan, c.n_s);
  for (std::size_t k = 0; k < c.n_s; ++k)
    for (std::size_t r = 0; r < c.n_r; ++r) {
      cplx ref{};
      for (std::size_t t = 0; t < c.n_t; ++t) ref += h[(k * c.n_r + r) * c.n_t + t] * f.symbols[k * c.n_t + t];
      EXPECT_LT(std::abs(f.grid[k * c.n_r + r] - ref), 1e-9);
    }
}

TEST(Frame, GridEnergyEqualsPostPrefixEnergy) {
  const FrameConfig c = small_config();
  std::mt19937_64 rng(12);
  const ChannelRealization chan = draw_channel(c, rng);
  const Bits bits(c.x_size(), 1);
  const std::vector<cplx> sym = qam_modulate(bits);
  std::vector<cplx> tx;
  for (std::size_t t = 0; t < c.n_t; ++t) {
    std::vector<cplx> col(c.n_s);
    for (std::size_t k = 0; k < c.n_s; ++k) col[k] = sym[k * c.n_t + t];
    const auto td = ifft_cp_add(col, c.cp_len);
    tx.insert(tx.end(), td.begin(), td.end());
  }
  const std::vector<cplx> rx = apply_channel(tx, c.symbol_len(), chan, 0.3, rng);
  double post_cp = 0.0;
  for (std::size_t r = 0; r < c.n_r; ++r)
    post_cp += energy(std::span<const cplx>(rx.data() + r * c.symbol_len() + c.cp_len, c.n_s));
  EXPECT_NEAR(energy(receive_frontend(rx, c.n_r, c.n_s, c.cp_len)), post_cp, 1e-9);
}

TEST(Frame, IdentityChannelRoundTripReproducesSymbols) {
  FrameConfig c = small_config();
  c.n_r = c.n_t;
  std::mt19937_64 rng(13);
  const Frame f = simulate_frame(c, identity_channel(c), INFINITY, rng);
  EXPECT_LT(max_abs_diff(f.grid, f.symbols), 1e-9);
}

TEST(Frame, YIsF32ViewOfGrid) {
  FrameConfig c = small_config();
  c.n_i = 2;
  std::mt19937_64 rng(14);
  const Frame f = simulate_frame(c, draw_channel(c, rng), 5.0, rng);
  ASSERT_EQ(f.sample.y.size(), c.y_size());
  const std::size_t k = 3, r = 1, i = 1;
  const cplx g = f.grid[(i * c.n_s + k) * c.n_r + r];
  EXPECT_EQ(f.sample.y[((k * c.n_r + r) * c.n_i + i) * 2], static_cast<float>(g.real()));
  EXPECT_EQ(f.sample.y[((k * c.n_r + r) * c.n_i + i) * 2 + 1], static_cast<float>(g.imag()));
  // Repetitions see the same symbols with independent noise.
  EXPECT_NE(f.grid[k * c.n_r + r], g);
}

TEST(Frame, PilotsDoNotPerturbData) {
  const FrameConfig c = small_config();
  std::mt19937_64 seed_rng(15);
  const ChannelRealization chan = draw_channel(c, seed_rng);
  std::mt19937_64 a(16), b(16);
  const Frame plain = simulate_frame(c, chan, 10.0, a);
  const Frame piloted = simulate_frame(c, chan, 10.0, b, true);
  EXPECT_EQ(plain.sample.y, piloted.sample.y);
  EXPECT_EQ(piloted.pilot_rx.size(), std::size_t(c.n_t) * c.n_s * c.n_r);
}

// ---- dataset --------------------------------------------------------------------

GenerationParams small_params() {
  GenerationParams p;
  p.cfg = small_config();
  p.pool_size = 5;
  p.n_train = 20;
  p.n_test = 6;
  p.snr_db = 10.0;
  p.seed = 42;
  return p;
}

TEST(Dataset, DefaultSplitSizes) {
  const GenerationParams p;
  EXPECT_EQ(p.n_train, 25600u);
  EXPECT_EQ(p.n_test, 2560u);
  EXPECT_EQ(p.n_test * 10, p.n_train);
}

TEST(Dataset, SameSeedSameDataRegardlessOfThreads) {
  const GenerationParams p = small_params();
  const GeneratedData a = generate_dataset(p, 1);
  const GeneratedData b = generate_dataset(p, 3);
  ASSERT_EQ(a.train.size(), 20u);
  ASSERT_EQ(a.test.size(), 6u);
  for (std::size_t i = 0; i < a.train.size(); ++i) {
    EXPECT_EQ(a.train.samples[i].y, b.train.samples[i].y);
    EXPECT_EQ(a.train.samples[i].x, b.train.samples[i].x);
    EXPECT_EQ(a.train.samples[i].channel_id, b.train.samples[i].channel_id);
  }
  GenerationParams q = p;
  q.seed = 43;
  EXPECT_NE(generate_dataset(q, 1).train.samples[0].x, a.train.samples[0].x);
}

TEST(Dataset, RegenerateFrameMatchesGeneratedSample) {
  const GenerationParams p = small_params();
  const GeneratedData d = generate_dataset(p, 2);
  const Frame f = regenerate_frame(p, d.pool, Split::test, 4, true);
  EXPECT_EQ(f.sample.y, d.test.samples[4].y);
  EXPECT_EQ(f.sample.x, d.test.samples[4].x);
  EXPECT_FALSE(f.pilot_rx.empty());
}

TEST(Dataset, UsesEveryPoolMemberUniformly) {
  GenerationParams p = small_params();
  p.n_train = 2000;
  p.pool_size = 4;
  p.cfg.n_s = 4;
  p.cfg.n_r = 2;
  p.cfg.cp_len = 3;
  const GeneratedData d = generate_dataset(p);
  std::vector<int> counts(4);
  for (const Sample& s : d.train.samples) ++counts.at(s.channel_id);
  for (int n : counts) EXPECT_NEAR(n, 500, 4 * std::sqrt(2000 * 0.25 * 0.75));
}

TEST(Dataset, BitMarginalsBalancedOnDefaultTrainSet) {
  GenerationParams p;
  p.n_test = 1;
  const GeneratedData d = generate_dataset(p);
  std::size_t ones = 0, total = 0;
  for (const Sample& s : d.train.samples) {
    for (std::uint8_t b : s.x) ones += b;
    total += s.x.size();
  }
  const double frac = double(ones) / double(total);
  EXPECT_GE(frac, 0.49);
  EXPECT_LE(frac, 0.51);
}

TEST(DatasetIo, BinaryRoundTrip) {
  const GeneratedData d = generate_dataset(small_params(), 1);
  std::stringstream buf;
  write_dataset(buf, d.train);
  const Dataset back = read_dataset(buf);
  EXPECT_EQ(back.cfg, d.train.cfg);
  EXPECT_EQ(back.snr_db, 10.0);
  EXPECT_EQ(back.seed, 42u);
  ASSERT_EQ(back.size(), d.train.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    EXPECT_EQ(back.samples[i].y, d.train.samples[i].y);
    EXPECT_EQ(back.samples[i].x, d.train.samples[i].x);
  }
}

TEST(DatasetIo, HeaderLayout) {
  Dataset ds;
  ds.cfg = small_config();
  ds.snr_db = 2.5;
  ds.seed = 9;
  std::stringstream buf;
  write_dataset(buf, ds);
  const std::string bytes = buf.str();
  ASSERT_EQ(bytes.size(), 4u + 2 + 7 * 4 + 8 + 8 + 8);
  EXPECT_EQ(bytes.substr(0, 4), "SIGT");
  EXPECT_EQ(bytes[4], 1);
  EXPECT_EQ(bytes[5], 0);
  EXPECT_EQ(static_cast<unsigned char>(bytes[6]), 16);  // n_s, little-endian
}

TEST(DatasetIo, RejectsCorruptInput) {
  std::stringstream bad_magic("XXXX");
  EXPECT_THROW(read_dataset(bad_magic), io::FormatError);
  const GeneratedData d = generate_dataset(small_params(), 1);
  std::stringstream buf;
  write_dataset(buf, d.test);
  std::string bytes = buf.str();
  std::stringstream truncated(bytes.substr(0, bytes.size() - 3));
  EXPECT_THROW(read_dataset(truncated), io::FormatError);
  bytes[4] = 7;
  std::stringstream wrong_version(bytes);
  EXPECT_THROW(read_dataset(wrong_version), io::FormatError);
}

TEST(DatasetIo, CsvHasOneRowPerSample) {
  const GeneratedData d = generate_dataset(small_params(), 1);
  std::stringstream buf;
  write_dataset_csv(buf, d.test);
  std::string line;
  std::size_t rows = 0;
  std::getline(buf, line);
  EXPECT_EQ(line.rfind("sample,y_0,", 0), 0u);
  while (std::getline(buf, line)) ++rows;
  EXPECT_EQ(rows, d.test.size());
}

}  // namespace
}  // namespace sigt
