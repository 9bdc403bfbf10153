#include "sigt/phy/dataset_io.hpp"

#include <charconv>
#include <fstream>

namespace sigt {

using namespace io;

void write_dataset(std::ostream& out, const Dataset& ds) {
  const FrameConfig& c = ds.cfg;
  out.write("SIGT", 4);
  put_uint<std::uint16_t>(out, kDatasetVersion);
  for (std::uint32_t v : {c.n_s, c.n_t, c.n_r, c.n_i, c.cp_len, c.n_taps, c.qam_bits}) put_uint(out, v);
  put_uint<std::uint64_t>(out, ds.samples.size());
  put_f64(out, ds.snr_db);
  put_uint<std::uint64_t>(out, ds.seed);

  const std::size_t ny = c.y_size(), nx = c.x_size();
  std::vector<char> packed((nx + 7) / 8);
  for (const Sample& s : ds.samples) {
    if (s.y.size() != ny || s.x.size() != nx) throw FormatError("write_dataset: sample shape does not match header");
    for (float v : s.y) put_f32(out, v);
    std::fill(packed.begin(), packed.end(), 0);
    for (std::size_t i = 0; i < nx; ++i)
      if (s.x[i]) packed[i / 8] = static_cast<char>(packed[i / 8] | (1 << (i % 8)));
    out.write(packed.data(), static_cast<std::streamsize>(packed.size()));
  }
  if (!out) throw FormatError("write_dataset: write failed");
}

Dataset read_dataset(std::istream& in) {
  expect_magic(in, "SIGT", "dataset");
  const auto version = get_uint<std::uint16_t>(in);
  if (version != kDatasetVersion) throw FormatError("dataset: unsupported version " + std::to_string(version));
  Dataset ds;
  FrameConfig& c = ds.cfg;
  for (std::uint32_t* f : {&c.n_s, &c.n_t, &c.n_r, &c.n_i, &c.cp_len, &c.n_taps, &c.qam_bits})
    *f = get_uint<std::uint32_t>(in);
  try {
    c.validate();
  } catch (const ConfigError& e) {
    throw FormatError(std::string("dataset: header describes an invalid frame (") + e.what() + ")");
  }
  const auto count = get_uint<std::uint64_t>(in);
  ds.snr_db = get_f64(in);
  ds.seed = get_uint<std::uint64_t>(in);

  const std::size_t ny = c.y_size(), nx = c.x_size();
  std::vector<unsigned char> packed((nx + 7) / 8);
  std::vector<char> raw(ny * 4);
  ds.samples.resize(count);
  for (Sample& s : ds.samples) {
    if (!in.read(raw.data(), static_cast<std::streamsize>(raw.size())))
      throw FormatError("dataset: truncated sample payload");
    s.y.resize(ny);
    for (std::size_t i = 0; i < ny; ++i) {
      std::uint32_t bits = 0;
      for (int b = 0; b < 4; ++b) bits |= std::uint32_t(static_cast<unsigned char>(raw[4 * i + b])) << (8 * b);
      s.y[i] = std::bit_cast<float>(bits);
    }
    if (!in.read(reinterpret_cast<char*>(packed.data()), static_cast<std::streamsize>(packed.size())))
      throw FormatError("dataset: truncated bit payload");
    s.x.resize(nx);
    for (std::size_t i = 0; i < nx; ++i) s.x[i] = (packed[i / 8] >> (i % 8)) & 1u;
    s.snr_db = ds.snr_db;
    s.channel_id = kUnknownChannel;
  }
  if (in.peek() != std::char_traits<char>::eof()) throw FormatError("dataset: trailing bytes after last sample");
  return ds;
}

void write_dataset(const std::filesystem::path& path, const Dataset& ds) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  write_dataset(out, ds);
}

Dataset read_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open dataset " + path.string());
  return read_dataset(in);
}

void write_dataset_csv(std::ostream& out, const Dataset& ds) {
  const std::size_t ny = ds.cfg.y_size(), nx = ds.cfg.x_size();
  out << "sample";
  for (std::size_t i = 0; i < ny; ++i) out << ",y_" << i;
  for (std::size_t i = 0; i < nx; ++i) out << ",x_" << i;
  out << "\r\n";
  char buf[32];
  for (std::size_t n = 0; n < ds.samples.size(); ++n) {
    const Sample& s = ds.samples[n];
    out << n;
    // Shortest round-trip representation keeps the export lossless.
    for (float v : s.y) {
      const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
      out << ',' << std::string_view(buf, static_cast<std::size_t>(end - buf));
    }
    for (std::uint8_t b : s.x) out << ',' << int(b);
    out << "\r\n";
  }
  if (!out) throw FormatError("write_dataset_csv: write failed");
}

void write_dataset_csv(const std::filesystem::path& path, const Dataset& ds) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  write_dataset_csv(out, ds);
}

}  // namespace sigt
