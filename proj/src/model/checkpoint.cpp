#include "sigt/model/checkpoint.hpp"

#include <fstream>

namespace sigt {

using namespace io;

namespace {

void put_list(std::ostream& out, const std::vector<std::uint32_t>& v) {
  put_uint(out, static_cast<std::uint32_t>(v.size()));
  for (auto x : v) put_uint(out, x);
}

std::vector<std::uint32_t> get_list(std::istream& in) {
  const auto n = get_uint<std::uint32_t>(in);
  if (n > 64) throw FormatError("checkpoint: implausible list length " + std::to_string(n));
  std::vector<std::uint32_t> v(n);
  for (auto& x : v) x = get_uint<std::uint32_t>(in);
  return v;
}

}  // namespace

void save_checkpoint(std::ostream& out, const Model& model) {
  const FrameConfig& f = model.frame();
  const ModelConfig& c = model.config();
  out.write("SGTC", 4);
  put_uint(out, kCheckpointVersion);
  put_uint(out, static_cast<std::uint32_t>(c.kind));
  for (std::uint32_t v : {f.n_s, f.n_t, f.n_r, f.n_i, f.cp_len, f.n_taps, f.qam_bits}) put_uint(out, v);
  for (std::uint32_t v : {c.depth, c.heads, c.d_model, c.d_ff, c.mlp_hidden, static_cast<std::uint32_t>(c.aggregation),
                          static_cast<std::uint32_t>(c.pool_kind)})
    put_uint(out, v);
  put_list(out, c.fcdnn_hidden);
  put_uint(out, c.csinet_blocks);
  put_list(out, c.csinet_channels);
  put_f64(out, c.dropout_p);
  put_uint(out, c.init_seed);

  put_uint(out, static_cast<std::uint32_t>(model.parameters().size()));
  for (const NamedParameter& p : model.parameters()) {
    put_string(out, p.name);
    put_uint(out, static_cast<std::uint32_t>(p.tensor.rank()));
    for (std::size_t d : p.tensor.shape()) put_uint<std::uint64_t>(out, d);
    for (double v : p.tensor.data()) put_f64(out, v);
  }
  if (!out) throw FormatError("checkpoint: write failed");
}

std::unique_ptr<Model> load_checkpoint(std::istream& in) {
  expect_magic(in, "SGTC", "checkpoint");
  const auto version = get_uint<std::uint16_t>(in);
  if (version != kCheckpointVersion) throw FormatError("checkpoint: unsupported version " + std::to_string(version));
  ModelConfig c;
  const auto kind = get_uint<std::uint32_t>(in);
  if (kind > 3) throw FormatError("checkpoint: unknown model kind " + std::to_string(kind));
  c.kind = static_cast<ModelKind>(kind);
  FrameConfig f;
  for (std::uint32_t* v : {&f.n_s, &f.n_t, &f.n_r, &f.n_i, &f.cp_len, &f.n_taps, &f.qam_bits})
    *v = get_uint<std::uint32_t>(in);
  std::uint32_t agg = 0, pool = 0;
  for (std::uint32_t* v : {&c.depth, &c.heads, &c.d_model, &c.d_ff, &c.mlp_hidden, &agg, &pool})
    *v = get_uint<std::uint32_t>(in);
  if (agg > 1 || pool > 1) throw FormatError("checkpoint: bad aggregation or pooling tag");
  c.aggregation = static_cast<Aggregation>(agg);
  c.pool_kind = static_cast<PoolKind>(pool);
  c.fcdnn_hidden = get_list(in);
  c.csinet_blocks = get_uint<std::uint32_t>(in);
  c.csinet_channels = get_list(in);
  c.dropout_p = get_f64(in);
  c.init_seed = get_uint<std::uint64_t>(in);

  std::unique_ptr<Model> model;
  try {
    model = make_model(f, c);
  } catch (const ConfigError& e) {
    throw FormatError(std::string("checkpoint: stored configuration is invalid (") + e.what() + ")");
  }

  auto& params = model->parameters();
  const auto count = get_uint<std::uint32_t>(in);
  if (count != params.size())
    throw FormatError("checkpoint: " + std::to_string(count) + " blocks, model expects " +
                      std::to_string(params.size()));
  std::vector<bool> seen(params.size(), false);
  for (std::uint32_t b = 0; b < count; ++b) {
    const std::string name = get_string(in);
    std::size_t idx = params.size();
    for (std::size_t i = 0; i < params.size(); ++i)
      if (params[i].name == name) idx = i;
    if (idx == params.size() || seen[idx]) throw FormatError("checkpoint: unexpected block '" + name + "'");
    seen[idx] = true;
    const auto rank = get_uint<std::uint32_t>(in);
    if (rank > 8) throw FormatError("checkpoint: block '" + name + "' has implausible rank");
    Shape shape(rank);
    for (auto& d : shape) d = get_uint<std::uint64_t>(in);
    Tensor& t = params[idx].tensor;
    if (shape != t.shape())
      throw FormatError("checkpoint: block '" + name + "' has shape " + shape_str(shape) + ", model expects " +
                        shape_str(t.shape()));
    auto data = t.mutable_data();
    for (double& v : data) v = get_f64(in);
  }
  return model;
}

void save_checkpoint(const std::filesystem::path& path, const Model& model) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  save_checkpoint(out, model);
}

std::unique_ptr<Model> load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open checkpoint " + path.string());
  return load_checkpoint(in);
}

}  // namespace sigt
