#include "sigt/model/baselines.hpp"

#include "sigt/model/sigt.hpp"

namespace sigt {

FcDnn::FcDnn(const FrameConfig& frame, const ModelConfig& cfg) : Model(frame, cfg) {
  const std::size_t groups = frame_.n_r;
  std::size_t in = 2 * std::size_t(frame_.n_s) * frame_.n_i;
  for (std::size_t i = 0; i < cfg_.fcdnn_hidden.size(); ++i) {
    const std::size_t out = cfg_.fcdnn_hidden[i];
    const std::string name = "antenna_mlp." + std::to_string(i);
    weights_.push_back(builder_.xavier(name + ".weight", {groups, out, in}, in, out));
    biases_.push_back(builder_.constant(name + ".bias", {groups, out}, 0.0));
    in = out;
  }
  output_ = Linear(builder_, "output", in, frame_.x_size());
}

Tensor FcDnn::forward_batch(const Tensor& y) {
  const std::size_t b = y.dim(0);
  Tensor x = permute(tokenize(y), {1, 0, 2});  // [N_r, B, d]
  for (std::size_t i = 0; i < weights_.size(); ++i) x = drop(relu(grouped_linear(x, weights_[i], biases_[i])));
  const Tensor logits = output_(sum_axis(x, 0));
  return reshape(sigmoid(logits), {b, frame_.n_s, frame_.n_t, 2});
}

Tensor CsiNet::RefineBlock::operator()(const Tensor& x) const {
  const Tensor h = conv3(relu(conv2(relu(conv1(x)))));
  return add(x, h);
}

CsiNet::CsiNet(const FrameConfig& frame, const ModelConfig& cfg) : Model(frame, cfg) {
  const std::size_t c0 = cfg_.csinet_channels[0], c1 = cfg_.csinet_channels[1];
  for (std::size_t i = 0; i < cfg_.csinet_blocks; ++i) {
    const std::string name = "refine." + std::to_string(i);
    blocks_.push_back({Conv2d(builder_, name + ".conv1", 2, c0, 3), Conv2d(builder_, name + ".conv2", c0, c1, 3),
                       Conv2d(builder_, name + ".conv3", c1, 2, 3)});
  }
  output_ = Linear(builder_, "output", frame_.y_size(), frame_.x_size());
}

Tensor CsiNet::to_image(const Tensor& y) const {
  const std::size_t b = y.dim(0);
  return reshape(permute(y, {0, 4, 1, 2, 3}), {b, 2, frame_.n_s, std::size_t(frame_.n_r) * frame_.n_i});
}

Tensor CsiNet::forward_batch(const Tensor& y) {
  const std::size_t b = y.dim(0);
  Tensor x = to_image(y);
  for (const RefineBlock& block : blocks_) x = block(x);
  const Tensor logits = output_(drop(reshape(x, {b, x.numel() / b})));
  return reshape(sigmoid(logits), {b, frame_.n_s, frame_.n_t, 2});
}

}  // namespace sigt
