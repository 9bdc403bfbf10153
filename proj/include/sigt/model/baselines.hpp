#pragma once

// Comparison networks sharing the Model interface and training loop.

#include <vector>

#include "sigt/model/layers.hpp"

namespace sigt {

/// One independent MLP per receive antenna over its token, outputs summed,
/// then a linear layer and sigmoid.
class FcDnn : public Model {
 public:
  FcDnn(const FrameConfig& frame, const ModelConfig& cfg);

  /// Grouped weights [N_r, out, in] for hidden layer `i`.
  const Tensor& hidden_weight(std::size_t i) const { return weights_.at(i); }

 protected:
  Tensor forward_batch(const Tensor& y) override;

 private:
  std::vector<Tensor> weights_, biases_;
  Linear output_;
};

/// y as a 2-channel N_s x (N_r N_i) image, residual refine blocks of 3x3
/// convolutions (2 -> c0 -> c1 -> 2, ReLU between, none after the residual
/// add), flatten, linear, sigmoid.
class CsiNet : public Model {
 public:
  struct RefineBlock {
    Conv2d conv1, conv2, conv3;
    Tensor operator()(const Tensor& x) const;
  };

  CsiNet(const FrameConfig& frame, const ModelConfig& cfg);

  /// y [B, N_s, N_r, N_i, 2] -> image [B, 2, N_s, N_r N_i].
  Tensor to_image(const Tensor& y) const;
  const std::vector<RefineBlock>& blocks() const { return blocks_; }

 protected:
  Tensor forward_batch(const Tensor& y) override;

 private:
  std::vector<RefineBlock> blocks_;
  Linear output_;
};

}  // namespace sigt
