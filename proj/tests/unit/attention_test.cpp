#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "attention_oracle.hpp"
#include "gradcheck.hpp"
#include "sigt/tensor/attention.hpp"
#include "sigt/tensor/ops.hpp"

namespace sigt {
namespace {

using testing::Matrix;
using testing::random_tensor;

Matrix to_matrix(const Tensor& t) {
  Matrix m(t.dim(0), std::vector<double>(t.dim(1)));
  for (std::size_t i = 0; i < t.dim(0); ++i)
    for (std::size_t j = 0; j < t.dim(1); ++j) m[i][j] = t.at({i, j});
  return m;
}

AttentionHead random_head(std::size_t d, std::size_t d_qk, std::size_t d_v, std::mt19937_64& rng) {
  return {random_tensor({d_qk, d}, rng), random_tensor({d_qk, d}, rng), random_tensor({d_v, d}, rng)};
}

AttentionParams random_params(std::size_t d, std::size_t h, std::size_t d_qk, std::size_t d_v, std::mt19937_64& rng) {
  AttentionParams p;
  for (std::size_t i = 0; i < h; ++i) p.heads.push_back(random_head(d, d_qk, d_v, rng));
  p.w_out = random_tensor({d, h * d_v}, rng);
  return p;
}

Tensor identity(std::size_t n) {
  std::vector<double> v(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;
  return Tensor::from_data({n, n}, v);
}

Tensor permute_rows(const Tensor& x, const std::vector<std::size_t>& sigma) {
  std::vector<Tensor> rows;
  for (std::size_t i : sigma) rows.push_back(slice(x, 0, i, 1));
  return concat(rows, 0);
}

TEST(SelfAttention, SingleTokenReturnsItsValueVector) {
  std::mt19937_64 rng(1);
  const AttentionHead h = random_head(4, 3, 5, rng);
  const Tensor tok = random_tensor({1, 4}, rng);
  const Tensor out = self_attention(tok, h);
  const Tensor v = linear(tok, h.w_value, Tensor());
  ASSERT_EQ(out.shape(), (Shape{1, 5}));
  for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(out.data()[i], v.data()[i]);
}

TEST(SelfAttention, IdenticalTokensGiveIdenticalRows) {
  std::mt19937_64 rng(2);
  const AttentionHead h = random_head(3, 2, 2, rng);
  const Tensor row = random_tensor({1, 3}, rng);
  const Tensor out = self_attention(concat({row, row}, 0), h);
  EXPECT_EQ(out.at({0, 0}), out.at({1, 0}));
  EXPECT_EQ(out.at({0, 1}), out.at({1, 1}));
}

TEST(SelfAttention, AllOnesWeightsMatchScalarOracle) {
  const Tensor ones = Tensor::full({2, 2}, 1.0);
  const AttentionHead h{ones, ones, ones};
  const Tensor tokens = Tensor::from_data({2, 2}, {1, 0, 0, 1});
  const Tensor out = self_attention(tokens, h);
  const Matrix ref = testing::oracle_attention(to_matrix(tokens), to_matrix(ones), to_matrix(ones), to_matrix(ones));
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) EXPECT_NEAR(out.at({i, j}), ref[i][j], 1e-12);
}

TEST(SelfAttention, RandomWeightsMatchScalarOracle) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 1 + trial % 5, d = 2 + trial % 3, d_qk = 1 + trial % 4, d_v = 1 + trial % 3;
    const AttentionHead h = random_head(d, d_qk, d_v, rng);
    const Tensor tokens = random_tensor({n, d}, rng);
    const Tensor out = self_attention(tokens, h);
    const Matrix ref =
        testing::oracle_attention(to_matrix(tokens), to_matrix(h.w_query), to_matrix(h.w_key), to_matrix(h.w_value));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < d_v; ++j) EXPECT_NEAR(out.at({i, j}), ref[i][j], 1e-12);
  }
}

TEST(SelfAttention, WidthMismatchIsADimensionError) {
  std::mt19937_64 rng(4);
  const AttentionHead h = random_head(4, 2, 2, rng);
  EXPECT_THROW(self_attention(random_tensor({3, 5}, rng), h), DimensionError);
}

TEST(MultiHeadAttention, SingleHeadWithIdentityOutputEqualsSelfAttention) {
  std::mt19937_64 rng(5);
  AttentionParams p;
  p.heads.push_back(random_head(4, 3, 4, rng));
  p.w_out = identity(4);
  const Tensor tokens = random_tensor({5, 4}, rng);
  const Tensor a = multi_head_attention(tokens, p);
  const Tensor b = self_attention(tokens, p.heads[0]);
  for (std::size_t i = 0; i < a.numel(); ++i) EXPECT_NEAR(a.data()[i], b.data()[i], 1e-12);
}

TEST(MultiHeadAttention, TwoHeadsMatchPerHeadOracleThenProjection) {
  std::mt19937_64 rng(6);
  const AttentionParams p = random_params(4, 2, 3, 2, rng);
  const Tensor tokens = random_tensor({3, 4}, rng);
  const Tensor out = multi_head_attention(tokens, p);
  std::vector<Matrix> wq, wk, wv;
  for (const auto& h : p.heads) {
    wq.push_back(to_matrix(h.w_query));
    wk.push_back(to_matrix(h.w_key));
    wv.push_back(to_matrix(h.w_value));
  }
  const Matrix ref = testing::oracle_multi_head(to_matrix(tokens), wq, wk, wv, to_matrix(p.w_out));
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(out.at({i, j}), ref[i][j], 1e-12);
}

TEST(MultiHeadAttention, HeadWidthMismatchIsADimensionError) {
  std::mt19937_64 rng(7);
  AttentionParams p = random_params(4, 2, 3, 2, rng);
  p.w_out = random_tensor({4, 3}, rng);
  EXPECT_THROW(multi_head_attention(random_tensor({2, 4}, rng), p), DimensionError);
  AttentionParams q = random_params(4, 1, 3, 2, rng);
  q.heads[0].w_key = random_tensor({2, 4}, rng);  // d_Q != d_K
  EXPECT_THROW(multi_head_attention(random_tensor({2, 4}, rng), q), DimensionError);
}

TEST(MultiHeadAttention, OutputShapeEqualsInputShapeProperty) {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<std::size_t> pick(1, 6);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = pick(rng), h = pick(rng), d_head = pick(rng);
    const std::size_t d = h * d_head;
    const AttentionParams p = random_params(d, h, d_head, d_head, rng);
    const Tensor tokens = random_tensor({n, d}, rng);
    EXPECT_EQ(multi_head_attention(tokens, p).shape(), tokens.shape());
  }
}

TEST(MultiHeadAttention, TokenPermutationEquivarianceProperty) {
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<std::size_t> pick(1, 6);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = pick(rng), h = pick(rng), d_head = pick(rng);
    const std::size_t d = h * d_head;
    const AttentionParams p = random_params(d, h, d_head, d_head, rng);
    const Tensor tokens = random_tensor({n, d}, rng);
    std::vector<std::size_t> sigma(n);
    std::iota(sigma.begin(), sigma.end(), 0);
    std::shuffle(sigma.begin(), sigma.end(), rng);
    const Tensor lhs = multi_head_attention(permute_rows(tokens, sigma), p);
    const Tensor rhs = permute_rows(multi_head_attention(tokens, p), sigma);
    for (std::size_t i = 0; i < lhs.numel(); ++i) EXPECT_NEAR(lhs.data()[i], rhs.data()[i], 1e-12);
  }
}

TEST(MultiHeadAttention, BatchedEqualsPerSample) {
  std::mt19937_64 rng(10);
  const AttentionParams p = random_params(6, 3, 2, 2, rng);
  const Tensor batch = random_tensor({3, 4, 6}, rng);
  const Tensor out = multi_head_attention(batch, p);
  for (std::size_t b = 0; b < 3; ++b) {
    const Tensor single = multi_head_attention(reshape(slice(batch, 0, b, 1), {4, 6}), p);
    for (std::size_t i = 0; i < single.numel(); ++i) EXPECT_NEAR(out.data()[b * 24 + i], single.data()[i], 1e-12);
  }
}

TEST(MultiHeadAttention, GradientsMatchFiniteDifferences) {
  std::mt19937_64 rng(11);
  for (const auto& [n, h, dh] : {std::tuple{1ul, 1ul, 2ul}, {3ul, 2ul, 2ul}, {4ul, 3ul, 1ul}}) {
    const std::size_t d = h * dh;
    AttentionParams p = random_params(d, h, dh, dh, rng);
    Tensor tokens = random_tensor({2, n, d}, rng);
    std::vector<Tensor> inputs{tokens, p.w_out};
    for (auto& head : p.heads) {
      inputs.push_back(head.w_query);
      inputs.push_back(head.w_key);
      inputs.push_back(head.w_value);
    }
    const auto r = testing::check_gradients(
        [&] { return testing::random_projection(multi_head_attention(tokens, p), 21); }, inputs);
    EXPECT_LT(r.max_rel_error, 1e-4) << r.worst;
  }
}

}  // namespace
}  // namespace sigt
