#include <gtest/gtest.h>

#include <cmath>

#include "codesum/error.hpp"
#include "codesum/gradcheck.hpp"
#include "codesum/nn.hpp"
#include "codesum/optim.hpp"
#include "codesum/rng.hpp"
#include "codesum/tensor.hpp"

using namespace codesum;

namespace {

std::vector<double> values(Var<double> v) { return {v.value().begin(), v.value().end()}; }

}  // namespace

TEST(Ops, ForwardValues) {
  Tape<double> t;
  auto a = t.constant({2, 2}, {1, 2, 3, 4});
  auto b = t.constant({1, 2}, {10, 20});
  EXPECT_EQ(values(ops::add(a, b)), (std::vector<double>{11, 22, 13, 24}));
  EXPECT_EQ(values(ops::matmul(a, a)), (std::vector<double>{7, 10, 15, 22}));
  EXPECT_EQ(values(ops::concat(a, a)), (std::vector<double>{1, 2, 1, 2, 3, 4, 3, 4}));
  EXPECT_EQ(values(ops::slice_cols(a, 1, 1)), (std::vector<double>{2, 4}));
  EXPECT_EQ(values(ops::row(a, 1)), (std::vector<double>{3, 4}));
  EXPECT_DOUBLE_EQ(ops::sum(a).item(), 10.0);
  EXPECT_DOUBLE_EQ(ops::mean(a).item(), 2.5);
  const auto sm = values(ops::softmax(t.constant({1, 3}, {1000, 1000, 1000})));
  for (double p : sm) EXPECT_NEAR(p, 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(ops::sigmoid(t.constant({1, 2}, {-800, 800})).value()[0], 0.0, 1e-300);
}

TEST(Ops, ShapeAndIndexErrors) {
  Tape<double> t;
  auto a = t.constant({2, 3}, std::vector<double>(6, 1.0));
  auto b = t.constant({2, 2}, std::vector<double>(4, 1.0));
  EXPECT_THROW(ops::add(a, b), ShapeError);
  EXPECT_THROW(ops::mul(a, b), ShapeError);
  EXPECT_THROW(ops::matmul(a, b), ShapeError);
  EXPECT_THROW(ops::slice_cols(a, 2, 2), ShapeError);
  EXPECT_THROW(t.backward(a), ShapeError);
  EXPECT_THROW(t.constant({2, 2}, {1.0}), ShapeError);
  const std::int32_t bad[] = {2};
  EXPECT_THROW(ops::embedding(b, std::span<const std::int32_t>(bad)), IndexError);
  const std::int32_t neg[] = {-1};
  EXPECT_THROW(ops::embedding(b, std::span<const std::int32_t>(neg)), IndexError);
}

TEST(Ops, DropoutIsIdentityOutsideTraining) {
  Tape<double> eval(false, 1);
  auto a = eval.constant({1, 4}, {1, 2, 3, 4});
  EXPECT_EQ(values(ops::dropout(a, 0.5)), values(a));
  Tape<double> train(true, 1);
  auto b = train.constant({1, 1000}, std::vector<double>(1000, 1.0));
  std::size_t kept = 0;
  for (double x : values(ops::dropout(b, 0.25))) {
    EXPECT_TRUE(x == 0.0 || std::abs(x - 1.0 / 0.75) < 1e-12);
    kept += x != 0.0;
  }
  EXPECT_NEAR(kept / 1000.0, 0.75, 0.06);
  EXPECT_THROW(ops::dropout(b, 1.0), ShapeError);
}

TEST(Ops, LossAnchors) {
  Tape<double> t;
  const std::uint8_t gold[] = {1, 0, 1};
  EXPECT_NEAR(ops::binary_cross_entropy(t.constant({1, 3}, {0.5, 0.5, 0.5}), std::span<const std::uint8_t>(gold)).item(),
              std::log(2.0), 1e-15);
  const std::int32_t targets[] = {0, 6};
  EXPECT_NEAR(ops::cross_entropy(t.constant({2, 7}, std::vector<double>(14, 0.3)),
                                 std::span<const std::int32_t>(targets)).item(),
              std::log(7.0), 1e-14);
  // Clamping keeps the loss finite.
  const std::uint8_t one[] = {1};
  EXPECT_NEAR(ops::binary_cross_entropy(t.constant({1, 1}, {0.0}), std::span<const std::uint8_t>(one)).item(),
              -std::log(1e-7), 1e-9);
}

TEST(Tape, GradientsAccumulateIntoParameters) {
  ParameterSet<double> params;
  params.add("w", {1, 2});
  params[0].value = {2.0, -3.0};
  for (int pass = 0; pass < 2; ++pass) {
    Tape<double> t;
    auto w = t.param(params[0]);
    t.backward(ops::sum(ops::mul(w, w)));
  }
  EXPECT_EQ(params[0].grad, (std::vector<double>{8.0, -12.0}));
  params.zero_grad();
  EXPECT_EQ(params[0].grad, (std::vector<double>{0.0, 0.0}));
  // A non-recording tape leaves gradients alone.
  Tape<double> inference(false, 0, false);
  auto w = inference.param(params[0]);
  EXPECT_DOUBLE_EQ(ops::sum(w).item(), -1.0);
  EXPECT_THROW(params.add("w", {1, 1}), ShapeError);
}

// Every op, the LSTM cell and both model losses pass a central-difference
// check at 1e-4 relative error.
TEST(GradCheck, StandardSuite) {
  const auto cases = standard_gradcheck_suite();
  EXPECT_GE(cases.size(), 22u);
  for (const auto& c : cases) {
    EXPECT_LE(c.result.max_relative_error, 1e-4) << c.name << " worst " << c.result.worst_parameter << "["
                                                  << c.result.worst_index << "]";
    EXPECT_GT(c.result.coordinates, 0u) << c.name;
  }
}

TEST(GradCheck, DetectsAWrongGradient) {
  ParameterSet<double> params;
  params.add("x", {1, 3});
  params[0].value = {0.3, -0.2, 0.9};
  // Forward computes x^2 but the recorded backward claims 3x.
  auto loss = [&](Tape<double>& t) {
    auto x = t.param(params[0]);
    std::vector<double> sq;
    for (double v : x.value()) sq.push_back(v * v);
    auto y = t.push({1, 3}, sq, {x}, [x](Tape<double>& tape, std::size_t self) {
      auto gy = tape.grad(self);
      auto gx = tape.grad(x.id);
      for (std::size_t i = 0; i < 3; ++i) gx[i] += 3.0 * x.value()[i] * gy[i];
    });
    return ops::sum(y);
  };
  EXPECT_GT(finite_difference_check(loss, params).max_relative_error, 0.1);
}

TEST(Lstm, ShapesAndGateOrder) {
  ParameterSet<double> params;
  const auto layer = declare_lstm(params, "l", 3, 2);
  EXPECT_EQ(params[layer.input_weights].shape, (Shape{3, 8}));
  EXPECT_EQ(params[layer.recurrent_weights].shape, (Shape{2, 8}));
  EXPECT_EQ(params[layer.bias].shape, (Shape{1, 8}));
  // Zero weights, forget-gate-only bias: c stays 0, h = sigmoid(0) * tanh(0) = 0.
  Tape<double> t;
  auto w = bind_lstm(t, params, layer);
  auto x = t.constant({4, 3}, std::vector<double>(12, 1.0));
  auto states = lstm_states(x, zero_state(t, 2), w);
  ASSERT_EQ(states.size(), 4u);
  EXPECT_EQ(states.back().shape(), (Shape{1, 2}));
  // With input gate bias pushed high and candidate bias at atanh(0.5), c_1 = 0.5.
  params[layer.bias].value = {50, 50, -50, -50, std::atanh(0.5), std::atanh(0.5), 50, 50};
  Tape<double> t2;
  auto w2 = bind_lstm(t2, params, layer);
  auto s1 = lstm_cell(t2.constant({1, 3}, {0, 0, 0}), zero_state(t2, 2), w2);
  EXPECT_NEAR(s1.c.value()[0], 0.5, 1e-12);
  EXPECT_NEAR(s1.h.value()[0], std::tanh(0.5), 1e-12);
}

TEST(Init, XavierUniformBounds) {
  ParameterSet<double> params;
  params.add("w", {30, 50});
  Rng rng(4);
  xavier_uniform(params[0], rng);
  const double bound = std::sqrt(6.0 / 80.0);
  double lo = 1, hi = -1;
  for (double v : params[0].value) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  EXPECT_GE(lo, -bound);
  EXPECT_LE(hi, bound);
  EXPECT_LT(lo, -0.8 * bound);
  EXPECT_GT(hi, 0.8 * bound);
}

TEST(AdamW, FirstStepMatchesHandComputation) {
  ParameterSet<double> params;
  params.add("w", {1, 2});
  params.add("frozen", {1, 1}, false);
  params[0].value = {1.0, -2.0};
  params[0].grad = {0.5, -0.25};
  params[1].value = {7.0};
  params[1].grad = {1.0};
  AdamWConfig cfg;
  cfg.lr = 0.1;
  cfg.weight_decay = 0.01;
  auto state = make_optimizer(params, cfg);
  adamw_step(params, state);
  // First step: m_hat = g, v_hat = g^2, so the Adam direction is sign(g).
  const double step0 = 0.5 / (0.5 + 1e-8), step1 = -0.25 / (0.25 + 1e-8);
  EXPECT_NEAR(params[0].value[0], 1.0 - 0.1 * (step0 + 0.01 * 1.0), 1e-12);
  EXPECT_NEAR(params[0].value[1], -2.0 - 0.1 * (step1 + 0.01 * -2.0), 1e-12);
  EXPECT_EQ(params[1].value[0], 7.0);
  EXPECT_NEAR(gradient_norm(params), std::sqrt(0.25 + 0.0625), 1e-15);
}

TEST(Rng, DeterministicStreams) {
  Rng a(9), b(9);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(a.next(), b.next());
  EXPECT_NE(mix_seed(1, 0), mix_seed(1, 1));
  std::vector<int> v{1, 2, 3, 4, 5, 6}, w = v;
  Rng c(3), d(3);
  c.shuffle(v);
  d.shuffle(w);
  EXPECT_EQ(v, w);
}
