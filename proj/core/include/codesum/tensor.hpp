#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "codesum/rng.hpp"

namespace codesum {

// Every tensor in the models is a row-major matrix; vectors are 1 x n.
struct Shape {
  std::size_t rows = 0;
  std::size_t cols = 0;

  std::size_t size() const noexcept { return rows * cols; }
  friend bool operator==(const Shape&, const Shape&) = default;
};

std::string to_string(const Shape& s);

template <typename T>
struct Parameter {
  std::string name;
  Shape shape;
  std::vector<T> value;
  std::vector<T> grad;
  bool trainable = true;
};

// Named parameters in declaration order. Checkpoint layout follows this order.
template <typename T>
class ParameterSet {
 public:
  std::size_t add(std::string name, Shape shape, bool trainable = true);

  Parameter<T>& operator[](std::size_t i) { return params_[i]; }
  const Parameter<T>& operator[](std::size_t i) const { return params_[i]; }
  std::size_t size() const noexcept { return params_.size(); }

  Parameter<T>* find(std::string_view name);
  const Parameter<T>* find(std::string_view name) const;

  void zero_grad();
  std::size_t element_count() const;

  auto begin() { return params_.begin(); }
  auto end() { return params_.end(); }
  auto begin() const { return params_.begin(); }
  auto end() const { return params_.end(); }

 private:
  std::vector<Parameter<T>> params_;
};

template <typename T>
class Tape;

// Handle to a node on a tape.
template <typename T>
struct Var {
  Tape<T>* tape = nullptr;
  std::size_t id = 0;

  Shape shape() const;
  std::size_t rows() const { return shape().rows; }
  std::size_t cols() const { return shape().cols; }
  std::span<const T> value() const;
  T item() const;  // value of a 1 x 1 tensor
};

// Records operations for reverse-mode differentiation. A tape belongs to one
// forward/backward pass and is used from a single thread.
template <typename T>
class Tape {
 public:
  using Backward = std::function<void(Tape&, std::size_t self)>;

  explicit Tape(bool training = false, std::uint64_t seed = 0, bool record = true)
      : training_(training), record_(record), rng_(seed) {}

  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var<T> constant(Shape shape, std::vector<T> values);
  // Leaf bound to a parameter's storage. Gradients flow into `p.grad` only on
  // recording tapes, so inference on a shared model never writes to it.
  Var<T> param(const Parameter<T>& p);

  Shape shape(std::size_t id) const { return nodes_[id].shape; }
  std::span<const T> value(std::size_t id) const;
  // Gradient buffer of a node, allocated on first use. Empty when the node
  // does not require a gradient.
  std::span<T> grad(std::size_t id);
  bool requires_grad(std::size_t id) const { return nodes_[id].requires_grad; }

  // Appends an op result; `back` runs during backward() when the node's
  // gradient is non-empty.
  Var<T> push(Shape shape, std::vector<T> value, std::initializer_list<Var<T>> inputs, Backward back);
  Var<T> push(Shape shape, std::vector<T> value, std::span<const Var<T>> inputs, Backward back);

  // Seeds d(loss)/d(loss) = 1 and propagates to every parameter reachable
  // from `loss`. Throws ShapeError unless `loss` is 1 x 1.
  void backward(Var<T> loss);

  bool training() const noexcept { return training_; }
  Rng& rng() noexcept { return rng_; }
  std::size_t node_count() const noexcept { return nodes_.size(); }

 private:
  struct Node {
    Shape shape;
    std::vector<T> value;
    std::vector<T> grad;
    Parameter<T>* param = nullptr;
    bool requires_grad = false;
    Backward back;
  };

  std::vector<Node> nodes_;
  bool training_;
  bool record_;
  Rng rng_;
};

namespace ops {

template <typename T> Var<T> add(Var<T> a, Var<T> b);  // b may be 1 x n, added to every row of a
template <typename T> Var<T> mul(Var<T> a, Var<T> b);  // elementwise
template <typename T> Var<T> scale(Var<T> a, T factor);
template <typename T> Var<T> matmul(Var<T> a, Var<T> b);
template <typename T> Var<T> concat(std::span<const Var<T>> parts);  // along columns
template <typename T> Var<T> concat(Var<T> a, Var<T> b);
template <typename T> Var<T> slice_cols(Var<T> a, std::size_t start, std::size_t len);
template <typename T> Var<T> row(Var<T> a, std::size_t r);
template <typename T> Var<T> stack_rows(std::span<const Var<T>> rows);
template <typename T> Var<T> tanh(Var<T> a);
template <typename T> Var<T> sigmoid(Var<T> a);
// Rows of `table` selected by `ids`; throws IndexError for ids out of range.
template <typename T> Var<T> embedding(Var<T> table, std::span<const std::int32_t> ids);
// Inverted dropout: survivors scaled by 1/(1-p) when the tape is training,
// identity otherwise.
template <typename T> Var<T> dropout(Var<T> a, double p);
template <typename T> Var<T> softmax(Var<T> a);  // row-wise, max-subtracted
template <typename T> Var<T> sum(Var<T> a);
template <typename T> Var<T> mean(Var<T> a);
// -(1/N) sum[y log p + (1-y) log(1-p)] over the N entries of `probs`, with p
// clamped to [1e-7, 1-1e-7].
template <typename T> Var<T> binary_cross_entropy(Var<T> probs, std::span<const std::uint8_t> gold);
// Mean over rows of -log(clamp(probs[r, target_r], 1e-7, 1)).
template <typename T> Var<T> nll(Var<T> probs, std::span<const std::int32_t> targets);
// Mean over rows of -log softmax(logits)[r, target_r], computed stably.
template <typename T> Var<T> cross_entropy(Var<T> logits, std::span<const std::int32_t> targets);

}  // namespace ops

inline constexpr double kProbClamp = 1e-7;

}  // namespace codesum
