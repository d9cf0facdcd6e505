#include "codesum/tensor.hpp"

#include <algorithm>
#include <cmath>

#include "codesum/error.hpp"

namespace codesum {

std::string to_string(const Shape& s) { return std::to_string(s.rows) + "x" + std::to_string(s.cols); }

// ---- ParameterSet -----------------------------------------------------------

template <typename T>
std::size_t ParameterSet<T>::add(std::string name, Shape shape, bool trainable) {
  if (find(name)) throw ShapeError("duplicate parameter name '" + name + "'");
  Parameter<T> p;
  p.name = std::move(name);
  p.shape = shape;
  p.value.assign(shape.size(), T{0});
  p.grad.assign(shape.size(), T{0});
  p.trainable = trainable;
  params_.push_back(std::move(p));
  return params_.size() - 1;
}

template <typename T>
Parameter<T>* ParameterSet<T>::find(std::string_view name) {
  for (auto& p : params_) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

template <typename T>
const Parameter<T>* ParameterSet<T>::find(std::string_view name) const {
  for (const auto& p : params_) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

template <typename T>
void ParameterSet<T>::zero_grad() {
  for (auto& p : params_) std::fill(p.grad.begin(), p.grad.end(), T{0});
}

template <typename T>
std::size_t ParameterSet<T>::element_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p.value.size();
  return n;
}

// ---- Var / Tape -------------------------------------------------------------

template <typename T>
Shape Var<T>::shape() const {
  return tape->shape(id);
}

template <typename T>
std::span<const T> Var<T>::value() const {
  return tape->value(id);
}

template <typename T>
T Var<T>::item() const {
  if (shape().size() != 1) throw ShapeError("item() on a " + to_string(shape()) + " tensor");
  return value()[0];
}

template <typename T>
Var<T> Tape<T>::constant(Shape shape, std::vector<T> values) {
  if (values.size() != shape.size()) throw ShapeError("constant: value count does not match " + to_string(shape));
  Node n;
  n.shape = shape;
  n.value = std::move(values);
  nodes_.push_back(std::move(n));
  return {this, nodes_.size() - 1};
}

template <typename T>
Var<T> Tape<T>::param(const Parameter<T>& p) {
  Node n;
  n.shape = p.shape;
  n.param = const_cast<Parameter<T>*>(&p);
  n.requires_grad = record_ && p.trainable;
  nodes_.push_back(std::move(n));
  return {this, nodes_.size() - 1};
}

template <typename T>
std::span<const T> Tape<T>::value(std::size_t id) const {
  const auto& n = nodes_[id];
  return n.param ? std::span<const T>(n.param->value) : std::span<const T>(n.value);
}

template <typename T>
std::span<T> Tape<T>::grad(std::size_t id) {
  auto& n = nodes_[id];
  if (!n.requires_grad) return {};
  if (n.param) return n.param->grad;
  if (n.grad.empty()) n.grad.assign(n.shape.size(), T{0});
  return n.grad;
}

template <typename T>
Var<T> Tape<T>::push(Shape shape, std::vector<T> value, std::initializer_list<Var<T>> inputs, Backward back) {
  return push(shape, std::move(value), std::span<const Var<T>>(inputs.begin(), inputs.size()), std::move(back));
}

template <typename T>
Var<T> Tape<T>::push(Shape shape, std::vector<T> value, std::span<const Var<T>> inputs, Backward back) {
  Node n;
  n.shape = shape;
  n.value = std::move(value);
  if (record_) {
    for (const auto& in : inputs) n.requires_grad = n.requires_grad || nodes_[in.id].requires_grad;
    if (n.requires_grad) n.back = std::move(back);
  }
  nodes_.push_back(std::move(n));
  return {this, nodes_.size() - 1};
}

template <typename T>
void Tape<T>::backward(Var<T> loss) {
  if (shape(loss.id).size() != 1) throw ShapeError("backward: loss must be 1x1, got " + to_string(shape(loss.id)));
  auto g = grad(loss.id);
  if (g.empty()) return;
  g[0] += T{1};
  for (std::size_t i = loss.id + 1; i-- > 0;) {
    auto& n = nodes_[i];
    if (!n.back || n.grad.empty()) continue;
    n.back(*this, i);
  }
}

// ---- ops --------------------------------------------------------------------

namespace ops {
namespace {

template <typename T>
void require(bool ok, const char* op, const std::string& detail) {
  if (!ok) throw ShapeError(std::string(op) + ": " + detail);
}

}  // namespace

template <typename T>
Var<T> add(Var<T> a, Var<T> b) {
  const Shape sa = a.shape();
  const Shape sb = b.shape();
  const bool broadcast = sb.rows == 1 && sa.rows > 1 && sb.cols == sa.cols;
  require<T>(sa == sb || broadcast, "add", to_string(sa) + " vs " + to_string(sb));
  auto va = a.value();
  auto vb = b.value();
  std::vector<T> out(va.begin(), va.end());
  for (std::size_t r = 0; r < sa.rows; ++r) {
    const T* brow = vb.data() + (broadcast ? 0 : r * sa.cols);
    T* orow = out.data() + r * sa.cols;
    for (std::size_t c = 0; c < sa.cols; ++c) orow[c] += brow[c];
  }
  return a.tape->push(sa, std::move(out), {a, b}, [a, b, sa, broadcast](Tape<T>& t, std::size_t self) {
    auto g = t.grad(self);
    auto ga = t.grad(a.id);
    for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += g[i];
    auto gb = t.grad(b.id);
    if (gb.empty()) return;
    for (std::size_t r = 0; r < sa.rows; ++r) {
      T* brow = gb.data() + (broadcast ? 0 : r * sa.cols);
      const T* grow = g.data() + r * sa.cols;
      for (std::size_t c = 0; c < sa.cols; ++c) brow[c] += grow[c];
    }
  });
}

template <typename T>
Var<T> mul(Var<T> a, Var<T> b) {
  require<T>(a.shape() == b.shape(), "mul", to_string(a.shape()) + " vs " + to_string(b.shape()));
  auto va = a.value();
  auto vb = b.value();
  std::vector<T> out(va.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = va[i] * vb[i];
  return a.tape->push(a.shape(), std::move(out), {a, b}, [a, b](Tape<T>& t, std::size_t self) {
    auto g = t.grad(self);
    auto va = t.value(a.id);
    auto vb = t.value(b.id);
    auto ga = t.grad(a.id);
    for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += g[i] * vb[i];
    auto gb = t.grad(b.id);
    for (std::size_t i = 0; i < gb.size(); ++i) gb[i] += g[i] * va[i];
  });
}

template <typename T>
Var<T> scale(Var<T> a, T factor) {
  auto va = a.value();
  std::vector<T> out(va.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = va[i] * factor;
  return a.tape->push(a.shape(), std::move(out), {a}, [a, factor](Tape<T>& t, std::size_t self) {
    auto g = t.grad(self);
    auto ga = t.grad(a.id);
    for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += g[i] * factor;
  });
}

template <typename T>
Var<T> matmul(Var<T> a, Var<T> b) {
  const Shape sa = a.shape();
  const Shape sb = b.shape();
  require<T>(sa.cols == sb.rows, "matmul", to_string(sa) + " . " + to_string(sb));
  const std::size_t m = sa.rows, k = sa.cols, n = sb.cols;
  auto va = a.value();
  auto vb = b.value();
  std::vector<T> out(m * n, T{0});
  for (std::size_t i = 0; i < m; ++i) {
    T* orow = out.data() + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const T aik = va[i * k + p];
      if (aik == T{0}) continue;
      const T* brow = vb.data() + p * n;
      for (std::size_t j = 0; j < n; ++j) orow[j] += aik * brow[j];
    }
  }
  return a.tape->push({m, n}, std::move(out), {a, b}, [a, b, m, k, n](Tape<T>& t, std::size_t self) {
    auto g = t.grad(self);
    auto va = t.value(a.id);
    auto vb = t.value(b.id);
    auto ga = t.grad(a.id);
    if (!ga.empty()) {
      // dA = dC . B^T
      for (std::size_t i = 0; i < m; ++i) {
        const T* grow = g.data() + i * n;
        for (std::size_t p = 0; p < k; ++p) {
          const T* brow = vb.data() + p * n;
          T acc{0};
          for (std::size_t j = 0; j < n; ++j) acc += grow[j] * brow[j];
          ga[i * k + p] += acc;
        }
      }
    }
    auto gb = t.grad(b.id);
    if (!gb.empty()) {
      // dB = A^T . dC
      for (std::size_t i = 0; i < m; ++i) {
        const T* grow = g.data() + i * n;
        for (std::size_t p = 0; p < k; ++p) {
          const T aik = va[i * k + p];
          if (aik == T{0}) continue;
          T* gbrow = gb.data() + p * n;
          for (std::size_t j = 0; j < n; ++j) gbrow[j] += aik * grow[j];
        }
      }
    }
  });
}

template <typename T>
Var<T> concat(std::span<const Var<T>> parts) {
  require<T>(!parts.empty(), "concat", "no inputs");
  const std::size_t rows = parts.front().rows();
  std::size_t cols = 0;
  for (const auto& p : parts) {
    require<T>(p.rows() == rows, "concat", "row mismatch " + to_string(p.shape()));
    cols += p.cols();
  }
  std::vector<T> out(rows * cols);
  std::size_t offset = 0;
  for (const auto& p : parts) {
    auto v = p.value();
    const std::size_t pc = p.cols();
    for (std::size_t r = 0; r < rows; ++r) std::copy_n(v.data() + r * pc, pc, out.data() + r * cols + offset);
    offset += pc;
  }
  std::vector<Var<T>> inputs(parts.begin(), parts.end());
  return parts.front().tape->push({rows, cols}, std::move(out), parts,
                                  [inputs, rows, cols](Tape<T>& t, std::size_t self) {
                                    auto g = t.grad(self);
                                    std::size_t offset = 0;
                                    for (const auto& p : inputs) {
                                      const std::size_t pc = t.shape(p.id).cols;
                                      auto gp = t.grad(p.id);
                                      if (!gp.empty()) {
                                        for (std::size_t r = 0; r < rows; ++r) {
                                          for (std::size_t c = 0; c < pc; ++c) gp[r * pc + c] += g[r * cols + offset + c];
                                        }
                                      }
                                      offset += pc;
                                    }
                                  });
}

template <typename T>
Var<T> concat(Var<T> a, Var<T> b) {
  const Var<T> parts[2] = {a, b};
  return concat<T>(std::span<const Var<T>>(parts));
}

template <typename T>
Var<T> slice_cols(Var<T> a, std::size_t start, std::size_t len) {
  const Shape s = a.shape();
  require<T>(start + len <= s.cols, "slice_cols", "range exceeds " + to_string(s));
  auto v = a.value();
  std::vector<T> out(s.rows * len);
  for (std::size_t r = 0; r < s.rows; ++r) std::copy_n(v.data() + r * s.cols + start, len, out.data() + r * len);
  return a.tape->push({s.rows, len}, std::move(out), {a}, [a, s, start, len](Tape<T>& t, std::size_t self) {
    auto g = t.grad(self);
    auto ga = t.grad(a.id);
    for (std::size_t r = 0; r < s.rows; ++r) {
      for (std::size_t c = 0; c < len; ++c) ga[r * s.cols + start + c] += g[r * len + c];
    }
  });
}

template <typename T>
Var<T> row(Var<T> a, std::size_t r) {
  const Shape s = a.shape();
  if (r >= s.rows) throw IndexError("row " + std::to_string(r) + " of " + to_string(s));
  auto v = a.value();
  std::vector<T> out(v.begin() + static_cast<std::ptrdiff_t>(r * s.cols),
                     v.begin() + static_cast<std::ptrdiff_t>((r + 1) * s.cols));
  return a.tape->push({1, s.cols}, std::move(out), {a}, [a, r, s](Tape<T>& t, std::size_t self) {
    auto g = t.grad(self);
    auto ga = t.grad(a.id);
    for (std::size_t c = 0; c < s.cols; ++c) ga[r * s.cols + c] += g[c];
  });
}

template <typename T>
Var<T> stack_rows(std::span<const Var<T>> rows) {
  require<T>(!rows.empty(), "stack_rows", "no inputs");
  const std::size_t cols = rows.front().cols();
  std::size_t total = 0;
  for (const auto& r : rows) {
    require<T>(r.cols() == cols, "stack_rows", "column mismatch " + to_string(r.shape()));
    total += r.rows();
  }
  std::vector<T> out;
  out.reserve(total * cols);
  for (const auto& r : rows) {
    auto v = r.value();
    out.insert(out.end(), v.begin(), v.end());
  }
  std::vector<Var<T>> inputs(rows.begin(), rows.end());
  return rows.front().tape->push({total, cols}, std::move(out), rows, [inputs](Tape<T>& t, std::size_t self) {
    auto g = t.grad(self);
    std::size_t offset = 0;
    for (const auto& r : inputs) {
      const std::size_t n = t.shape(r.id).size();
      auto gr = t.grad(r.id);
      for (std::size_t i = 0; i < gr.size(); ++i) gr[i] += g[offset + i];
      offset += n;
    }
  });
}

template <typename T>
Var<T> tanh(Var<T> a) {
  auto v = a.value();
  std::vector<T> out(v.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::tanh(v[i]);
  return a.tape->push(a.shape(), std::move(out), {a}, [a](Tape<T>& t, std::size_t self) {
    auto g = t.grad(self);
    auto y = t.value(self);
    auto ga = t.grad(a.id);
    for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += g[i] * (T{1} - y[i] * y[i]);
  });
}

template <typename T>
Var<T> sigmoid(Var<T> a) {
  auto v = a.value();
  std::vector<T> out(v.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    // Split by sign so exp never overflows.
    if (v[i] >= T{0}) {
      out[i] = T{1} / (T{1} + std::exp(-v[i]));
    } else {
      const T e = std::exp(v[i]);
      out[i] = e / (T{1} + e);
    }
  }
  return a.tape->push(a.shape(), std::move(out), {a}, [a](Tape<T>& t, std::size_t self) {
    auto g = t.grad(self);
    auto y = t.value(self);
    auto ga = t.grad(a.id);
    for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += g[i] * y[i] * (T{1} - y[i]);
  });
}

template <typename T>
Var<T> embedding(Var<T> table, std::span<const std::int32_t> ids) {
  const Shape s = table.shape();
  auto v = table.value();
  std::vector<T> out(ids.size() * s.cols);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || static_cast<std::size_t>(ids[i]) >= s.rows) {
      throw IndexError("embedding index " + std::to_string(ids[i]) + " outside table of " + std::to_string(s.rows));
    }
    std::copy_n(v.data() + static_cast<std::size_t>(ids[i]) * s.cols, s.cols, out.data() + i * s.cols);
  }
  std::vector<std::int32_t> idx(ids.begin(), ids.end());
  return table.tape->push({ids.size(), s.cols}, std::move(out), {table},
                          [table, idx = std::move(idx), cols = s.cols](Tape<T>& t, std::size_t self) {
                            auto g = t.grad(self);
                            auto gt = t.grad(table.id);
                            for (std::size_t i = 0; i < idx.size(); ++i) {
                              T* dst = gt.data() + static_cast<std::size_t>(idx[i]) * cols;
                              for (std::size_t c = 0; c < cols; ++c) dst[c] += g[i * cols + c];
                            }
                          });
}

template <typename T>
Var<T> dropout(Var<T> a, double p) {
  if (p < 0.0 || p >= 1.0) throw ShapeError("dropout: rate must be in [0, 1)");
  Tape<T>& tape = *a.tape;
  if (!tape.training() || p == 0.0) return a;
  auto v = a.value();
  const T keep_scale = static_cast<T>(1.0 / (1.0 - p));
  std::vector<T> mask(v.size());
  std::vector<T> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    mask[i] = tape.rng().uniform() < p ? T{0} : keep_scale;
    out[i] = v[i] * mask[i];
  }
  return tape.push(a.shape(), std::move(out), {a}, [a, mask = std::move(mask)](Tape<T>& t, std::size_t self) {
    auto g = t.grad(self);
    auto ga = t.grad(a.id);
    for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += g[i] * mask[i];
  });
}

template <typename T>
Var<T> softmax(Var<T> a) {
  const Shape s = a.shape();
  auto v = a.value();
  std::vector<T> out(v.size());
  for (std::size_t r = 0; r < s.rows; ++r) {
    const T* in = v.data() + r * s.cols;
    T* o = out.data() + r * s.cols;
    const T mx = *std::max_element(in, in + s.cols);
    T total{0};
    for (std::size_t c = 0; c < s.cols; ++c) {
      o[c] = std::exp(in[c] - mx);
      total += o[c];
    }
    for (std::size_t c = 0; c < s.cols; ++c) o[c] /= total;
  }
  return a.tape->push(s, std::move(out), {a}, [a, s](Tape<T>& t, std::size_t self) {
    auto g = t.grad(self);
    auto y = t.value(self);
    auto ga = t.grad(a.id);
    for (std::size_t r = 0; r < s.rows; ++r) {
      const T* yr = y.data() + r * s.cols;
      const T* gr = g.data() + r * s.cols;
      T dot{0};
      for (std::size_t c = 0; c < s.cols; ++c) dot += gr[c] * yr[c];
      for (std::size_t c = 0; c < s.cols; ++c) ga[r * s.cols + c] += yr[c] * (gr[c] - dot);
    }
  });
}

template <typename T>
Var<T> sum(Var<T> a) {
  T total{0};
  for (T x : a.value()) total += x;
  return a.tape->push({1, 1}, {total}, {a}, [a](Tape<T>& t, std::size_t self) {
    const T g = t.grad(self)[0];
    auto ga = t.grad(a.id);
    for (auto& x : ga) x += g;
  });
}

template <typename T>
Var<T> mean(Var<T> a) {
  const auto n = a.shape().size();
  require<T>(n > 0, "mean", "empty tensor");
  return scale(sum(a), static_cast<T>(1.0 / static_cast<double>(n)));
}

template <typename T>
Var<T> binary_cross_entropy(Var<T> probs, std::span<const std::uint8_t> gold) {
  auto p = probs.value();
  require<T>(p.size() == gold.size() && !gold.empty(), "binary_cross_entropy",
             std::to_string(p.size()) + " probabilities vs " + std::to_string(gold.size()) + " labels");
  const T lo = static_cast<T>(kProbClamp);
  const T hi = static_cast<T>(1.0 - kProbClamp);
  const T n = static_cast<T>(gold.size());
  T total{0};
  for (std::size_t i = 0; i < p.size(); ++i) {
    const T q = std::clamp(p[i], lo, hi);
    total -= gold[i] ? std::log(q) : std::log(T{1} - q);
  }
  std::vector<std::uint8_t> labels(gold.begin(), gold.end());
  return probs.tape->push({1, 1}, {total / n}, {probs},
                          [probs, labels = std::move(labels), lo, hi, n](Tape<T>& t, std::size_t self) {
                            const T g = t.grad(self)[0];
                            auto p = t.value(probs.id);
                            auto gp = t.grad(probs.id);
                            for (std::size_t i = 0; i < gp.size(); ++i) {
                              if (p[i] < lo || p[i] > hi) continue;  // clamped: flat
                              const T d = labels[i] ? -T{1} / p[i] : T{1} / (T{1} - p[i]);
                              gp[i] += g * d / n;
                            }
                          });
}

template <typename T>
Var<T> nll(Var<T> probs, std::span<const std::int32_t> targets) {
  const Shape s = probs.shape();
  require<T>(s.rows == targets.size() && s.rows > 0, "nll",
             to_string(s) + " vs " + std::to_string(targets.size()) + " targets");
  auto p = probs.value();
  const T lo = static_cast<T>(kProbClamp);
  T total{0};
  for (std::size_t r = 0; r < s.rows; ++r) {
    if (targets[r] < 0 || static_cast<std::size_t>(targets[r]) >= s.cols) throw IndexError("nll target out of range");
    total -= std::log(std::max(p[r * s.cols + static_cast<std::size_t>(targets[r])], lo));
  }
  const T n = static_cast<T>(s.rows);
  std::vector<std::int32_t> tg(targets.begin(), targets.end());
  return probs.tape->push({1, 1}, {total / n}, {probs}, [probs, s, tg = std::move(tg), lo, n](Tape<T>& t, std::size_t self) {
    const T g = t.grad(self)[0];
    auto p = t.value(probs.id);
    auto gp = t.grad(probs.id);
    for (std::size_t r = 0; r < s.rows; ++r) {
      const std::size_t k = r * s.cols + static_cast<std::size_t>(tg[r]);
      if (p[k] < lo) continue;
      gp[k] -= g / (p[k] * n);
    }
  });
}

template <typename T>
Var<T> cross_entropy(Var<T> logits, std::span<const std::int32_t> targets) {
  const Shape s = logits.shape();
  require<T>(s.rows == targets.size() && s.rows > 0, "cross_entropy",
             to_string(s) + " vs " + std::to_string(targets.size()) + " targets");
  auto v = logits.value();
  std::vector<T> probs(v.size());
  T total{0};
  for (std::size_t r = 0; r < s.rows; ++r) {
    if (targets[r] < 0 || static_cast<std::size_t>(targets[r]) >= s.cols) {
      throw IndexError("cross_entropy target out of range");
    }
    const T* in = v.data() + r * s.cols;
    T* pr = probs.data() + r * s.cols;
    const T mx = *std::max_element(in, in + s.cols);
    T z{0};
    for (std::size_t c = 0; c < s.cols; ++c) {
      pr[c] = std::exp(in[c] - mx);
      z += pr[c];
    }
    for (std::size_t c = 0; c < s.cols; ++c) pr[c] /= z;
    total -= in[targets[r]] - mx - std::log(z);
  }
  const T n = static_cast<T>(s.rows);
  std::vector<std::int32_t> tg(targets.begin(), targets.end());
  return logits.tape->push(
      {1, 1}, {total / n}, {logits},
      [logits, s, tg = std::move(tg), probs = std::move(probs), n](Tape<T>& t, std::size_t self) {
        const T g = t.grad(self)[0] / n;
        auto gl = t.grad(logits.id);
        for (std::size_t r = 0; r < s.rows; ++r) {
          for (std::size_t c = 0; c < s.cols; ++c) {
            const T onehot = static_cast<std::size_t>(tg[r]) == c ? T{1} : T{0};
            gl[r * s.cols + c] += g * (probs[r * s.cols + c] - onehot);
          }
        }
      });
}

#define CODESUM_INSTANTIATE_OPS(T)                                                                 \
  template Var<T> add<T>(Var<T>, Var<T>);                                                          \
  template Var<T> mul<T>(Var<T>, Var<T>);                                                          \
  template Var<T> scale<T>(Var<T>, T);                                                             \
  template Var<T> matmul<T>(Var<T>, Var<T>);                                                       \
  template Var<T> concat<T>(std::span<const Var<T>>);                                              \
  template Var<T> concat<T>(Var<T>, Var<T>);                                                       \
  template Var<T> slice_cols<T>(Var<T>, std::size_t, std::size_t);                                 \
  template Var<T> row<T>(Var<T>, std::size_t);                                                     \
  template Var<T> stack_rows<T>(std::span<const Var<T>>);                                          \
  template Var<T> tanh<T>(Var<T>);                                                                 \
  template Var<T> sigmoid<T>(Var<T>);                                                              \
  template Var<T> embedding<T>(Var<T>, std::span<const std::int32_t>);                             \
  template Var<T> dropout<T>(Var<T>, double);                                                      \
  template Var<T> softmax<T>(Var<T>);                                                              \
  template Var<T> sum<T>(Var<T>);                                                                  \
  template Var<T> mean<T>(Var<T>);                                                                 \
  template Var<T> binary_cross_entropy<T>(Var<T>, std::span<const std::uint8_t>);                  \
  template Var<T> nll<T>(Var<T>, std::span<const std::int32_t>);                                   \
  template Var<T> cross_entropy<T>(Var<T>, std::span<const std::int32_t>);

CODESUM_INSTANTIATE_OPS(float)
CODESUM_INSTANTIATE_OPS(double)
#undef CODESUM_INSTANTIATE_OPS

}  // namespace ops

template class ParameterSet<float>;
template class ParameterSet<double>;
template struct Var<float>;
template struct Var<double>;
template class Tape<float>;
template class Tape<double>;

}  // namespace codesum
