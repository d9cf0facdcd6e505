#include "codesum/nn.hpp"

#include <cmath>

#include "codesum/error.hpp"

namespace codesum {

template <typename T>
void xavier_uniform(Parameter<T>& p, Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(p.shape.rows + p.shape.cols));
  for (auto& x : p.value) x = static_cast<T>(rng.uniform(-bound, bound));
}

template <typename T>
LstmLayer declare_lstm(ParameterSet<T>& params, const std::string& prefix, std::size_t input_dim,
                       std::size_t hidden_dim) {
  LstmLayer layer;
  layer.input_dim = input_dim;
  layer.hidden_dim = hidden_dim;
  layer.input_weights = params.add(prefix + ".w_input", {input_dim, 4 * hidden_dim});
  layer.recurrent_weights = params.add(prefix + ".w_hidden", {hidden_dim, 4 * hidden_dim});
  layer.bias = params.add(prefix + ".bias", {1, 4 * hidden_dim});
  return layer;
}

template <typename T>
LstmWeights<T> bind_lstm(Tape<T>& tape, const ParameterSet<T>& params, const LstmLayer& layer) {
  return {tape.param(params[layer.input_weights]), tape.param(params[layer.recurrent_weights]),
          tape.param(params[layer.bias]), layer.hidden_dim};
}

template <typename T>
LstmState<T> zero_state(Tape<T>& tape, std::size_t hidden_dim) {
  return {tape.constant({1, hidden_dim}, std::vector<T>(hidden_dim, T{0})),
          tape.constant({1, hidden_dim}, std::vector<T>(hidden_dim, T{0}))};
}

template <typename T>
LstmState<T> lstm_cell(Var<T> x, const LstmState<T>& prev, const LstmWeights<T>& w) {
  const std::size_t hd = w.hidden_dim;
  if (prev.h.cols() != hd || prev.c.cols() != hd || x.cols() != w.input_weights.rows()) {
    throw ShapeError("lstm_cell: x " + to_string(x.shape()) + ", h " + to_string(prev.h.shape()) + ", c " +
                     to_string(prev.c.shape()) + " for hidden " + std::to_string(hd));
  }
  auto gates = ops::add(ops::add(ops::matmul(x, w.input_weights), ops::matmul(prev.h, w.recurrent_weights)), w.bias);
  auto i = ops::sigmoid(ops::slice_cols(gates, 0, hd));
  auto f = ops::sigmoid(ops::slice_cols(gates, hd, hd));
  auto g = ops::tanh(ops::slice_cols(gates, 2 * hd, hd));
  auto o = ops::sigmoid(ops::slice_cols(gates, 3 * hd, hd));
  auto c = ops::add(ops::mul(f, prev.c), ops::mul(i, g));
  auto h = ops::mul(o, ops::tanh(c));
  return {h, c};
}

template <typename T>
std::vector<Var<T>> lstm_states(Var<T> inputs, const LstmState<T>& initial, const LstmWeights<T>& w) {
  std::vector<Var<T>> out;
  LstmState<T> state = initial;
  for (std::size_t t = 0; t < inputs.rows(); ++t) {
    state = lstm_cell(ops::row(inputs, t), state, w);
    out.push_back(state.h);
  }
  return out;
}

template <typename T>
LstmState<T> lstm_run(Var<T> inputs, const LstmState<T>& initial, const LstmWeights<T>& w) {
  LstmState<T> state = initial;
  for (std::size_t t = 0; t < inputs.rows(); ++t) state = lstm_cell(ops::row(inputs, t), state, w);
  return state;
}

#define CODESUM_INSTANTIATE_NN(T)                                                                      \
  template void xavier_uniform<T>(Parameter<T>&, Rng&);                                                \
  template LstmLayer declare_lstm<T>(ParameterSet<T>&, const std::string&, std::size_t, std::size_t);  \
  template LstmWeights<T> bind_lstm<T>(Tape<T>&, const ParameterSet<T>&, const LstmLayer&);                  \
  template LstmState<T> zero_state<T>(Tape<T>&, std::size_t);                                          \
  template LstmState<T> lstm_cell<T>(Var<T>, const LstmState<T>&, const LstmWeights<T>&);              \
  template std::vector<Var<T>> lstm_states<T>(Var<T>, const LstmState<T>&, const LstmWeights<T>&);     \
  template LstmState<T> lstm_run<T>(Var<T>, const LstmState<T>&, const LstmWeights<T>&);

CODESUM_INSTANTIATE_NN(float)
CODESUM_INSTANTIATE_NN(double)
#undef CODESUM_INSTANTIATE_NN

}  // namespace codesum
