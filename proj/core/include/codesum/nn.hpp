#pragma once

#include <cstddef>
#include <span>
#include <string>

#include "codesum/rng.hpp"
#include "codesum/tensor.hpp"

namespace codesum {

// U(-a, a) with a = sqrt(6 / (fan_in + fan_out)); rows are fan-in.
template <typename T>
void xavier_uniform(Parameter<T>& p, Rng& rng);

// Parameter indices of one LSTM layer: input weights (in x 4H), recurrent
// weights (H x 4H), bias (1 x 4H). Gate order along columns: i, f, g, o.
struct LstmLayer {
  std::size_t input_weights = 0;
  std::size_t recurrent_weights = 0;
  std::size_t bias = 0;
  std::size_t input_dim = 0;
  std::size_t hidden_dim = 0;
};

template <typename T>
LstmLayer declare_lstm(ParameterSet<T>& params, const std::string& prefix, std::size_t input_dim,
                       std::size_t hidden_dim);

template <typename T>
struct LstmWeights {
  Var<T> input_weights;
  Var<T> recurrent_weights;
  Var<T> bias;
  std::size_t hidden_dim = 0;
};

template <typename T>
LstmWeights<T> bind_lstm(Tape<T>& tape, const ParameterSet<T>& params, const LstmLayer& layer);

template <typename T>
struct LstmState {
  Var<T> h;
  Var<T> c;
};

template <typename T>
LstmState<T> zero_state(Tape<T>& tape, std::size_t hidden_dim);

// i, f, o = sigmoid(x Wx + h Wh + b) slices, g = tanh(...) slice,
// c = f * c_prev + i * g, h = o * tanh(c).
template <typename T>
LstmState<T> lstm_cell(Var<T> x, const LstmState<T>& prev, const LstmWeights<T>& w);

// Runs the cell over the rows of `inputs` (L x in) from `initial` and returns
// the final state.
template <typename T>
LstmState<T> lstm_run(Var<T> inputs, const LstmState<T>& initial, const LstmWeights<T>& w);

// Same, returning every hidden state.
template <typename T>
std::vector<Var<T>> lstm_states(Var<T> inputs, const LstmState<T>& initial, const LstmWeights<T>& w);

}  // namespace codesum
