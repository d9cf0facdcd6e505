#include "codesum/optim.hpp"

#include <cmath>

#include "codesum/error.hpp"

namespace codesum {

template <typename T>
OptimizerState<T> make_optimizer(const ParameterSet<T>& params, const AdamWConfig& config) {
  OptimizerState<T> state;
  state.config = config;
  for (const auto& p : params) {
    state.first_moment.emplace_back(p.value.size(), T{0});
    state.second_moment.emplace_back(p.value.size(), T{0});
  }
  return state;
}

template <typename T>
double gradient_norm(const ParameterSet<T>& params) {
  double total = 0.0;
  for (const auto& p : params) {
    if (!p.trainable) continue;
    for (T g : p.grad) total += static_cast<double>(g) * static_cast<double>(g);
  }
  return std::sqrt(total);
}

template <typename T>
void adamw_step(ParameterSet<T>& params, OptimizerState<T>& state) {
  if (state.first_moment.size() != params.size()) throw ShapeError("adamw_step: optimizer state does not match parameters");
  const auto& cfg = state.config;
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double bias1 = 1.0 - std::pow(cfg.beta1, t);
  const double bias2 = 1.0 - std::pow(cfg.beta2, t);
  double clip = 1.0;
  if (cfg.clip_norm > 0.0) {
    const double norm = gradient_norm(params);
    if (norm > cfg.clip_norm) clip = cfg.clip_norm / norm;
  }
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto& p = params[k];
    auto& m = state.first_moment[k];
    auto& v = state.second_moment[k];
    if (m.size() != p.value.size() || v.size() != p.value.size() || p.grad.size() != p.value.size()) {
      throw ShapeError("adamw_step: shape mismatch for '" + p.name + "'");
    }
    if (!p.trainable) continue;
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      const double g = static_cast<double>(p.grad[i]) * clip;
      const double mi = cfg.beta1 * static_cast<double>(m[i]) + (1.0 - cfg.beta1) * g;
      const double vi = cfg.beta2 * static_cast<double>(v[i]) + (1.0 - cfg.beta2) * g * g;
      m[i] = static_cast<T>(mi);
      v[i] = static_cast<T>(vi);
      const double m_hat = mi / bias1;
      const double v_hat = vi / bias2;
      const double theta = static_cast<double>(p.value[i]);
      p.value[i] = static_cast<T>(theta - cfg.lr * (m_hat / (std::sqrt(v_hat) + cfg.eps) + cfg.weight_decay * theta));
    }
  }
}

template OptimizerState<float> make_optimizer<float>(const ParameterSet<float>&, const AdamWConfig&);
template OptimizerState<double> make_optimizer<double>(const ParameterSet<double>&, const AdamWConfig&);
template void adamw_step<float>(ParameterSet<float>&, OptimizerState<float>&);
template void adamw_step<double>(ParameterSet<double>&, OptimizerState<double>&);
template double gradient_norm<float>(const ParameterSet<float>&);
template double gradient_norm<double>(const ParameterSet<double>&);

}  // namespace codesum
