#include "codesum/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "codesum/rng.hpp"

namespace codesum {
namespace {

double evaluate(const LossFunction& loss, const GradCheckOptions& options) {
  Tape<double> tape(options.training, options.seed, false);
  return loss(tape).item();
}

}  // namespace

GradCheckResult finite_difference_check(const LossFunction& loss, ParameterSet<double>& params,
                                        const GradCheckOptions& options) {
  params.zero_grad();
  {
    Tape<double> tape(options.training, options.seed);
    tape.backward(loss(tape));
  }
  GradCheckResult result;
  Rng rng(options.seed);
  for (auto& p : params) {
    if (!p.trainable) continue;
    std::vector<std::size_t> coords(p.value.size());
    std::iota(coords.begin(), coords.end(), 0);
    if (coords.size() > options.max_coordinates_per_parameter) {
      rng.shuffle(coords);
      coords.resize(options.max_coordinates_per_parameter);
      std::sort(coords.begin(), coords.end());
    }
    for (auto i : coords) {
      const double saved = p.value[i];
      p.value[i] = saved + options.eps;
      const double plus = evaluate(loss, options);
      p.value[i] = saved - options.eps;
      const double minus = evaluate(loss, options);
      p.value[i] = saved;
      const double numeric = (plus - minus) / (2.0 * options.eps);
      const double analytic = p.grad[i];
      const double denom = std::max({std::abs(analytic), std::abs(numeric), options.floor});
      const double err = std::abs(analytic - numeric) / denom;
      ++result.coordinates;
      if (err > result.max_relative_error || result.worst_parameter.empty()) {
        result.max_relative_error = err;
        result.worst_parameter = p.name;
        result.worst_index = i;
      }
    }
  }
  return result;
}

}  // namespace codesum
