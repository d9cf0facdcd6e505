#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "codesum/tensor.hpp"

namespace codesum {

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::string worst_parameter;
  std::size_t worst_index = 0;
  std::size_t coordinates = 0;
};

struct GradCheckOptions {
  double eps = 1e-5;
  // Parameters with more elements than this are checked on a seeded sample.
  std::size_t max_coordinates_per_parameter = 48;
  std::uint64_t seed = 7;
  // Denominator floor of the relative error |a - n| / max(|a|, |n|, floor).
  // Central differences on an O(1) loss carry ~1e-10 of rounding noise, so
  // coordinates with near-zero gradients are judged against this floor.
  double floor = 1e-5;
  // Tapes are built in training mode with the same seed every time, so
  // dropout masks are identical across evaluations.
  bool training = false;
};

using LossFunction = std::function<Var<double>(Tape<double>&)>;

// Compares tape gradients of `loss` with central differences over `params`.
// `loss` must build a fresh graph on the tape it is given and be a
// deterministic function of the parameter values.
GradCheckResult finite_difference_check(const LossFunction& loss, ParameterSet<double>& params,
                                        const GradCheckOptions& options = {});

}  // namespace codesum

namespace codesum {

struct GradCheckCase {
  std::string name;
  GradCheckResult result;
};

// Every tape op, the LSTM cell, and both model losses at toy sizes, each
// checked in double precision.
std::vector<GradCheckCase> standard_gradcheck_suite(const GradCheckOptions& options = {});

}  // namespace codesum
