// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "core/tensor.hpp"

namespace sentigru {

struct GradCheckReport {
  double max_relative_error = 0.0;
  std::map<std::string, double> per_parameter;
  std::string worst_parameter;
};

/// Compares analytic gradients against central differences
/// (f(x+h) - f(x-h)) / 2h, coordinate by coordinate. The loss is evaluated
/// against the live parameter tensors, which are restored after each probe.
/// Relative error is |a - n| / max(|a|, |n|, 1e-8).
GradCheckReport grad_check(const std::function<double()>& loss,
                           const std::vector<ParamRef<double>>& params,
                           double step = 1e-5);

double relative_error(double analytic, double numeric);

}  // namespace sentigru
