// SPDX-License-Identifier: Apache-2.0
#include "core/grad_check.hpp"

#include <algorithm>
#include <cmath>

namespace sentigru {

double relative_error(double analytic, double numeric) {
  const double scale =
      std::max({std::abs(analytic), std::abs(numeric), 1e-8});
  return std::abs(analytic - numeric) / scale;
}

GradCheckReport grad_check(const std::function<double()>& loss,
                           const std::vector<ParamRef<double>>& params,
                           double step) {
  if (!(step > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "grad_check step must be > 0");
  }
  GradCheckReport report;
  for (const auto& param : params) {
    if (param.value->shape() != param.grad->shape()) {
      throw Error(ErrorCode::kShapeMismatch,
                  "gradient shape differs from parameter '" + param.name + "'");
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < param.value->size(); ++i) {
      double& slot = (*param.value)[i];
      const double saved = slot;
      slot = saved + step;
      const double up = loss();
      slot = saved - step;
      const double down = loss();
      slot = saved;
      if (!std::isfinite(up) || !std::isfinite(down)) {
        throw Error(ErrorCode::kNonFinite,
                    "non-finite loss while probing '" + param.name + "'[" +
                        std::to_string(i) + "]");
      }
      const double numeric = (up - down) / (2.0 * step);
      worst = std::max(worst, relative_error((*param.grad)[i], numeric));
    }
    report.per_parameter[param.name] = worst;
    if (worst >= report.max_relative_error) {
      report.max_relative_error = worst;
      report.worst_parameter = param.name;
    }
  }
  return report;
}

}  // namespace sentigru
