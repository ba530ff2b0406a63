#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

namespace gradcheck {

// Central difference of objective(model) with respect to one parameter
// reached through `param`, a reference into `model`.
template <class Model, class Objective>
double central(Model& model, double& param, Objective&& objective, double step = 1e-5) {
  const double saved = param;
  param = saved + step;
  const double up = objective(model);
  param = saved - step;
  const double down = objective(model);
  param = saved;
  return (up - down) / (2.0 * step);
}

// |a - b| / max(|a|, |b|) over whole gradient vectors; tiny gradients are
// compared against a floor so rounding noise does not dominate.
inline double relative_error(const std::vector<double>& a, const std::vector<double>& b,
                             double floor = 1e-6) {
  double diff = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    diff += (a[k] - b[k]) * (a[k] - b[k]);
    na += a[k] * a[k];
    nb += b[k] * b[k];
  }
  return std::sqrt(diff) / std::max({std::sqrt(na), std::sqrt(nb), floor});
}

}  // namespace gradcheck
