#include "annimpute/imputer.hpp"

#include <algorithm>
#include <cmath>

namespace annimpute {

int to_label(double raw, const LabelSchema& schema) {
  if (std::isnan(raw)) return schema.min_label;
  const double clamped = std::clamp(std::round(raw), static_cast<double>(schema.min_label),
                                    static_cast<double>(schema.max_label));
  return static_cast<int>(clamped);
}

}  // namespace annimpute
