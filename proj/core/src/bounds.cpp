#include "lifespan/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "lifespan/error.hpp"

namespace lifespan {

BoundCheck check_bound(std::string name, std::span<const double> lhs, std::span<const double> rhs,
                       std::span<const double> keys, const BoundOptions& options) {
  if (lhs.size() != rhs.size() || lhs.empty()) {
    throw InvalidArgument("check_bound: lhs and rhs must be non-empty and of equal length");
  }
  if (!keys.empty() && keys.size() != lhs.size()) {
    throw InvalidArgument("check_bound: keys must match the sample count");
  }
  BoundCheck c;
  c.name = std::move(name);
  c.samples = lhs.size();
  c.margin = options.margin;
  c.ceiling = options.ceiling;
  c.scale = options.scale;

  std::vector<double> ratio(lhs.size());
  for (std::size_t i = 0; i < lhs.size(); ++i) {
    if (!(lhs[i] >= 0.0) || !(rhs[i] >= 0.0)) {
      throw InvalidArgument("check_bound: '" + c.name + "' has a negative or NaN sample");
    }
    if (rhs[i] == 0.0) {
      ratio[i] = lhs[i] == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    } else {
      ratio[i] = lhs[i] / rhs[i];
    }
    c.max_ratio = std::max(c.max_ratio, ratio[i]);
  }

  double threshold = -std::numeric_limits<double>::infinity();
  if (!keys.empty()) {
    std::vector<double> sorted(keys.begin(), keys.end());
    std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
    threshold = sorted[sorted.size() / 2];
  }
  for (std::size_t i = 0; i < ratio.size(); ++i) {
    if (keys.empty() || keys[i] >= threshold) {
      c.fitted_constant = std::max(c.fitted_constant, ratio[i]);
      ++c.calibration_samples;
    }
  }

  const double limit = c.scale * c.margin * c.fitted_constant;
  for (double r : ratio) {
    const bool over_fit = r > limit;
    const bool over_ceiling = c.ceiling && r > c.scale * *c.ceiling;
    if (over_fit || over_ceiling) ++c.violations;
  }
  c.passed = c.violations == 0 && std::isfinite(c.max_ratio);
  return c;
}

}  // namespace lifespan
