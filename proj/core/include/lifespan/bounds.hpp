#pragma once

// Empirical check of an inequality lhs <= C * rhs with an unknown constant C.
// C is fitted on a calibration subset and must then cover every sample
// within a fixed margin; an analytic ceiling, when known, is checked too.

#include <optional>
#include <span>
#include <string>

namespace lifespan {

struct BoundCheck {
  std::string name;
  std::size_t samples = 0;
  std::size_t calibration_samples = 0;
  /// max lhs/rhs over the calibration subset.
  double fitted_constant = 0.0;
  /// max lhs/rhs over all samples.
  double max_ratio = 0.0;
  double margin = 2.0;
  std::optional<double> ceiling;
  /// Multiplies both the admissible constant and the ceiling; 1 in normal
  /// runs, < 1 to confirm that the check can fail.
  double scale = 1.0;
  std::size_t violations = 0;
  bool passed = false;
};

struct BoundOptions {
  double margin = 2.0;
  std::optional<double> ceiling;
  double scale = 1.0;
};

/// Samples with key >= the median key form the calibration subset (all
/// samples when no keys are given). A sample violates the bound when its
/// ratio exceeds scale * margin * fitted_constant or scale * ceiling.
BoundCheck check_bound(std::string name, std::span<const double> lhs, std::span<const double> rhs,
                       std::span<const double> keys, const BoundOptions& options = {});

}  // namespace lifespan
