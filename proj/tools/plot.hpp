#pragma once

#include <string>
#include <vector>

#include "lifespan/experiments.hpp"

namespace lifespan::tools {

/// Two-panel SVG: T_num against eps on log axes with the reference slope,
/// and the scaled life span against eps with the theorem's constant.
std::string render_sweep_svg(const std::vector<LifespanRecord>& records, double expected_slope);

}  // namespace lifespan::tools
