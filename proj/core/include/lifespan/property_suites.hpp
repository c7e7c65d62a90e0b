#pragma once

// Randomised and ladder-based checks of the inequalities and identities the
// construction relies on. Each suite reports fitted constants with their
// sample sizes; a suite passes when every check admits one constant with no
// violations.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "lifespan/bounds.hpp"

namespace lifespan {

struct Assertion {
  std::string name;
  double value = 0.0;
  double limit = 0.0;
  bool passed = false;
};

struct SuiteResult {
  std::string name;
  std::vector<BoundCheck> checks;
  std::vector<Assertion> assertions;
  double seconds = 0.0;
  bool passed = false;
};

struct PropertyReport {
  std::uint64_t seed = 0;
  std::vector<SuiteResult> suites;
  bool passed = false;
};

struct PropertyOptions {
  std::uint64_t seed = 20240611;
  std::size_t lemma_pairs = 100000;
  double lemma_scale = 1.0;
  std::size_t threads = 0;
};

SuiteResult suite_pointwise_lemma(const PropertyOptions& options);
SuiteResult suite_embedding(const PropertyOptions& options);
SuiteResult suite_mollifier(const PropertyOptions& options);
SuiteResult suite_nonlinear_difference(const PropertyOptions& options);
SuiteResult suite_profile_derivatives(const PropertyOptions& options);
SuiteResult suite_profile_identity(const PropertyOptions& options);
SuiteResult suite_remainder_identity(const PropertyOptions& options);

/// Names accepted by run_property_suites' filter, in run order.
std::vector<std::string> property_suite_names();

/// Runs the selected suites (all when `only` is empty) concurrently.
PropertyReport run_property_suites(const PropertyOptions& options,
                                   const std::vector<std::string>& only = {});

std::string to_json(const PropertyReport& report);

/// Finalises a suite: passed iff every check and assertion passed.
void finish_suite(SuiteResult& suite);

}  // namespace lifespan
