#pragma once

// Invariant suite behind `bethe_dos verify`. Table-dependent checks read the
// table passed in, so a corrupted table is reported as a failure.

#include <string>
#include <vector>

#include "bethe/treewalk.hpp"

namespace bethe {

struct CheckResult {
  std::string module;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct CheckOptions {
  /// Samples for the |G| <= 1/Im z sweep.
  long bound_samples = 100000;
  /// Samples per point of the Monte Carlo agreement check; 0 skips it.
  long mc_samples = 100000;
  int workers = 0;
};

std::vector<CheckResult> run_invariant_suite(const CoefficientTable& table, const CheckOptions& options = {});

/// Fixed-width pass/fail matrix, one line per check.
std::string format_check_matrix(const std::vector<CheckResult>& results);

}  // namespace bethe
