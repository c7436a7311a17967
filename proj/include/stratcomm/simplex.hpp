#pragma once

#include <vector>

namespace stratcomm {

/// Outcome of the dense simplex method.
struct LpResult {
  enum class Status { kOptimal, kInfeasible, kIterationLimit, kUnbounded };
  Status status = Status::kOptimal;
  double value = 0.0;
  std::vector<double> x;
  int iterations = 0;
};

/// Solves min c.x subject to A x = b, x >= 0 with a two-phase full-tableau
/// simplex using Bland's anti-cycling rule. `a` is m x n row-major.
/// Redundant equality rows are detected in phase 1 and dropped. Intended for
/// small row counts (a handful) with up to a few thousand columns; vertex
/// solutions have at most m nonzero entries.
LpResult simplex_solve(const std::vector<double>& a, int m, int n,
                       const std::vector<double>& b, const std::vector<double>& c,
                       int max_iterations = 500000);

}  // namespace stratcomm
