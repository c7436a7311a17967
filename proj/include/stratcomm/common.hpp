#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace stratcomm {

/// Bad input data (malformed files, invalid distributions, parameter
/// domain violations). The CLI maps these to exit code 2.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical failure inside a solver (non-convergence, LP breakdown).
/// The CLI maps these to exit code 1.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A point of the probability simplex over the source alphabet U.
using Belief = std::vector<double>;

inline constexpr double kProbTol = 1e-12;

/// Throws ValidationError unless p is a distribution: entries >= -tol,
/// sum within tol of 1.
void validate_distribution(const std::string& what, const std::vector<double>& p,
                           double tol = kProbTol);

/// Clamps negatives to zero and rescales so the entries sum to exactly 1.
void renormalize(std::vector<double>& p);

}  // namespace stratcomm
