#include "stratcomm/simplex.hpp"

#include <cmath>
#include <limits>

#include "stratcomm/common.hpp"

namespace stratcomm {

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kCostTol = 1e-9;
constexpr double kFeasTol = 1e-8;

// Full-tableau simplex state. Columns 0..n-1 are structural, n..n+m-1 are the
// phase-1 artificials (never eligible to enter in phase 2).
struct Tableau {
  int m, n;                        // rows, structural columns
  std::vector<double> t;           // m x (n + m)
  std::vector<double> rhs;         // m
  std::vector<double> obj;         // reduced costs, n + m
  double obj_val = 0.0;
  std::vector<int> basis;          // m, column index per row
  int iterations = 0;

  double& at(int r, int c) { return t[static_cast<size_t>(r) * (n + m) + c]; }

  void pivot(int r, int jc) {
    const int width = n + m;
    const double piv = at(r, jc);
    double* prow = &t[static_cast<size_t>(r) * width];
    for (int j = 0; j < width; ++j) prow[j] /= piv;
    rhs[r] /= piv;
    for (int i = 0; i < m; ++i) {
      if (i == r) continue;
      double f = at(i, jc);
      if (f == 0.0) continue;
      double* row = &t[static_cast<size_t>(i) * width];
      for (int j = 0; j < width; ++j) row[j] -= f * prow[j];
      rhs[i] -= f * rhs[r];
      row[jc] = 0.0;
    }
    double f = obj[jc];
    if (f != 0.0) {
      for (int j = 0; j < width; ++j) obj[j] -= f * prow[j];
      obj_val -= f * rhs[r];
      obj[jc] = 0.0;
    }
    basis[r] = jc;
    ++iterations;
  }

  // Bland's rule: entering = lowest eligible column index; leaving = among
  // the minimum-ratio rows, the one with the lowest basis column index.
  // Returns kOptimal when no column prices out.
  LpResult::Status iterate(int max_cols, int max_iterations) {
    while (true) {
      if (iterations >= max_iterations) return LpResult::Status::kIterationLimit;
      int enter = -1;
      for (int j = 0; j < max_cols; ++j) {
        if (obj[j] < -kCostTol) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return LpResult::Status::kOptimal;
      int leave = -1;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (int i = 0; i < m; ++i) {
        double a = at(i, enter);
        if (a > kPivotTol) {
          double ratio = rhs[i] / a;
          if (ratio < best_ratio - 1e-12 ||
              (ratio < best_ratio + 1e-12 &&
               (leave < 0 || basis[i] < basis[leave]))) {
            best_ratio = ratio;
            leave = i;
          }
        }
      }
      if (leave < 0) return LpResult::Status::kUnbounded;
      pivot(leave, enter);
    }
  }
};

}  // namespace

LpResult simplex_solve(const std::vector<double>& a, int m, int n,
                       const std::vector<double>& b, const std::vector<double>& c,
                       int max_iterations) {
  Tableau tb;
  tb.m = m;
  tb.n = n;
  tb.t.assign(static_cast<size_t>(m) * (n + m), 0.0);
  tb.rhs.resize(m);
  tb.basis.resize(m);
  for (int i = 0; i < m; ++i) {
    const double sign = b[i] < 0.0 ? -1.0 : 1.0;
    for (int j = 0; j < n; ++j) {
      tb.at(i, j) = sign * a[static_cast<size_t>(i) * n + j];
    }
    tb.rhs[i] = sign * b[i];
    tb.at(i, n + i) = 1.0;
    tb.basis[i] = n + i;
  }

  // Phase 1: minimize the artificial total. Reduced costs of the artificial
  // basis: obj_j = -sum_i T[i][j] for structural j, 0 for artificials.
  tb.obj.assign(n + m, 0.0);
  tb.obj_val = 0.0;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) tb.obj[j] -= tb.at(i, j);
    tb.obj_val -= tb.rhs[i];
  }
  LpResult result;
  auto status = tb.iterate(n, max_iterations);
  if (status == LpResult::Status::kIterationLimit) {
    result.status = status;
    return result;
  }
  if (-tb.obj_val > kFeasTol) {  // obj_val tracks -(phase-1 objective)
    result.status = LpResult::Status::kInfeasible;
    result.iterations = tb.iterations;
    return result;
  }

  // Drive artificials out of the basis; rows that admit no structural pivot
  // are redundant equalities and get neutralized.
  std::vector<bool> row_active(m, true);
  for (int i = 0; i < m; ++i) {
    if (tb.basis[i] < n) continue;
    int jc = -1;
    for (int j = 0; j < n; ++j) {
      if (std::abs(tb.at(i, j)) > kPivotTol) {
        jc = j;
        break;
      }
    }
    if (jc >= 0) {
      tb.pivot(i, jc);
    } else {
      row_active[i] = false;
      for (int j = 0; j < n + m; ++j) tb.at(i, j) = 0.0;
      tb.rhs[i] = 0.0;
      tb.at(i, tb.basis[i]) = 1.0;  // artificial stays basic at level 0
    }
  }

  // Phase 2.
  tb.obj.assign(n + m, 0.0);
  tb.obj_val = 0.0;
  for (int j = 0; j < n; ++j) tb.obj[j] = c[j];
  for (int i = 0; i < m; ++i) {
    if (!row_active[i]) continue;
    const int bj = tb.basis[i];
    const double cb = bj < n ? c[bj] : 0.0;
    if (cb == 0.0) continue;
    for (int j = 0; j < n + m; ++j) tb.obj[j] -= cb * tb.at(i, j);
    tb.obj_val -= cb * tb.rhs[i];
  }
  status = tb.iterate(n, max_iterations);
  result.status = status;
  result.iterations = tb.iterations;
  if (status != LpResult::Status::kOptimal) return result;

  result.x.assign(n, 0.0);
  for (int i = 0; i < m; ++i) {
    if (tb.basis[i] < n) result.x[tb.basis[i]] = tb.rhs[i];
  }
  double value = 0.0;
  for (int j = 0; j < n; ++j) value += c[j] * result.x[j];
  result.value = value;
  return result;
}

}  // namespace stratcomm
