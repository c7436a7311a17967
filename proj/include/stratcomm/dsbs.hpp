#pragma once

#include <array>

#include "stratcomm/problem.hpp"

namespace stratcomm {

enum class DsbsRegime { kThreePosterior, kTwoPosterior, kZeroDistortion };

/// Closed-form / low-dimensional solution of the binary example.
struct DsbsSolution {
  DsbsRegime regime = DsbsRegime::kTwoPosterior;
  double q_star = 0.0;       // regime-boundary belief (symmetric closed form)
  double value = 0.0;        // D_e*
  std::array<double, 3> posteriors{};
  std::array<double, 3> weights{};
  std::array<double, 3> alpha{};  // Q(w_k | u0)
  std::array<double, 3> beta{};   // Q(w_k | u1)
  double c_threshold = 0.0;  // capacity at the regime boundary: H(U|Z) - h(q*)
};

/// Root of k(q) = H(U|Z) - h(q) - h'(q) (delta - q) on (0, delta], located by
/// bisection (k is strictly increasing there, k(0+) = -inf, k(delta) > 0).
double solve_q_star(double delta, double tol = 1e-12);

/// The unique q in [0, 1/2] with dsbs_entropy(q, delta) = target.
/// Throws when target is outside [0, H(U|Z)].
double h_inverse(double target, double delta, double tol = 1e-12);

/// Whether the symmetric splitting (q1, 1/2, 1-q1) admits weights in [0,1]^3
/// at the given capacity: h(q1) <= H(U|Z) - capacity.
bool feasibility_bound(double q1, double delta, double capacity);

/// Average distortion Psi_e of the binary example as a function of the
/// interim belief q, for arbitrary (delta0, delta1, kappa). Worst-for-encoder
/// tie convention at the switching threshold.
double dsbs_psi(double q, const DsbsParams& params);

/// Closed form for the symmetric source (p0 = 1/2, delta0 = delta1 = delta
/// in (0,1/2), kappa = 0). Three regimes in the capacity:
///   C <= H(U|Z) - h(q*): three posteriors (q*, 1/2, 1-q*), linear value;
///   C <= H(U|Z):         two posteriors (h^-1(H(U|Z)-C), 1 - same);
///   C >  H(U|Z):         full revelation, zero distortion.
DsbsSolution dsbs_solve(const DsbsParams& params);

/// Numerical optimum for general (p0, delta0, delta1, kappa, capacity):
/// minimizes the weighted Psi_e over splittings with at most three posteriors,
/// weights solved from the barycenter and the binding entropy constraint
/// (two-posterior candidates keep the constraint as an inequality). Coarse
/// grid search followed by coordinate refinement down to search_tol, with
/// probe points straddling the distortion discontinuities.
DsbsSolution three_posterior_optimize(const DsbsParams& params,
                                      double search_tol = 1e-6);

/// Diagnostic for the two-posterior boundary analysis: value of the best
/// two-posterior splitting whose right posterior is pinned just above the
/// decoder switching threshold gamma.
double two_posterior_boundary_value(const DsbsParams& params);

}  // namespace stratcomm
