#pragma once

#include <utility>
#include <vector>

#include "stratcomm/best_reply.hpp"
#include "stratcomm/problem.hpp"

namespace stratcomm {

/// A weighted family of posteriors whose barycenter is the prior.
struct WeightedBelief {
  double weight = 0.0;
  Belief posterior;
};
using Splitting = std::vector<WeightedBelief>;

/// Solver output: the optimal value with its supporting splitting and the
/// entropy-constraint bookkeeping.
struct SolveResult {
  double value = 0.0;
  Splitting splitting;
  double threshold_bits = 0.0;  // theta = H(U|Z) - capacity
  double slack_bits = 0.0;      // sum_w lambda_w h(p_w) - theta
  double grid_step = 0.0;
  bool infimum_flag = false;    // optimal support touches a tie-probe point:
                                // the value is an infimum approached at a
                                // discontinuity, not an attained minimum
  int lp_iterations = 0;
};

struct SolveOptions {
  double grid_step = 0.0;       // 0 = auto: 1e-3 for |U|=2, 2e-2 otherwise
  double tie_probe_eps = 1e-7;  // displacement of probe points across switches
  double tie_tol = kTieTol;
  TieBreak tie_break = TieBreak::kWorstForEncoder;
  int threads = 1;              // workers for grid evaluation (0 = hardware)
  int max_lp_iterations = 500000;
};

/// Uniform lattice on the simplex of dimension `dim` with the given step
/// (vertices included).
std::vector<Belief> simplex_grid(int dim, double step);

/// Optimal encoder distortion as an LP over a discretized belief simplex:
/// min sum_g lambda_g Psi_e(p_g) subject to barycenter = P_U, sum lambda = 1,
/// sum lambda_g h(p_g) >= H(U|Z) - capacity. The grid is the uniform lattice
/// plus the prior plus probe points straddling every detected best-reply
/// switching boundary.
SolveResult solve_splitting(const ProblemSpec& problem, double capacity,
                            const SolveOptions& options = {});

/// No-communication value: E_{P_UZ}[d_e(U, Z, v*(Z, P_U(.|Z)))].
double zero_capacity_value(const ProblemSpec& problem, double tie_tol = kTieTol,
                           TieBreak tie_break = TieBreak::kWorstForEncoder);

/// Lagrangian route: max over t in t_grid of
///   vex[Psi_e - t h](P_U) + t (H(U|Z) - capacity),
/// t being the multiplier of the entropy constraint; each envelope is an LP
/// over the same grid (barycenter constraints only). refine_rounds > 0
/// additionally ternary-refines around the best grid point (the objective is
/// concave in t), extending the grid when the maximum sits on its edge.
double lagrangian_value(const ProblemSpec& problem, double capacity,
                        const std::vector<double>& t_grid,
                        const SolveOptions& options = {}, int refine_rounds = 60);

/// Encoding strategy realizing a splitting: Q(w|u) = lambda_w p_w(u) / P(u),
/// returned as a u_size x w table (row-major in u). Throws when a posterior
/// puts mass on a zero-prior symbol.
std::vector<double> strategy_from_splitting(const Splitting& splitting,
                                            const Belief& prior);

/// Per-capacity solve_splitting sweep; non-increasing in the capacity.
std::vector<std::pair<double, double>> tradeoff_curve(const ProblemSpec& problem,
                                                      const std::vector<double>& capacities,
                                                      const SolveOptions& options = {});

}  // namespace stratcomm
