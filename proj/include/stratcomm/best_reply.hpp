#pragma once

#include <span>
#include <vector>

#include "stratcomm/problem.hpp"

namespace stratcomm {

/// How the decoder resolves ties among its minimizers. The model convention
/// is worst-for-encoder; the best-for-encoder variant exists for the
/// matched-distortion consistency checks.
enum class TieBreak { kWorstForEncoder, kBestForEncoder };

inline constexpr double kTieTol = 1e-9;

/// Decoder best reply at a pair (z, belief p): the set of symbols minimizing
/// the posterior-expected d_d, and the selected symbol after tie-breaking.
struct BestReplySet {
  std::vector<int> minimizers;   // v with E_p[d_d] within tie_tol of the min
  int v_star = 0;                // selected symbol
  double decoder_distortion = 0; // min_v E_p[d_d(U,z,v)]
  double encoder_distortion = 0; // E_p[d_e(U,z,v_star)]
};

/// Posterior from an interim belief q after observing side information z:
/// post(u) = q(u) P(z|u) / sum_u' q(u') P(z|u'). Domain error when the
/// evidence z has probability zero under q.
Belief bayes_interim_to_posterior(const Belief& q, int z,
                                  std::span<const double> p_z_given_u, int z_size);
Belief bayes_interim_to_posterior(const Belief& q, int z, const ProblemSpec& problem);

/// Best reply per Definition of the worst-case decoder: minimizer set of
/// E_p[d_d], then the symbol maximizing (or minimizing, per tie_break)
/// E_p[d_e] within it; remaining ties broken by lowest symbol index.
BestReplySet best_reply(int z, const Belief& p, const ProblemSpec& problem,
                        double tie_tol = kTieTol,
                        TieBreak tie_break = TieBreak::kWorstForEncoder);

/// Robust distortion psi_e(z,p) = E_p[d_e(U,z,v*(z,p))].
double robust_distortion(int z, const Belief& p, const ProblemSpec& problem,
                         double tie_tol = kTieTol,
                         TieBreak tie_break = TieBreak::kWorstForEncoder);

/// Average distortion Psi_e(q) = sum_z P_q(z) psi_e(z, posterior(q,z)).
/// Side-information symbols with P_q(z) = 0 contribute nothing.
double average_distortion(const Belief& q, const ProblemSpec& problem,
                          double tie_tol = kTieTol,
                          TieBreak tie_break = TieBreak::kWorstForEncoder);

/// Interim-belief thresholds of the binary example.
struct BeliefThresholds {
  double nu0 = 0;   // posterior after z0 crosses gamma at q = nu0
  double nu1 = 0;   // posterior after z1 crosses gamma at q = nu1
  double gamma = 0; // decoder switching threshold (1+kappa)/2
};

/// gamma = (1+kappa)/2; nu0, nu1 solve p0(nu0) = gamma, p1(nu1) = gamma.
/// nu1 < nu0 iff delta0 + delta1 < 1.
BeliefThresholds belief_thresholds(const DsbsParams& params);

}  // namespace stratcomm
