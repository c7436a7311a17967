#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "stratcomm/problem.hpp"

namespace stratcomm {

/// Result of the alternating-maximization capacity computation.
struct CapacityResult {
  double capacity = 0.0;            // bits/symbol, lower bound certified by gap
  std::vector<double> input_dist;   // maximizing P_X
  double gap = 0.0;                 // duality gap in bits at termination
  int iterations = 0;
  std::vector<double> mi_trace;     // mutual information per iterate (non-decreasing)
};

inline double xlog2x(double x) { return x > 0.0 ? x * std::log2(x) : 0.0; }

/// Shannon entropy in bits; 0 log 0 = 0.
double entropy(std::span<const double> p);

/// H_b(p) in bits. Domain error if p is outside [0,1] beyond 1e-12.
double binary_entropy(double p);

/// D(p || q) in bits. Returns +infinity when absolute continuity fails.
double kl_divergence(const Belief& p, const Belief& q);

/// Mutual information in bits of a joint table (a_size x b_size, row-major).
double mutual_information(std::span<const double> joint, int a_size, int b_size);

/// Average entropy h(p): the conditional entropy H(U|Z) of the joint law
/// p * P_Z|U. Equal to H(p) + sum_u p(u) H(P_Z(.|u)) - H(sum_u p(u) P_Z(.|u)).
double average_entropy(const Belief& p, std::span<const double> p_z_given_u, int z_size);
double average_entropy(const Belief& p, const ProblemSpec& problem);

/// h(q) for the binary source with crossovers (delta0, delta1):
/// H_b(q) + (1-q) H_b(delta0) + q H_b(delta1) - H_b((1-q) delta0 + q (1-delta1)).
double dsbs_average_entropy(double q, double delta0, double delta1);

/// Symmetric case delta0 = delta1 = delta: H_b(delta) + H_b(q) - H_b(q * delta)
/// with q * delta = (1-q) delta + q (1-delta). Increasing on [0,1/2], symmetric
/// about 1/2, h(1/2) = H(U|Z) = H_b(delta).
double dsbs_entropy(double q, double delta);

/// h'(q) = log2((1-q)/q) - (1-2 delta) log2((1-q*delta)/(q*delta)).
/// Domain error at q in {0,1} (diverges as q -> 0).
double dsbs_entropy_derivative(double q, double delta);

/// Capacity of a discrete memoryless channel by alternating maximization,
/// certified by the duality gap. Throws SolverError (carrying the best
/// iterate in the message) if the gap does not reach tol in max_iterations.
CapacityResult channel_capacity(const Channel& channel, double tol = 1e-9,
                                int max_iterations = 10000);

}  // namespace stratcomm
