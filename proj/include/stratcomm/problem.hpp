#pragma once

#include <optional>
#include <string>
#include <vector>

#include "stratcomm/common.hpp"

namespace stratcomm {

/// A memoryless channel: x_size rows, each a distribution over y_size outputs.
struct Channel {
  int x_size = 0;
  int y_size = 0;
  std::vector<double> t_yx;  // row-major, t_yx[x*y_size + y]

  double t(int y, int x) const { return t_yx[static_cast<size_t>(x) * y_size + y]; }
};

/// Finite-alphabet problem instance: i.i.d. source with side information
/// P_UZ, memoryless channel T_Y|X, and the two distortion tables d_e, d_d
/// over U x Z x V.
struct ProblemSpec {
  int u_size = 0;
  int z_size = 0;
  int x_size = 0;
  int y_size = 0;
  int v_size = 0;

  std::vector<double> p_uz;  // u*z row-major
  std::vector<double> t_yx;  // x*y row-major
  std::vector<double> d_e;   // ((u*z_size)+z)*v_size + v
  std::vector<double> d_d;

  // Derived by validate(): source marginal and the conditional P_Z|U.
  // Rows of p_z_given_u for symbols with P(u) = 0 are uniform placeholders;
  // such symbols are reported by unused_symbol().
  std::vector<double> p_u_marginal;
  std::vector<double> p_z_marginal;
  std::vector<double> p_z_given_u;  // u*z row-major

  double puz(int u, int z) const { return p_uz[static_cast<size_t>(u) * z_size + z]; }
  double p_u(int u) const { return p_u_marginal[u]; }
  double p_z(int z) const { return p_z_marginal[z]; }
  double pz_given_u(int z, int u) const {
    return p_z_given_u[static_cast<size_t>(u) * z_size + z];
  }
  double t(int y, int x) const { return t_yx[static_cast<size_t>(x) * y_size + y]; }
  double de(int u, int z, int v) const {
    return d_e[(static_cast<size_t>(u) * z_size + z) * v_size + v];
  }
  double dd(int u, int z, int v) const {
    return d_d[(static_cast<size_t>(u) * z_size + z) * v_size + v];
  }

  bool unused_symbol(int u) const { return p_u_marginal[u] <= 0.0; }

  Belief prior() const { return p_u_marginal; }
  Channel channel() const { return Channel{x_size, y_size, t_yx}; }

  /// Checks all invariants (non-negativity, row sums within 1e-12, finite
  /// distortions), then renormalizes probabilities to exact sums and
  /// recomputes the derived marginals. Throws ValidationError.
  void validate();
};

/// Parameters of the binary-source family: prior P(u1) = p0, side-information
/// crossovers (delta0, delta1), decoder extra cost kappa, channel capacity.
struct DsbsParams {
  double p0 = 0.5;
  double delta0 = 0.3;
  double delta1 = 0.3;
  double kappa = 0.0;
  double capacity = 0.0;

  void validate() const;
};

/// Parses a problem file (sectioned key-value text format, '#' comments).
/// Errors name the offending section, row, or entry with its line number.
ProblemSpec load_problem(const std::string& path);

/// Writes spec in the same format load_problem reads; round-trips to 1e-15.
void save_problem(const ProblemSpec& spec, const std::string& path);

/// Builds the binary instance: P_UZ from (p0, delta0, delta1), Hamming d_e,
/// d_d with extra cost kappa on symbol v1. When no channel is supplied the
/// instance carries a trivial 1x1 channel and the capacity in `params` is
/// meant to be passed to solvers directly.
ProblemSpec dsbs_to_problem(const DsbsParams& params,
                            const std::optional<Channel>& channel = std::nullopt);

}  // namespace stratcomm
