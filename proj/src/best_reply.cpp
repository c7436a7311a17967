#include "stratcomm/best_reply.hpp"

#include <cmath>
#include <limits>

namespace stratcomm {

Belief bayes_interim_to_posterior(const Belief& q, int z,
                                  std::span<const double> p_z_given_u, int z_size) {
  const int u_size = static_cast<int>(q.size());
  Belief post(u_size, 0.0);
  double denom = 0.0;
  for (int u = 0; u < u_size; ++u) {
    post[u] = q[u] * p_z_given_u[static_cast<size_t>(u) * z_size + z];
    denom += post[u];
  }
  if (denom <= 0.0) {
    throw std::domain_error(
        "bayes_interim_to_posterior: side information z=" + std::to_string(z) +
        " has probability zero under the belief");
  }
  for (double& v : post) v /= denom;
  return post;
}

Belief bayes_interim_to_posterior(const Belief& q, int z, const ProblemSpec& problem) {
  return bayes_interim_to_posterior(q, z, problem.p_z_given_u, problem.z_size);
}

namespace {

double expected_distortion(const std::vector<double>& table, const Belief& p,
                           int z, int v, int z_size, int v_size) {
  double e = 0.0;
  for (size_t u = 0; u < p.size(); ++u) {
    e += p[u] * table[(u * z_size + z) * v_size + v];
  }
  return e;
}

}  // namespace

BestReplySet best_reply(int z, const Belief& p, const ProblemSpec& problem,
                        double tie_tol, TieBreak tie_break) {
  BestReplySet out;
  const int v_size = problem.v_size;
  std::vector<double> dd_at(v_size), de_at(v_size);
  double min_dd = std::numeric_limits<double>::infinity();
  for (int v = 0; v < v_size; ++v) {
    dd_at[v] = expected_distortion(problem.d_d, p, z, v, problem.z_size, v_size);
    de_at[v] = expected_distortion(problem.d_e, p, z, v, problem.z_size, v_size);
    min_dd = std::min(min_dd, dd_at[v]);
  }
  out.decoder_distortion = min_dd;
  out.v_star = -1;
  double best_de = 0.0;
  for (int v = 0; v < v_size; ++v) {
    if (dd_at[v] > min_dd + tie_tol) continue;
    out.minimizers.push_back(v);
    const bool better = tie_break == TieBreak::kWorstForEncoder
                            ? de_at[v] > best_de
                            : de_at[v] < best_de;
    if (out.v_star < 0 || better) {  // strict: equal d_e keeps the lowest index
      out.v_star = v;
      best_de = de_at[v];
    }
  }
  out.encoder_distortion = best_de;
  return out;
}

double robust_distortion(int z, const Belief& p, const ProblemSpec& problem,
                         double tie_tol, TieBreak tie_break) {
  return best_reply(z, p, problem, tie_tol, tie_break).encoder_distortion;
}

double average_distortion(const Belief& q, const ProblemSpec& problem,
                          double tie_tol, TieBreak tie_break) {
  double total = 0.0;
  for (int z = 0; z < problem.z_size; ++z) {
    double pz = 0.0;
    for (size_t u = 0; u < q.size(); ++u) {
      pz += q[u] * problem.pz_given_u(z, static_cast<int>(u));
    }
    if (pz <= 0.0) continue;  // weight zero annihilates the term
    Belief post = bayes_interim_to_posterior(q, z, problem);
    total += pz * robust_distortion(z, post, problem, tie_tol, tie_break);
  }
  return total;
}

BeliefThresholds belief_thresholds(const DsbsParams& params) {
  params.validate();
  BeliefThresholds t;
  t.gamma = (1.0 + params.kappa) / 2.0;
  const double g = t.gamma;
  t.nu0 = g * (1.0 - params.delta0) /
          (params.delta1 * (1.0 - g) + g * (1.0 - params.delta0));
  t.nu1 = g * params.delta0 /
          (g * params.delta0 + (1.0 - params.delta1) * (1.0 - g));
  return t;
}

}  // namespace stratcomm
