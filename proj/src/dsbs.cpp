#include "stratcomm/dsbs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "stratcomm/best_reply.hpp"
#include "stratcomm/info.hpp"

namespace stratcomm {

namespace {

void check_symmetric(const DsbsParams& p) {
  p.validate();
  if (std::abs(p.p0 - 0.5) > 1e-12) {
    throw ValidationError("closed form requires p0 = 1/2");
  }
  if (std::abs(p.delta0 - p.delta1) > 1e-12 || !(p.delta0 > 0.0 && p.delta0 < 0.5)) {
    throw ValidationError("closed form requires delta0 = delta1 in (0, 1/2)");
  }
  if (p.kappa != 0.0) throw ValidationError("closed form requires kappa = 0");
}

double k_of(double q, double delta, double h_uz) {
  return h_uz - dsbs_entropy(q, delta) -
         dsbs_entropy_derivative(q, delta) * (delta - q);
}

}  // namespace

double solve_q_star(double delta, double tol) {
  if (!(delta > 0.0 && delta < 0.5)) {
    throw ValidationError("solve_q_star: delta must be in (0, 1/2)");
  }
  const double h_uz = binary_entropy(delta);
  // k is strictly increasing on (0, delta], k(0+) = -inf, k(delta) > 0.
  double lo = 1e-18, hi = delta;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (k_of(mid, delta, h_uz) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo < 1e-17 && std::abs(k_of(hi, delta, h_uz)) <= tol) break;
  }
  return hi;
}

double h_inverse(double target, double delta, double tol) {
  const double h_uz = binary_entropy(delta);
  if (!(target >= -1e-12 && target <= h_uz + 1e-12)) {
    throw ValidationError("h_inverse: target outside [0, H(U|Z)]");
  }
  if (target <= 0.0) return 0.0;
  if (target >= h_uz) return 0.5;
  double lo = 0.0, hi = 0.5;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (dsbs_entropy(mid, delta) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo < 1e-17 && std::abs(dsbs_entropy(hi, delta) - target) <= tol) break;
  }
  return 0.5 * (lo + hi);
}

bool feasibility_bound(double q1, double delta, double capacity) {
  return dsbs_entropy(q1, delta) <= binary_entropy(delta) - capacity + 1e-12;
}

double dsbs_psi(double q, const DsbsParams& params) {
  // General route through the two posteriors; reduces to the piecewise form
  // in (nu1, nu0) when delta0 + delta1 < 1.
  const double gamma = (1.0 + params.kappa) / 2.0;
  const double pz0 = (1.0 - q) * (1.0 - params.delta0) + q * params.delta1;
  const double pz1 = 1.0 - pz0;
  auto psi = [gamma](double p) { return p <= gamma ? p : 1.0 - p; };
  double total = 0.0;
  if (pz0 > 0.0) total += pz0 * psi(q * params.delta1 / pz0);
  if (pz1 > 0.0) total += pz1 * psi(q * (1.0 - params.delta1) / pz1);
  return total;
}

namespace {

DsbsSolution finish_solution(const DsbsParams& params, DsbsSolution s) {
  const double p0 = params.p0;
  for (int k = 0; k < 3; ++k) {
    s.alpha[k] = p0 < 1.0 ? s.weights[k] * (1.0 - s.posteriors[k]) / (1.0 - p0) : 0.0;
    s.beta[k] = p0 > 0.0 ? s.weights[k] * s.posteriors[k] / p0 : 0.0;
  }
  return s;
}

}  // namespace

DsbsSolution dsbs_solve(const DsbsParams& params) {
  check_symmetric(params);
  const double delta = params.delta0;
  const double cap = params.capacity;
  const double h_uz = binary_entropy(delta);

  DsbsSolution s;
  s.q_star = solve_q_star(delta);
  s.c_threshold = h_uz - dsbs_entropy(s.q_star, delta);

  if (cap > h_uz) {
    s.regime = DsbsRegime::kZeroDistortion;
    s.value = 0.0;
    s.posteriors = {0.0, 0.5, 1.0};
    s.weights = {0.5, 0.0, 0.5};
    return finish_solution(params, s);
  }
  if (cap <= s.c_threshold) {
    const double r = s.c_threshold > 0.0 ? cap / s.c_threshold : 0.0;
    s.regime = DsbsRegime::kThreePosterior;
    s.posteriors = {s.q_star, 0.5, 1.0 - s.q_star};
    s.weights = {0.5 * r, 1.0 - r, 0.5 * r};
    s.value = delta - cap * (delta - s.q_star) / s.c_threshold;
    return finish_solution(params, s);
  }
  const double q1 = h_inverse(h_uz - cap, delta);
  s.regime = DsbsRegime::kTwoPosterior;
  s.posteriors = {q1, 0.5, 1.0 - q1};
  s.weights = {0.5, 0.0, 0.5};
  s.value = q1;
  return finish_solution(params, s);
}

namespace {

struct Candidate {
  double value = std::numeric_limits<double>::infinity();
  std::array<double, 3> q{};
  std::array<double, 3> lambda{};
  int support = 0;
};

// Weights of an ordered triple from the 3x3 system
//   sum lambda = 1, sum lambda q = p0, sum lambda h(q) = theta (binding).
bool solve_triple_weights(const std::array<double, 3>& q,
                          const std::array<double, 3>& h, double p0, double theta,
                          std::array<double, 3>& lambda) {
  const double a11 = 1, a12 = 1, a13 = 1;
  const double a21 = q[0], a22 = q[1], a23 = q[2];
  const double a31 = h[0], a32 = h[1], a33 = h[2];
  const double det = a11 * (a22 * a33 - a23 * a32) - a12 * (a21 * a33 - a23 * a31) +
                     a13 * (a21 * a32 - a22 * a31);
  if (std::abs(det) < 1e-14) return false;
  const double b1 = 1.0, b2 = p0, b3 = theta;
  lambda[0] = (b1 * (a22 * a33 - a23 * a32) - a12 * (b2 * a33 - a23 * b3) +
               a13 * (b2 * a32 - a22 * b3)) / det;
  lambda[1] = (a11 * (b2 * a33 - a23 * b3) - b1 * (a21 * a33 - a23 * a31) +
               a13 * (a21 * b3 - b2 * a31)) / det;
  lambda[2] = (a11 * (a22 * b3 - b2 * a32) - a12 * (a21 * b3 - b2 * a31) +
               b1 * (a21 * a32 - a22 * a31)) / det;
  for (double l : lambda) {
    if (!(l >= -1e-11 && l <= 1.0 + 1e-11)) return false;
  }
  // Cramer on a nearly singular system (e.g. two probe points a few 1e-9
  // apart) can emit weights inside [0,1] that do not solve the system;
  // verify the residuals.
  const double r1 = lambda[0] + lambda[1] + lambda[2] - 1.0;
  const double r2 = lambda[0] * q[0] + lambda[1] * q[1] + lambda[2] * q[2] - p0;
  const double r3 = lambda[0] * h[0] + lambda[1] * h[1] + lambda[2] * h[2] - theta;
  return std::abs(r1) <= 1e-9 && std::abs(r2) <= 1e-9 && std::abs(r3) <= 1e-9;
}

struct DsbsTables {
  std::vector<double> qs;
  std::vector<double> h;
  std::vector<double> psi;
};

DsbsTables evaluate(const DsbsParams& p, const std::vector<double>& qs) {
  DsbsTables t;
  t.qs = qs;
  t.h.resize(qs.size());
  t.psi.resize(qs.size());
  for (size_t i = 0; i < qs.size(); ++i) {
    t.h[i] = dsbs_average_entropy(qs[i], p.delta0, p.delta1);
    t.psi[i] = dsbs_psi(qs[i], p);
  }
  return t;
}

std::vector<double> scan_values(double lo, double hi, int count,
                                const BeliefThresholds& th) {
  std::vector<double> qs;
  qs.reserve(count + 16);
  for (int i = 0; i < count; ++i) {
    qs.push_back(lo + (hi - lo) * i / (count - 1));
  }
  // Probe both sides of the distortion discontinuities; the infimum is
  // typically approached there.
  for (double b : {th.nu0, th.nu1}) {
    for (double eps : {1e-9, 1e-7}) {
      if (b - eps > lo && b - eps < hi) qs.push_back(b - eps);
      if (b + eps > lo && b + eps < hi) qs.push_back(b + eps);
    }
    if (b > lo && b < hi) qs.push_back(b);
  }
  std::sort(qs.begin(), qs.end());
  qs.erase(std::unique(qs.begin(), qs.end()), qs.end());
  return qs;
}

Candidate best_over_tables(const DsbsTables& t, double p0, double theta,
                           Candidate best) {
  const int n = static_cast<int>(t.qs.size());
  // Pairs (lambda2 = 0): weights from the barycenter, entropy constraint
  // kept as an inequality so slack optima are found too.
  for (int i = 0; i < n; ++i) {
    if (t.qs[i] >= p0) break;
    for (int k = n - 1; k >= 0; --k) {
      if (t.qs[k] <= p0) break;
      const double l1 = (t.qs[k] - p0) / (t.qs[k] - t.qs[i]);
      const double l3 = 1.0 - l1;
      if (l1 * t.h[i] + l3 * t.h[k] < theta - 1e-12) continue;
      const double val = l1 * t.psi[i] + l3 * t.psi[k];
      if (val < best.value) {
        best = {val, {t.qs[i], p0, t.qs[k]}, {l1, 0.0, l3}, 2};
      }
    }
  }
  // Triples with the entropy constraint binding.
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      for (int k = j + 1; k < n; ++k) {
        std::array<double, 3> q{t.qs[i], t.qs[j], t.qs[k]};
        std::array<double, 3> h{t.h[i], t.h[j], t.h[k]};
        std::array<double, 3> lambda;
        if (!solve_triple_weights(q, h, p0, theta, lambda)) continue;
        const double val =
            lambda[0] * t.psi[i] + lambda[1] * t.psi[j] + lambda[2] * t.psi[k];
        if (val < best.value) best = {val, q, lambda, 3};
      }
    }
  }
  return best;
}

}  // namespace

DsbsSolution three_posterior_optimize(const DsbsParams& params, double search_tol) {
  params.validate();
  const double p0 = params.p0;
  const double h_uz = dsbs_average_entropy(p0, params.delta0, params.delta1);
  const double theta = h_uz - params.capacity;
  const BeliefThresholds th = belief_thresholds(params);

  Candidate best;
  // The prior itself is always feasible: h(p0) = H(U|Z) >= theta.
  best = {dsbs_psi(p0, params), {p0, p0, p0}, {1.0, 0.0, 0.0}, 1};

  if (theta <= 1e-12) {
    // Full revelation is feasible; for the Hamming d_e it is optimal.
    Candidate full{(1.0 - p0) * dsbs_psi(0.0, params) + p0 * dsbs_psi(1.0, params),
                   {0.0, p0, 1.0},
                   {1.0 - p0, 0.0, p0},
                   2};
    if (full.value < best.value) best = full;
  }

  DsbsTables coarse = evaluate(params, scan_values(0.0, 1.0, 200, th));
  best = best_over_tables(coarse, p0, theta, best);

  // Coordinate refinement with shrinking windows around the incumbent.
  double window = 2.0 / 199.0;
  while (window > search_tol) {
    window *= 0.5;
    for (int coord = 0; coord < 3; ++coord) {
      if (best.support == 1) break;
      if (best.support == 2 && coord == 1) continue;
      const double center = best.q[coord];
      const double lo = std::max(0.0, center - window);
      const double hi = std::min(1.0, center + window);
      std::vector<double> qs = scan_values(lo, hi, 33, th);
      for (double qv : qs) {
        std::array<double, 3> q = best.q;
        q[coord] = qv;
        if (best.support == 2) {
          if (q[0] >= p0 || q[2] <= p0 || q[0] >= q[2]) continue;
          const double l1 = (q[2] - p0) / (q[2] - q[0]);
          const double l3 = 1.0 - l1;
          const double h1 = dsbs_average_entropy(q[0], params.delta0, params.delta1);
          const double h3 = dsbs_average_entropy(q[2], params.delta0, params.delta1);
          if (l1 * h1 + l3 * h3 < theta - 1e-12) continue;
          const double val = l1 * dsbs_psi(q[0], params) + l3 * dsbs_psi(q[2], params);
          if (val < best.value) best = {val, {q[0], p0, q[2]}, {l1, 0.0, l3}, 2};
        } else {
          if (!(q[0] < q[1] && q[1] < q[2])) continue;
          std::array<double, 3> h{
              dsbs_average_entropy(q[0], params.delta0, params.delta1),
              dsbs_average_entropy(q[1], params.delta0, params.delta1),
              dsbs_average_entropy(q[2], params.delta0, params.delta1)};
          std::array<double, 3> lambda;
          if (!solve_triple_weights(q, h, p0, theta, lambda)) continue;
          const double val = lambda[0] * dsbs_psi(q[0], params) +
                             lambda[1] * dsbs_psi(q[1], params) +
                             lambda[2] * dsbs_psi(q[2], params);
          if (val < best.value) best = {val, q, lambda, 3};
        }
      }
    }
  }

  DsbsSolution s;
  s.q_star = std::numeric_limits<double>::quiet_NaN();
  s.c_threshold = std::numeric_limits<double>::quiet_NaN();
  s.value = best.value;
  s.posteriors = best.q;
  s.weights = best.lambda;
  for (double& l : s.weights) l = std::clamp(l, 0.0, 1.0);
  const double weight2 = s.weights[1];
  if (best.value <= 1e-9 && theta <= 1e-12) {
    s.regime = DsbsRegime::kZeroDistortion;
  } else if (best.support == 3 && weight2 > 1e-9) {
    s.regime = DsbsRegime::kThreePosterior;
  } else {
    s.regime = DsbsRegime::kTwoPosterior;
  }
  return finish_solution(params, s);
}

double two_posterior_boundary_value(const DsbsParams& params) {
  params.validate();
  const BeliefThresholds th = belief_thresholds(params);
  const double p0 = params.p0;
  const double h_uz = dsbs_average_entropy(p0, params.delta0, params.delta1);
  const double theta = h_uz - params.capacity;

  // Right posterior pinned just above the switching belief; the left one
  // scanned for the best feasible pair.
  const double q2 = std::min(1.0, th.gamma + 1e-9);
  if (q2 <= p0) return dsbs_psi(p0, params);
  const double h2 = dsbs_average_entropy(q2, params.delta0, params.delta1);
  const double psi2 = dsbs_psi(q2, params);
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 20000; ++i) {
    const double q1 = p0 * i / 20000.0;
    if (q1 >= q2) break;
    const double l1 = (q2 - p0) / (q2 - q1);
    const double l2 = 1.0 - l1;
    if (l1 < 0.0 || l1 > 1.0) continue;
    const double h1 = dsbs_average_entropy(q1, params.delta0, params.delta1);
    if (l1 * h1 + l2 * h2 < theta - 1e-12) continue;
    best = std::min(best, l1 * dsbs_psi(q1, params) + l2 * psi2);
  }
  return best;
}

}  // namespace stratcomm
