#include "stratcomm/splitting.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <thread>

#include "stratcomm/info.hpp"
#include "stratcomm/simplex.hpp"

namespace stratcomm {

namespace {

void fill_lattice(int dim, int level, int remaining, Belief& cur,
                  std::vector<Belief>& out, int n) {
  if (level == dim - 1) {
    cur[level] = static_cast<double>(remaining) / n;
    out.push_back(cur);
    return;
  }
  for (int k = 0; k <= remaining; ++k) {
    cur[level] = static_cast<double>(k) / n;
    fill_lattice(dim, level + 1, remaining - k, cur, out, n);
  }
}

}  // namespace

std::vector<Belief> simplex_grid(int dim, double step) {
  if (!(step > 0.0 && step <= 0.5)) {
    throw ValidationError("grid step must be in (0, 0.5]");
  }
  const int n = std::max(2, static_cast<int>(std::lround(1.0 / step)));
  std::vector<Belief> out;
  Belief cur(dim, 0.0);
  fill_lattice(dim, 0, n, cur, out, n);
  return out;
}

namespace {

// Decoder best-reply profile: the chosen symbol per side-information value,
// -1 where z is unreachable from p. Switching boundaries of this profile are
// where the distortion of posterieurs jumps.
std::vector<int> reply_profile(const Belief& p, const ProblemSpec& pr,
                               const SolveOptions& opt) {
  std::vector<int> prof(pr.z_size, -1);
  for (int z = 0; z < pr.z_size; ++z) {
    double pz = 0.0;
    for (int u = 0; u < pr.u_size; ++u) pz += p[u] * pr.pz_given_u(z, u);
    if (pz <= 0.0) continue;
    Belief post = bayes_interim_to_posterior(p, z, pr);
    prof[z] = best_reply(z, post, pr, opt.tie_tol, opt.tie_break).v_star;
  }
  return prof;
}

Belief lerp(const Belief& a, const Belief& b, double t) {
  Belief out(a.size());
  for (size_t i = 0; i < a.size(); ++i) out[i] = (1.0 - t) * a[i] + t * b[i];
  return out;
}

// Locates the first reply switch on the segment a->b and returns two probe
// beliefs straddling it.
void add_probes_for_segment(const Belief& a, const Belief& b,
                            const std::vector<int>& prof_a,
                            const ProblemSpec& pr, const SolveOptions& opt,
                            std::vector<Belief>& probes) {
  double norm = 0.0;
  for (size_t i = 0; i < a.size(); ++i) norm = std::max(norm, std::abs(b[i] - a[i]));
  if (norm <= 0.0) return;
  const double eps_t = std::min(0.25, opt.tie_probe_eps / norm);
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 60; ++it) {
    double mid = 0.5 * (lo + hi);
    if (reply_profile(lerp(a, b, mid), pr, opt) == prof_a) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  probes.push_back(lerp(a, b, std::max(0.0, lo - eps_t)));
  probes.push_back(lerp(a, b, std::min(1.0, hi + eps_t)));
}

void parallel_for(int count, int threads, const std::function<void(int, int)>& body) {
  if (threads == 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min(threads, count));
  if (threads == 1) {
    body(0, count);
    return;
  }
  std::vector<std::thread> pool;
  const int chunk = (count + threads - 1) / threads;
  for (int w = 0; w < threads; ++w) {
    const int begin = w * chunk;
    const int end = std::min(count, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back(body, begin, end);
  }
  for (auto& th : pool) th.join();
}

struct Grid {
  std::vector<Belief> points;
  std::vector<double> psi;
  std::vector<double> h;
  size_t probes_from = 0;  // points at indices >= probes_from are tie probes
};

Grid build_grid(const ProblemSpec& pr, const SolveOptions& opt) {
  Grid g;
  const double step = opt.grid_step > 0.0 ? opt.grid_step
                                          : (pr.u_size <= 2 ? 1e-3 : 2e-2);
  g.points = simplex_grid(pr.u_size, step);
  g.points.push_back(pr.prior());

  // Probe across every detected best-reply switching boundary: the infimum
  // may be approached at a discontinuity of Psi_e, so both sides of each
  // switch must be represented.
  const int n = std::max(2, static_cast<int>(std::lround(1.0 / step)));
  std::vector<Belief> lattice = simplex_grid(pr.u_size, step);
  std::vector<std::vector<int>> profiles(lattice.size());
  parallel_for(static_cast<int>(lattice.size()), opt.threads, [&](int b, int e) {
    for (int i = b; i < e; ++i) profiles[i] = reply_profile(lattice[i], pr, opt);
  });
  // Lattice neighbors: transfer one 1/n unit between a coordinate pair.
  std::vector<Belief> probes;
  const double unit = 1.0 / n;
  std::map<std::vector<int>, int> index;
  auto key_of = [&](const Belief& p) {
    std::vector<int> k(p.size());
    for (size_t i = 0; i < p.size(); ++i) k[i] = static_cast<int>(std::lround(p[i] * n));
    return k;
  };
  for (size_t i = 0; i < lattice.size(); ++i) index[key_of(lattice[i])] = static_cast<int>(i);
  for (size_t i = 0; i < lattice.size(); ++i) {
    auto key = key_of(lattice[i]);
    for (int from = 0; from < pr.u_size; ++from) {
      if (key[from] == 0) continue;
      for (int to = 0; to < pr.u_size; ++to) {
        if (to == from) continue;
        auto nk = key;
        --nk[from];
        ++nk[to];
        auto it = index.find(nk);
        if (it == index.end() || it->second < static_cast<int>(i)) continue;
        if (profiles[i] != profiles[it->second]) {
          Belief nb = lattice[i];
          nb[from] -= unit;
          nb[to] += unit;
          add_probes_for_segment(lattice[i], nb, profiles[i], pr, opt, probes);
        }
      }
    }
  }
  g.probes_from = g.points.size();
  g.points.insert(g.points.end(), probes.begin(), probes.end());

  g.psi.resize(g.points.size());
  g.h.resize(g.points.size());
  parallel_for(static_cast<int>(g.points.size()), opt.threads, [&](int b, int e) {
    for (int i = b; i < e; ++i) {
      g.psi[i] = average_distortion(g.points[i], pr, opt.tie_tol, opt.tie_break);
      g.h[i] = average_entropy(g.points[i], pr);
    }
  });
  return g;
}

}  // namespace

SolveResult solve_splitting(const ProblemSpec& problem, double capacity,
                            const SolveOptions& options) {
  if (capacity < 0.0) throw ValidationError("capacity must be non-negative");
  Grid grid = build_grid(problem, options);
  const int d = problem.u_size;
  const int n_cols = static_cast<int>(grid.points.size()) + 1;  // + entropy slack
  const int slack = n_cols - 1;
  const int m_rows = 1 + (d - 1) + 1;

  const double h_prior = average_entropy(problem.prior(), problem);
  const double theta = h_prior - capacity;

  std::vector<double> a(static_cast<size_t>(m_rows) * n_cols, 0.0);
  std::vector<double> b(m_rows, 0.0);
  std::vector<double> c(n_cols, 0.0);
  for (int j = 0; j < n_cols - 1; ++j) {
    a[j] = 1.0;                                          // sum lambda = 1
    for (int u = 0; u + 1 < d; ++u) {                    // barycenter (last coord implied)
      a[static_cast<size_t>(1 + u) * n_cols + j] = grid.points[j][u];
    }
    a[static_cast<size_t>(m_rows - 1) * n_cols + j] = grid.h[j];
    c[j] = grid.psi[j];
  }
  a[static_cast<size_t>(m_rows - 1) * n_cols + slack] = -1.0;  // h-row slack
  b[0] = 1.0;
  for (int u = 0; u + 1 < d; ++u) b[1 + u] = problem.prior()[u];
  b[m_rows - 1] = theta;

  LpResult lp = simplex_solve(a, m_rows, n_cols, b, c, options.max_lp_iterations);
  if (lp.status == LpResult::Status::kInfeasible) {
    // Cannot happen for capacity >= 0: the trivial splitting {(1, P_U)} is
    // feasible with zero slack.
    throw SolverError("splitting LP reported infeasible (internal error)");
  }
  if (lp.status != LpResult::Status::kOptimal) {
    throw SolverError("splitting LP did not converge (degeneracy beyond the iteration cap)");
  }

  SolveResult result;
  result.value = lp.value;
  result.threshold_bits = theta;
  result.grid_step = options.grid_step > 0.0 ? options.grid_step
                                             : (d <= 2 ? 1e-3 : 2e-2);
  result.lp_iterations = lp.iterations;
  double h_total = 0.0;
  for (int j = 0; j < n_cols - 1; ++j) {
    if (lp.x[j] > 1e-12) {
      result.splitting.push_back({lp.x[j], grid.points[j]});
      h_total += lp.x[j] * grid.h[j];
      if (static_cast<size_t>(j) >= grid.probes_from) result.infimum_flag = true;
    }
  }
  result.slack_bits = h_total - theta;
  return result;
}

double zero_capacity_value(const ProblemSpec& problem, double tie_tol,
                           TieBreak tie_break) {
  double total = 0.0;
  for (int z = 0; z < problem.z_size; ++z) {
    if (problem.p_z(z) <= 0.0) continue;
    Belief post(problem.u_size);
    for (int u = 0; u < problem.u_size; ++u) post[u] = problem.puz(u, z) / problem.p_z(z);
    const int v = best_reply(z, post, problem, tie_tol, tie_break).v_star;
    for (int u = 0; u < problem.u_size; ++u) {
      total += problem.puz(u, z) * problem.de(u, z, v);
    }
  }
  return total;
}

namespace {

// Lower convex envelope of (psi - t h) at the prior: LP over the same grid
// with the barycenter constraints only.
double envelope_at_prior(const Grid& grid, const ProblemSpec& pr, double t,
                         const SolveOptions& opt) {
  const int d = pr.u_size;
  const int n_cols = static_cast<int>(grid.points.size());
  const int m_rows = d;  // normalization + d-1 barycenter rows
  std::vector<double> a(static_cast<size_t>(m_rows) * n_cols, 0.0);
  std::vector<double> b(m_rows, 0.0);
  std::vector<double> c(n_cols, 0.0);
  for (int j = 0; j < n_cols; ++j) {
    a[j] = 1.0;
    for (int u = 0; u + 1 < d; ++u) {
      a[static_cast<size_t>(1 + u) * n_cols + j] = grid.points[j][u];
    }
    c[j] = grid.psi[j] - t * grid.h[j];
  }
  b[0] = 1.0;
  for (int u = 0; u + 1 < d; ++u) b[1 + u] = pr.prior()[u];
  LpResult lp = simplex_solve(a, m_rows, n_cols, b, c, opt.max_lp_iterations);
  if (lp.status != LpResult::Status::kOptimal) {
    throw SolverError("envelope LP failed");
  }
  return lp.value;
}

}  // namespace

double lagrangian_value(const ProblemSpec& problem, double capacity,
                        const std::vector<double>& t_grid,
                        const SolveOptions& options, int refine_rounds) {
  if (t_grid.empty()) throw ValidationError("t_grid must be non-empty");
  for (double t : t_grid) {
    if (t < 0.0) throw ValidationError("t_grid entries must be non-negative");
  }
  Grid grid = build_grid(problem, options);
  const double theta = average_entropy(problem.prior(), problem) - capacity;

  std::vector<double> ts(t_grid);
  std::sort(ts.begin(), ts.end());
  // Lagrangian of the entropy constraint sum lambda h >= theta with
  // multiplier t >= 0: the penalized cost is psi - t h and the dual value is
  // the envelope plus t theta. Strong duality of the LP pair makes the
  // supremum match the constrained optimum.
  auto dual = [&](double t) {
    return envelope_at_prior(grid, problem, t, options) + t * theta;
  };

  double best_t = ts[0];
  double best = dual(best_t);
  size_t best_i = 0;
  for (size_t i = 1; i < ts.size(); ++i) {
    double g = dual(ts[i]);
    if (g > best) {
      best = g;
      best_t = ts[i];
      best_i = i;
    }
  }
  if (refine_rounds <= 0) return best;

  // The dual function is concave in t (pointwise min of affine functions
  // minus a line), so extend while the max sits on the right edge, then
  // ternary-search the bracketing interval.
  double lo = best_i > 0 ? ts[best_i - 1] : ts[0];
  double hi = best_i + 1 < ts.size() ? ts[best_i + 1] : ts.back();
  while (best_t >= hi - 1e-15 && hi == ts.back()) {
    lo = best_t;
    hi = std::max(1.0, hi * 2.0);
    double g = dual(hi);
    if (g > best) {
      best = g;
      best_t = hi;
    } else {
      break;
    }
  }
  for (int it = 0; it < refine_rounds; ++it) {
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    const double g1 = dual(m1);
    const double g2 = dual(m2);
    if (g1 > best) best = g1;
    if (g2 > best) best = g2;
    if (g1 < g2) {
      lo = m1;
    } else {
      hi = m2;
    }
  }
  return best;
}

std::vector<double> strategy_from_splitting(const Splitting& splitting,
                                            const Belief& prior) {
  const int u_size = static_cast<int>(prior.size());
  const int w_size = static_cast<int>(splitting.size());
  std::vector<double> q(static_cast<size_t>(u_size) * w_size, 0.0);
  for (int w = 0; w < w_size; ++w) {
    for (int u = 0; u < u_size; ++u) {
      const double mass = splitting[w].weight * splitting[w].posterior[u];
      if (prior[u] <= 0.0) {
        if (mass > 1e-15) {
          throw ValidationError(
              "strategy_from_splitting: posterior puts mass on zero-prior symbol u=" +
              std::to_string(u));
        }
        continue;
      }
      q[static_cast<size_t>(u) * w_size + w] = mass / prior[u];
    }
  }
  return q;
}

std::vector<std::pair<double, double>> tradeoff_curve(const ProblemSpec& problem,
                                                      const std::vector<double>& capacities,
                                                      const SolveOptions& options) {
  std::vector<std::pair<double, double>> out;
  out.reserve(capacities.size());
  for (double cap : capacities) {
    out.emplace_back(cap, solve_splitting(problem, cap, options).value);
  }
  return out;
}

}  // namespace stratcomm
