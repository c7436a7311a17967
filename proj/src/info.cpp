#include "stratcomm/info.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace stratcomm {

double entropy(std::span<const double> p) {
  double h = 0.0;
  for (double v : p) h -= xlog2x(v);
  return h;
}

double binary_entropy(double p) {
  if (!(p >= -kProbTol && p <= 1.0 + kProbTol)) {
    throw std::domain_error("binary_entropy: p outside [0,1]");
  }
  if (p < 0.0) p = 0.0;
  if (p > 1.0) p = 1.0;
  return -xlog2x(p) - xlog2x(1.0 - p);
}

double kl_divergence(const Belief& p, const Belief& q) {
  double d = 0.0;
  for (size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    if (q[i] <= 0.0) return std::numeric_limits<double>::infinity();
    d += p[i] * std::log2(p[i] / q[i]);
  }
  return d < 0.0 ? 0.0 : d;  // guard roundoff on p == q
}

double mutual_information(std::span<const double> joint, int a_size, int b_size) {
  std::vector<double> pa(a_size, 0.0), pb(b_size, 0.0);
  for (int a = 0; a < a_size; ++a) {
    for (int b = 0; b < b_size; ++b) {
      double v = joint[static_cast<size_t>(a) * b_size + b];
      pa[a] += v;
      pb[b] += v;
    }
  }
  double mi = 0.0;
  for (int a = 0; a < a_size; ++a) {
    for (int b = 0; b < b_size; ++b) {
      double v = joint[static_cast<size_t>(a) * b_size + b];
      if (v > 0.0) mi += v * std::log2(v / (pa[a] * pb[b]));
    }
  }
  return mi < 0.0 ? 0.0 : mi;
}

double average_entropy(const Belief& p, std::span<const double> p_z_given_u,
                       int z_size) {
  const int u_size = static_cast<int>(p.size());
  double h = entropy(p);
  std::vector<double> mix(z_size, 0.0);
  for (int u = 0; u < u_size; ++u) {
    auto row = p_z_given_u.subspan(static_cast<size_t>(u) * z_size, z_size);
    h += p[u] * entropy(row);
    for (int z = 0; z < z_size; ++z) mix[z] += p[u] * row[z];
  }
  h -= entropy(mix);
  return h < 0.0 ? 0.0 : h;
}

double average_entropy(const Belief& p, const ProblemSpec& problem) {
  return average_entropy(p, problem.p_z_given_u, problem.z_size);
}

double dsbs_average_entropy(double q, double delta0, double delta1) {
  const double mix = (1.0 - q) * delta0 + q * (1.0 - delta1);
  return binary_entropy(q) + (1.0 - q) * binary_entropy(delta0) +
         q * binary_entropy(delta1) - binary_entropy(mix);
}

double dsbs_entropy(double q, double delta) {
  return dsbs_average_entropy(q, delta, delta);
}

double dsbs_entropy_derivative(double q, double delta) {
  if (!(q > 0.0 && q < 1.0)) {
    throw std::domain_error("dsbs_entropy_derivative: q must be in (0,1)");
  }
  const double qd = (1.0 - q) * delta + q * (1.0 - delta);
  return std::log2((1.0 - q) / q) -
         (1.0 - 2.0 * delta) * std::log2((1.0 - qd) / qd);
}

CapacityResult channel_capacity(const Channel& channel, double tol,
                                int max_iterations) {
  const int nx = channel.x_size;
  const int ny = channel.y_size;
  CapacityResult result;
  result.input_dist.assign(nx, 1.0 / nx);

  std::vector<double> qy(ny, 0.0);
  std::vector<double> d(nx, 0.0);
  for (int iter = 1; iter <= max_iterations; ++iter) {
    std::fill(qy.begin(), qy.end(), 0.0);
    for (int x = 0; x < nx; ++x) {
      for (int y = 0; y < ny; ++y) qy[y] += result.input_dist[x] * channel.t(y, x);
    }
    double mi = 0.0;
    double ub = -std::numeric_limits<double>::infinity();
    for (int x = 0; x < nx; ++x) {
      double dx = 0.0;
      for (int y = 0; y < ny; ++y) {
        double t = channel.t(y, x);
        if (t > 0.0) dx += t * std::log2(t / qy[y]);
      }
      d[x] = dx;
      mi += result.input_dist[x] * dx;
      ub = std::max(ub, dx);
    }
    if (mi < 0.0) mi = 0.0;
    result.capacity = mi;
    result.gap = ub - mi;
    result.iterations = iter;
    result.mi_trace.push_back(mi);
    if (result.gap <= tol) return result;

    double norm = 0.0;
    for (int x = 0; x < nx; ++x) {
      result.input_dist[x] *= std::exp2(d[x] - ub);  // shift avoids overflow
      norm += result.input_dist[x];
    }
    for (int x = 0; x < nx; ++x) result.input_dist[x] /= norm;
  }
  std::ostringstream os;
  os << "channel_capacity: no convergence after " << max_iterations
     << " iterations; best capacity " << result.capacity << " bits, gap "
     << result.gap << " bits";
  throw SolverError(os.str());
}

}  // namespace stratcomm
