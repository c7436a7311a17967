#include "stratcomm/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <memory>
#include <thread>

#include "stratcomm/best_reply.hpp"
#include "stratcomm/info.hpp"

namespace stratcomm {

namespace {

constexpr uint64_t kPurposeSource = 1;
constexpr uint64_t kPurposeCodebook = 2;
constexpr uint64_t kPurposeChannel = 3;
constexpr size_t kMaxCodebookCells = size_t{1} << 26;
constexpr size_t kMaxEnumeration = size_t{1} << 20;

int ceil_bits(double rate_times_n) {
  const int bits = static_cast<int>(std::ceil(rate_times_n - 1e-9));
  return std::max(0, bits);
}

// L1 deviation of the empirical joint type from `target`, with early exit as
// soon as the partial sum exceeds delta (the terms are non-negative, so the
// accept/reject decision is unchanged).
bool jointly_typical(std::span<const uint8_t> a, std::span<const uint8_t> b,
                     int a_size, int b_size, std::span<const double> target,
                     double delta) {
  const int cells = a_size * b_size;
  int counts[64];
  std::fill(counts, counts + cells, 0);
  const int n = static_cast<int>(a.size());
  for (int s = 0; s < n; ++s) ++counts[a[s] * b_size + b[s]];
  const double inv_n = 1.0 / n;
  double l1 = 0.0;
  for (int i = 0; i < cells; ++i) {
    l1 += std::abs(counts[i] * inv_n - target[i]);
    if (l1 > delta) return false;
  }
  return true;
}

bool triple_typical(std::span<const uint8_t> a, std::span<const uint8_t> b,
                    std::span<const uint8_t> c, int a_size, int b_size, int c_size,
                    std::span<const double> target, double delta) {
  const int cells = a_size * b_size * c_size;
  int counts[128];
  std::fill(counts, counts + cells, 0);
  const int n = static_cast<int>(a.size());
  for (int s = 0; s < n; ++s) ++counts[(a[s] * b_size + b[s]) * c_size + c[s]];
  const double inv_n = 1.0 / n;
  double l1 = 0.0;
  for (int i = 0; i < cells; ++i) {
    l1 += std::abs(counts[i] * inv_n - target[i]);
    if (l1 > delta) return false;
  }
  return true;
}

}  // namespace

double joint_type_l1(std::span<const uint8_t> a, std::span<const uint8_t> b,
                     int a_size, int b_size, std::span<const double> target) {
  std::vector<int> counts(static_cast<size_t>(a_size) * b_size, 0);
  for (size_t s = 0; s < a.size(); ++s) ++counts[a[s] * b_size + b[s]];
  const double inv_n = 1.0 / static_cast<double>(a.size());
  double l1 = 0.0;
  for (size_t i = 0; i < counts.size(); ++i) {
    l1 += std::abs(counts[i] * inv_n - target[i]);
  }
  return l1;
}

void CodingConfig::validate(const ProblemSpec& problem, double capacity) const {
  if (n < 1) throw ValidationError("blocklength must be positive");
  if (n > n_max) {
    throw ValidationError("blocklength " + std::to_string(n) +
                          " exceeds the exact-posterior enumeration cap n_max = " +
                          std::to_string(n_max));
  }
  double enumeration = std::pow(problem.u_size, n);
  if (enumeration > static_cast<double>(kMaxEnumeration)) {
    throw ValidationError("u_size^n exceeds the enumeration bound");
  }
  if (w_size < 1 || w_size > 16) throw ValidationError("w_size out of range");
  if (q_w_given_u.size() != static_cast<size_t>(problem.u_size) * w_size) {
    throw ValidationError("q_w_given_u has wrong shape");
  }
  for (int u = 0; u < problem.u_size; ++u) {
    std::vector<double> row(q_w_given_u.begin() + static_cast<size_t>(u) * w_size,
                            q_w_given_u.begin() + static_cast<size_t>(u + 1) * w_size);
    validate_distribution("q_w_given_u row " + std::to_string(u), row, 1e-9);
  }
  if (static_cast<int>(p_x.size()) != problem.x_size) {
    throw ValidationError("p_x has wrong shape");
  }
  if (!(delta_typ > 0.0 && delta_typ <= 2.0)) {
    throw ValidationError("delta_typ must be in (0, 2]");
  }
  if (!(eta > 0.0)) throw ValidationError("eta must be positive");

  // Rate relations of the random-coding construction.
  std::vector<double> p_uw(static_cast<size_t>(problem.u_size) * w_size, 0.0);
  std::vector<double> q_zw(static_cast<size_t>(problem.z_size) * w_size, 0.0);
  for (int u = 0; u < problem.u_size; ++u) {
    for (int w = 0; w < w_size; ++w) {
      p_uw[static_cast<size_t>(u) * w_size + w] = problem.p_u(u) * q(w, u);
      for (int z = 0; z < problem.z_size; ++z) {
        q_zw[static_cast<size_t>(z) * w_size + w] += problem.puz(u, z) * q(w, u);
      }
    }
  }
  const double i_uw = mutual_information(p_uw, problem.u_size, w_size);
  const double i_zw = mutual_information(q_zw, problem.z_size, w_size);
  if (std::abs(rate_r + rate_rl - i_uw - eta) > 1e-9) {
    throw ValidationError("rates must satisfy R + R_L = I(U;W) + eta");
  }
  if (rate_rl > i_zw - eta + 1e-9) {
    throw ValidationError("binning rate must satisfy R_L <= I(Z;W) - eta");
  }
  if (capacity >= 0.0 && rate_r > capacity - eta + 1e-9) {
    throw ValidationError("message rate must satisfy R <= capacity - eta");
  }
}

CodingConfig make_coding_config(const ProblemSpec& problem, int w_size,
                                const std::vector<double>& q_w_given_u,
                                double capacity, int n, double eta,
                                double delta_typ, uint64_t seed, uint64_t trials) {
  CodingConfig cfg;
  cfg.n = n;
  cfg.eta = eta;
  cfg.delta_typ = delta_typ;
  cfg.w_size = w_size;
  cfg.q_w_given_u = q_w_given_u;
  cfg.seed = seed;
  cfg.trials = trials;
  cfg.p_x = channel_capacity(problem.channel()).input_dist;

  std::vector<double> p_uw(static_cast<size_t>(problem.u_size) * w_size, 0.0);
  std::vector<double> q_zw(static_cast<size_t>(problem.z_size) * w_size, 0.0);
  for (int u = 0; u < problem.u_size; ++u) {
    for (int w = 0; w < w_size; ++w) {
      p_uw[static_cast<size_t>(u) * w_size + w] = problem.p_u(u) * cfg.q(w, u);
      for (int z = 0; z < problem.z_size; ++z) {
        q_zw[static_cast<size_t>(z) * w_size + w] += problem.puz(u, z) * cfg.q(w, u);
      }
    }
  }
  const double i_uw = mutual_information(p_uw, problem.u_size, w_size);
  const double i_zw = mutual_information(q_zw, problem.z_size, w_size);
  if (i_zw - eta < -1e-12) {
    throw ValidationError("eta exceeds I(Z;W); choose a smaller margin");
  }
  cfg.rate_rl = std::max(0.0, i_zw - eta);
  cfg.rate_r = i_uw + eta - cfg.rate_rl;
  cfg.validate(problem, capacity);
  return cfg;
}

Codebook generate_codebook(const CodingConfig& config, const ProblemSpec& problem,
                           uint64_t seed) {
  Codebook cb;
  cb.n = config.n;
  cb.w_size = config.w_size;
  cb.x_size = problem.x_size;
  cb.seed = seed;
  cb.m_count = uint64_t{1} << ceil_bits(config.n * config.rate_r);
  cb.l_count = uint64_t{1} << ceil_bits(config.n * config.rate_rl);

  const size_t w_cells = static_cast<size_t>(cb.m_count) * cb.l_count * cb.n;
  const size_t x_cells = static_cast<size_t>(cb.m_count) * cb.n;
  if (w_cells + x_cells > kMaxCodebookCells) {
    throw ValidationError("codebook exceeds the memory cap");
  }

  std::vector<double> q_w(config.w_size, 0.0);
  for (int u = 0; u < problem.u_size; ++u) {
    for (int w = 0; w < config.w_size; ++w) {
      q_w[w] += problem.p_u(u) * config.q(w, u);
    }
  }

  Rng rng(seed);
  cb.w_seqs.resize(w_cells);
  for (size_t i = 0; i < w_cells; ++i) {
    cb.w_seqs[i] = static_cast<uint8_t>(rng.sample(q_w));
  }
  cb.x_seqs.resize(x_cells);
  for (size_t i = 0; i < x_cells; ++i) {
    cb.x_seqs[i] = static_cast<uint8_t>(rng.sample(config.p_x));
  }
  return cb;
}

Codebook generate_codebook(const CodingConfig& config, const ProblemSpec& problem) {
  return generate_codebook(config, problem, config.seed);
}

EncodeResult wz_encode(std::span<const uint8_t> u_seq, const Codebook& codebook,
                       std::span<const double> p_uw, double delta_typ) {
  const int u_size = static_cast<int>(p_uw.size()) / codebook.w_size;
  for (uint64_t m = 0; m < codebook.m_count; ++m) {
    for (uint64_t l = 0; l < codebook.l_count; ++l) {
      if (jointly_typical(u_seq, codebook.w_seq(m, l), u_size, codebook.w_size,
                          p_uw, delta_typ)) {
        return {m, l, false};
      }
    }
  }
  return {0, 0, true};
}

DecodeResult transmit_and_decode(uint64_t m, const Codebook& codebook,
                                 const ProblemSpec& problem,
                                 std::span<const uint8_t> z_seq,
                                 std::span<const double> p_xy,
                                 std::span<const double> q_zw, double delta_typ,
                                 Rng& rng) {
  DecodeResult out;
  const int n = codebook.n;
  out.y_seq.resize(n);
  auto x = codebook.x_seq(m);
  std::vector<double> row(problem.y_size);
  for (int s = 0; s < n; ++s) {
    for (int y = 0; y < problem.y_size; ++y) row[y] = problem.t(y, x[s]);
    out.y_seq[s] = static_cast<uint8_t>(rng.sample(row));
  }
  for (uint64_t mc = 0; mc < codebook.m_count; ++mc) {
    if (jointly_typical(codebook.x_seq(mc), out.y_seq, problem.x_size,
                        problem.y_size, p_xy, delta_typ)) {
      out.m_hat = mc;
      out.m_found = true;
      break;
    }
  }
  for (uint64_t lc = 0; lc < codebook.l_count; ++lc) {
    if (jointly_typical(z_seq, codebook.w_seq(out.m_hat, lc), problem.z_size,
                        codebook.w_size, q_zw, delta_typ)) {
      out.l_hat = lc;
      out.l_found = true;
      break;
    }
  }
  return out;
}

EncoderFn make_wz_encoder(const Codebook& codebook, std::vector<double> p_uw,
                          double delta_typ) {
  auto cb = std::make_shared<Codebook>(codebook);
  return [cb, p_uw = std::move(p_uw), delta_typ](std::span<const uint8_t> u_seq) {
    return wz_encode(u_seq, *cb, p_uw, delta_typ);
  };
}

std::vector<Belief> exact_posterior(std::span<const uint8_t> y_seq,
                                    std::span<const uint8_t> z_seq,
                                    const Codebook& codebook,
                                    const ProblemSpec& problem,
                                    const EncoderFn& encoder) {
  const int n = codebook.n;
  const int u_size = problem.u_size;
  if (std::pow(u_size, n) > static_cast<double>(kMaxEnumeration)) {
    throw ValidationError("exact_posterior: u_size^n exceeds the enumeration bound");
  }

  std::vector<double> lik(codebook.m_count);
  for (uint64_t m = 0; m < codebook.m_count; ++m) {
    auto x = codebook.x_seq(m);
    double prod = 1.0;
    for (int s = 0; s < n; ++s) prod *= problem.t(y_seq[s], x[s]);
    lik[m] = prod;
  }

  std::vector<double> acc(static_cast<size_t>(n) * u_size, 0.0);
  std::vector<uint8_t> u_seq(n);
  // Depth-first enumeration of all source sequences; the source weight
  // P(u^n, z^n) factorizes over stages, the channel weight depends only on
  // the encoder output.
  auto dfs = [&](auto&& self, int s, double prod) -> void {
    if (prod <= 0.0) return;
    if (s == n) {
      const uint64_t m = encoder(u_seq).m;
      const double w = prod * lik[m];
      if (w <= 0.0) return;
      for (int t = 0; t < n; ++t) acc[static_cast<size_t>(t) * u_size + u_seq[t]] += w;
      return;
    }
    for (int u = 0; u < u_size; ++u) {
      u_seq[s] = static_cast<uint8_t>(u);
      self(self, s + 1, prod * problem.puz(u, z_seq[s]));
    }
  };
  dfs(dfs, 0, 1.0);

  std::vector<Belief> posteriors(n, Belief(u_size, 0.0));
  for (int t = 0; t < n; ++t) {
    double total = 0.0;
    for (int u = 0; u < u_size; ++u) total += acc[static_cast<size_t>(t) * u_size + u];
    if (total <= 0.0) {
      throw SolverError("exact_posterior: observation has probability zero");
    }
    for (int u = 0; u < u_size; ++u) {
      posteriors[t][u] = acc[static_cast<size_t>(t) * u_size + u] / total;
    }
  }
  return posteriors;
}

std::vector<uint8_t> best_reply_from_posteriors(const std::vector<Belief>& posteriors,
                                                std::span<const uint8_t> z_seq,
                                                const ProblemSpec& problem) {
  std::vector<uint8_t> v(posteriors.size());
  for (size_t t = 0; t < posteriors.size(); ++t) {
    v[t] = static_cast<uint8_t>(best_reply(z_seq[t], posteriors[t], problem).v_star);
  }
  return v;
}

std::vector<uint8_t> best_reply_decode(std::span<const uint8_t> y_seq,
                                       std::span<const uint8_t> z_seq,
                                       const Codebook& codebook,
                                       const ProblemSpec& problem,
                                       const EncoderFn& encoder) {
  return best_reply_from_posteriors(
      exact_posterior(y_seq, z_seq, codebook, problem, encoder), z_seq, problem);
}

namespace {

// Q_U(.|w,z) tensor indexed (w*z_size + z)*u_size + u. Falls back to the
// prior-given-z where the pair (w,z) has probability zero under the target.
std::vector<double> posterior_table(const CodingConfig& config,
                                    const ProblemSpec& problem) {
  const int u_size = problem.u_size, z_size = problem.z_size, w_size = config.w_size;
  std::vector<double> table(static_cast<size_t>(w_size) * z_size * u_size, 0.0);
  for (int w = 0; w < w_size; ++w) {
    for (int z = 0; z < z_size; ++z) {
      double denom = 0.0;
      for (int u = 0; u < u_size; ++u) denom += problem.puz(u, z) * config.q(w, u);
      double* cell = &table[(static_cast<size_t>(w) * z_size + z) * u_size];
      if (denom > 0.0) {
        for (int u = 0; u < u_size; ++u) {
          cell[u] = problem.puz(u, z) * config.q(w, u) / denom;
        }
      } else if (problem.p_z(z) > 0.0) {
        for (int u = 0; u < u_size; ++u) cell[u] = problem.puz(u, z) / problem.p_z(z);
      } else {
        for (int u = 0; u < u_size; ++u) cell[u] = problem.p_u(u);
      }
    }
  }
  return table;
}

}  // namespace

std::vector<uint8_t> wz_reconstruct(std::span<const uint8_t> w_seq,
                                    std::span<const uint8_t> z_seq,
                                    const CodingConfig& config,
                                    const ProblemSpec& problem) {
  const std::vector<double> table = posterior_table(config, problem);
  const int u_size = problem.u_size, z_size = problem.z_size;
  std::vector<uint8_t> v(w_seq.size());
  Belief belief(u_size);
  for (size_t t = 0; t < w_seq.size(); ++t) {
    const double* cell = &table[(static_cast<size_t>(w_seq[t]) * z_size + z_seq[t]) * u_size];
    belief.assign(cell, cell + u_size);
    v[t] = static_cast<uint8_t>(best_reply(z_seq[t], belief, problem).v_star);
  }
  return v;
}

namespace {

struct KahanSum {
  double sum = 0.0, comp = 0.0;
  void add(double v) {
    double y = v - comp;
    double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
};

}  // namespace

TrialStats run_trials(const CodingConfig& config, const ProblemSpec& problem,
                      int threads) {
  config.validate(problem, -1.0);  // structural + rate identities; capacity
                                   // was checked when the config was made
  const int n = config.n;
  const int u_size = problem.u_size, z_size = problem.z_size,
            w_size = config.w_size;

  std::vector<double> p_uw(static_cast<size_t>(u_size) * w_size, 0.0);
  std::vector<double> q_zw(static_cast<size_t>(z_size) * w_size, 0.0);
  std::vector<double> q_uzw(static_cast<size_t>(u_size) * z_size * w_size, 0.0);
  for (int u = 0; u < u_size; ++u) {
    for (int w = 0; w < w_size; ++w) {
      p_uw[static_cast<size_t>(u) * w_size + w] = problem.p_u(u) * config.q(w, u);
      for (int z = 0; z < z_size; ++z) {
        const double v = problem.puz(u, z) * config.q(w, u);
        q_zw[static_cast<size_t>(z) * w_size + w] += v;
        q_uzw[(static_cast<size_t>(u) * z_size + z) * w_size + w] = v;
      }
    }
  }
  std::vector<double> p_xy(static_cast<size_t>(problem.x_size) * problem.y_size);
  for (int x = 0; x < problem.x_size; ++x) {
    for (int y = 0; y < problem.y_size; ++y) {
      p_xy[static_cast<size_t>(x) * problem.y_size + y] = config.p_x[x] * problem.t(y, x);
    }
  }
  const std::vector<double> post_table = posterior_table(config, problem);
  const double talpha_bound = config.alpha * config.alpha / (2.0 * std::log(2.0));

  TrialStats stats;
  stats.trials = config.trials;
  stats.records.resize(config.trials);

  auto run_one = [&](uint64_t t) {
    TrialRecord rec;
    rec.trial = t;
    Rng rng_src(derive_seed(config.seed, kPurposeSource, t));
    Rng rng_ch(derive_seed(config.seed, kPurposeChannel, t));
    const Codebook cb =
        generate_codebook(config, problem, derive_seed(config.seed, kPurposeCodebook, t));

    std::vector<uint8_t> u_seq(n), z_seq(n);
    for (int s = 0; s < n; ++s) {
      const int joint = rng_src.sample(problem.p_uz);
      u_seq[s] = static_cast<uint8_t>(joint / z_size);
      z_seq[s] = static_cast<uint8_t>(joint % z_size);
    }

    const EncodeResult enc = wz_encode(u_seq, cb, p_uw, config.delta_typ);
    rec.encode_failed = enc.failed;
    const uint64_t m_tx = enc.failed ? 0 : enc.m;

    const DecodeResult dec = transmit_and_decode(m_tx, cb, problem, z_seq, p_xy,
                                                 q_zw, config.delta_typ, rng_ch);

    const bool indices_ok = !enc.failed && dec.m_found && dec.l_found &&
                            dec.m_hat == enc.m && dec.l_hat == enc.l;
    rec.index_mismatch = !enc.failed && !indices_ok;
    bool tuple_typical = false;
    if (!enc.failed) {
      tuple_typical =
          triple_typical(u_seq, z_seq, cb.w_seq(enc.m, enc.l), u_size, z_size,
                         w_size, q_uzw, config.delta_typ) &&
          jointly_typical(cb.x_seq(m_tx), dec.y_seq, problem.x_size,
                          problem.y_size, p_xy, config.delta_typ);
    }
    rec.error_event = !(indices_ok && tuple_typical);

    const EncoderFn encoder = make_wz_encoder(cb, p_uw, config.delta_typ);
    const std::vector<Belief> posteriors =
        exact_posterior(dec.y_seq, z_seq, cb, problem, encoder);
    const std::vector<uint8_t> v_br =
        best_reply_from_posteriors(posteriors, z_seq, problem);
    const std::vector<uint8_t> v_wz =
        wz_reconstruct(cb.w_seq(dec.m_hat, dec.l_hat), z_seq, config, problem);

    double de_sum = 0.0, dd_sum = 0.0, dd_wz_sum = 0.0, agree = 0.0;
    for (int s = 0; s < n; ++s) {
      de_sum += problem.de(u_seq[s], z_seq[s], v_br[s]);
      dd_sum += problem.dd(u_seq[s], z_seq[s], v_br[s]);
      dd_wz_sum += problem.dd(u_seq[s], z_seq[s], v_wz[s]);
      agree += v_br[s] == v_wz[s] ? 1.0 : 0.0;
    }
    rec.encoder_distortion = de_sum / n;
    rec.decoder_distortion = dd_sum / n;
    rec.wz_decoder_distortion = dd_wz_sum / n;
    rec.br_wz_agreement = agree / n;

    if (!enc.failed) {
      auto w_true = cb.w_seq(enc.m, enc.l);
      double kl_sum = 0.0;
      int in_band = 0;
      Belief target(u_size);
      for (int s = 0; s < n; ++s) {
        const double* cell =
            &post_table[(static_cast<size_t>(w_true[s]) * z_size + z_seq[s]) * u_size];
        target.assign(cell, cell + u_size);
        const double kl = kl_divergence(posteriors[s], target);
        kl_sum += kl;
        if (kl <= talpha_bound) ++in_band;
      }
      rec.mean_stage_kl = kl_sum / n;
      rec.frac_stages_in_talpha = static_cast<double>(in_band) / n;
    } else {
      rec.mean_stage_kl = std::numeric_limits<double>::quiet_NaN();
      rec.frac_stages_in_talpha = std::numeric_limits<double>::quiet_NaN();
    }
    stats.records[t] = rec;
  };

  if (threads == 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, threads);
  if (threads == 1 || config.trials < 2) {
    for (uint64_t t = 0; t < config.trials; ++t) run_one(t);
  } else {
    std::vector<std::thread> pool;
    std::atomic<uint64_t> next{0};
    for (int w = 0; w < threads; ++w) {
      pool.emplace_back([&] {
        for (uint64_t t = next.fetch_add(1); t < config.trials;
             t = next.fetch_add(1)) {
          run_one(t);
        }
      });
    }
    for (auto& th : pool) th.join();
  }

  // Order-independent aggregation: records were filled by trial index.
  KahanSum de, dd, dd_wz, agree, frac;
  uint64_t errors = 0, enc_fail = 0, idx_mismatch = 0, enc_ok = 0;
  KahanSum cond_kl;
  uint64_t cond_trials = 0, frac_trials = 0;
  for (const TrialRecord& r : stats.records) {
    de.add(r.encoder_distortion);
    dd.add(r.decoder_distortion);
    dd_wz.add(r.wz_decoder_distortion);
    agree.add(r.br_wz_agreement);
    if (r.error_event) ++errors;
    if (r.encode_failed) {
      ++enc_fail;
    } else {
      ++enc_ok;
      if (r.index_mismatch) ++idx_mismatch;
    }
    if (!r.error_event && std::isfinite(r.mean_stage_kl)) {
      cond_kl.add(r.mean_stage_kl);
      ++cond_trials;
    }
    if (!r.error_event && std::isfinite(r.frac_stages_in_talpha)) {
      frac.add(r.frac_stages_in_talpha);
      ++frac_trials;
    }
  }
  const double nt = static_cast<double>(config.trials);
  stats.mean_encoder_distortion = de.sum / nt;
  stats.mean_decoder_distortion = dd.sum / nt;
  stats.mean_wz_decoder_distortion = dd_wz.sum / nt;
  stats.mean_agreement = agree.sum / nt;
  stats.error_rate = static_cast<double>(errors) / nt;
  stats.encode_failure_rate = static_cast<double>(enc_fail) / nt;
  stats.index_mismatch_rate =
      enc_ok > 0 ? static_cast<double>(idx_mismatch) / static_cast<double>(enc_ok) : 0.0;
  stats.mean_conditional_kl =
      cond_trials > 0 ? cond_kl.sum / static_cast<double>(cond_trials)
                      : std::numeric_limits<double>::quiet_NaN();
  stats.conditional_kl_trials = cond_trials;
  stats.mean_frac_talpha =
      frac_trials > 0 ? frac.sum / static_cast<double>(frac_trials)
                      : std::numeric_limits<double>::quiet_NaN();
  return stats;
}

}  // namespace stratcomm
