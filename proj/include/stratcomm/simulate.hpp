#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "stratcomm/problem.hpp"
#include "stratcomm/rng.hpp"

namespace stratcomm {

/// Configuration of the finite-blocklength random-coding experiment.
struct CodingConfig {
  int n = 8;                  // blocklength
  double rate_r = 0.0;        // channel message rate R (bits/symbol)
  double rate_rl = 0.0;       // binning rate R_L
  double eta = 0.05;          // rate margin
  double delta_typ = 0.1;     // typicality tolerance (L1)
  double alpha = 0.25;        // KL-band diagnostic parameter of T_alpha
  int w_size = 0;
  std::vector<double> q_w_given_u;  // u_size x w_size row-major
  std::vector<double> p_x;          // capacity-achieving channel input law
  uint64_t seed = 1;
  uint64_t trials = 100;
  int n_max = 16;

  double q(int w, int u) const { return q_w_given_u[static_cast<size_t>(u) * w_size + w]; }

  /// Checks the rate relations R + R_L = I(U;W) + eta (within 1e-9),
  /// R_L <= I(Z;W) - eta, R <= capacity - eta, and the enumeration bound.
  void validate(const ProblemSpec& problem, double capacity) const;
};

/// Builds a config with the canonical rate split R_L = I(Z;W) - eta,
/// R = I(U;W) + eta - R_L and validates it against the channel capacity.
CodingConfig make_coding_config(const ProblemSpec& problem, int w_size,
                                const std::vector<double>& q_w_given_u,
                                double capacity, int n, double eta,
                                double delta_typ, uint64_t seed, uint64_t trials);

/// Random codebook: 2^ceil(nR) * 2^ceil(nR_L) W-sequences drawn i.i.d. from
/// the marginal Q_W, and 2^ceil(nR) X-sequences drawn i.i.d. from P_X*.
struct Codebook {
  int n = 0;
  int w_size = 0;
  int x_size = 0;
  uint64_t m_count = 0;
  uint64_t l_count = 0;
  std::vector<uint8_t> w_seqs;  // ((m*l_count)+l)*n + s
  std::vector<uint8_t> x_seqs;  // m*n + s
  uint64_t seed = 0;

  std::span<const uint8_t> w_seq(uint64_t m, uint64_t l) const {
    return {w_seqs.data() + (m * l_count + l) * n, static_cast<size_t>(n)};
  }
  std::span<const uint8_t> x_seq(uint64_t m) const {
    return {x_seqs.data() + m * n, static_cast<size_t>(n)};
  }
};

Codebook generate_codebook(const CodingConfig& config, const ProblemSpec& problem);
Codebook generate_codebook(const CodingConfig& config, const ProblemSpec& problem,
                           uint64_t seed);

/// L1 distance between the empirical joint type of (a,b) and a target law
/// (a_size x b_size row-major).
double joint_type_l1(std::span<const uint8_t> a, std::span<const uint8_t> b,
                     int a_size, int b_size, std::span<const double> target);

struct EncodeResult {
  uint64_t m = 0;
  uint64_t l = 0;
  bool failed = false;  // no jointly typical pair; fall back to index (0,0)
};

/// Deterministic encoder: lexicographically first (m,l) with (u_seq, W(m,l))
/// jointly typical for the target joint p_uw (u_size x w_size).
EncodeResult wz_encode(std::span<const uint8_t> u_seq, const Codebook& codebook,
                       std::span<const double> p_uw, double delta_typ);

struct DecodeResult {
  std::vector<uint8_t> y_seq;
  uint64_t m_hat = 0;
  uint64_t l_hat = 0;
  bool m_found = false;
  bool l_found = false;
};

/// Sends X^n(m) through the channel and decodes: m_hat is the lowest index
/// with (Y, X(m_hat)) jointly typical for P_X* T_Y|X, then l_hat the lowest
/// index with (Z, W(m_hat, l_hat)) jointly typical for Q_ZW.
DecodeResult transmit_and_decode(uint64_t m, const Codebook& codebook,
                                 const ProblemSpec& problem,
                                 std::span<const uint8_t> z_seq,
                                 std::span<const double> p_xy,
                                 std::span<const double> q_zw, double delta_typ,
                                 Rng& rng);

/// Deterministic blocklength-n encoder map u^n -> (m,l).
using EncoderFn = std::function<EncodeResult(std::span<const uint8_t>)>;

/// The lexicographic-first-typical encoder backed by a codebook.
EncoderFn make_wz_encoder(const Codebook& codebook, std::vector<double> p_uw,
                          double delta_typ);

/// Exact per-stage posteriors P(u_t | y^n, z^n) under the deterministic
/// encoder, by exhaustive enumeration of all |U|^n source sequences.
/// Requires u_size^n within the enumeration bound.
std::vector<Belief> exact_posterior(std::span<const uint8_t> y_seq,
                                    std::span<const uint8_t> z_seq,
                                    const Codebook& codebook,
                                    const ProblemSpec& problem,
                                    const EncoderFn& encoder);

/// Best-reply output sequence: per stage, the d_d-minimizing symbol at the
/// exact posterior, ties worst-for-encoder then lowest index. Pointwise
/// optimality implies optimality of the additive sequence objective.
std::vector<uint8_t> best_reply_decode(std::span<const uint8_t> y_seq,
                                       std::span<const uint8_t> z_seq,
                                       const Codebook& codebook,
                                       const ProblemSpec& problem,
                                       const EncoderFn& encoder);
std::vector<uint8_t> best_reply_from_posteriors(const std::vector<Belief>& posteriors,
                                                std::span<const uint8_t> z_seq,
                                                const ProblemSpec& problem);

/// Wyner-Ziv reconstruction: v_t = v*(z_t, Q_U(.|w_t, z_t)) under the target
/// single-letter law.
std::vector<uint8_t> wz_reconstruct(std::span<const uint8_t> w_seq,
                                    std::span<const uint8_t> z_seq,
                                    const CodingConfig& config,
                                    const ProblemSpec& problem);

/// One row per simulated trial.
struct TrialRecord {
  uint64_t trial = 0;
  bool encode_failed = false;
  bool index_mismatch = false;  // (m,l) != (m_hat, l_hat)
  bool error_event = false;     // E_delta = 1
  double encoder_distortion = 0.0;     // empirical d_e under best-reply decoding
  double decoder_distortion = 0.0;     // empirical d_d under best-reply decoding
  double wz_decoder_distortion = 0.0;  // empirical d_d under WZ reconstruction
  double mean_stage_kl = 0.0;          // NaN when the encoder failed
  double frac_stages_in_talpha = 0.0;
  double br_wz_agreement = 0.0;        // fraction of stages with equal outputs
};

/// Aggregates over trials. Deterministic given (config, seed): trial i draws
/// from streams derived from (seed, purpose, i).
struct TrialStats {
  uint64_t trials = 0;
  double mean_encoder_distortion = 0.0;
  double mean_decoder_distortion = 0.0;
  double mean_wz_decoder_distortion = 0.0;
  double error_rate = 0.0;           // P(E_delta = 1)
  double encode_failure_rate = 0.0;
  double index_mismatch_rate = 0.0;
  double mean_conditional_kl = 0.0;  // mean per-stage KL over E_delta = 0 trials
  uint64_t conditional_kl_trials = 0;
  double mean_frac_talpha = 0.0;
  double mean_agreement = 0.0;
  std::vector<TrialRecord> records;
};

TrialStats run_trials(const CodingConfig& config, const ProblemSpec& problem,
                      int threads = 1);

}  // namespace stratcomm
