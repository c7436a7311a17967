#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace stratcomm {

/// splitmix64 finalizer; combined with xor-fold for stream derivation.
inline uint64_t mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Counter-based stream derivation: sub-streams of a master seed are indexed
/// by a purpose tag and a counter (e.g. trial index) so that parallel trials
/// draw from independent, reproducible streams.
inline uint64_t derive_seed(uint64_t master, uint64_t purpose, uint64_t counter) {
  return mix64(mix64(master ^ 0x243f6a8885a308d3ULL * purpose) + counter);
}

/// Deterministic sampling helpers on top of std::mt19937_64. All draws go
/// through uniform() (top 53 bits), never through distribution classes whose
/// output is implementation-defined, so sequences are identical across
/// platforms and standard libraries.
class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(seed) {}

  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  /// Inverse-CDF draw from an unnormalized non-negative weight vector.
  int sample(std::span<const double> weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    double u = uniform() * total;
    double acc = 0.0;
    for (size_t i = 0; i + 1 < weights.size(); ++i) {
      acc += weights[i];
      if (u < acc) return static_cast<int>(i);
    }
    return static_cast<int>(weights.size()) - 1;
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace stratcomm
