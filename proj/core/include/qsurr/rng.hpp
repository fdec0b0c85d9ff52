#pragma once

#include <cstdint>
#include <string_view>

namespace qsurr {

/// SplitMix64 finalizer, also used to expand single seeds into full states.
std::uint64_t mix64(std::uint64_t v);

/// FNV-1a over a byte string.
std::uint64_t fnv1a(std::string_view bytes,
                    std::uint64_t basis = 0xcbf29ce484222325ULL);

/// Child seed derived from (master, label, index). Different labels or
/// indices give decorrelated streams, so parallel workers draw from disjoint
/// streams and results do not depend on scheduling.
std::uint64_t derive_seed(std::uint64_t master, std::string_view label,
                          std::uint64_t index = 0);

/// xoshiro256++ with state expanded from a single 64-bit seed. Distribution
/// helpers are hand-rolled so sequences depend only on the seed, not on the
/// standard library implementation.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();
  double uniform();                      // [0, 1)
  double uniform(double lo, double hi);  // [lo, hi)
  double normal();                       // standard normal, polar method
  bool bernoulli(double p);
  int rademacher();  // -1 or +1, fair

 private:
  std::uint64_t s_[4];
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace qsurr
