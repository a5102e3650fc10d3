#pragma once

#include <cstdint>

namespace mcdiag {

// Counter-based generator: a 64-bit counter advancing by a fixed odd gamma,
// output = finalizing hash of the counter (splitmix64). State is one word,
// streams are cheap to fork, and the sequence depends only on (seed, key),
// never on platform RNG facilities.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  // Independent substream; used for per-chain streams (key = chain index)
  // and per-replication seeds. Distinct keys give unrelated counters.
  static Rng stream(std::uint64_t seed, std::uint64_t key);

  // Key derivation exposed so callers can chain derivations (seed -> rep ->
  // chain) without touching generator internals.
  static std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t key);

  std::uint64_t next_u64();
  double uniform01();  // [0, 1), 53-bit mantissa

  // Marsaglia polar method; the spare deviate is cached, so draw order is
  // part of the reproducibility contract.
  double normal();

  double chi_square(unsigned df);        // sum of df squared normals, df >= 1
  double student_t(unsigned df);         // normal / sqrt(chi_square(df)/df)

 private:
  std::uint64_t state_ = 0;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace mcdiag
