#include "core/rng.hpp"

#include <cmath>

#include "core/errors.hpp"

namespace mcdiag {

namespace {

constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
constexpr std::uint64_t kSeedSalt = 0x2545f4914f6cdd1dULL;
constexpr std::uint64_t kStreamSalt = 0x6a09e667f3bcc909ULL;

// Stateless murmur3 finalizer; bijective on 64-bit words.
std::uint64_t mix(std::uint64_t z) {
  z ^= z >> 33;
  z *= 0xff51afd7ed558ccdULL;
  z ^= z >> 33;
  z *= 0xc4ceb9fe1a85ec53ULL;
  z ^= z >> 33;
  return z;
}

}  // namespace

Rng::Rng(std::uint64_t seed) : state_(mix(seed ^ kSeedSalt)) {}

std::uint64_t Rng::derive_seed(std::uint64_t seed, std::uint64_t key) {
  return mix(mix(seed ^ kSeedSalt) + kStreamSalt + key * kGamma);
}

Rng Rng::stream(std::uint64_t seed, std::uint64_t key) {
  Rng r(0);
  r.state_ = derive_seed(seed, key);
  r.have_spare_ = false;
  return r;
}

std::uint64_t Rng::next_u64() {
  std::uint64_t z = (state_ += kGamma);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double Rng::uniform01() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform01() - 1.0;
    v = 2.0 * uniform01() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * f;
  have_spare_ = true;
  return u * f;
}

double Rng::chi_square(unsigned df) {
  if (df == 0) fail(Errc::invalid_argument, "chi_square: df must be >= 1");
  double s = 0.0;
  for (unsigned i = 0; i < df; ++i) {
    const double z = normal();
    s += z * z;
  }
  return s;
}

double Rng::student_t(unsigned df) {
  if (df == 0) fail(Errc::invalid_argument, "student_t: df must be >= 1");
  const double z = normal();
  const double w = chi_square(df);
  return z / std::sqrt(w / static_cast<double>(df));
}

}  // namespace mcdiag
