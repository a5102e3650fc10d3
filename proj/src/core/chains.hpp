#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "core/matrix.hpp"

namespace mcdiag {

// Immutable set of m parallel chains, each n iterations of a p-dimensional
// quantity. Invariants: m >= 1, n >= 2, p >= 1, every sample finite.
// Layout is chain-major: sample (i, t, k) at ((i*n)+t)*p + k.
class ChainSet {
 public:
  ChainSet(std::size_t m, std::size_t n, std::size_t p, std::vector<double> samples);

  std::size_t chains() const { return m_; }
  std::size_t iterations() const { return n_; }
  std::size_t dimension() const { return p_; }

  double at(std::size_t chain, std::size_t t, std::size_t k) const {
    return samples_[(chain * n_ + t) * p_ + k];
  }
  std::span<const double> row(std::size_t chain, std::size_t t) const {
    return {samples_.data() + (chain * n_ + t) * p_, p_};
  }
  std::span<const double> chain_data(std::size_t chain) const {
    return {samples_.data() + chain * n_ * p_, n_ * p_};
  }
  const std::vector<double>& samples() const { return samples_; }

  // Single component as a p=1 ChainSet (copies).
  ChainSet component(std::size_t k) const;
  // Drop the first `burnin` iterations of every chain (copies).
  ChainSet drop_burnin(std::size_t burnin) const;

 private:
  std::size_t m_, n_, p_;
  std::vector<double> samples_;
};

// Per-chain and pooled first/second moments. chain_cov uses divisor n-1;
// pooled is the plain average of the m chain covariances.
struct ChainSummary {
  Matrix chain_means;                 // m x p
  std::vector<double> grand_mean;     // p
  std::vector<SymMatrix> chain_cov;   // m entries, each p x p
  SymMatrix pooled;                   // S

  double pooled_scalar() const { return pooled(0, 0); }
};

ChainSummary summarize(const ChainSet& cs);

// One chain per file: rows = iterations, columns = components, comma
// separated. `header` says the first line is a header to skip on read /
// emit on write. Values are written with 17 significant digits so a
// write/read round trip reproduces doubles exactly.
Matrix load_chain_csv(const std::filesystem::path& path, bool header);
void write_chain_csv(const std::filesystem::path& path, const ChainSet& cs,
                     std::size_t chain, bool header);

// Stack equally-shaped per-chain matrices into a ChainSet, discarding the
// first `burnin` rows of each. Requires burnin <= rows - 2.
ChainSet assemble(const std::vector<Matrix>& chains, std::size_t burnin);

}  // namespace mcdiag
