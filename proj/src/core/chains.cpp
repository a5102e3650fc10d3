#include "core/chains.hpp"

#include <cmath>
#include <string>

namespace mcdiag {

ChainSet::ChainSet(std::size_t m, std::size_t n, std::size_t p, std::vector<double> samples)
    : m_(m), n_(n), p_(p), samples_(std::move(samples)) {
  if (m_ < 1) fail(Errc::invalid_argument, "ChainSet: need at least one chain");
  if (n_ < 2) fail(Errc::invalid_argument, "ChainSet: need at least two iterations per chain");
  if (p_ < 1) fail(Errc::invalid_argument, "ChainSet: dimension must be >= 1");
  if (samples_.size() != m_ * n_ * p_)
    fail(Errc::shape_mismatch, "ChainSet: sample buffer does not match m*n*p");
  for (double v : samples_)
    if (!std::isfinite(v)) fail(Errc::invalid_argument, "ChainSet: non-finite sample");
}

ChainSet ChainSet::component(std::size_t k) const {
  if (k >= p_) fail(Errc::invalid_argument, "ChainSet::component: index out of range");
  std::vector<double> out(m_ * n_);
  for (std::size_t i = 0; i < m_; ++i)
    for (std::size_t t = 0; t < n_; ++t) out[i * n_ + t] = at(i, t, k);
  return ChainSet(m_, n_, 1, std::move(out));
}

ChainSet ChainSet::drop_burnin(std::size_t burnin) const {
  if (burnin == 0) return *this;
  if (burnin + 2 > n_)
    fail(Errc::invalid_argument, "drop_burnin: fewer than two iterations would remain");
  const std::size_t keep = n_ - burnin;
  std::vector<double> out(m_ * keep * p_);
  for (std::size_t i = 0; i < m_; ++i)
    for (std::size_t t = 0; t < keep; ++t)
      for (std::size_t k = 0; k < p_; ++k) out[(i * keep + t) * p_ + k] = at(i, burnin + t, k);
  return ChainSet(m_, keep, p_, std::move(out));
}

ChainSummary summarize(const ChainSet& cs) {
  const std::size_t m = cs.chains(), n = cs.iterations(), p = cs.dimension();
  ChainSummary s;
  s.chain_means = Matrix(m, p);
  s.grand_mean.assign(p, 0.0);
  s.chain_cov.assign(m, SymMatrix(p));
  s.pooled = SymMatrix(p);

  // Two passes per chain, fixed iteration order; results do not depend on
  // any scheduling.
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t t = 0; t < n; ++t) {
      const auto row = cs.row(i, t);
      for (std::size_t k = 0; k < p; ++k) s.chain_means(i, k) += row[k];
    }
    for (std::size_t k = 0; k < p; ++k) s.chain_means(i, k) /= static_cast<double>(n);

    SymMatrix& cov = s.chain_cov[i];
    std::vector<double> dev(p);
    for (std::size_t t = 0; t < n; ++t) {
      const auto row = cs.row(i, t);
      for (std::size_t k = 0; k < p; ++k) dev[k] = row[k] - s.chain_means(i, k);
      for (std::size_t a = 0; a < p; ++a)
        for (std::size_t b = 0; b <= a; ++b) cov.at(a, b) += dev[a] * dev[b];
    }
    cov.scale(1.0 / static_cast<double>(n - 1));
    s.pooled.add_scaled(cov, 1.0);
  }
  s.pooled.scale(1.0 / static_cast<double>(m));

  for (std::size_t k = 0; k < p; ++k) {
    double acc = 0.0;
    for (std::size_t i = 0; i < m; ++i) acc += s.chain_means(i, k);
    s.grand_mean[k] = acc / static_cast<double>(m);
  }
  return s;
}

ChainSet assemble(const std::vector<Matrix>& chains, std::size_t burnin) {
  if (chains.empty()) fail(Errc::invalid_argument, "assemble: no chains given");
  const std::size_t rows = chains.front().rows;
  const std::size_t cols = chains.front().cols;
  for (std::size_t i = 0; i < chains.size(); ++i) {
    if (chains[i].rows != rows || chains[i].cols != cols)
      fail(Errc::shape_mismatch,
           "assemble: chain " + std::to_string(i + 1) + " has shape " +
               std::to_string(chains[i].rows) + "x" + std::to_string(chains[i].cols) +
               ", expected " + std::to_string(rows) + "x" + std::to_string(cols));
  }
  if (cols < 1) fail(Errc::invalid_argument, "assemble: chains have no columns");
  if (burnin + 2 > rows)
    fail(Errc::invalid_argument,
         "assemble: burn-in " + std::to_string(burnin) + " leaves fewer than two of " +
             std::to_string(rows) + " iterations");

  const std::size_t n = rows - burnin;
  std::vector<double> buf;
  buf.reserve(chains.size() * n * cols);
  for (const Matrix& c : chains)
    buf.insert(buf.end(), c.data.begin() + burnin * cols, c.data.end());
  return ChainSet(chains.size(), n, cols, std::move(buf));
}

}  // namespace mcdiag
