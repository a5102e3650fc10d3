#include "core/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace mcdiag {

namespace {

constexpr double kJacobiTol = 1e-10;
constexpr int kJacobiMaxSweeps = 100;

double off_diag_norm(const Matrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t j = 0; j < a.cols; ++j)
      if (i != j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

double frobenius(const Matrix& a) {
  double s = 0.0;
  for (double v : a.data) s += v * v;
  return std::sqrt(s);
}

}  // namespace

Matrix cholesky(const SymMatrix& a) {
  const std::size_t p = a.order();
  if (p == 0) fail(Errc::invalid_argument, "cholesky: empty matrix");
  Matrix l(p, p);
  for (std::size_t j = 0; j < p; ++j) {
    double d = a(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > 0.0) || !std::isfinite(d))
      fail(Errc::singular, "cholesky: matrix not positive definite (pivot " +
                               std::to_string(j + 1) + ")");
    l(j, j) = std::sqrt(d);
    for (std::size_t i = j + 1; i < p; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / l(j, j);
    }
  }
  return l;
}

double log_det(const SymMatrix& a) {
  const Matrix l = cholesky(a);
  double ld = 0.0;
  for (std::size_t i = 0; i < a.order(); ++i) ld += std::log(l(i, i));
  return 2.0 * ld;
}

SignedLogDet signed_log_det(const Matrix& a) {
  if (a.rows != a.cols || a.rows == 0)
    fail(Errc::invalid_argument, "signed_log_det: square matrix required");
  const std::size_t n = a.rows;
  Matrix u = a;
  int sign = 1;
  double ld = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::fabs(u(i, k)) > std::fabs(u(piv, k))) piv = i;
    if (u(piv, k) == 0.0) return {0, 0.0};
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(u(piv, j), u(k, j));
      sign = -sign;
    }
    const double d = u(k, k);
    if (d < 0.0) sign = -sign;
    ld += std::log(std::fabs(d));
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = u(i, k) / d;
      for (std::size_t j = k; j < n; ++j) u(i, j) -= f * u(k, j);
    }
  }
  return {sign, ld};
}

SymEigen sym_eigen(const SymMatrix& sym) {
  const std::size_t p = sym.order();
  if (p == 0) fail(Errc::invalid_argument, "sym_eigen: empty matrix");
  Matrix a = sym.dense();
  Matrix v(p, p);
  for (std::size_t i = 0; i < p; ++i) v(i, i) = 1.0;

  const double fro = frobenius(a);
  const double stop = kJacobiTol * (fro > 0.0 ? fro : 1.0);

  int sweep = 0;
  while (off_diag_norm(a) > stop) {
    if (++sweep > kJacobiMaxSweeps)
      fail(Errc::domain, "sym_eigen: Jacobi failed to converge, off-diagonal residual " +
                             std::to_string(off_diag_norm(a)));
    for (std::size_t q = 1; q < p; ++q) {
      for (std::size_t r = 0; r < q; ++r) {
        const double apq = a(r, q);
        if (apq == 0.0) continue;
        const double app = a(r, r), aqq = a(q, q);
        // Rotation angle from the stable tangent formula.
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < p; ++k) {
          const double akp = a(k, r), akq = a(k, q);
          a(k, r) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < p; ++k) {
          const double apk = a(r, k), aqk = a(q, k);
          a(r, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < p; ++k) {
          const double vkp = v(k, r), vkq = v(k, q);
          v(k, r) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  SymEigen out;
  out.values.resize(p);
  for (std::size_t i = 0; i < p; ++i) out.values[i] = a(i, i);
  std::vector<std::size_t> order(p);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t x, std::size_t y) { return out.values[x] < out.values[y]; });
  SymEigen sorted;
  sorted.values.resize(p);
  sorted.vectors = Matrix(p, p);
  for (std::size_t j = 0; j < p; ++j) {
    sorted.values[j] = out.values[order[j]];
    for (std::size_t i = 0; i < p; ++i) sorted.vectors(i, j) = v(i, order[j]);
  }
  return sorted;
}

double max_gen_eig(const SymMatrix& s, const SymMatrix& b) {
  const std::size_t p = s.order();
  if (b.order() != p) fail(Errc::shape_mismatch, "max_gen_eig: order mismatch");
  const Matrix l = cholesky(s);

  // W = L^{-1} B by forward substitution, column by column.
  Matrix w(p, p);
  for (std::size_t j = 0; j < p; ++j) {
    for (std::size_t i = 0; i < p; ++i) {
      double x = b(i, j);
      for (std::size_t k = 0; k < i; ++k) x -= l(i, k) * w(k, j);
      w(i, j) = x / l(i, i);
    }
  }
  // C = W L^{-T}: solve C L^T = W, i.e. forward substitution on rows.
  Matrix c(p, p);
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      double x = w(i, j);
      for (std::size_t k = 0; k < j; ++k) x -= c(i, k) * l(j, k);
      c(i, j) = x / l(j, j);
    }
  }

  SymMatrix cs(p);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j <= i; ++j) cs.at(i, j) = 0.5 * (c(i, j) + c(j, i));
  return sym_eigen(cs).values.back();
}

SymMatrix psd_repair(const SymMatrix& a, double rel_floor, bool& repaired) {
  repaired = false;
  const double tr = a.trace();
  if (!(tr > 0.0))
    fail(Errc::unrepairable, "psd_repair: trace " + std::to_string(tr) + " is not positive");
  const double floor = rel_floor * tr;

  const SymEigen eig = sym_eigen(a);
  if (eig.values.front() >= floor) return a;

  repaired = true;
  const std::size_t p = a.order();
  std::vector<double> lam = eig.values;
  for (double& l : lam) l = std::max(l, floor);
  SymMatrix out(p);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < p; ++k) s += eig.vectors(i, k) * lam[k] * eig.vectors(j, k);
      out.at(i, j) = s;
    }
  return out;
}

}  // namespace mcdiag
