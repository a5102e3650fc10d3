#pragma once

#include <cstddef>
#include <vector>

#include "core/errors.hpp"

namespace mcdiag {

// Dense row-major matrix. Plain aggregate; shape checks live at the call
// sites that care.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

// Symmetric matrix of order p, packed lower triangle: p*(p+1)/2 doubles.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(std::size_t p) : p_(p), a_(p * (p + 1) / 2, 0.0) {}

  static SymMatrix identity(std::size_t p) {
    SymMatrix s(p);
    for (std::size_t i = 0; i < p; ++i) s.at(i, i) = 1.0;
    return s;
  }

  std::size_t order() const { return p_; }
  const std::vector<double>& packed() const { return a_; }

  double operator()(std::size_t i, std::size_t j) const { return a_[index(i, j)]; }
  double& at(std::size_t i, std::size_t j) { return a_[index(i, j)]; }

  double trace() const {
    double t = 0.0;
    for (std::size_t i = 0; i < p_; ++i) t += (*this)(i, i);
    return t;
  }

  Matrix dense() const {
    Matrix d(p_, p_);
    for (std::size_t i = 0; i < p_; ++i)
      for (std::size_t j = 0; j < p_; ++j) d(i, j) = (*this)(i, j);
    return d;
  }

  // this += w * other
  SymMatrix& add_scaled(const SymMatrix& other, double w) {
    if (other.p_ != p_) fail(Errc::shape_mismatch, "SymMatrix: order mismatch");
    for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += w * other.a_[k];
    return *this;
  }

  SymMatrix& scale(double w) {
    for (double& v : a_) v *= w;
    return *this;
  }

 private:
  std::size_t index(std::size_t i, std::size_t j) const {
    if (i < j) std::swap(i, j);
    return i * (i + 1) / 2 + j;
  }

  std::size_t p_ = 0;
  std::vector<double> a_;
};

inline SymMatrix lin_comb(double wa, const SymMatrix& a, double wb, const SymMatrix& b) {
  SymMatrix r = a;
  r.scale(wa);
  r.add_scaled(b, wb);
  return r;
}

}  // namespace mcdiag
