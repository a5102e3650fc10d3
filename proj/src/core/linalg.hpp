#pragma once

#include "core/matrix.hpp"

namespace mcdiag {

// Lower-triangular Cholesky factor, A = L L^T. Throws Errc::singular when A
// is not positive definite.
Matrix cholesky(const SymMatrix& a);

// log det A for symmetric positive definite A, via Cholesky.
double log_det(const SymMatrix& a);

// det A = sign * exp(value) for a general square matrix, via partially
// pivoted LU. Covers the indefinite diagnostics the Cholesky path rejects.
struct SignedLogDet {
  int sign = 0;  // -1, 0, +1
  double value = 0.0;  // log |det|, -inf convention: value unused when sign == 0
};
SignedLogDet signed_log_det(const Matrix& a);

// Cyclic Jacobi for symmetric matrices. Eigenvalues ascending, matching
// eigenvectors in the columns of `vectors`.
struct SymEigen {
  std::vector<double> values;
  Matrix vectors;
};
SymEigen sym_eigen(const SymMatrix& a);

// Largest generalized eigenvalue of B x = lambda S x with S positive
// definite: lambda_max(L^{-1} B L^{-T}) for S = L L^T.
double max_gen_eig(const SymMatrix& s, const SymMatrix& b);

// Clamp eigenvalues below rel_floor * trace(A) up to that floor. Returns the
// input unchanged (bit for bit) when nothing is below the floor. Throws
// Errc::unrepairable when trace(A) <= 0, since the floor would not be
// positive and a PD result is impossible.
SymMatrix psd_repair(const SymMatrix& a, double rel_floor, bool& repaired);

}  // namespace mcdiag
