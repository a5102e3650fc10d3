#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "core/matrix.hpp"

namespace mcdiag {

// Binary-response design matrix with named columns (column 0 is the
// intercept).
struct Dataset {
  Matrix x;                            // n x p
  std::vector<int> y;                  // n entries in {0, 1}
  std::vector<std::string> col_names;  // p entries
};

// Passenger-survival CSV: needs columns Survived, Pclass, Sex, Age, SibSp,
// Parch, Fare, Embarked (extra columns ignored; quoted cells handled). Rows
// with any of those fields missing are dropped. Encoding matches the usual
// treatment-contrast convention: intercept, Pclass in {2,3}, Sex=male,
// Age, SibSp, Parch, Fare, Embarked in {Q,S} -- p = 10.
Dataset load_passenger_csv(const std::filesystem::path& path);

// Z-score every non-binary, non-intercept column in place.
void standardize_covariates(Dataset& d);

struct MleFit {
  std::vector<double> beta;
  std::vector<double> se;  // sqrt of diag inverse observed information
  std::size_t iterations = 0;
};

// Newton-Raphson for the unpenalized logistic MLE. Throws Errc::degenerate
// when the information matrix loses rank or the iteration fails to settle.
MleFit logistic_mle(const Matrix& x, const std::vector<int>& y);

// m starting points beta_hat + c_i * se, with c_i evenly spaced over
// [-span, span] (c_0 = 0 when m == 1).
Matrix spread_starts(const MleFit& fit, std::size_t m, double span);

}  // namespace mcdiag
