#include "core/logistic.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>

#include "core/linalg.hpp"

namespace mcdiag {

namespace {

// Quote-aware CSV split (passenger names contain commas).
std::vector<std::string> split_csv_row(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  cells.push_back(cur);
  return cells;
}

bool missing(const std::string& s) { return s.empty() || s == "NA"; }

double to_double(const std::string& s, std::size_t row, const std::string& col) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
    fail(Errc::parse, "passenger csv: row " + std::to_string(row) + ", column " + col +
                          ": not a number: '" + s + "'");
  return v;
}

}  // namespace

Dataset load_passenger_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::io, "passenger csv: cannot open '" + path.string() + "'");

  std::string line;
  if (!std::getline(in, line)) fail(Errc::parse, "passenger csv: empty file");
  const std::vector<std::string> header = split_csv_row(line);
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
  for (const char* need :
       {"Survived", "Pclass", "Sex", "Age", "SibSp", "Parch", "Fare", "Embarked"})
    if (!col.count(need))
      fail(Errc::parse, std::string("passenger csv: missing column '") + need + "'");

  Dataset d;
  d.col_names = {"intercept", "pclass2", "pclass3", "sexmale", "age",
                 "sibsp",     "parch",   "fare",    "embarkedQ", "embarkedS"};
  const std::size_t p = d.col_names.size();
  std::vector<double> xbuf;
  std::size_t row_no = 1;
  while (std::getline(in, line)) {
    ++row_no;
    if (line.empty() || line == "\r") continue;
    const std::vector<std::string> cells = split_csv_row(line);
    if (cells.size() < header.size())
      fail(Errc::parse, "passenger csv: row " + std::to_string(row_no) + " has " +
                            std::to_string(cells.size()) + " cells, expected " +
                            std::to_string(header.size()));
    auto cell = [&](const char* name) -> const std::string& { return cells[col.at(name)]; };

    bool any_missing = false;
    for (const char* need :
         {"Survived", "Pclass", "Sex", "Age", "SibSp", "Parch", "Fare", "Embarked"})
      if (missing(cell(need))) any_missing = true;
    if (any_missing) continue;  // listwise deletion

    const std::string& sex = cell("Sex");
    const std::string& emb = cell("Embarked");
    const double pclass = to_double(cell("Pclass"), row_no, "Pclass");
    if (sex != "male" && sex != "female")
      fail(Errc::parse, "passenger csv: row " + std::to_string(row_no) + ": bad Sex '" + sex + "'");
    if (emb != "C" && emb != "Q" && emb != "S")
      fail(Errc::parse,
           "passenger csv: row " + std::to_string(row_no) + ": bad Embarked '" + emb + "'");
    const double surv = to_double(cell("Survived"), row_no, "Survived");
    if (surv != 0.0 && surv != 1.0)
      fail(Errc::parse, "passenger csv: row " + std::to_string(row_no) + ": Survived not 0/1");

    xbuf.push_back(1.0);
    xbuf.push_back(pclass == 2.0 ? 1.0 : 0.0);
    xbuf.push_back(pclass == 3.0 ? 1.0 : 0.0);
    xbuf.push_back(sex == "male" ? 1.0 : 0.0);
    xbuf.push_back(to_double(cell("Age"), row_no, "Age"));
    xbuf.push_back(to_double(cell("SibSp"), row_no, "SibSp"));
    xbuf.push_back(to_double(cell("Parch"), row_no, "Parch"));
    xbuf.push_back(to_double(cell("Fare"), row_no, "Fare"));
    xbuf.push_back(emb == "Q" ? 1.0 : 0.0);
    xbuf.push_back(emb == "S" ? 1.0 : 0.0);
    d.y.push_back(surv == 1.0 ? 1 : 0);
  }
  if (d.y.empty()) fail(Errc::parse, "passenger csv: no complete rows");
  d.x.rows = d.y.size();
  d.x.cols = p;
  d.x.data = std::move(xbuf);
  return d;
}

void standardize_covariates(Dataset& d) {
  const std::size_t n = d.x.rows, p = d.x.cols;
  for (std::size_t j = 0; j < p; ++j) {
    bool binary = true;
    for (std::size_t i = 0; i < n && binary; ++i)
      binary = d.x(i, j) == 0.0 || d.x(i, j) == 1.0;
    if (binary) continue;
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += d.x(i, j);
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) var += (d.x(i, j) - mean) * (d.x(i, j) - mean);
    var /= static_cast<double>(n - 1);
    if (!(var > 0.0)) continue;
    const double sd = std::sqrt(var);
    for (std::size_t i = 0; i < n; ++i) d.x(i, j) = (d.x(i, j) - mean) / sd;
  }
}

MleFit logistic_mle(const Matrix& x, const std::vector<int>& y) {
  const std::size_t n = x.rows, p = x.cols;
  if (y.size() != n) fail(Errc::shape_mismatch, "logistic_mle: response length mismatch");
  if (n <= p) fail(Errc::degenerate, "logistic_mle: need more rows than columns");

  MleFit fit;
  fit.beta.assign(p, 0.0);
  std::vector<double> eta(n), mu(n), grad(p);
  SymMatrix info(p);

  for (std::size_t it = 0; it < 50; ++it) {
    fit.iterations = it + 1;
    for (std::size_t i = 0; i < n; ++i) {
      double e = 0.0;
      for (std::size_t j = 0; j < p; ++j) e += x(i, j) * fit.beta[j];
      eta[i] = e;
      mu[i] = 1.0 / (1.0 + std::exp(-e));
    }
    std::fill(grad.begin(), grad.end(), 0.0);
    info = SymMatrix(p);
    for (std::size_t i = 0; i < n; ++i) {
      const double r = static_cast<double>(y[i]) - mu[i];
      const double w = mu[i] * (1.0 - mu[i]);
      for (std::size_t j = 0; j < p; ++j) {
        grad[j] += x(i, j) * r;
        for (std::size_t k = 0; k <= j; ++k) info.at(j, k) += w * x(i, j) * x(i, k);
      }
    }

    Matrix l;
    try {
      l = cholesky(info);
    } catch (const Error&) {
      fail(Errc::degenerate, "logistic_mle: information matrix is rank deficient");
    }
    // step = info^{-1} grad via the two triangular solves
    std::vector<double> step(p);
    for (std::size_t i = 0; i < p; ++i) {
      double v = grad[i];
      for (std::size_t k = 0; k < i; ++k) v -= l(i, k) * step[k];
      step[i] = v / l(i, i);
    }
    for (std::size_t ii = p; ii-- > 0;) {
      double v = step[ii];
      for (std::size_t k = ii + 1; k < p; ++k) v -= l(k, ii) * step[k];
      step[ii] = v / l(ii, ii);
    }

    double max_step = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
      fit.beta[j] += step[j];
      max_step = std::max(max_step, std::fabs(step[j]));
    }
    if (max_step < 1e-10) {
      // standard errors from the inverse information at the optimum
      fit.se.assign(p, 0.0);
      for (std::size_t j = 0; j < p; ++j) {
        std::vector<double> e(p, 0.0);
        e[j] = 1.0;
        for (std::size_t i = 0; i < p; ++i) {
          double v = e[i];
          for (std::size_t k = 0; k < i; ++k) v -= l(i, k) * e[k];
          e[i] = v / l(i, i);
        }
        for (std::size_t ii = p; ii-- > 0;) {
          double v = e[ii];
          for (std::size_t k = ii + 1; k < p; ++k) v -= l(k, ii) * e[k];
          e[ii] = v / l(ii, ii);
        }
        fit.se[j] = std::sqrt(e[j]);
      }
      return fit;
    }
  }
  fail(Errc::degenerate, "logistic_mle: Newton iteration did not converge");
}

Matrix spread_starts(const MleFit& fit, std::size_t m, double span) {
  if (m < 1) fail(Errc::invalid_argument, "spread_starts: m must be >= 1");
  const std::size_t p = fit.beta.size();
  Matrix starts(m, p);
  for (std::size_t i = 0; i < m; ++i) {
    const double c =
        m == 1 ? 0.0 : -span + 2.0 * span * static_cast<double>(i) / static_cast<double>(m - 1);
    for (std::size_t j = 0; j < p; ++j) starts(i, j) = fit.beta[j] + c * fit.se[j];
  }
  return starts;
}

}  // namespace mcdiag
