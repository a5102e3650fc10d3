#include <cmath>
#include <string>
#include <vector>

#include "core/ess.hpp"
#include "core/psrf.hpp"
#include "core/rng.hpp"
#include "doctest.h"

using mcdiag::BatchConfig;
using mcdiag::BatchPolicy;
using mcdiag::ChainSet;
using mcdiag::Errc;
using mcdiag::Error;
using mcdiag::ess_estimate;
using mcdiag::PsrfReport;
using mcdiag::PsrfScope;
using mcdiag::psrf_classic;
using mcdiag::psrf_classic_component;
using mcdiag::psrf_lugsail;
using mcdiag::psrf_multivariate_classic;
using mcdiag::psrf_multivariate_lugsail;
using mcdiag::Rng;
using mcdiag::StatKind;

namespace {

BatchConfig explicit_b(std::size_t b) {
  BatchConfig cfg;
  cfg.policy = BatchPolicy::explicit_b;
  cfg.batch = b;
  return cfg;
}

ChainSet random_chains(Rng& rng, std::size_t m, std::size_t n, std::size_t p) {
  std::vector<double> buf(m * n * p);
  for (double& v : buf) v = rng.normal();
  return ChainSet(m, n, p, std::move(buf));
}

}  // namespace

TEST_CASE("psrf_classic: two chains of two, by hand") {
  // s^2 = 0.5, B = 4, sigma2 = (1/2)*0.5 + 4/2 = 2.25, value = sqrt(4.5).
  ChainSet cs(2, 2, 1, {1, 2, 3, 4});
  PsrfReport r = psrf_classic(cs);
  CHECK(r.kind == StatKind::classic);
  CHECK(r.scope == PsrfScope::univariate);
  CHECK(r.value == doctest::Approx(std::sqrt(4.5)).epsilon(1e-14));
  CHECK(r.within(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(r.correction(0, 0) == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(r.sigma2(0, 0) == doctest::Approx(2.25).epsilon(1e-15));
  CHECK(r.m == 2);
  CHECK(r.n == 2);
  CHECK(r.component == -1);
  REQUIRE(r.component_values.size() == 1);
  CHECK(r.component_values[0] == r.value);
}

TEST_CASE("psrf_classic: single chain is an error") {
  ChainSet cs(1, 10, 1, std::vector<double>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9});
  try {
    psrf_classic(cs);
    FAIL("expected an Error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::invalid_argument);
    CHECK(std::string(e.what()) == "classic PSRF requires >=2 chains");
  }
}

TEST_CASE("psrf_classic: rejects p > 1 and zero within-chain variance") {
  Rng rng(41);
  ChainSet wide = random_chains(rng, 2, 8, 2);
  CHECK_THROWS_AS(psrf_classic(wide), Error);

  ChainSet flat(2, 4, 1, std::vector<double>(8, 7.0));
  try {
    psrf_classic(flat);
    FAIL("expected an Error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::degenerate);
  }
}

TEST_CASE("psrf_lugsail: single chain of four with b = 2, by hand") {
  // tau_b = 4, tau_third (b=1) = s^2 = 5/3, so tau_L = 19/3 and the value
  // is sqrt(((3/4)(5/3) + (19/3)/4) / (5/3)) = sqrt(1.7).
  ChainSet cs(1, 4, 1, {1, 2, 3, 4});
  PsrfReport r = psrf_lugsail(cs, explicit_b(2));
  CHECK(r.kind == StatKind::lugsail);
  CHECK(r.value == doctest::Approx(std::sqrt(1.7)).epsilon(1e-12));
  CHECK(r.batch.b == 2);
  CHECK(r.batch.a == 2);
  CHECK(r.correction(0, 0) == doctest::Approx(19.0 / 3.0).epsilon(1e-13));
}

TEST_CASE("psrf_lugsail: b = 1 makes the estimator exactly one") {
  // With one chain and b = 1 the lugsail long-run estimate collapses to the
  // sample variance bit for bit; the data are chosen so s^2 is a power of
  // two and the final assembly rounds to exactly 1.
  ChainSet cs(1, 5, 1, {-1, -1, 1, 1, 0});
  PsrfReport r = psrf_lugsail(cs, explicit_b(1));
  CHECK(r.value == 1.0);
  CHECK(r.within(0, 0) == 1.0);
  CHECK(r.correction(0, 0) == 1.0);
}

TEST_CASE("psrf_lugsail: works with a single chain on correlated data") {
  // A strongly trending chain should be flagged far from 1.
  std::vector<double> trend(100);
  for (std::size_t t = 0; t < 100; ++t) trend[t] = static_cast<double>(t);
  ChainSet cs(1, 100, 1, std::move(trend));
  PsrfReport r = psrf_lugsail(cs, BatchConfig{});
  CHECK(std::isfinite(r.value));
  CHECK(r.value > 1.05);
}

TEST_CASE("psrf component wrappers tag the component") {
  Rng rng(42);
  ChainSet cs = random_chains(rng, 3, 16, 2);
  PsrfReport r = psrf_classic_component(cs, 1);
  CHECK(r.component == 1);
  PsrfReport direct = psrf_classic(cs.component(1));
  CHECK(r.value == direct.value);
}

TEST_CASE("psrf_multivariate_classic: 2x2 case solved by hand") {
  // Chain 1 rows (0,0),(2,1); chain 2 rows (1,1),(3,0).
  // S = [[2,0],[0,0.5]], B = [[1,0],[0,0]], so lambda_max(S^-1 B) = 0.5
  // and the value is sqrt(1/2 + 0.5/2) = sqrt(0.75).
  ChainSet cs(2, 2, 2, {0, 0, 2, 1, 1, 1, 3, 0});
  PsrfReport r = psrf_multivariate_classic(cs);
  CHECK(r.scope == PsrfScope::multivariate_maxeig);
  CHECK(r.value == doctest::Approx(std::sqrt(0.75)).epsilon(1e-13));
  CHECK(r.rank_warning);  // m = 2 <= p = 2
  REQUIRE(r.component_values.size() == 2);
  CHECK(r.component_values[0] == doctest::Approx(std::sqrt(0.75)).epsilon(1e-13));
  CHECK(r.component_values[1] == doctest::Approx(std::sqrt(0.5)).epsilon(1e-13));
}

TEST_CASE("psrf_multivariate_classic: preconditions") {
  Rng rng(43);
  ChainSet narrow = random_chains(rng, 3, 8, 1);
  CHECK_THROWS_AS(psrf_multivariate_classic(narrow), Error);

  ChainSet single = random_chains(rng, 1, 8, 2);
  try {
    psrf_multivariate_classic(single);
    FAIL("expected an Error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()) == "classic PSRF requires >=2 chains");
  }

  ChainSet wide = random_chains(rng, 5, 8, 3);
  CHECK_FALSE(psrf_multivariate_classic(wide).rank_warning);  // m > p
}

TEST_CASE("psrf_multivariate_lugsail: p = 1 delegates to the scalar path") {
  Rng rng(44);
  ChainSet cs = random_chains(rng, 2, 36, 1);
  PsrfReport via_mv = psrf_multivariate_lugsail(cs, BatchConfig{});
  PsrfReport direct = psrf_lugsail(cs, BatchConfig{});
  CHECK(via_mv.value == direct.value);  // same code path, bit for bit
  CHECK(via_mv.scope == PsrfScope::univariate);
  CHECK(via_mv.batch.b == direct.batch.b);
}

TEST_CASE("psrf_multivariate_lugsail: report shape and component fill") {
  Rng rng(45);
  // long chains so the lugsail matrix stays positive definite and the
  // repair flag genuinely means "untouched"
  ChainSet cs = random_chains(rng, 2, 900, 3);
  PsrfReport r = psrf_multivariate_lugsail(cs, BatchConfig{});
  CHECK(r.scope == PsrfScope::multivariate_det);
  CHECK(r.p == 3);
  CHECK(r.batch.b == 30);
  REQUIRE(r.component_values.size() == 3);
  for (std::size_t k = 0; k < 3; ++k) {
    PsrfReport ck = psrf_lugsail(cs.component(k), BatchConfig{});
    CHECK(r.component_values[k] == ck.value);
  }
  CHECK_FALSE(r.psd_repaired);
  CHECK(std::isfinite(r.value));
  CHECK(r.value > 0.9);
  CHECK(r.value < 1.1);
}

TEST_CASE("det-form PSRF and ESS satisfy their exact algebraic relation") {
  // value^2 == (n-1)/n + m/ESS whenever both are computed from the same
  // lugsail determinant state.
  Rng rng(46);
  for (int rep = 0; rep < 25; ++rep) {
    const std::size_t m = 1 + rep % 3;
    const std::size_t n = 40 + 7 * (rep % 5);
    const std::size_t p = 1 + rep % 4;
    ChainSet cs = random_chains(rng, m, n, p);
    PsrfReport r = psrf_multivariate_lugsail(cs, BatchConfig{});
    auto e = ess_estimate(cs, BatchConfig{});
    const double nn = static_cast<double>(n);
    const double reconstructed =
        std::sqrt((nn - 1.0) / nn + static_cast<double>(m) / e.ess);
    CHECK(r.value == doctest::Approx(reconstructed).epsilon(1e-12));
    CHECK(r.psd_repaired == e.psd_repaired);
  }
}

TEST_CASE("det-form PSRF is invariant under affine reparameterization") {
  Rng rng(47);
  ChainSet cs = random_chains(rng, 2, 200, 2);

  // y = A x + c with a fixed invertible A.
  const double a11 = 2.0, a12 = 0.5, a21 = -1.0, a22 = 3.0;
  std::vector<double> buf(cs.samples().size());
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t t = 0; t < 200; ++t) {
      const auto row = cs.row(i, t);
      buf[(i * 200 + t) * 2 + 0] = a11 * row[0] + a12 * row[1] + 10.0;
      buf[(i * 200 + t) * 2 + 1] = a21 * row[0] + a22 * row[1] - 4.0;
    }
  ChainSet mapped(2, 200, 2, std::move(buf));

  PsrfReport r0 = psrf_multivariate_lugsail(cs, BatchConfig{});
  PsrfReport r1 = psrf_multivariate_lugsail(mapped, BatchConfig{});
  CHECK(r1.value == doctest::Approx(r0.value).epsilon(1e-10));

  PsrfReport c0 = psrf_multivariate_classic(cs);
  PsrfReport c1 = psrf_multivariate_classic(mapped);
  CHECK(c1.value == doctest::Approx(c0.value).epsilon(1e-10));
}

TEST_CASE("dispersed chain means push every form above the converged band") {
  Rng rng(48);
  const std::size_t m = 4, n = 400;
  std::vector<double> buf(m * n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t t = 0; t < n; ++t)
      buf[i * n + t] = 10.0 * static_cast<double>(i) + rng.normal();
  ChainSet cs(m, n, 1, std::move(buf));

  CHECK(psrf_classic(cs).value > 1.5);
  CHECK(psrf_lugsail(cs, BatchConfig{}).value > 1.5);
}
