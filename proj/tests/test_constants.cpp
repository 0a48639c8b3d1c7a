#include <doctest.h>

#include <cmath>

#include "henon/constants.hpp"

using namespace henon;

namespace {

// independent root oracle: long-double bisection on a wider bracket
long double tbar_oracle() {
  auto f = [](long double t) { return 2.0L * std::sqrt((long double)M_E) * std::log(t) + t; };
  long double lo = 0.05L, hi = 0.999L;
  for (int i = 0; i < 200; ++i) {
    const long double mid = 0.5L * (lo + hi);
    if (f(mid) < 0.0L)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5L * (lo + hi);
}

}  // namespace

TEST_CASE("tbar root: residual and value against the oracle") {
  const double t = solve_tbar(1e-12);
  CHECK(std::abs(tbar_residual(t)) <= 1e-12);
  CHECK(t > 0.0);
  CHECK(t < 1.0);
  const double oracle = static_cast<double>(tbar_oracle());
  // oracle bisection gives 0.787545...; agreement to 4 significant digits
  CHECK(t == doctest::Approx(oracle).epsilon(1e-10));
  CHECK(std::abs(t - 0.7875452) < 5e-6);
}

TEST_CASE("kappa: paper value, hypothetical input, monotonicity") {
  const auto& c = AsymptoticConstants::get();
  CHECK(std::abs(c.kappa - 5.1869) <= 1e-3);
  CHECK(kappa_from_tbar(2.0 * std::sqrt(M_E)) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(kappa_from_tbar(0.7) > kappa_from_tbar(0.8));
}

TEST_CASE("gamma: formula value near the quoted one, discrepancy surfaced") {
  const auto& c = AsymptoticConstants::get();
  CHECK(std::abs(c.gamma - AsymptoticConstants::gamma_paper) / AsymptoticConstants::gamma_paper <
        0.005);
  CHECK(c.gamma > 1.0);
  // direct formula evaluation lands near 4.864, away from the quoted 4.859;
  // both numbers stay visible
  CHECK(c.gamma == doctest::Approx(4.8638).epsilon(2e-4));
  CHECK(c.gamma != AsymptoticConstants::gamma_paper);
  for (double t = 0.05; t < 1.0; t += 0.05) CHECK(gamma_from_tbar(t) > 1.0);
  CHECK(c.kappa > c.gamma);
}

TEST_CASE("multiplicity lower bound") {
  CHECK(multiplicity_lower_bound(0.0) == 5);
  CHECK(multiplicity_lower_bound(2.0) == 10);
  int prev = 0;
  for (double a = 0.0; a <= 2.0; a += 1.0) {
    const int v = multiplicity_lower_bound(a);
    CHECK(v >= prev);
    prev = v;
  }
}

TEST_CASE("maximal nodal region count") {
  CHECK(max_nodal_regions(0.0) == 4);
  CHECK(max_nodal_regions(2.0) == 9);
  CHECK(max_nodal_regions(0.0) >= 2);
}

TEST_CASE("case prediction at alpha = 0") {
  const CasePrediction p5 = predict_cases(ProblemParams(0.0, 50.0, 5));
  CHECK_FALSE(p5.case1_admissible);
  CHECK_FALSE(p5.case2_admissible);
  CHECK(p5.case3_forced);
  CHECK(p5.guaranteed_quasiradial == 2);
  CHECK(p5.multiplicity == 5);
  CHECK(p5.case1_max_n == 2);
  CHECK(p5.case2_max_n == 3);
  CHECK(p5.max_regions == 4);

  const CasePrediction p1 = predict_cases(ProblemParams(0.0, 50.0, 1));
  CHECK(p1.case1_admissible);
  CHECK_FALSE(p1.case3_forced);
}

TEST_CASE("threshold mechanisms over an alpha grid") {
  const auto& c = AsymptoticConstants::get();
  for (double a = 0.0; a <= 20.0; a += 0.25) {
    const double s = 2.0 + a;
    // ceil(s k/2 - 1) - floor(s g/2 - 1) >= s (k - g)/2 > 0
    const double lhs = static_cast<double>(guarded_ceil(0.5 * s * c.kappa - 1.0)) -
                       static_cast<double>(guarded_floor(0.5 * s * c.gamma - 1.0));
    CHECK(lhs >= 0.5 * s * (c.kappa - c.gamma));
    CHECK(0.5 * s * (c.kappa - c.gamma) > 0.0);
    // case1 threshold never exceeds case2 threshold
    const CasePrediction pred = predict_cases(ProblemParams(a, 2.0, 1));
    CHECK(pred.case1_max_n <= pred.case2_max_n);
  }
}

TEST_CASE("conditioning: perturbing tbar moves kappa and gamma by < 1e-8") {
  const auto& c = AsymptoticConstants::get();
  for (double d : {-1e-10, 1e-10}) {
    CHECK(std::abs(kappa_from_tbar(c.tbar + d) - c.kappa) < 1e-8);
    CHECK(std::abs(gamma_from_tbar(c.tbar + d) - c.gamma) < 1e-8);
  }
}

TEST_CASE("parameter validation") {
  CHECK_THROWS(ProblemParams(-1.0, 2.0, 1));
  CHECK_THROWS(ProblemParams(0.0, 1.0, 1));
  CHECK_THROWS(ProblemParams(0.0, 2.0, 0));
  CHECK_THROWS(solve_tbar(0.0));
  CHECK_THROWS(multiplicity_lower_bound(-0.5));
}
