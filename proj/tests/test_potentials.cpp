#include <doctest.h>

#include <cmath>
#include <limits>

#include "stickylab/error.hpp"
#include "stickylab/potentials.hpp"
#include "stickylab/rng.hpp"

using namespace stickylab;

namespace {

const double kE = std::exp(1.0);

PotentialSpec random_spec(Rng& rng) {
  switch (static_cast<int>(rng.uniform() * 4.0)) {
    case 0:
      return PotentialSpec::gaussian_exp(rng.uniform(-3.0, 3.0), rng.uniform(0.2, 3.0),
                                         rng.uniform(1.0, 4.0));
    case 1:
      return PotentialSpec::power(rng.uniform(-2.0, 2.0), rng.uniform(1.0, 4.0));
    case 2:
      return PotentialSpec::newtonian(rng.uniform(0.1, 3.0));
    default:
      return PotentialSpec::quadratic_well(rng.uniform(0.1, 3.0), rng.uniform(-1.0, 1.0));
  }
}

}  // namespace

TEST_CASE("closed forms") {
  CHECK(eval(PotentialSpec::gaussian_exp(-1.0, 1.0, 3.0), 0.0) == -1.0);
  CHECK(eval(PotentialSpec::newtonian(), 0.0) == 0.0);
  CHECK(eval(PotentialSpec::gaussian_exp(-1.0, 1.0, 2.0), 1.0) ==
        doctest::Approx(-1.0 / kE).epsilon(1e-15));
  CHECK(eval(PotentialSpec::power(2.0, 3.0), -2.0) == doctest::Approx(16.0));
  CHECK(eval(PotentialSpec::zero(), 5.0) == 0.0);
}

TEST_CASE("derivatives") {
  const PotentialSpec newton = PotentialSpec::newtonian();
  CHECK(eval_derivative(newton, -3.0) == -1.0);
  CHECK(eval_derivative(newton, 0.0) == 0.0);
  CHECK(eval_derivative(newton, 0.5) == 1.0);
  CHECK(eval_derivative(PotentialSpec::gaussian_exp(-1.0, 1.0, 2.0), 1.0) ==
        doctest::Approx(2.0 / kE).epsilon(1e-15));
  CHECK(eval_derivative(PotentialSpec::quadratic_well(1.0, 0.5), 1.0) ==
        doctest::Approx(1.0));
  CHECK(eval(PotentialSpec::quadratic_well(1.0, 0.5), 1.0) == doctest::Approx(0.25));
}

TEST_CASE("input errors") {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(eval(PotentialSpec::newtonian(), nan), Error);
  CHECK_THROWS_AS(eval_derivative(PotentialSpec::newtonian(), INFINITY), Error);
  CHECK_THROWS_AS(check_valid(PotentialSpec::gaussian_exp(1.0, -1.0, 2.0)), Error);
  CHECK_THROWS_AS(check_valid(PotentialSpec::newtonian(-1.0)), Error);
  CHECK_THROWS_AS(check_valid(PotentialSpec::power(1.0, 0.5)), Error);
}

TEST_CASE("property: derivative matches central differences") {
  Rng rng(11);
  const double h = 1e-6;
  for (int trial = 0; trial < 500; ++trial) {
    const PotentialSpec s = random_spec(rng);
    const double x = s.center + rng.uniform(-3.0, 3.0);
    if (s.family == Family::newtonian && std::abs(x - s.center) < 10 * h) continue;
    // |r|^p with p near 1 has an unbounded second derivative near the centre.
    if (std::abs(x - s.center) < 1e-2) continue;
    const double d = eval_derivative(s, x);
    const double fd = (eval(s, x + h) - eval(s, x - h)) / (2.0 * h);
    INFO("family ", to_string(s.family), " x ", x);
    CHECK(std::abs(d - fd) <= 1e-6 * (1.0 + std::abs(d)));
  }
}

TEST_CASE("property: derivative is odd for centred kernels") {
  Rng rng(12);
  for (int trial = 0; trial < 500; ++trial) {
    PotentialSpec s = random_spec(rng);
    s.center = 0.0;
    const double x = rng.uniform(-5.0, 5.0);
    CHECK(eval_derivative(s, -x) == -eval_derivative(s, x));
    CHECK(eval(s, -x) == eval(s, x));
  }
}

TEST_CASE("property: attractive kernels point inward on the sample grid") {
  Rng rng(13);
  int attractive = 0;
  for (int trial = 0; trial < 200; ++trial) {
    PotentialSpec s = random_spec(rng);
    s.center = 0.0;
    const AdmissibilityReport rep = validate(s, 4.0, 401);
    if (!rep.satisfies_AT) {
      CHECK(rep.witness.has_value());
      continue;
    }
    ++attractive;
    for (int i = 0; i <= 400; ++i) {
      const double x = -4.0 + 0.02 * i;
      CHECK(eval_derivative(s, x) * x >= 0.0);
    }
  }
  CHECK(attractive > 0);
}

TEST_CASE("validate: Newtonian kernel") {
  const AdmissibilityReport rep = validate(PotentialSpec::newtonian(), 10.0, 2001);
  CHECK(rep.satisfies_A);
  CHECK(rep.satisfies_SL);
  CHECK(rep.satisfies_AT);
  CHECK(rep.C_SL == doctest::Approx(1.0).epsilon(1e-2));
  CHECK(rep.C_SL <= 1.0);
  CHECK(rep.vanishes_at_center);
}

TEST_CASE("validate: quartic growth fails the quadratic bound") {
  const AdmissibilityReport rep = validate(PotentialSpec::power(1.0, 4.0), 10.0, 2001);
  CHECK_FALSE(rep.satisfies_SQ);
  REQUIRE(rep.SQ.witness.has_value());
  CHECK(std::abs(*rep.SQ.witness) > 1.0);
  REQUIRE(rep.witness.has_value());
}

TEST_CASE("validate: quadratic well constants") {
  const AdmissibilityReport rep = validate(PotentialSpec::quadratic_well(2.0, 0.0), 5.0, 1001);
  CHECK(rep.satisfies_H1);
  CHECK(rep.satisfies_H2);
  CHECK(rep.lambda == doctest::Approx(2.0));
  CHECK(rep.alpha == doctest::Approx(4.0));
  CHECK_FALSE(rep.witness.has_value());
}

TEST_CASE("validate: shifted well is checked about its centre") {
  const AdmissibilityReport rep = validate(PotentialSpec::quadratic_well(1.0, 0.5), 5.0, 1001);
  CHECK(rep.satisfies_H1);
  CHECK(rep.satisfies_H2);
}

TEST_CASE("validate: advisory clauses do not fail admissibility") {
  const AdmissibilityReport rep =
      validate(PotentialSpec::gaussian_exp(-1.0, 1.0, 3.0), 4.0, 801);
  CHECK_FALSE(rep.vanishes_at_center);
  CHECK_FALSE(rep.nonnegative);
  CHECK(rep.satisfies_A);
  CHECK(rep.satisfies_AT);
}

TEST_CASE("validate: repulsive kernel fails (AT) with a witness") {
  const AdmissibilityReport rep =
      validate(PotentialSpec::gaussian_exp(1.0, 1.0, 2.0), 4.0, 801);
  CHECK_FALSE(rep.satisfies_AT);
  REQUIRE(rep.AT.witness.has_value());
  const double w = *rep.AT.witness;
  CHECK(eval_derivative(PotentialSpec::gaussian_exp(1.0, 1.0, 2.0), w) * w < 0.0);
}

TEST_CASE("family names round trip") {
  for (Family f : {Family::gaussian_exp, Family::power, Family::newtonian,
                   Family::quadratic_well, Family::zero}) {
    CHECK(parse_family(to_string(f)) == f);
  }
  CHECK_FALSE(parse_family("lennard_jones").has_value());
}

TEST_CASE("interaction kernels must be centred") {
  PotentialSet p;
  p.K_rho = PotentialSpec::gaussian_exp(-1.0, 1.0, 2.0);
  p.K_rho.center = 0.3;
  CHECK_THROWS_AS(check_valid(p), Error);
  p.K_rho.center = 0.0;
  p.A_rho = PotentialSpec::quadratic_well(1.0, 0.3);
  CHECK_NOTHROW(check_valid(p));
}
