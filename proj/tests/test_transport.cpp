#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "stickylab/error.hpp"
#include "stickylab/transport.hpp"

using namespace stickylab;

namespace {

ClusterPartition random_partition(Rng& rng, std::size_t n) {
  ClusterPartition p;
  p.cells = n;
  std::size_t begin = 0;
  while (begin < n) {
    const std::size_t len = oracle::pick(rng, 1, std::min<std::size_t>(4, n - begin));
    p.runs.push_back({begin, begin + len});
    begin += len;
  }
  return p;
}

double integral_abs_pow(const std::vector<double>& u, double p) {
  double acc = 0.0;
  for (double x : u) acc += std::pow(std::abs(x), p);
  return acc / static_cast<double>(u.size());
}

}  // namespace

TEST_CASE("pseudo-inverse of simple measures") {
  const PseudoInverse d = pseudo_inverse(AtomicMeasure::dirac(0.0));
  CHECK(d.values() == std::vector<double>{0.0});
  CHECK(d(0.3) == 0.0);

  const PseudoInverse two = pseudo_inverse(AtomicMeasure({{0.0, 0.5}, {1.0, 0.5}}));
  CHECK(two(0.25) == 0.0);
  CHECK(two(0.75) == 1.0);
  CHECK(two(0.5) == 1.0);

  const PseudoInverse q = pseudo_inverse(AtomicMeasure({{-1.0, 0.25}, {2.0, 0.75}}));
  CHECK(q.breakpoints() == std::vector<double>{0.0, 0.25, 1.0});
  CHECK(q.values() == std::vector<double>{-1.0, 2.0});
}

TEST_CASE("push-forward identity of the pseudo-inverse") {
  Rng rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    const AtomicMeasure mu = oracle::random_measure(rng, 12);
    const PseudoInverse X = pseudo_inverse(mu);
    for (auto zeta : {+[](double x) { return x; }, +[](double x) { return x * x; }}) {
      double direct = 0.0, pushed = 0.0;
      for (const Atom& a : mu.atoms()) direct += a.mass * zeta(a.position);
      for (std::size_t i = 0; i < X.cells(); ++i) pushed += X.width(i) * zeta(X.values()[i]);
      CHECK(pushed == doctest::Approx(direct).epsilon(1e-12));
    }
  }
}

TEST_CASE("to_measure") {
  const AtomicMeasure c = to_measure(PseudoInverse::on_uniform_grid(std::vector<double>{3.0, 3.0}));
  REQUIRE(c.size() == 1);
  CHECK(c.atoms()[0].position == 3.0);
  CHECK(c.atoms()[0].mass == doctest::Approx(1.0));

  const std::vector<double> grid{0.0, 0.0, 1.0, 1.0};
  const AtomicMeasure m = to_measure(PseudoInverse::on_uniform_grid(grid));
  REQUIRE(m.size() == 2);
  CHECK(m.atoms()[0].mass == doctest::Approx(0.5));
  CHECK(m.atoms()[1].position == 1.0);

  const AtomicMeasure back = to_measure(pseudo_inverse(AtomicMeasure({{0.0, 0.5}, {1.0, 0.5}})));
  CHECK(back.size() == 2);
}

TEST_CASE("w2 examples") {
  const AtomicMeasure mu({{0.0, 0.5}, {1.0, 0.5}});
  const AtomicMeasure nu({{0.0, 0.5}, {2.0, 0.5}});
  CHECK(w2(mu, nu) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
  CHECK(w2(mu, mu) == 0.0);
  CHECK(w2(AtomicMeasure::dirac(0.0), AtomicMeasure::dirac(1.0)) == 1.0);

  const MeasurePair zero{AtomicMeasure::dirac(0.0), AtomicMeasure::dirac(0.0)};
  CHECK(product_w2(zero, zero) == 0.0);
  CHECK(product_w2(zero, {AtomicMeasure::dirac(1.0), AtomicMeasure::dirac(0.0)}) == 1.0);
  CHECK(product_w2(zero, {AtomicMeasure::dirac(3.0), AtomicMeasure::dirac(4.0)}) ==
        doctest::Approx(5.0));
}

TEST_CASE("property: w2 matches exact transport") {
  Rng rng(22);
  for (int trial = 0; trial < 100; ++trial) {
    const AtomicMeasure mu = oracle::random_measure(rng, trial < 30 ? 3 : 40);
    const AtomicMeasure nu = oracle::random_measure(rng, trial < 30 ? 3 : 40);
    const double got = w2_squared(pseudo_inverse(mu), pseudo_inverse(nu));
    CHECK(std::abs(got - oracle::sorted_matching_cost(mu, nu)) <= 1e-10);
    if (trial < 30) CHECK(std::abs(got - oracle::coupling_brute_force(mu, nu)) <= 1e-10);
    CHECK(got == doctest::Approx(w2_squared(pseudo_inverse(nu), pseudo_inverse(mu))));
  }
}

TEST_CASE("property: round trip through the pseudo-inverse") {
  Rng rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    const AtomicMeasure mu = oracle::random_measure(rng, 20);
    CHECK(w2(to_measure(pseudo_inverse(mu)), mu) == 0.0);
  }
}

TEST_CASE("measure validation") {
  CHECK_THROWS_AS(AtomicMeasure({}), Error);
  CHECK_THROWS_AS(AtomicMeasure({{0.0, 0.4}, {1.0, 0.4}}), Error);
  CHECK_THROWS_AS(AtomicMeasure({{1.0, 0.5}, {0.0, 0.5}}), Error);
  CHECK_THROWS_AS(AtomicMeasure({{0.0, 1.0}, {1.0, 0.0}}), Error);
  CHECK_THROWS_AS(AtomicMeasure({{NAN, 1.0}}), Error);
  CHECK_THROWS_AS(PseudoInverse({0.0, 0.5, 1.0}, {1.0, 0.0}), Error);
}

TEST_CASE("project_cone examples") {
  const std::vector<double> sorted{-1.0, 0.0, 0.0, 2.0};
  CHECK(project_cone(sorted) == sorted);
  CHECK(project_cone(std::vector<double>{2.0, 1.0}) == std::vector<double>{1.5, 1.5});
  const std::vector<double> p =
      project_cone(std::vector<double>{3.0, 1.0}, std::vector<double>{1.0, 3.0});
  CHECK(p[0] == doctest::Approx(1.5));
  CHECK(p[1] == p[0]);
}

TEST_CASE("property: project_cone is optimal and satisfies the variational inequality") {
  Rng rng(24);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = oracle::pick(rng, 1, 6);
    std::vector<double> x(n), w(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = rng.uniform(-1.0, 1.0);
      w[i] = rng.uniform(0.1, 2.0);
    }
    const std::vector<double> p = project_cone(x, w);
    const oracle::ProjectionOracle best = oracle::projection_brute_force(x, w);
    for (std::size_t i = 0; i < n; ++i) CHECK(p[i] == doctest::Approx(best.point[i]).epsilon(1e-12));
    CHECK(std::is_sorted(p.begin(), p.end()));
    for (int k = 0; k < 20; ++k) {
      const std::vector<double> z = oracle::random_monotone(rng, n);
      double ineq = 0.0;
      for (std::size_t i = 0; i < n; ++i) ineq += w[i] * (x[i] - p[i]) * (z[i] - p[i]);
      CHECK(ineq <= 1e-9);
    }
  }
}

TEST_CASE("property: project_cone is idempotent and pools to bitwise-equal blocks") {
  Rng rng(25);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> x(oracle::pick(rng, 1, 50));
    for (double& v : x) v = rng.uniform(-1.0, 1.0);
    const std::vector<double> p = project_cone(x);
    CHECK(project_cone(p) == p);
    for (const IndexRange& r : clusters(p).runs) {
      for (std::size_t i = r.begin; i < r.end; ++i) CHECK(p[i] == p[r.begin]);
    }
  }
}

TEST_CASE("clusters examples") {
  CHECK(clusters(std::vector<double>{0.0, 1.0, 2.0}).count() == 3);
  const ClusterPartition c = clusters(std::vector<double>{0.0, 0.0, 1.0});
  REQUIRE(c.count() == 2);
  CHECK(c.runs[0] == IndexRange{0, 2});
  CHECK(c.runs[1] == IndexRange{2, 3});
  CHECK(c.nontrivial().size() == 1);
  const ClusterPartition t = clusters(std::vector<double>{0.0, 1e-9, 1.0}, 1e-8);
  REQUIRE(t.count() == 2);
  CHECK(t.runs[0] == IndexRange{0, 2});
}

TEST_CASE("project_blocks examples") {
  const std::vector<double> u{4.0, 0.0, 7.0, -1.0};
  CHECK(project_blocks(clusters(std::vector<double>{0.0, 1.0, 2.0, 3.0}), u) == u);
  CHECK(project_blocks(clusters(std::vector<double>{5.0, 5.0}), std::vector<double>{0.0, 2.0}) ==
        std::vector<double>{1.0, 1.0});
  CHECK(project_blocks(clusters(std::vector<double>{0.0, 0.0, 1.0, 2.0}), u) ==
        std::vector<double>{2.0, 2.0, 7.0, -1.0});
}

TEST_CASE("property: block projection contracts convex integrands and is idempotent") {
  Rng rng(26);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = oracle::pick(rng, 1, 30);
    const ClusterPartition part = random_partition(rng, n);
    std::vector<double> u(n);
    for (double& v : u) v = rng.uniform(-2.0, 2.0);
    const GridFunction pu = project_blocks(part, u);
    CHECK(project_blocks(part, pu) == pu);
    for (double p : {1.0, 2.0, 4.0}) {
      CHECK(integral_abs_pow(pu, p) <= integral_abs_pow(u, p) + 1e-12);
    }
  }
}

TEST_CASE("grid norms") {
  CHECK(grid_norm_squared(std::vector<double>{1.0, 3.0}) == 5.0);
  CHECK(grid_norm(std::vector<double>{2.0, 2.0}) == 2.0);
  CHECK(grid_distance_squared(std::vector<double>{0.0, 1.0}, std::vector<double>{1.0, 1.0}) ==
        0.5);
  CHECK_THROWS_AS(grid_distance_squared(std::vector<double>{0.0}, std::vector<double>{1.0, 1.0}),
                  Error);
}
