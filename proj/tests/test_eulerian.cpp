#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "stickylab/error.hpp"
#include "stickylab/eulerian.hpp"

using namespace stickylab;

namespace {

SpeciesState single(double x, double v = 0.0) { return {{x}, {v}, {1.0}}; }

TwoSpeciesState random_state(Rng& rng, std::size_t n) {
  TwoSpeciesState s;
  for (SpeciesState* sp : {&s.rho, &s.eta}) {
    sp->positions = oracle::random_monotone(rng, n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (sp->positions[i + 1] - sp->positions[i] < 0.01) sp->positions[i + 1] = sp->positions[i] + 0.01;
    }
    sp->velocities.resize(n);
    for (double& v : sp->velocities) v = rng.uniform(-1.0, 1.0);
    sp->masses.assign(n, 1.0 / static_cast<double>(n));
  }
  return s;
}

}  // namespace

TEST_CASE("rhs: symmetric attraction points inward") {
  PotentialSet p;
  p.K_rho = PotentialSpec::gaussian_exp(-1.0, 1.0, 2.0);
  TwoSpeciesState s{{{-1.0, 1.0}, {0.0, 0.0}, {0.5, 0.5}}, single(10.0), 0.0};
  const Accelerations a = rhs(s, p, TimeMode::original(1.0));
  CHECK(a.rho[0] > 0.0);
  CHECK(a.rho[0] == -a.rho[1]);
}

TEST_CASE("rhs: pure damping") {
  TwoSpeciesState s{single(0.0, 1.0), single(5.0), 0.0};
  CHECK(rhs(s, {}, TimeMode::original(1.0)).rho[0] == -1.0);
  CHECK(rhs(s, {}, TimeMode::rescaled(0.25)).rho[0] == -4.0);
}

TEST_CASE("rhs: single cross term pulls toward the other species") {
  PotentialSet p;
  p.H_rho = PotentialSpec::gaussian_exp(-1.0, 1.0, 2.0);
  TwoSpeciesState s{single(0.0), single(1.0), 0.0};
  const Accelerations a = rhs(s, p, TimeMode::original(0.0));
  CHECK(a.rho[0] == doctest::Approx(2.0 / std::exp(1.0)).epsilon(1e-15));
  CHECK(a.eta[0] == 0.0);
}

TEST_CASE("rhs: external well") {
  PotentialSet p;
  p.A_rho = PotentialSpec::quadratic_well(1.0, 0.5);
  TwoSpeciesState s{single(1.0), single(0.0), 0.0};
  CHECK(rhs(s, p, TimeMode::original(0.0)).rho[0] == doctest::Approx(-1.0));
}

TEST_CASE("step_rk3: equilibrium is unchanged") {
  TwoSpeciesState s{{{0.1, 0.7}, {0.0, 0.0}, {0.5, 0.5}}, single(0.3), 0.0};
  const TwoSpeciesState next = step_rk3(s, 0.01, {}, TimeMode::original(1.0));
  CHECK(next.rho.positions == s.rho.positions);
  CHECK(next.rho.velocities == s.rho.velocities);
  CHECK(next.time == doctest::Approx(0.01));
}

TEST_CASE("step_rk3: third-order damped free flow") {
  std::vector<double> errors;
  for (double dt : {0.1, 0.05, 0.025}) {
    TwoSpeciesState s{single(0.0, 1.0), single(0.0), 0.0};
    for (int k = 0; k < static_cast<int>(std::lround(1.0 / dt)); ++k) {
      s = step_rk3(s, dt, {}, TimeMode::original(2.0));
    }
    errors.push_back(std::abs(s.rho.velocities[0] - std::exp(-2.0)));
  }
  CHECK(std::log2(errors[0] / errors[1]) >= 2.5);
  CHECK(std::log2(errors[1] / errors[2]) >= 2.5);
}

TEST_CASE("step_rk3: blow-up is reported") {
  PotentialSet p;
  p.A_rho = PotentialSpec::power(-1.0, 4.0);
  TwoSpeciesState s{single(1e80), single(0.0), 0.0};
  CHECK_THROWS_AS(step_rk3(s, 1.0, p, TimeMode::original(1.0)), Error);
}

TEST_CASE("merge: examples") {
  TwoSpeciesState far{{{0.0, 0.5}, {1.0, -1.0}, {0.5, 0.5}}, single(0.0), 0.0};
  const MergeResult none = detect_and_merge(far, 0.002);
  CHECK(none.events.empty());
  CHECK(none.state.rho.positions == far.rho.positions);

  for (MergeRule rule : {MergeRule::momentum, MergeRule::paper}) {
    TwoSpeciesState s{{{0.499, 0.500}, {1.0, -1.0}, {0.5, 0.5}}, single(0.0), 0.0};
    const MergeResult r = detect_and_merge(s, 0.002, rule);
    REQUIRE(r.events.size() == 1);
    REQUIRE(r.state.rho.size() == 1);
    CHECK(r.state.rho.positions[0] == doctest::Approx(0.4995));
    CHECK(r.state.rho.velocities[0] == doctest::Approx(0.0));
    CHECK(r.state.rho.masses[0] == doctest::Approx(1.0));
  }

  TwoSpeciesState s{{{0.0, 0.001}, {2.0, 0.0}, {0.25, 0.75}}, single(0.0), 0.0};
  const MergeResult r = detect_and_merge(s, 0.002);
  REQUIRE(r.state.rho.size() == 1);
  CHECK(r.state.rho.positions[0] == doctest::Approx(0.00075));
  CHECK(r.state.rho.velocities[0] == doctest::Approx(0.5));
  CHECK(r.events[0].momentum_pre == doctest::Approx(0.5));
  CHECK(r.events[0].momentum_post == doctest::Approx(0.5));
  CHECK(r.events[0].ke_lost == doctest::Approx(0.5 - 0.125));
}

TEST_CASE("merge: species never merge across") {
  TwoSpeciesState s{single(0.0), single(0.0), 0.0};
  CHECK(detect_and_merge(s, 0.002).events.empty());
}

TEST_CASE("merge: cascades to a fixed point") {
  TwoSpeciesState s{{{0.0, 0.0015, 0.0025, 0.5}, {0.0, 0.0, 0.0, 0.0}, {0.25, 0.25, 0.25, 0.25}},
                    single(0.0), 0.0};
  const MergeResult r = detect_and_merge(s, 0.002);
  CHECK(r.state.rho.size() == 2);
  CHECK(r.state.rho.masses[0] == doctest::Approx(0.75));
}

TEST_CASE("property: merges conserve mass and momentum and dissipate kinetic energy") {
  Rng rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = oracle::pick(rng, 2, 20);
    SpeciesState sp;
    double x = 0.0, total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      x += rng.uniform() < 0.5 ? rng.uniform(0.0, 0.003) : rng.uniform(0.0, 0.1);
      sp.positions.push_back(x);
      sp.velocities.push_back(rng.uniform(-1.0, 1.0));
      sp.masses.push_back(rng.uniform(0.1, 1.0));
      total += sp.masses.back();
    }
    for (double& m : sp.masses) m /= total;
    const TwoSpeciesState s{sp, single(0.0), 0.0};
    const MergeResult r = detect_and_merge(s, 0.002);
    CHECK(r.state.rho.total_mass() == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(std::abs(r.state.rho.momentum() - sp.momentum()) <= 1e-12);
    CHECK(r.state.rho.kinetic_energy() <= sp.kinetic_energy() + 1e-12);
    CHECK(r.state.rho.ordered());
    for (std::size_t i = 0; i + 1 < r.state.rho.size(); ++i) {
      CHECK(r.state.rho.positions[i + 1] - r.state.rho.positions[i] >= 0.002);
    }
    for (const MergeEvent& e : r.events) {
      CHECK(std::abs(e.momentum_post - e.momentum_pre) <= 1e-12);
      CHECK(e.ke_lost >= -1e-12);
    }
  }
}

TEST_CASE("total_energy examples") {
  TwoSpeciesState zero{single(0.0), single(0.0), 0.0};
  CHECK(total_energy(zero, {}) == 0.0);
  TwoSpeciesState moving{single(0.0, 2.0), single(0.0), 0.0};
  CHECK(total_energy(moving, {}) == 2.0);

  PotentialSet p;
  p.K_rho = PotentialSpec::newtonian();
  TwoSpeciesState pair{{{0.0, 1.0}, {0.0, 0.0}, {0.5, 0.5}}, single(0.0), 0.0};
  CHECK(*total_energy(pair, p) == doctest::Approx(0.25));

  p.H_rho = PotentialSpec::power(1.0, 2.0);
  CHECK_FALSE(total_energy(pair, p).has_value());
}

TEST_CASE("property: energy is nonincreasing for damped symmetric systems") {
  PotentialSet p;
  p.K_rho = PotentialSpec::gaussian_exp(-1.0, 1.0, 2.0);
  p.K_eta = PotentialSpec::gaussian_exp(-0.5, 2.0, 2.0);
  p.H_rho = p.H_eta = PotentialSpec::gaussian_exp(-1.0, 1.0, 2.0);
  Rng rng(32);
  for (int trial = 0; trial < 5; ++trial) {
    TwoSpeciesState s = random_state(rng, 12);
    double e = *total_energy(s, p);
    for (int k = 0; k < 200; ++k) {
      s = step_rk3(s, 1e-3, p, TimeMode::original(1.0));
      const double next = *total_energy(s, p);
      CHECK(next <= e + 1e-9);
      e = next;
    }
  }
}

TEST_CASE("simulate: zero dynamics stay put") {
  TwoSpeciesState s{{{0.2, 0.8}, {0.0, 0.0}, {0.5, 0.5}}, single(0.5), 0.0};
  EulerianOptions o;
  o.horizon = 0.1;
  const EulerianRun run = simulate(s, {}, o);
  for (const Snapshot& snap : run.snapshots) CHECK(snap.rho.positions == s.rho.positions);
  CHECK(run.events.empty());
  CHECK(run.diagnostics.back().w2_reference == 0.0);
}

TEST_CASE("simulate: strong attraction merges a pair once and conserves momentum") {
  PotentialSet p;
  p.K_rho = PotentialSpec::power(50.0, 2.0);
  TwoSpeciesState s{{{0.0, 0.1}, {0.3, 0.0}, {0.5, 0.5}}, single(5.0), 0.0};
  EulerianOptions o;
  o.horizon = 1.0;
  o.mode = TimeMode::original(0.0);
  const EulerianRun run = simulate(s, p, o);
  REQUIRE(run.events.size() == 1);
  CHECK(run.events[0].momentum_post == doctest::Approx(run.events[0].momentum_pre).epsilon(1e-12));
  CHECK(run.snapshots.back().rho.size() == 1);
  CHECK(run.ordering_violations == 0);
}

TEST_CASE("simulate: output cadence and determinism") {
  PotentialSet p;
  p.K_rho = p.K_eta = PotentialSpec::gaussian_exp(-1.0, 1.0, 2.0);
  EulerianOptions o;
  o.horizon = 0.1;
  o.output_stride = 10;
  TwoSpeciesState s{uniform_species(20, -1.0, 1.0, 7), uniform_species(15, -1.0, 1.0, 8), 0.0};
  const EulerianRun a = simulate(s, p, o);
  const EulerianRun b = simulate(s, p, o);
  CHECK(a.snapshots.size() == 11);
  CHECK(a.snapshots.back().time == doctest::Approx(0.1));
  CHECK(a.snapshots.back().rho.positions == b.snapshots.back().rho.positions);
  CHECK(a.snapshots.back().eta.velocities == b.snapshots.back().eta.velocities);
}

TEST_CASE("uniform_species layout") {
  const SpeciesState s = uniform_species(4, -1.0, 1.0, 3);
  CHECK(s.positions == std::vector<double>{0.125, 0.375, 0.625, 0.875});
  CHECK(s.total_mass() == 1.0);
  for (double v : s.velocities) {
    CHECK(v >= -1.0);
    CHECK(v < 1.0);
  }
  CHECK(uniform_species(4, -1.0, 1.0, 3).velocities == s.velocities);
  CHECK(uniform_species(4, -1.0, 1.0, 4).velocities != s.velocities);
}
