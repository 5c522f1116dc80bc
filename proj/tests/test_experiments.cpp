#include <doctest.h>

#include <cmath>
#include <limits>

#include "stickylab/error.hpp"
#include "stickylab/experiments.hpp"

using namespace stickylab;

namespace {

PotentialSet attractive() {
  PotentialSet p;
  p.K_rho = PotentialSpec::gaussian_exp(-1.0, 1.0, 3.0);
  p.K_eta = PotentialSpec::gaussian_exp(-1.0, 1.0, 4.0);
  p.H_rho = p.H_eta = PotentialSpec::gaussian_exp(-1.0, 1.0, 2.0);
  return p;
}

PotentialSet decaying() {
  PotentialSet p;
  p.K_rho = p.K_eta = PotentialSpec::newtonian();
  p.H_rho = p.H_eta = PotentialSpec::gaussian_exp(-1.0, 1.0, 2.0);
  p.A_rho = p.A_eta = PotentialSpec::quadratic_well(1.0);
  return p;
}

}  // namespace

TEST_CASE("initial data: seeded, per-species streams") {
  const TwoSpeciesState a = initial_particles(10, 12, {}, 5);
  const TwoSpeciesState b = initial_particles(10, 30, {}, 5);
  CHECK(a.rho.velocities == b.rho.velocities);
  CHECK(a.eta.velocities != initial_particles(10, 12, {}, 6).eta.velocities);
  CHECK(a.rho.positions.front() == doctest::Approx(0.05));

  const GridData g = initial_grid(8, {-0.5, 0.5}, 9);
  CHECK(g.X == g.Y);
  for (double v : g.V) {
    CHECK(v >= -0.5);
    CHECK(v < 0.5);
  }
  const GridData r = random_grid(16, -1.0, 1.0, {}, 9);
  CHECK(std::is_sorted(r.X.begin(), r.X.end()));
  CHECK(std::is_sorted(r.Y.begin(), r.Y.end()));
  CHECK(r.X != r.Y);
  CHECK(r.X.front() >= -1.0);
  CHECK(r.X.back() <= 1.0);
}

TEST_CASE("loglog_slope") {
  const std::vector<double> x{1e-1, 1e-2, 1e-3};
  const std::vector<double> y{3e-2, 3e-4, 3e-6};
  CHECK(loglog_slope(x, y) == doctest::Approx(2.0));
  const std::vector<double> z{0.0, 1.0, 2.0};
  const std::vector<double> w{5.0, 1.0, 2.0};
  CHECK(loglog_slope(z, w) == doctest::Approx(1.0));
}

TEST_CASE("damping sweep: first-order row and monotone decrease") {
  SweepSetup s;
  s.potentials = attractive();
  s.initial = initial_grid(16, {}, 3);
  s.horizon = 0.5;
  const std::vector<double> sigmas{5.0, 20.0, 100.0, std::numeric_limits<double>::infinity()};
  const SweepResult r = damping_sweep(s, sigmas);
  REQUIRE(r.rows.size() == 4);
  CHECK(r.rows.back().D == 0.0);
  CHECK(r.rows.back().epsilon == 0.0);
  for (const SweepRow& row : r.rows) CHECK(row.D >= 0.0);
  CHECK(r.rows[0].D > r.rows[1].D);
  CHECK(r.rows[1].D > r.rows[2].D);
  CHECK(r.strictly_decreasing);
  CHECK(r.w2_curves.size() == 4);
  CHECK(r.w2_curves[0].size() == r.times.size());

  const SweepResult again = damping_sweep(s, sigmas);
  CHECK(again.rows[1].D == r.rows[1].D);
}

TEST_CASE("decay: stationary data stays at rest") {
  DecaySetup s;
  s.potentials = decaying();
  s.initial = {GridFunction(8, 0.0), GridFunction(8, 0.0), GridFunction(8, 0.0),
               GridFunction(8, 0.0)};
  s.horizon = 0.5;
  const DecaySeries d = newtonian_decay(s);
  for (std::size_t k = 0; k < d.times.size(); ++k) {
    CHECK(d.norm_X[k] == 0.0);
    CHECK(d.norm_V[k] == 0.0);
    CHECK(d.w2_target[k] == 0.0);
  }
}

TEST_CASE("decay: short run shrinks and dissipates") {
  DecaySetup s;
  s.potentials = decaying();
  s.initial = random_grid(32, -1.0, 1.0, {}, 4);
  s.horizon = 5.0;
  const DecaySeries d = newtonian_decay(s);
  CHECK(d.terminal_total < d.initial_total);
  CHECK(d.max_energy_increase <= 1e-8);
  for (std::size_t k = 1; k < d.kinetic_integral.size(); ++k) {
    CHECK(d.kinetic_integral[k] >= d.kinetic_integral[k - 1]);
  }
}

TEST_CASE("decay: preconditions") {
  DecaySetup s;
  s.initial = initial_grid(4, {}, 1);
  s.potentials = decaying();
  s.potentials.K_rho = PotentialSpec::gaussian_exp(-1.0, 1.0, 2.0);
  CHECK_THROWS_AS(newtonian_decay(s), Error);
  s.potentials = decaying();
  s.potentials.A_eta = PotentialSpec::zero();
  CHECK_THROWS_AS(newtonian_decay(s), Error);
  s.potentials = decaying();
  s.potentials.H_rho = s.potentials.H_eta = PotentialSpec::gaussian_exp(1.0, 1.0, 2.0);
  CHECK_THROWS_AS(newtonian_decay(s), Error);
}

TEST_CASE("cross validation") {
  CrossSetup s;
  s.initial = initial_particles(16, 16, {0.0, 0.0}, 1);
  s.horizon = 0.2;
  CHECK(cross_validate(s).max_deviation <= 1e-14);

  s.potentials.K_rho = s.potentials.K_eta = PotentialSpec::gaussian_exp(-0.5, 1.0, 2.0);
  s.potentials.H_rho = s.potentials.H_eta = PotentialSpec::gaussian_exp(-0.5, 1.0, 2.0);
  const CrossValidation r = cross_validate(s);
  CHECK(r.merge_events == 0);
  CHECK(r.max_deviation <= 5.0 * s.dt);
  CHECK(r.max_deviation > 0.0);

  s.initial = initial_particles(16, 15, {}, 1);
  CHECK_THROWS_AS(cross_validate(s), Error);
}

TEST_CASE("figure setups") {
  CHECK_THROWS_AS(figure_setup(0), Error);
  CHECK_THROWS_AS(figure_setup(9), Error);
  const FigureSetup f1 = figure_setup(1);
  CHECK(f1.N == 160);
  CHECK(f1.M == 150);
  CHECK(eval(f1.potentials.K_rho, 0.0) == -1.0);
  CHECK(figure_setup(2).N == 180);
  CHECK(figure_setup(2).M == 200);
  CHECK(figure_setup(4).potentials.A_rho.center == 0.5);
  CHECK(figure_setup(8).sigmas.size() == 3);
}

TEST_CASE("figure 1: clusters only coalesce, bundles are reproducible") {
  const FigureResult a = reproduce_figure(1, 20240607);
  CHECK(a.passed());
  REQUIRE(a.runs.size() >= 1);
  REQUIRE(a.runs[0].eulerian.has_value());
  const auto& diag = a.runs[0].eulerian->diagnostics;
  for (std::size_t k = 1; k < diag.size(); ++k) {
    CHECK(diag[k].clusters_rho <= diag[k - 1].clusters_rho);
    CHECK(diag[k].clusters_eta <= diag[k - 1].clusters_eta);
  }
  CHECK(diag.back().clusters_rho < 160);

  const FigureResult b = reproduce_figure(1, 20240607);
  CHECK(b.runs[0].eulerian->snapshots.back().rho.positions ==
        a.runs[0].eulerian->snapshots.back().rho.positions);
}

TEST_CASE("figure 3: two seeds give different merge patterns") {
  const FigureResult r = reproduce_figure(3, 7);
  CHECK(r.passed());
  REQUIRE(r.runs.size() == 2);
  CHECK(r.runs[0].eulerian->events.size() != 0);
}
