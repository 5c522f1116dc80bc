#include "stickylab/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "stickylab/error.hpp"
#include "stickylab/rng.hpp"

namespace stickylab {

namespace {


GridFunction draw(std::size_t n, double lo, double hi, std::uint64_t seed,
                  Stream stream) {
  GridFunction v(n);
  Rng rng(substream_seed(seed, stream));
  for (double& x : v) x = lo == hi ? lo : rng.uniform(lo, hi);
  return v;
}

GridFunction scaled(const GridFunction& v, double factor) {
  GridFunction out(v);
  for (double& x : out) x *= factor;
  return out;
}

double snapshot_distance(const LagrangianSnapshot& a, const LagrangianSnapshot& b) {
  return std::sqrt(grid_distance_squared(a.X, b.X) + grid_distance_squared(a.Y, b.Y));
}

double trapezoid(std::span<const double> t, std::span<const double> f) {
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < t.size(); ++k) {
    acc += 0.5 * (t[k + 1] - t[k]) * (f[k] + f[k + 1]);
  }
  return acc;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

double centred_norm(std::span<const double> X, double c) {
  double acc = 0.0;
  for (double x : X) acc += (x - c) * (x - c);
  return std::sqrt(acc / static_cast<double>(X.size()));
}

}  // namespace

TwoSpeciesState initial_particles(std::size_t N, std::size_t M,
                                  VelocityRange range, std::uint64_t seed) {
  if (!(range.lo <= range.hi)) fail(ErrorKind::config, "velocity_range is reversed");
  TwoSpeciesState s;
  s.rho = uniform_species(N, range.lo, range.hi, substream_seed(seed, Stream::rho));
  s.eta = uniform_species(M, range.lo, range.hi, substream_seed(seed, Stream::eta));
  return s;
}

GridData initial_grid(std::size_t n, VelocityRange range, std::uint64_t seed) {
  if (n == 0) fail(ErrorKind::config, "grid needs at least one cell");
  if (!(range.lo <= range.hi)) fail(ErrorKind::config, "velocity_range is reversed");
  GridData g;
  g.X = midpoints(n);
  g.Y = g.X;
  g.V = draw(n, range.lo, range.hi, seed, Stream::rho);
  g.W = draw(n, range.lo, range.hi, seed, Stream::eta);
  return g;
}

GridData random_grid(std::size_t n, double lo, double hi, VelocityRange range,
                     std::uint64_t seed) {
  GridData g = initial_grid(n, range, seed);
  g.X = draw(n, lo, hi, seed, Stream::grid_x);
  g.Y = draw(n, lo, hi, seed, Stream::grid_y);
  std::sort(g.X.begin(), g.X.end());
  std::sort(g.Y.begin(), g.Y.end());
  return g;
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
    if (x[i] > 0.0 && y[i] > 0.0 && std::isfinite(x[i]) && std::isfinite(y[i])) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(y[i]));
    }
  }
  if (lx.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  const double n = static_cast<double>(lx.size());
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  return sxx > 0.0 ? sxy / sxx : std::numeric_limits<double>::quiet_NaN();
}

SweepResult damping_sweep(const SweepSetup& setup, std::span<const double> sigmas) {
  check_valid(setup.potentials);
  if (sigmas.empty()) fail(ErrorKind::config, "sweep needs at least one sigma");
  for (double s : sigmas) {
    if (!(s > 0.0)) fail(ErrorKind::config, "sweep sigmas must be > 0");
  }

  LagrangianOptions first;
  first.scheme = LagrangianScheme::first_order;
  first.dt = setup.dt;
  first.horizon = setup.horizon;
  first.output_stride = setup.output_stride;
  const GridData& g = setup.initial;
  const LagrangianRun reference = simulate_lagrangian(
      make_state(g.X, g.Y, g.V, g.W, 0.0), setup.potentials, first);

  SweepResult result;
  for (const LagrangianSnapshot& s : reference.snapshots) result.times.push_back(s.time);

  for (double sigma : sigmas) {
    const auto start = std::chrono::steady_clock::now();
    SweepRow row;
    row.sigma = sigma;
    LagrangianRun run;
    if (std::isinf(sigma)) {
      row.epsilon = 0.0;
      run = simulate_lagrangian(make_state(g.X, g.Y, g.V, g.W, 0.0),
                                setup.potentials, first);
    } else {
      row.epsilon = 1.0 / (sigma * sigma);
      LagrangianOptions second = first;
      second.scheme = LagrangianScheme::second_order;
      run = simulate_lagrangian(
          make_state(g.X, g.Y, scaled(g.V, sigma), scaled(g.W, sigma), row.epsilon),
          setup.potentials, second);
    }
    std::vector<double> w2(reference.snapshots.size()), w2sq(w2.size());
    for (std::size_t k = 0; k < w2.size(); ++k) {
      w2[k] = snapshot_distance(run.snapshots[k], reference.snapshots[k]);
      w2sq[k] = w2[k] * w2[k];
    }
    row.D = trapezoid(result.times, w2sq);
    row.terminal_w2 = w2.back();
    row.runtime_seconds = seconds_since(start);
    result.rows.push_back(row);
    result.w2_curves.push_back(std::move(w2));
  }

  std::vector<SweepRow> by_sigma = result.rows;
  std::stable_sort(by_sigma.begin(), by_sigma.end(),
                   [](const SweepRow& a, const SweepRow& b) { return a.sigma < b.sigma; });
  result.strictly_decreasing = true;
  for (std::size_t i = 1; i < by_sigma.size(); ++i) {
    if (!(by_sigma[i].D < by_sigma[i - 1].D)) result.strictly_decreasing = false;
  }
  std::vector<double> eps, D;
  for (const SweepRow& r : result.rows) {
    eps.push_back(r.epsilon);
    D.push_back(r.D);
  }
  result.slope = loglog_slope(eps, D);
  return result;
}

DecaySeries newtonian_decay(const DecaySetup& setup) {
  const PotentialSet& p = setup.potentials;
  check_valid(p);
  if (p.K_rho.family != Family::newtonian || p.K_eta.family != Family::newtonian) {
    fail(ErrorKind::config, "decay: self kernels must be Newtonian");
  }
  if (!p.symmetric_cross()) fail(ErrorKind::config, "decay: H_rho and H_eta must coincide");
  if (!p.H_rho.is_zero() && !validate(p.H_rho, 8.0, 1601).satisfies_AT) {
    fail(ErrorKind::config, "decay: cross potential is not attractive");
  }
  for (const PotentialSpec* A : {&p.A_rho, &p.A_eta}) {
    const AdmissibilityReport rep = validate(*A, 8.0, 1601);
    if (!rep.satisfies_H1 || !rep.satisfies_H2) {
      fail(ErrorKind::config, "decay: external wells must satisfy (H1) and (H2)");
    }
  }
  if (!(setup.sigma > 0.0)) fail(ErrorKind::config, "decay: sigma must be > 0");

  LagrangianOptions opt;
  opt.scheme = LagrangianScheme::newtonian;
  opt.dt = setup.dt;
  opt.horizon = setup.horizon;
  opt.output_stride = setup.output_stride;
  opt.sigma = setup.sigma;
  const GridData& g = setup.initial;
  const LagrangianRun run =
      simulate_lagrangian(make_state(g.X, g.Y, g.V, g.W, 0.0), p, opt);

  DecaySeries out;
  out.center_rho = p.A_rho.center;
  out.center_eta = p.A_eta.center;
  out.max_energy_increase = run.max_energy_increase;
  for (std::size_t k = 0; k < run.snapshots.size(); ++k) {
    const LagrangianSnapshot& s = run.snapshots[k];
    const double nx = centred_norm(s.X, out.center_rho);
    const double ny = centred_norm(s.Y, out.center_eta);
    out.times.push_back(s.time);
    out.norm_X.push_back(nx);
    out.norm_Y.push_back(ny);
    out.norm_V.push_back(grid_norm(s.V));
    out.norm_W.push_back(grid_norm(s.W));
    out.energy.push_back(run.diagnostics[k].energy.value_or(0.0));
    out.w2_target.push_back(std::sqrt(nx * nx + ny * ny));
    if (k == 0) {
      out.kinetic_integral.push_back(0.0);
    } else {
      const double dt = out.times[k] - out.times[k - 1];
      const double a = out.norm_V[k - 1] * out.norm_V[k - 1] +
                       out.norm_W[k - 1] * out.norm_W[k - 1];
      const double b = out.norm_V[k] * out.norm_V[k] + out.norm_W[k] * out.norm_W[k];
      out.kinetic_integral.push_back(out.kinetic_integral.back() + 0.5 * dt * (a + b));
    }
  }
  auto total = [&](std::size_t k) {
    return out.norm_X[k] + out.norm_Y[k] + out.norm_V[k] + out.norm_W[k];
  };
  out.initial_total = total(0);
  out.terminal_total = total(out.times.size() - 1);

  const double end = out.kinetic_integral.back();
  const double cut = out.times.front() + 0.9 * (out.times.back() - out.times.front());
  std::size_t k = 0;
  while (k + 1 < out.times.size() && out.times[k] < cut) ++k;
  out.kinetic_plateau = end > 0.0 ? (end - out.kinetic_integral[k]) / end : 0.0;
  return out;
}

CrossValidation cross_validate(const CrossSetup& setup) {
  const TwoSpeciesState& init = setup.initial;
  init.rho.check();
  init.eta.check();
  const std::size_t n = init.rho.size();
  if (init.eta.size() != n) {
    fail(ErrorKind::precondition, "cross_validate: needs N == M");
  }
  for (const SpeciesState* s : {&init.rho, &init.eta}) {
    for (double m : s->masses) {
      if (std::abs(m - 1.0 / static_cast<double>(n)) > 1e-15) {
        fail(ErrorKind::precondition, "cross_validate: needs equal masses 1/n");
      }
    }
  }
  if (!(setup.sigma > 0.0) || std::isinf(setup.sigma)) {
    fail(ErrorKind::config, "cross_validate: sigma must be finite and > 0");
  }

  EulerianOptions eo;
  eo.dt = setup.dt;
  eo.horizon = setup.horizon;
  eo.output_stride = setup.output_stride;
  eo.toll = setup.toll;
  eo.mode = TimeMode::original(setup.sigma);
  const EulerianRun eul = simulate(init, setup.potentials, eo);

  TwoSpeciesState sorted = init;
  if (!sorted.rho.ordered()) sort_species(sorted.rho);
  if (!sorted.eta.ordered()) sort_species(sorted.eta);
  auto [X, V] = sample_on_grid(sorted.rho, n);
  auto [Y, W] = sample_on_grid(sorted.eta, n);
  const double eps = 1.0 / (setup.sigma * setup.sigma);
  LagrangianOptions lo;
  lo.scheme = LagrangianScheme::second_order;
  lo.dt = setup.dt / setup.sigma;
  lo.horizon = setup.horizon / setup.sigma;
  lo.output_stride = setup.output_stride;
  const LagrangianRun lag = simulate_lagrangian(
      make_state(X, Y, scaled(V, setup.sigma), scaled(W, setup.sigma), eps),
      setup.potentials, lo);

  if (lag.snapshots.size() != eul.snapshots.size()) {
    fail(ErrorKind::numerical, "cross_validate: output grids do not line up");
  }
  CrossValidation out;
  out.merge_events = eul.events.size();
  for (std::size_t k = 0; k < eul.snapshots.size(); ++k) {
    const Snapshot& e = eul.snapshots[k];
    const LagrangianSnapshot& l = lag.snapshots[k];
    const double dx = w2_squared(pseudo_inverse(e.rho.measure()),
                                 PseudoInverse::on_uniform_grid(l.X));
    const double dy = w2_squared(pseudo_inverse(e.eta.measure()),
                                 PseudoInverse::on_uniform_grid(l.Y));
    out.times.push_back(e.time);
    out.deviation.push_back(std::sqrt(dx + dy));
    out.max_deviation = std::max(out.max_deviation, out.deviation.back());
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

PotentialSet figure_one_potentials() {
  PotentialSet p;
  p.K_rho = PotentialSpec::gaussian_exp(-1.0, 1.0, 3.0);
  p.K_eta = PotentialSpec::gaussian_exp(-1.0, 1.0, 4.0);
  p.H_rho = p.H_eta = PotentialSpec::gaussian_exp(-1.0, 1.0, 2.0);
  return p;
}

PotentialSet figure_four_potentials() {
  PotentialSet p;
  p.K_rho = p.K_eta = PotentialSpec::newtonian(1.0);
  p.H_rho = p.H_eta = PotentialSpec::gaussian_exp(-1.0, 1.0, 2.0);
  p.A_rho = PotentialSpec::quadratic_well(1.0, 0.5);
  p.A_eta = PotentialSpec::quadratic_well(2.0, 0.5);
  return p;
}

std::vector<std::pair<std::size_t, std::size_t>> cluster_history(const EulerianRun& run) {
  std::vector<std::pair<std::size_t, std::size_t>> h;
  for (const DiagnosticsRecord& d : run.diagnostics) {
    h.emplace_back(d.clusters_rho, d.clusters_eta);
  }
  return h;
}

Table cluster_table(const std::string& name, const EulerianRun& run) {
  Table t{name,
          {"time", "clusters_rho", "clusters_eta", "energy", "kinetic",
           "w2_initial", "merge_events"},
          {}};
  for (const DiagnosticsRecord& d : run.diagnostics) {
    t.rows.push_back({d.time, static_cast<double>(d.clusters_rho),
                      static_cast<double>(d.clusters_eta),
                      d.energy.value_or(std::numeric_limits<double>::quiet_NaN()),
                      d.kinetic, d.w2_reference, static_cast<double>(d.merge_events)});
  }
  return t;
}

void invariant_checks(const std::string& label, const EulerianRun& run,
                      std::vector<PropertyCheck>& checks) {
  checks.push_back({label + ": ordering preserved", run.ordering_violations == 0,
                    fmt::format("{} violations", run.ordering_violations)});
  checks.push_back({label + ": mass conserved", run.max_mass_error <= 1e-12,
                    fmt::format("max mass error {:.3e}", run.max_mass_error)});
  double worst = 0.0;
  for (const MergeEvent& e : run.events) {
    worst = std::max(worst, std::abs(e.momentum_post - e.momentum_pre));
  }
  checks.push_back({label + ": momentum conserved at merges", worst <= 1e-12,
                    fmt::format("worst defect {:.3e} over {} merges", worst,
                                run.events.size())});
}

bool clusters_nonincreasing(const EulerianRun& run) {
  for (std::size_t k = 1; k < run.diagnostics.size(); ++k) {
    if (run.diagnostics[k].clusters_rho > run.diagnostics[k - 1].clusters_rho ||
        run.diagnostics[k].clusters_eta > run.diagnostics[k - 1].clusters_eta) {
      return false;
    }
  }
  return true;
}

EulerianRun run_particles(const FigureSetup& fs, std::uint64_t seed,
                          const FigureOptions& o, double horizon) {
  EulerianOptions eo;
  eo.dt = o.dt;
  eo.horizon = horizon;
  eo.output_stride = o.output_stride;
  eo.toll = o.toll;
  eo.merge_rule = o.merge_rule;
  eo.mode = TimeMode::original(fs.sigmas.front());
  return simulate(initial_particles(fs.N, fs.M, fs.velocities.value_or(o.velocities), seed),
                  fs.potentials, eo);
}

// Figures 6 and 7: second-order runs for each sigma against the first-order
// system on the same grid, in rescaled time.
void compare_orders(FigureResult& r, const FigureOptions& o, double horizon) {
  const FigureSetup& fs = r.setup;
  const GridData g = initial_grid(fs.N, fs.velocities.value_or(o.velocities), r.seed);
  LagrangianOptions first;
  first.scheme = LagrangianScheme::first_order;
  first.dt = o.dt;
  first.horizon = horizon;
  first.output_stride = o.output_stride;
  LagrangianRun ref = simulate_lagrangian(make_state(g.X, g.Y, g.V, g.W, 0.0),
                                          fs.potentials, first);

  Table t{"w2_second_vs_first", {"time"}, {}};
  for (const LagrangianSnapshot& s : ref.snapshots) t.rows.push_back({s.time});
  std::vector<double> sup;
  for (double sigma : fs.sigmas) {
    LagrangianOptions second = first;
    second.scheme = LagrangianScheme::second_order;
    LagrangianRun run = simulate_lagrangian(
        make_state(g.X, g.Y, scaled(g.V, sigma), scaled(g.W, sigma), 1.0 / (sigma * sigma)),
        fs.potentials, second);
    t.columns.push_back(fmt::format("sigma_{:g}", sigma));
    double m = 0.0;
    for (std::size_t k = 0; k < t.rows.size(); ++k) {
      const double d = snapshot_distance(run.snapshots[k], ref.snapshots[k]);
      t.rows[k].push_back(d);
      m = std::max(m, d);
    }
    sup.push_back(m);
    r.checks.push_back({fmt::format("sigma {:g}: grid stays monotone", sigma),
                        run.monotonicity_violations == 0 &&
                            run.admissibility_violations == 0,
                        fmt::format("{} monotonicity, {} admissibility violations",
                                    run.monotonicity_violations,
                                    run.admissibility_violations)});
    r.runs.push_back({fmt::format("second_order_sigma_{:g}", sigma), std::nullopt,
                      std::move(run)});
  }
  r.runs.push_back({"first_order", std::nullopt, std::move(ref)});
  r.checks.push_back({"larger sigma gives a smaller sup W2 to the first-order run",
                      sup.back() < sup.front(),
                      fmt::format("sup W2 {:.6g} (sigma {:g}) vs {:.6g} (sigma {:g})",
                                  sup.front(), fs.sigmas.front(), sup.back(),
                                  fs.sigmas.back())});
  r.tables.push_back(std::move(t));
}

// Figure 8: Newtonian second-order system in original time against the
// first-order system, compared at matching rescaled times t / sigma.
void newtonian_orders(FigureResult& r, const FigureOptions& o, double horizon) {
  const FigureSetup& fs = r.setup;
  const GridData g = initial_grid(fs.N, fs.velocities.value_or(o.velocities), r.seed);
  LagrangianOptions first;
  first.scheme = LagrangianScheme::first_order;
  first.dt = o.dt;
  first.horizon = horizon;
  first.output_stride = o.output_stride;
  LagrangianRun ref = simulate_lagrangian(make_state(g.X, g.Y, g.V, g.W, 0.0),
                                          fs.potentials, first);

  Table t{"w2_second_vs_first", {"time"}, {}};
  for (const LagrangianSnapshot& s : ref.snapshots) t.rows.push_back({s.time});
  std::vector<std::vector<double>> curves;
  for (double sigma : fs.sigmas) {
    LagrangianOptions second;
    second.scheme = LagrangianScheme::newtonian;
    second.dt = o.dt * sigma;
    second.horizon = horizon * sigma;
    second.output_stride = o.output_stride;
    second.sigma = sigma;
    second.track_energy = false;
    LagrangianRun run = simulate_lagrangian(make_state(g.X, g.Y, g.V, g.W, 0.0),
                                            fs.potentials, second);
    if (run.snapshots.size() != ref.snapshots.size()) {
      fail(ErrorKind::numerical, "figure 8: output grids do not line up");
    }
    std::vector<double> curve;
    for (std::size_t k = 0; k < t.rows.size(); ++k) {
      curve.push_back(snapshot_distance(run.snapshots[k], ref.snapshots[k]));
      t.rows[k].push_back(curve.back());
    }
    t.columns.push_back(fmt::format("sigma_{:g}", sigma));
    curves.push_back(std::move(curve));
    r.runs.push_back({fmt::format("newtonian_sigma_{:g}", sigma), std::nullopt,
                      std::move(run)});
  }
  r.runs.push_back({"first_order", std::nullopt, std::move(ref)});

  std::size_t bad = 0;
  for (std::size_t j = 1; j < curves.size(); ++j) {
    for (std::size_t k = 0; k < curves[j].size(); ++k) {
      if (curves[j][k] > curves[j - 1][k] + 1e-14) ++bad;
    }
  }
  r.checks.push_back({"larger sigma gives a pointwise smaller W2 curve", bad == 0,
                      fmt::format("{} output times out of order", bad)});
  const auto& low = curves.front();
  const auto peak = static_cast<std::size_t>(
      std::max_element(low.begin(), low.end()) - low.begin());
  r.checks.push_back({"smallest sigma: W2 rises then decays",
                      peak > 0 && peak + 1 < low.size() && low.back() < low[peak],
                      fmt::format("peak {:.6g} at t = {:g}, final {:.6g}", low[peak],
                                  t.rows[peak][0], low.back())});
  r.tables.push_back(std::move(t));
}

}  // namespace

FigureSetup figure_setup(int id) {
  FigureSetup f;
  f.id = id;
  switch (id) {
    case 1:
      f.title = "attractive self and cross potentials";
      f.potentials = figure_one_potentials();
      f.N = 160;
      f.M = 150;
      f.sigmas = {1.0};
      f.horizon = 3.0;
      break;
    case 2:
      f.title = "attractive self, repulsive cross potentials";
      f.potentials.K_rho = PotentialSpec::gaussian_exp(-3.0, 1.0, 2.0);
      f.potentials.K_eta = PotentialSpec::gaussian_exp(-2.0, 2.0, 3.0);
      f.potentials.H_rho = PotentialSpec::power(-1.0, 2.0);
      f.potentials.H_eta = PotentialSpec::gaussian_exp(1.0, 1.0, 2.0);
      f.N = 180;
      f.M = 200;
      f.sigmas = {1.0};
      f.horizon = 3.0;
      break;
    case 3:
      f.title = "repulsive self, attractive cross potentials; two seeds";
      f.potentials.K_rho = PotentialSpec::gaussian_exp(2.0, 1.0, 2.0);
      f.potentials.K_eta = PotentialSpec::gaussian_exp(1.0, 1.0, 3.0);
      f.potentials.H_rho = PotentialSpec::power(1.0, 2.0);
      f.potentials.H_eta = PotentialSpec::gaussian_exp(-1.0, 3.0, 2.0);
      f.N = 170;
      f.M = 160;
      f.sigmas = {1.0};
      f.horizon = 3.0;
      break;
    case 4:
      f.title = "Newtonian self, attractive Gaussian cross, quadratic wells";
      f.potentials = figure_four_potentials();
      f.N = 200;
      f.M = 210;
      f.sigmas = {1.0};
      f.horizon = 3.0;
      break;
    case 5:
      f.title = "Newtonian self, repulsive cross, quadratic wells";
      f.potentials.K_rho = f.potentials.K_eta = PotentialSpec::newtonian(1.0);
      f.potentials.H_rho = f.potentials.H_eta = PotentialSpec::gaussian_exp(3.0, 1.0, 4.0);
      f.potentials.A_rho = PotentialSpec::quadratic_well(0.5, 0.5);
      f.potentials.A_eta = PotentialSpec::quadratic_well(5.0, 0.5);
      f.N = 180;
      f.M = 190;
      f.sigmas = {1.0};
      f.horizon = 3.0;
      break;
    case 6:
      f.title = "second- vs first-order system, figure 1 potentials";
      f.potentials = figure_one_potentials();
      f.N = 160;
      f.M = 150;
      f.sigmas = {10.0, 1000.0};
      f.horizon = 2.0;
      break;
    case 7:
      f.title = "second- vs first-order system, mixed potentials";
      f.potentials.K_rho = PotentialSpec::gaussian_exp(-1.0, 1.0, 2.0);
      f.potentials.K_eta = PotentialSpec::gaussian_exp(-1.0, 3.0, 3.0);
      f.potentials.H_rho = PotentialSpec::power(1.0, 2.0);
      f.potentials.H_eta = PotentialSpec::gaussian_exp(-1.0, 2.0, 4.0);
      f.N = 180;
      f.M = 190;
      f.sigmas = {5.0, 900.0};
      f.horizon = 2.0;
      break;
    case 8:
      f.title = "W2 between Newtonian second- and first-order systems";
      f.potentials = figure_four_potentials();
      f.N = 100;
      f.M = 100;
      f.sigmas = {2.0, 10.0, 50.0};
      f.horizon = 3.0;
      // Random initial velocities separate the two systems by about |v|/sigma
      // within the initial layer, which reverses the ordering at early times.
      f.velocities = VelocityRange{0.0, 0.0};
      break;
    default:
      fail(ErrorKind::config, fmt::format("unknown figure id {} (expected 1..8)", id));
  }
  return f;
}

bool FigureResult::passed() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const PropertyCheck& c) { return c.pass; });
}

FigureResult reproduce_figure(int id, std::uint64_t seed, const FigureOptions& o) {
  FigureResult r;
  r.setup = figure_setup(id);
  r.seed = seed;
  const double horizon = o.horizon > 0.0 ? o.horizon : r.setup.horizon;
  const FigureSetup& fs = r.setup;

  if (id <= 5) {
    EulerianRun run = run_particles(fs, seed, o, horizon);
    invariant_checks("particles", run, r.checks);
    r.tables.push_back(cluster_table("clusters", run));
    if (id == 1 || id == 4) {
      const auto& last = run.diagnostics.back();
      r.checks.push_back({"cluster counts nonincreasing", clusters_nonincreasing(run),
                          ""});
      const bool few = last.clusters_rho * 4 <= fs.N && last.clusters_eta * 4 <= fs.M;
      r.checks.push_back({"final cluster count small", few,
                          fmt::format("final clusters {} / {} from {} / {}",
                                      last.clusters_rho, last.clusters_eta, fs.N,
                                      fs.M)});
    }
    if (id == 3) {
      const std::uint64_t other_seed = seed + 1;
      EulerianRun other = run_particles(fs, other_seed, o, horizon);
      invariant_checks("second seed", other, r.checks);
      r.checks.push_back({"two seeds give different merge patterns",
                          cluster_history(run) != cluster_history(other),
                          fmt::format("seeds {} and {}", seed, other_seed)});
      r.tables.push_back(cluster_table("clusters_second_seed", other));
      r.runs.push_back({fmt::format("particles_seed_{}", seed), std::move(run),
                        std::nullopt});
      r.runs.push_back({fmt::format("particles_seed_{}", other_seed), std::move(other),
                        std::nullopt});
    } else {
      r.runs.push_back({"particles", std::move(run), std::nullopt});
    }
  } else if (id <= 7) {
    compare_orders(r, o, horizon);
  } else {
    newtonian_orders(r, o, horizon);
  }
  return r;
}

}  // namespace stickylab
