#include "stickylab/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "stickylab/config.hpp"
#include "stickylab/error.hpp"
#include "stickylab/experiments.hpp"
#include "stickylab/io.hpp"
#include "stickylab/lagrangian.hpp"

namespace stickylab {

namespace {

namespace fs = std::filesystem;

constexpr std::uint64_t kDefaultFigureSeed = 20240607;

struct Context {
  std::ostream& out;
  std::ostream& err;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
};

double elapsed(const Context& ctx) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - ctx.start)
      .count();
}

fs::path output_dir(const std::string& flag, std::string_view command) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv(kOutputDirEnv); env && *env) {
    return fs::path(env) / std::string(command);
  }
  return fs::path("stickylab-out") / std::string(command);
}

SpeciesState explicit_species(const ExplicitSpecies& e) {
  SpeciesState s;
  const std::size_t n = e.positions.size();
  s.positions = e.positions;
  s.velocities = e.velocities.empty() ? std::vector<double>(n, 0.0) : e.velocities;
  s.masses = e.masses.empty() ? std::vector<double>(n, 1.0 / static_cast<double>(n))
                              : e.masses;
  sort_species(s);
  return s;
}

TwoSpeciesState particles_from(const SimConfig& c, std::uint64_t seed) {
  switch (c.initial_layout) {
    case InitialLayout::explicit_list:
      return {explicit_species(c.initial_rho), explicit_species(c.initial_eta), 0.0};
    case InitialLayout::uniform_grid:
      return initial_particles(*c.N, *c.M, c.velocity_range, seed);
    case InitialLayout::random_positions: {
      TwoSpeciesState s = initial_particles(*c.N, *c.M, c.velocity_range, seed);
      const GridData gx = random_grid(*c.N, c.position_range.lo, c.position_range.hi,
                                      c.velocity_range, seed);
      const GridData gy = random_grid(*c.M, c.position_range.lo, c.position_range.hi,
                                      c.velocity_range, seed);
      s.rho.positions = gx.X;
      s.eta.positions = gy.Y;
      return s;
    }
  }
  fail(ErrorKind::config, "unknown initial layout");
}

GridData grid_from(const SimConfig& c, std::uint64_t seed) {
  const std::size_t n = c.cells();
  switch (c.initial_layout) {
    case InitialLayout::uniform_grid:
      return initial_grid(n, c.velocity_range, seed);
    case InitialLayout::random_positions:
      return random_grid(n, c.position_range.lo, c.position_range.hi, c.velocity_range,
                         seed);
    case InitialLayout::explicit_list: {
      GridData g;
      std::tie(g.X, g.V) = sample_on_grid(explicit_species(c.initial_rho), n);
      std::tie(g.Y, g.W) = sample_on_grid(explicit_species(c.initial_eta), n);
      return g;
    }
  }
  fail(ErrorKind::config, "unknown initial layout");
}

GridFunction scaled(GridFunction v, double f) {
  for (double& x : v) x *= f;
  return v;
}

RunMetadata metadata_for(const std::string& command, const SimConfig* c,
                         std::optional<std::uint64_t> seed) {
  RunMetadata m;
  m.command = command;
  m.seed = seed;
  if (c) {
    m.config_hash = hash_hex(config_hash(*c));
    m.effective_config = to_json(*c);
  }
  return m;
}

void finish_bundle(const Bundle& b, RunMetadata m, const Context& ctx,
                   const std::vector<PropertyCheck>& checks,
                   const nlohmann::json& extra = {}) {
  nlohmann::json summary = summary_json(checks);
  if (!extra.is_null()) summary["results"] = extra;
  b.write_json("summary.json", summary);
  m.wall_time_seconds = elapsed(ctx);
  b.write_json("metadata.json", to_json(m));
}

SimConfig config_with_seed(const std::string& path, std::optional<std::uint64_t> seed) {
  SimConfig c = load_config(path);
  if (seed) c.seed = seed;
  if (!c.seed && c.uses_randomness()) effective_seed(c);
  return c;
}

void write_checks(std::ostream& out, const std::vector<PropertyCheck>& checks) {
  for (const PropertyCheck& c : checks) {
    out << (c.pass ? "PASS " : "FAIL ") << c.name;
    if (!c.detail.empty()) out << " (" << c.detail << ')';
    out << '\n';
  }
}

bool all_pass(const std::vector<PropertyCheck>& checks) {
  return std::all_of(checks.begin(), checks.end(),
                     [](const PropertyCheck& c) { return c.pass; });
}

// ---------------------------------------------------------------------------

int cmd_simulate(Context& ctx, const std::string& config_path, const std::string& out_flag,
                 std::optional<std::uint64_t> seed_flag) {
  const SimConfig c = config_with_seed(config_path, seed_flag);
  const std::uint64_t seed = effective_seed(c);
  const Bundle b(output_dir(out_flag, "simulate"));
  b.write_text("config.ini", serialize(c));
  std::vector<PropertyCheck> checks;
  nlohmann::json results;

  if (c.solver == Solver::eulerian) {
    EulerianOptions o;
    o.dt = c.dt;
    o.horizon = c.T;
    o.output_stride = c.output_stride;
    o.toll = c.toll;
    o.merge_rule = c.merge_rule;
    o.mode = TimeMode::original(c.sigma_value());
    const EulerianRun run = simulate(particles_from(c, seed), c.potentials, o);
    {
      std::ofstream f = b.open("snapshots.csv");
      write_snapshots_csv(f, run);
    }
    {
      std::ofstream f = b.open("events.csv");
      write_events_csv(f, run.events);
    }
    {
      std::ofstream f = b.open("diagnostics.csv");
      write_diagnostics_csv(f, run);
    }
    checks.push_back({"ordering preserved", run.ordering_violations == 0,
                      fmt::format("{} violations", run.ordering_violations)});
    checks.push_back({"mass conserved", run.max_mass_error <= 1e-12,
                      fmt::format("max error {:.3e}", run.max_mass_error)});
    if (c.merge_rule == MergeRule::momentum) {
      double worst = 0.0;
      for (const MergeEvent& e : run.events) {
        worst = std::max(worst, std::abs(e.momentum_post - e.momentum_pre));
      }
      checks.push_back({"momentum conserved at merges", worst <= 1e-12,
                        fmt::format("worst defect {:.3e}", worst)});
    }
    results["merge_events"] = run.events.size();
    results["final_clusters"] = {run.diagnostics.back().clusters_rho,
                                 run.diagnostics.back().clusters_eta};
  } else if (c.solver == Solver::picard) {
    const GridData g = grid_from(c, seed);
    const double sigma = c.sigma_value();
    PicardOptions o;
    o.horizon = c.T;
    o.dt = c.dt;
    const PicardResult r = picard_solve(
        make_state(g.X, g.Y, scaled(g.V, sigma), scaled(g.W, sigma), c.epsilon_value()),
        c.potentials, o);
    {
      std::ofstream f = b.open("trajectory.csv");
      write_trajectory_csv(f, r, c.output_stride);
    }
    results["iterations"] = r.iterations;
    results["windows"] = r.windows;
    results["last_ratio"] = r.last_ratio;
  } else {
    const GridData g = grid_from(c, seed);
    LagrangianOptions o;
    o.dt = c.dt;
    o.horizon = c.T;
    o.output_stride = c.output_stride;
    LagrangianState init;
    if (c.solver == Solver::lagrangian_second) {
      const double sigma = c.sigma_value();
      o.scheme = LagrangianScheme::second_order;
      init = make_state(g.X, g.Y, scaled(g.V, sigma), scaled(g.W, sigma),
                        c.epsilon_value());
    } else if (c.solver == Solver::lagrangian_first) {
      o.scheme = LagrangianScheme::first_order;
      init = make_state(g.X, g.Y, g.V, g.W, 0.0);
    } else {
      o.scheme = LagrangianScheme::newtonian;
      o.sigma = c.sigma_value();
      init = make_state(g.X, g.Y, g.V, g.W, 0.0);
    }
    const LagrangianRun run = simulate_lagrangian(std::move(init), c.potentials, o);
    {
      std::ofstream f = b.open("snapshots.csv");
      write_snapshots_csv(f, run);
    }
    {
      std::ofstream f = b.open("diagnostics.csv");
      write_diagnostics_csv(f, run);
    }
    checks.push_back({"monotone after every step", run.monotonicity_violations == 0,
                      fmt::format("{} violations", run.monotonicity_violations)});
    checks.push_back({"velocities constant on clusters",
                      run.admissibility_violations == 0,
                      fmt::format("{} violations", run.admissibility_violations)});
    if (run.energy_steps > 0) {
      checks.push_back({"energy nonincreasing per step (1e-8)",
                        run.max_energy_increase <= 1e-8,
                        fmt::format("max increase {:.3e}", run.max_energy_increase)});
    }
    results["final_clusters"] = {run.diagnostics.back().clusters_X,
                                 run.diagnostics.back().clusters_Y};
  }
  finish_bundle(b, metadata_for("simulate", &c, c.seed), ctx, checks, results);
  write_checks(ctx.out, checks);
  ctx.out << "bundle: " << b.dir().string() << '\n';
  return kExitOk;
}

int cmd_sweep(Context& ctx, const std::string& config_path, const std::string& out_flag,
              std::optional<std::uint64_t> seed_flag, const std::vector<double>& sigmas,
              bool check) {
  const SimConfig c = config_with_seed(config_path, seed_flag);
  const std::uint64_t seed = effective_seed(c);
  SweepSetup setup;
  setup.potentials = c.potentials;
  setup.initial = grid_from(c, seed);
  setup.dt = c.dt;
  setup.horizon = c.T;
  setup.output_stride = c.output_stride;
  const SweepResult r = damping_sweep(setup, sigmas);

  const Bundle b(output_dir(out_flag, "sweep"));
  b.write_text("config.ini", serialize(c));
  Table rows{"sweep", {"sigma", "epsilon", "D", "terminal_w2"}, {}};
  for (const SweepRow& row : r.rows) {
    rows.rows.push_back({row.sigma, row.epsilon, row.D, row.terminal_w2});
  }
  {
    std::ofstream f = b.open("sweep.csv");
    write_table_csv(f, rows);
  }
  Table curves{"w2_curves", {"time"}, {}};
  for (const SweepRow& row : r.rows) curves.columns.push_back(fmt::format("sigma_{:g}", row.sigma));
  for (std::size_t k = 0; k < r.times.size(); ++k) {
    std::vector<double> line{r.times[k]};
    for (const auto& curve : r.w2_curves) line.push_back(curve[k]);
    curves.rows.push_back(std::move(line));
  }
  {
    std::ofstream f = b.open("w2_curves.csv");
    write_table_csv(f, curves);
  }

  std::vector<PropertyCheck> checks{
      {"D strictly decreasing in sigma", r.strictly_decreasing, ""}};
  nlohmann::json results;
  results["slope"] = r.slope;
  results["D"] = nlohmann::json::array();
  for (const SweepRow& row : r.rows) results["D"].push_back(row.D);
  if (r.rows.size() >= 2 && r.rows.front().D > 0.0) {
    results["reduction"] = r.rows.back().D / r.rows.front().D;
  }
  RunMetadata m = metadata_for("sweep", &c, c.seed);
  finish_bundle(b, m, ctx, checks, results);

  for (const SweepRow& row : r.rows) {
    ctx.out << fmt::format("sigma {:>10g}  eps {:.6e}  D {:.6e}  terminal W2 {:.6e}\n",
                           row.sigma, row.epsilon, row.D, row.terminal_w2);
  }
  ctx.out << fmt::format("log-log slope of D vs eps: {:.4f}\n", r.slope);
  write_checks(ctx.out, checks);
  return check && !all_pass(checks) ? kExitCheckFailed : kExitOk;
}

int cmd_decay(Context& ctx, const std::string& config_path, const std::string& out_flag,
              std::optional<std::uint64_t> seed_flag, bool check) {
  const SimConfig c = config_with_seed(config_path, seed_flag);
  const std::uint64_t seed = effective_seed(c);
  DecaySetup setup;
  setup.potentials = c.potentials;
  setup.initial = grid_from(c, seed);
  setup.sigma = c.sigma_value();
  setup.dt = c.dt;
  setup.horizon = c.T;
  setup.output_stride = c.output_stride;
  const DecaySeries d = newtonian_decay(setup);

  const Bundle b(output_dir(out_flag, "decay"));
  b.write_text("config.ini", serialize(c));
  Table t{"decay",
          {"time", "norm_X", "norm_Y", "norm_V", "norm_W", "energy", "w2_target",
           "kinetic_integral"},
          {}};
  for (std::size_t k = 0; k < d.times.size(); ++k) {
    t.rows.push_back({d.times[k], d.norm_X[k], d.norm_Y[k], d.norm_V[k], d.norm_W[k],
                      d.energy[k], d.w2_target[k], d.kinetic_integral[k]});
  }
  {
    std::ofstream f = b.open("decay.csv");
    write_table_csv(f, t);
  }

  std::vector<PropertyCheck> checks{
      {"terminal norms <= 1e-2 of initial", d.terminal_total <= 1e-2 * d.initial_total,
       fmt::format("{:.3e} from {:.3e}", d.terminal_total, d.initial_total)},
      {"W2 to the well centres <= 1e-2", d.w2_target.back() <= 1e-2,
       fmt::format("{:.3e}", d.w2_target.back())},
      {"energy nonincreasing per step (1e-8)", d.max_energy_increase <= 1e-8,
       fmt::format("max increase {:.3e}", d.max_energy_increase)},
      {"kinetic integral plateaus (1e-4)", d.kinetic_plateau <= 1e-4,
       fmt::format("relative growth {:.3e}", d.kinetic_plateau)}};
  finish_bundle(b, metadata_for("decay", &c, c.seed), ctx, checks);
  write_checks(ctx.out, checks);
  return check && !all_pass(checks) ? kExitCheckFailed : kExitOk;
}

int cmd_compare(Context& ctx, const std::string& config_path, const std::string& out_flag,
                std::optional<std::uint64_t> seed_flag, std::optional<double> tolerance,
                bool check) {
  const SimConfig c = config_with_seed(config_path, seed_flag);
  const std::uint64_t seed = effective_seed(c);
  if (c.solver != Solver::eulerian && c.initial_layout != InitialLayout::explicit_list &&
      !(c.N && c.M)) {
    fail(ErrorKind::config, "compare needs N and M (or explicit particle lists)");
  }
  CrossSetup setup;
  setup.potentials = c.potentials;
  setup.initial = particles_from(c, seed);
  setup.sigma = c.sigma_value();
  setup.dt = c.dt;
  setup.horizon = c.T;
  setup.output_stride = c.output_stride;
  setup.toll = c.toll;
  const CrossValidation r = cross_validate(setup);

  const Bundle b(output_dir(out_flag, "compare"));
  b.write_text("config.ini", serialize(c));
  Table t{"compare", {"time", "w2_deviation"}, {}};
  for (std::size_t k = 0; k < r.times.size(); ++k) t.rows.push_back({r.times[k], r.deviation[k]});
  {
    std::ofstream f = b.open("compare.csv");
    write_table_csv(f, t);
  }
  const double tol = tolerance.value_or(5.0 * c.dt);
  std::vector<PropertyCheck> checks{
      {"sup W2 deviation within tolerance", r.max_deviation <= tol,
       fmt::format("{:.3e} vs {:.3e}; {} merges", r.max_deviation, tol, r.merge_events)}};
  finish_bundle(b, metadata_for("compare", &c, c.seed), ctx, checks);
  ctx.out << "max deviation: " << format_number(r.max_deviation) << '\n';
  write_checks(ctx.out, checks);
  return check && !all_pass(checks) ? kExitCheckFailed : kExitOk;
}

int cmd_reproduce(Context& ctx, int id, const std::string& out_flag,
                  std::optional<std::uint64_t> seed_flag, bool check) {
  const std::uint64_t seed = seed_flag.value_or(kDefaultFigureSeed);
  const FigureResult r = reproduce_figure(id, seed);
  const Bundle b(output_dir(out_flag, fmt::format("reproduce/figure{}", id)));

  for (const FigureRun& run : r.runs) {
    if (run.eulerian) {
      {
        std::ofstream f = b.open(run.label + "_snapshots.csv");
        write_snapshots_csv(f, *run.eulerian);
      }
      {
        std::ofstream f = b.open(run.label + "_events.csv");
        write_events_csv(f, run.eulerian->events);
      }
      {
        std::ofstream f = b.open(run.label + "_diagnostics.csv");
        write_diagnostics_csv(f, *run.eulerian);
      }
    }
    if (run.lagrangian) {
      {
        std::ofstream f = b.open(run.label + "_snapshots.csv");
        write_snapshots_csv(f, *run.lagrangian);
      }
      {
        std::ofstream f = b.open(run.label + "_diagnostics.csv");
        write_diagnostics_csv(f, *run.lagrangian);
      }
    }
  }
  for (const Table& t : r.tables) {
    std::ofstream f = b.open(t.name + ".csv");
    write_table_csv(f, t);
  }

  nlohmann::json setup;
  setup["figure"] = id;
  setup["title"] = r.setup.title;
  setup["N"] = r.setup.N;
  setup["M"] = r.setup.M;
  setup["sigmas"] = r.setup.sigmas;
  setup["horizon"] = r.setup.horizon;
  for (const auto& [name, spec] :
       {std::pair{"K_rho", &r.setup.potentials.K_rho}, std::pair{"K_eta", &r.setup.potentials.K_eta},
        std::pair{"H_rho", &r.setup.potentials.H_rho}, std::pair{"H_eta", &r.setup.potentials.H_eta},
        std::pair{"A_rho", &r.setup.potentials.A_rho}, std::pair{"A_eta", &r.setup.potentials.A_eta}}) {
    setup["potentials"][name] = to_json(*spec);
  }
  b.write_json("figure.json", setup);
  RunMetadata m = metadata_for("reproduce", nullptr, seed);
  m.effective_config = setup;
  finish_bundle(b, m, ctx, r.checks);
  ctx.out << fmt::format("figure {}: {}\n", id, r.setup.title);
  write_checks(ctx.out, r.checks);
  ctx.out << "bundle: " << b.dir().string() << '\n';
  return check && !r.passed() ? kExitCheckFailed : kExitOk;
}

int cmd_validate(Context& ctx, const std::string& config_path, double radius, int samples) {
  const SimConfig c = load_config(config_path);
  nlohmann::json report;
  for (const auto& [name, spec] :
       {std::pair{"K_rho", &c.potentials.K_rho}, std::pair{"K_eta", &c.potentials.K_eta},
        std::pair{"H_rho", &c.potentials.H_rho}, std::pair{"H_eta", &c.potentials.H_eta},
        std::pair{"A_rho", &c.potentials.A_rho}, std::pair{"A_eta", &c.potentials.A_eta}}) {
    if (spec->is_zero()) continue;
    const AdmissibilityReport rep = validate(*spec, radius, samples);
    nlohmann::json j = to_json(*spec);
    j["A"] = rep.satisfies_A;
    j["SQ"] = rep.satisfies_SQ;
    j["SL"] = rep.satisfies_SL;
    j["AT"] = rep.satisfies_AT;
    j["H1"] = rep.satisfies_H1;
    j["H2"] = rep.satisfies_H2;
    j["vanishes_at_center"] = rep.vanishes_at_center;
    j["nonnegative"] = rep.nonnegative;
    j["witness"] = rep.witness ? nlohmann::json(*rep.witness) : nlohmann::json(nullptr);
    j["C_SQ"] = rep.C_SQ;
    j["C_SL"] = rep.C_SL;
    j["lambda"] = rep.lambda;
    j["alpha"] = rep.alpha;
    j["derivative_lipschitz"] = rep.derivative_lipschitz;
    report[name] = j;
  }
  ctx.out << report.dump(2) << '\n';
  return kExitOk;
}

int cmd_distance(Context& ctx, const std::string& a, const std::string& b) {
  ctx.out << format_shortest(w2(read_measure_csv(a), read_measure_csv(b))) << '\n';
  return kExitOk;
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::numerical:
    case ErrorKind::iteration:
      return kExitNumerical;
    default:
      return kExitConfig;
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Two-species sticky particle dynamics: simulation and studies"};
  app.name(args.empty() ? "stickylab" : args.front());
  app.require_subcommand(1);

  std::string config, out_dir, file_a, file_b;
  std::optional<std::uint64_t> seed;
  std::optional<double> tolerance;
  std::vector<double> sigmas{5.0, 10.0, 100.0, 1000.0};
  bool check = false;
  int figure = 0;
  double radius = 4.0;
  int samples = 801;

  auto common = [&](CLI::App* sub, bool needs_config) {
    if (needs_config) sub->add_option("--config", config, "config file")->required();
    sub->add_option("--out", out_dir, "output bundle directory");
    sub->add_option("--seed", seed, "RNG seed (overrides the config)");
  };
  CLI::App* simulate_cmd = app.add_subcommand("simulate", "run the configured solver");
  common(simulate_cmd, true);
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "damping sweep against the first-order system");
  common(sweep_cmd, true);
  sweep_cmd->add_option("--sigmas", sigmas, "comma-separated damping values")
      ->delimiter(',');
  sweep_cmd->add_flag("--check", check, "exit 3 unless D decreases strictly");
  CLI::App* decay_cmd = app.add_subcommand("decay", "Newtonian decay to the well centres");
  common(decay_cmd, true);
  decay_cmd->add_flag("--check", check, "exit 3 if a decay criterion fails");
  CLI::App* compare_cmd = app.add_subcommand("compare", "particle vs Lagrangian solver");
  common(compare_cmd, true);
  compare_cmd->add_option("--tolerance", tolerance, "W2 tolerance (default 5 dt)");
  compare_cmd->add_flag("--check", check, "exit 3 if the deviation exceeds the tolerance");
  CLI::App* reproduce_cmd = app.add_subcommand("reproduce", "regenerate a figure bundle");
  common(reproduce_cmd, false);
  reproduce_cmd->add_option("--figure", figure, "figure id 1..8")->required();
  reproduce_cmd->add_flag("--check", check, "exit 3 if a logged property fails");
  CLI::App* validate_cmd =
      app.add_subcommand("validate-potentials", "admissibility report per potential");
  validate_cmd->add_option("--config", config, "config file")->required();
  validate_cmd->add_option("--radius", radius, "sampling radius");
  validate_cmd->add_option("--samples", samples, "sample count");
  CLI::App* distance_cmd = app.add_subcommand("distance", "W2 between two measure CSVs");
  distance_cmd->add_option("--a", file_a, "first measure")->required();
  distance_cmd->add_option("--b", file_b, "second measure")->required();

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    if (!rev.empty()) rev.pop_back();
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  Context ctx{out, err};
  try {
    if (simulate_cmd->parsed()) return cmd_simulate(ctx, config, out_dir, seed);
    if (sweep_cmd->parsed()) return cmd_sweep(ctx, config, out_dir, seed, sigmas, check);
    if (decay_cmd->parsed()) return cmd_decay(ctx, config, out_dir, seed, check);
    if (compare_cmd->parsed()) {
      return cmd_compare(ctx, config, out_dir, seed, tolerance, check);
    }
    if (reproduce_cmd->parsed()) return cmd_reproduce(ctx, figure, out_dir, seed, check);
    if (validate_cmd->parsed()) return cmd_validate(ctx, config, radius, samples);
    if (distance_cmd->parsed()) return cmd_distance(ctx, file_a, file_b);
  } catch (const Error& e) {
    const int code = exit_code(e.kind());
    err << fmt::format("error: code={} kind={}: {}\n", code, to_string(e.kind()), e.what());
    return code;
  } catch (const std::exception& e) {
    err << fmt::format("error: code={} kind=internal: {}\n", int{kExitNumerical}, e.what());
    return kExitNumerical;
  }
  return kExitConfig;
}

int run_cli(int argc, char** argv) {
  return run_cli(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}

}  // namespace stickylab
