#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stickylab/eulerian.hpp"
#include "stickylab/lagrangian.hpp"
#include "stickylab/potentials.hpp"

namespace stickylab {

struct VelocityRange {
  double lo = -1.0;
  double hi = 1.0;
};

/// N and M particles at the cell midpoints of [0,1] with equal masses;
/// velocities drawn from the rho and eta substreams of seed.
TwoSpeciesState initial_particles(std::size_t N, std::size_t M,
                                  VelocityRange range, std::uint64_t seed);

/// Grid data shared by both species: X = Y = cell midpoints, V and W drawn
/// from the rho and eta substreams. Velocities are in original time.
struct GridData {
  GridFunction X, Y, V, W;
};
GridData initial_grid(std::size_t n, VelocityRange range, std::uint64_t seed);

/// Sorted uniform positions on [lo, hi] (grid_x / grid_y substreams) with
/// velocities from the rho / eta substreams.
GridData random_grid(std::size_t n, double lo, double hi, VelocityRange range,
                     std::uint64_t seed);

// ---------------------------------------------------------------------------
// Damping sweep

struct SweepSetup {
  PotentialSet potentials;
  GridData initial;  // velocities in original time
  double dt = 1e-3;        // rescaled time step
  double horizon = 2.0;    // rescaled horizon
  std::size_t output_stride = 10;
};

struct SweepRow {
  double sigma = 0.0;   // +inf for the first-order row
  double epsilon = 0.0;
  double D = 0.0;       // trapezoid of the squared product W2 over output times
  double terminal_w2 = 0.0;
  double runtime_seconds = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;  // in the order of the requested sigmas
  std::vector<double> times;
  std::vector<std::vector<double>> w2_curves;  // per row, at `times`
  double slope = 0.0;          // least squares of log D against log eps
  bool strictly_decreasing = false;  // D over increasing sigma
};

/// For each sigma runs the eps = sigma^-2 second-order solver with
/// rescaled velocities sigma * v and compares with the first-order solver
/// from the same positions. sigma = +inf gives the first-order row (D = 0).
SweepResult damping_sweep(const SweepSetup& setup, std::span<const double> sigmas);

/// Least-squares slope of log y against log x over the entries with x, y > 0.
double loglog_slope(std::span<const double> x, std::span<const double> y);

// ---------------------------------------------------------------------------
// Newtonian decay

struct DecaySeries {
  std::vector<double> times;
  std::vector<double> norm_X, norm_Y, norm_V, norm_W;  // X, Y about the centres
  std::vector<double> energy;
  std::vector<double> w2_target;         // to (delta_c_rho, delta_c_eta)
  std::vector<double> kinetic_integral;  // running int (|V|^2 + |W|^2) dt
  double center_rho = 0.0;
  double center_eta = 0.0;
  double max_energy_increase = 0.0;  // over single steps
  double initial_total = 0.0;        // |X| + |Y| + |V| + |W| at t = 0
  double terminal_total = 0.0;
  double kinetic_plateau = 0.0;  // relative growth over the last tenth
};

struct DecaySetup {
  PotentialSet potentials;
  GridData initial;
  double sigma = 1.0;
  double dt = 1e-3;
  double horizon = 20.0;
  std::size_t output_stride = 10;
};

/// Runs step_newtonian to the horizon. Requires Newtonian self kernels, a
/// symmetric cross potential satisfying (AT) and wells satisfying (H1),
/// (H2) about their centres; Error(config) otherwise.
DecaySeries newtonian_decay(const DecaySetup& setup);

// ---------------------------------------------------------------------------
// Eulerian / Lagrangian cross-validation

struct CrossValidation {
  std::vector<double> times;      // original time
  std::vector<double> deviation;  // product W2 between the two descriptions
  double max_deviation = 0.0;
  std::size_t merge_events = 0;   // Eulerian merges during the run
};

struct CrossSetup {
  PotentialSet potentials;
  TwoSpeciesState initial;  // equal masses, N == M
  double sigma = 1.0;
  double dt = 1e-3;
  double horizon = 1.0;
  std::size_t output_stride = 10;
  double toll = 0.002;
};

/// Runs the particle scheme in original time and the second-order
/// Lagrangian scheme in the rescaled time t / sigma on n = N cells.
CrossValidation cross_validate(const CrossSetup& setup);

// ---------------------------------------------------------------------------
// Figures

struct PropertyCheck {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// Plot-ready table.
struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct FigureRun {
  std::string label;
  std::optional<EulerianRun> eulerian;
  std::optional<LagrangianRun> lagrangian;
};

struct FigureSetup {
  int id = 0;
  std::string title;
  PotentialSet potentials;
  std::size_t N = 0;
  std::size_t M = 0;
  std::vector<double> sigmas;
  double horizon = 0.0;
  std::optional<VelocityRange> velocities;  // overrides FigureOptions
};

FigureSetup figure_setup(int id);

struct FigureOptions {
  double dt = 1e-3;
  double horizon = 0.0;  // 0 selects the figure default
  std::size_t output_stride = 10;
  double toll = 0.002;
  MergeRule merge_rule = MergeRule::momentum;
  VelocityRange velocities;
};

struct FigureResult {
  FigureSetup setup;
  std::uint64_t seed = 0;
  std::vector<FigureRun> runs;
  std::vector<Table> tables;
  std::vector<PropertyCheck> checks;

  bool passed() const;
};

/// Throws Error(config) for ids outside 1..8.
FigureResult reproduce_figure(int id, std::uint64_t seed,
                              const FigureOptions& options = {});

}  // namespace stickylab
