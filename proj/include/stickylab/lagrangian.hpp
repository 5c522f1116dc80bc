#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "stickylab/eulerian.hpp"
#include "stickylab/potentials.hpp"
#include "stickylab/transport.hpp"

namespace stickylab {

/// Lagrangian description on the uniform n-cell grid of (0,1): X, Y are the
/// pseudo-inverses of the two species, V, W their velocities, and P, Q the
/// auxiliary variables P = eps V + X - int F (same for Q).
struct LagrangianState {
  GridFunction X, Y, V, W, P, Q;
  double time = 0.0;
  double epsilon = 0.0;

  std::size_t cells() const noexcept { return X.size(); }

  /// Throws Error(input) on size mismatch, empty grid or non-finite entries.
  void check() const;
  bool monotone() const;
};

/// Builds a state with P = eps V + X, Q = eps W + Y.
LagrangianState make_state(GridFunction X, GridFunction Y, GridFunction V,
                           GridFunction W, double epsilon);

/// Samples a particle species on the n-cell grid: the pseudo-inverse and the
/// velocity of the particle owning each cell midpoint.
std::pair<GridFunction, GridFunction> sample_on_grid(const SpeciesState& s,
                                                     std::size_t n);

/// Cell midpoints (i + 1/2)/n.
std::vector<double> midpoints(std::size_t n);

struct ForceSample {
  GridFunction F;
  GridFunction G;
};

/// Nonlocal forces by midpoint quadrature (the k = i term is included and
/// vanishes since the kernel derivatives are odd):
///   F_i = -(1/n) sum_k K_rho'(X_i - X_k) - (1/n) sum_k H_rho'(X_i - Y_k)
///         - A_rho'(X_i)
ForceSample force_FG(std::span<const double> X, std::span<const double> Y,
                     const PotentialSet& potentials);

/// Forces of the Newtonian system, entering with a minus sign:
///   F1_i = a (2 m_i - 1) + (1/n) sum_k H'(X_i - Y_k) + A_rho'(X_i)
/// where a is the amplitude of the Newtonian self kernel. Requires Newtonian
/// self kernels and H_rho == H_eta (Error(config) otherwise).
ForceSample force_newtonian(std::span<const double> X, std::span<const double> Y,
                            const PotentialSet& potentials);

/// (1/n) sum_i (2 m_i - 1) X_i; equals half the mean pairwise distance on
/// nondecreasing X. Throws Error(precondition) if X is not nondecreasing.
double self_energy_linear(std::span<const double> X);

/// Semi-implicit step of the eps-rescaled inclusion: P += dt F, then
/// X = P_K((P + (eps/dt) X) / (1 + eps/dt)), V = block average of the
/// difference quotient on the clusters of the new X. Requires eps > 0.
LagrangianState step_second_order(const LagrangianState& state, double dt,
                                  const PotentialSet& potentials);

/// Projected explicit Euler for the first-order system: X = P_K(X + dt F).
LagrangianState step_first_order(const LagrangianState& state, double dt,
                                 const PotentialSet& potentials);

/// Projected Euler for the Newtonian system with the damping integrated
/// exactly:
///   V <- e^{-sigma dt} V - (1 - e^{-sigma dt})/sigma P_H(F1)
///   X <- P_K(X + dt V),  V <- P_H(V) on the clusters of the new X.
LagrangianState step_newtonian(const LagrangianState& state, double dt,
                               double sigma, const PotentialSet& potentials);

/// Discrete energy
///   1/2 |V|^2 + 1/2 |W|^2 + S(X) + S(Y) + (1/n^2) sum H(Y_j - X_k)
///   + (1/n) sum A_rho(X_i) + (1/n) sum A_eta(Y_j)
/// with S = a * self_energy_linear for Newtonian self kernels and
/// (1/(2 n^2)) sum K(X_i - X_k) otherwise. Requires H_rho == H_eta.
double energy_functional(const LagrangianState& state,
                         const PotentialSet& potentials);

struct PicardOptions {
  double horizon = 1.0;
  double dt = 1e-3;
  std::size_t max_iters = 200;
  double tol = 1e-8;
};

struct PicardResult {
  std::vector<double> times;     // every step, starting at the initial time
  std::vector<GridFunction> X;
  std::vector<GridFunction> Y;
  LagrangianState final_state;
  std::size_t iterations = 0;    // largest count over the windows
  std::size_t windows = 0;
  double last_ratio = 0.0;       // last successive-distance ratio observed
};

/// Fixed-point iteration over whole trajectories. Each sweep freezes the
/// forces of the previous iterate, integrates P, Q and resolves X, Y per
/// step with the resolvent of step_second_order. The horizon is cut into
/// windows short enough for the sweep to contract. Throws Error(iteration)
/// if a window does not converge within max_iters.
PicardResult picard_solve(const LagrangianState& initial,
                          const PotentialSet& potentials,
                          const PicardOptions& options);

enum class LagrangianScheme { second_order, first_order, newtonian };
std::string_view to_string(LagrangianScheme scheme) noexcept;

inline constexpr std::string_view kResolventScheme =
    "semi-implicit-cone-resolvent";

struct LagrangianOptions {
  LagrangianScheme scheme = LagrangianScheme::second_order;
  double dt = 1e-3;
  double horizon = 1.0;
  std::size_t output_stride = 10;
  double sigma = 1.0;  // newtonian scheme only
  bool track_energy = true;  // newtonian scheme with symmetric H
};

struct LagrangianSnapshot {
  double time;
  GridFunction X, Y, V, W;
};

struct LagrangianDiagnostics {
  double time = 0.0;
  std::optional<double> energy;  // newtonian scheme with symmetric H
  double norm_X = 0.0, norm_Y = 0.0, norm_V = 0.0, norm_W = 0.0;
  std::size_t clusters_X = 0, clusters_Y = 0;
  double w2_reference = 0.0;
};

struct LagrangianRun {
  std::vector<LagrangianSnapshot> snapshots;
  std::vector<LagrangianDiagnostics> diagnostics;
  std::size_t monotonicity_violations = 0;
  std::size_t admissibility_violations = 0;  // V not constant on clusters
  double max_energy_increase = 0.0;          // over single steps; newtonian only
  std::size_t energy_steps = 0;
};

LagrangianRun simulate_lagrangian(LagrangianState initial,
                                  const PotentialSet& potentials,
                                  const LagrangianOptions& options);

}  // namespace stickylab
