#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "stickylab/potentials.hpp"
#include "stickylab/transport.hpp"

namespace stickylab {

enum class Species { rho, eta };
std::string_view to_string(Species s) noexcept;

/// One species' particles: nondecreasing positions, velocities and positive
/// masses summing to one.
struct SpeciesState {
  std::vector<double> positions;
  std::vector<double> velocities;
  std::vector<double> masses;

  std::size_t size() const noexcept { return positions.size(); }
  double momentum() const;
  double kinetic_energy() const;
  double total_mass() const;
  AtomicMeasure measure() const;

  /// Throws Error(input) on size mismatch, non-positive mass, non-finite
  /// entries or |sum(masses) - 1| > 1e-12. Ordering is not checked here.
  void check() const;
  bool ordered() const;
};

struct TwoSpeciesState {
  SpeciesState rho;
  SpeciesState eta;
  double time = 0.0;
};

/// Inertia/damping pair of the momentum balance
///   inertia * dv/dt = -damping * v + force.
/// Original time uses (1, sigma); the rescaled system with eps = sigma^-2
/// uses (eps, 1).
struct TimeMode {
  double inertia = 1.0;
  double damping = 0.0;

  static TimeMode original(double sigma) { return {1.0, sigma}; }
  static TimeMode rescaled(double epsilon) { return {epsilon, 1.0}; }
};

struct Accelerations {
  std::vector<double> rho;
  std::vector<double> eta;
};

/// Particle accelerations:
///   a_i = (-damping v_i - sum_{k!=i} m_k K'(x_i - x_k)
///          - sum_k n_k H'(x_i - y_k) - A'(x_i)) / inertia
Accelerations rhs(const TwoSpeciesState& state, const PotentialSet& potentials,
                  const TimeMode& mode);

/// One Shu-Osher SSP-RK3 step of the coupled position/velocity system.
/// Throws Error(numerical) if the result is not finite.
TwoSpeciesState step_rk3(const TwoSpeciesState& state, double dt,
                         const PotentialSet& potentials, const TimeMode& mode);

inline constexpr std::string_view kRkTableau = "ssp-rk3-shu-osher";

enum class MergeRule { momentum, paper };
std::string_view to_string(MergeRule rule) noexcept;

struct MergeEvent {
  double time = 0.0;
  Species species = Species::rho;
  std::size_t left = 0;   // indices in the particle array just before the merge
  std::size_t right = 0;
  double momentum_pre = 0.0;
  double momentum_post = 0.0;
  double ke_lost = 0.0;
};

struct MergeResult {
  TwoSpeciesState state;
  std::vector<MergeEvent> events;
};

/// Replaces adjacent same-species pairs closer than toll (including crossed
/// pairs) by a single particle, left to right, until every gap is >= toll.
MergeResult detect_and_merge(const TwoSpeciesState& state, double toll,
                             MergeRule rule = MergeRule::momentum);

/// Total energy: kinetic + half double sums of the self kernels + cross term
/// with the common H + external potentials. Undefined (nullopt) when
/// H_rho != H_eta.
std::optional<double> total_energy(const TwoSpeciesState& state,
                                   const PotentialSet& potentials);

/// Initial layout: n particles of mass 1/n at the cell midpoints (i + 1/2)/n
/// of [0,1], velocities uniform on [lo, hi] from the given seed.
SpeciesState uniform_species(std::size_t n, double v_lo, double v_hi,
                             std::uint64_t seed);

/// Sorts positions (carrying velocities and masses along).
void sort_species(SpeciesState& s);

struct Snapshot {
  double time;
  SpeciesState rho;
  SpeciesState eta;
};

struct DiagnosticsRecord {
  double time = 0.0;
  std::optional<double> energy;
  double kinetic = 0.0;
  double norm_X = 0.0;
  double norm_Y = 0.0;
  double norm_V = 0.0;
  double norm_W = 0.0;
  double w2_reference = 0.0;  // product W2 to the reference pair
  std::size_t merge_events = 0;  // cumulative
  std::size_t clusters_rho = 0;
  std::size_t clusters_eta = 0;
};

struct EulerianOptions {
  double dt = 1e-3;
  double horizon = 1.0;
  std::size_t output_stride = 10;
  double toll = 0.002;
  MergeRule merge_rule = MergeRule::momentum;
  TimeMode mode = TimeMode::original(1.0);
};

struct EulerianRun {
  std::vector<Snapshot> snapshots;
  std::vector<MergeEvent> events;
  std::vector<DiagnosticsRecord> diagnostics;
  std::size_t ordering_violations = 0;  // after merge passes; must stay 0
  std::size_t crossings_resolved = 0;   // pairs found crossed before merging
  double max_mass_error = 0.0;
};

/// Fixed-step loop: step_rk3 then detect_and_merge; snapshot and diagnostics
/// every output_stride steps (and at the horizon). Diagnostics measure W2
/// against the initial configuration.
EulerianRun simulate(TwoSpeciesState initial, const PotentialSet& potentials,
                     const EulerianOptions& options);

}  // namespace stickylab
