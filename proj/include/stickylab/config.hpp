#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "stickylab/eulerian.hpp"
#include "stickylab/experiments.hpp"
#include "stickylab/potentials.hpp"

namespace stickylab {

enum class Solver {
  eulerian,
  lagrangian_second,
  lagrangian_first,
  lagrangian_newtonian,
  picard,
};
std::string_view to_string(Solver s) noexcept;

/// uniform_grid: midpoints of [0,1] with random velocities.
/// random_positions: sorted uniform positions on position_range.
/// explicit_list: particles listed in [initial_rho] / [initial_eta].
enum class InitialLayout { uniform_grid, random_positions, explicit_list };
std::string_view to_string(InitialLayout l) noexcept;

struct ExplicitSpecies {
  std::vector<double> positions;
  std::vector<double> velocities;  // empty: all zero
  std::vector<double> masses;      // empty: equal masses
};

struct SimConfig {
  Solver solver = Solver::eulerian;
  PotentialSet potentials;
  std::optional<std::size_t> N, M, n_cells;
  std::optional<double> sigma, epsilon;  // exactly one is set
  double T = 0.0;
  double dt = 1e-3;
  std::size_t output_stride = 10;
  double toll = 0.002;
  MergeRule merge_rule = MergeRule::momentum;
  VelocityRange velocity_range;
  VelocityRange position_range{-1.0, 1.0};  // random_positions only
  std::optional<std::uint64_t> seed;
  InitialLayout initial_layout = InitialLayout::uniform_grid;
  ExplicitSpecies initial_rho, initial_eta;

  /// sigma, or epsilon^-1/2 (+inf for epsilon = 0).
  double sigma_value() const;
  /// epsilon, or sigma^-2.
  double epsilon_value() const;
  bool uses_randomness() const;
  /// Grid size of the Lagrangian solvers: n_cells, else N.
  std::size_t cells() const;
};

/// Parses the key-value text format. Throws Error(config) with the line or
/// field at fault.
SimConfig parse_config(const std::string& text);
SimConfig load_config(const std::filesystem::path& path);

/// Checks the invariants of a parsed config (everything except the seed,
/// which may still come from the command line).
void validate(const SimConfig& config);

/// The seed to use; Error(config) if randomness is needed and none is set.
std::uint64_t effective_seed(const SimConfig& config);

/// Canonical text: every field in a fixed order, numbers at 17 significant
/// digits. parse_config(serialize(c)) reproduces c.
std::string serialize(const SimConfig& config);

/// FNV-1a 64 of the canonical text.
std::uint64_t config_hash(const SimConfig& config);
std::string hash_hex(std::uint64_t hash);

nlohmann::json to_json(const SimConfig& config);
nlohmann::json to_json(const PotentialSpec& spec);

}  // namespace stickylab
