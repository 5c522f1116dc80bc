#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

#include <json.hpp>

#include "stickylab/eulerian.hpp"
#include "stickylab/experiments.hpp"
#include "stickylab/lagrangian.hpp"
#include "stickylab/transport.hpp"

namespace stickylab {

inline constexpr std::string_view kArtifactVersion = "1.0.0";
inline constexpr int kCsvSchemaVersion = 1;

struct RunMetadata {
  std::string command;
  std::string artifact_version{kArtifactVersion};
  std::string rk_tableau{kRkTableau};
  std::string resolvent_scheme{kResolventScheme};
  std::string config_hash;           // empty when no config file is involved
  std::optional<std::uint64_t> seed;
  double wall_time_seconds = 0.0;
  nlohmann::json effective_config;   // defaults applied
};

nlohmann::json to_json(const RunMetadata& m);

/// 17 significant digits; "nan" / "inf" / "-inf" for non-finite values.
std::string format_number(double v);

/// Shortest text that reads back to the same double, always with a decimal
/// point or exponent (1 -> "1.0").
std::string format_shortest(double v);

// CSV files start with "# schema: stickylab.<kind>/<version>" followed by
// the column header.
void write_snapshots_csv(std::ostream& out, const EulerianRun& run);
void write_events_csv(std::ostream& out, const std::vector<MergeEvent>& events);
void write_diagnostics_csv(std::ostream& out, const EulerianRun& run);
void write_snapshots_csv(std::ostream& out, const LagrangianRun& run);
void write_diagnostics_csv(std::ostream& out, const LagrangianRun& run);
void write_trajectory_csv(std::ostream& out, const PicardResult& result,
                          std::size_t stride);
void write_table_csv(std::ostream& out, const Table& table);

/// Reads an atomic measure from CSV with columns position,mass (mass may be
/// omitted for equal masses). Lines starting with '#' are skipped.
/// Throws Error(input) on malformed content.
AtomicMeasure read_measure_csv(const std::filesystem::path& path);

/// Output bundle directory. Files are written by a single writer.
class Bundle {
 public:
  explicit Bundle(std::filesystem::path dir);

  const std::filesystem::path& dir() const noexcept { return dir_; }

  /// Opens dir/name for writing; throws Error(config) if that fails.
  std::ofstream open(std::string_view name) const;
  void write_text(std::string_view name, std::string_view text) const;
  void write_json(std::string_view name, const nlohmann::json& j) const;

 private:
  std::filesystem::path dir_;
};

/// Summary of pass/fail checks, written as summary.json.
nlohmann::json summary_json(const std::vector<PropertyCheck>& checks);

}  // namespace stickylab
