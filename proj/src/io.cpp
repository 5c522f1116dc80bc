#include "stickylab/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "stickylab/error.hpp"

namespace stickylab {

namespace {

void schema(std::ostream& out, std::string_view kind) {
  out << "# schema: stickylab." << kind << '/' << kCsvSchemaVersion << '\n';
}

void species_rows(std::ostream& out, double time, std::string_view name,
                  const SpeciesState& s) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    out << format_number(time) << ',' << name << ',' << i << ','
        << format_number(s.positions[i]) << ',' << format_number(s.velocities[i])
        << ',' << format_number(s.masses[i]) << '\n';
  }
}

void field_rows(std::ostream& out, double time, std::string_view name,
                const GridFunction& g) {
  for (std::size_t i = 0; i < g.size(); ++i) {
    out << format_number(time) << ',' << name << ',' << i << ',' << format_number(g[i])
        << '\n';
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::optional<double> to_double(std::string_view t) {
  t = trim(t);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) return std::nullopt;
  return v;
}

}  // namespace

nlohmann::json to_json(const RunMetadata& m) {
  nlohmann::json j;
  j["command"] = m.command;
  j["artifact_version"] = m.artifact_version;
  j["rk_tableau"] = m.rk_tableau;
  j["resolvent_scheme"] = m.resolvent_scheme;
  j["config_hash"] = m.config_hash;
  j["seed"] = m.seed ? nlohmann::json(*m.seed) : nlohmann::json(nullptr);
  j["wall_time_seconds"] = m.wall_time_seconds;
  j["csv_schema_version"] = kCsvSchemaVersion;
  j["effective_config"] = m.effective_config;
  return j;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return fmt::format("{:.17g}", v);
}

std::string format_shortest(double v) {
  std::string s = fmt::format("{}", v);
  if (std::isfinite(v) && s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

void write_snapshots_csv(std::ostream& out, const EulerianRun& run) {
  schema(out, "snapshots");
  out << "time,species,index,position,velocity,mass\n";
  for (const Snapshot& s : run.snapshots) {
    species_rows(out, s.time, "rho", s.rho);
    species_rows(out, s.time, "eta", s.eta);
  }
}

void write_events_csv(std::ostream& out, const std::vector<MergeEvent>& events) {
  schema(out, "events");
  out << "time,species,indices,momentum_pre,momentum_post,ke_lost\n";
  for (const MergeEvent& e : events) {
    out << format_number(e.time) << ',' << to_string(e.species) << ',' << e.left << ';'
        << e.right << ',' << format_number(e.momentum_pre) << ','
        << format_number(e.momentum_post) << ',' << format_number(e.ke_lost) << '\n';
  }
}

void write_diagnostics_csv(std::ostream& out, const EulerianRun& run) {
  schema(out, "diagnostics");
  out << "time,energy,kinetic,norm_X,norm_Y,norm_V,norm_W,w2_initial,merge_events,"
         "clusters_rho,clusters_eta\n";
  for (const DiagnosticsRecord& d : run.diagnostics) {
    out << format_number(d.time) << ','
        << (d.energy ? format_number(*d.energy) : std::string("nan")) << ','
        << format_number(d.kinetic) << ',' << format_number(d.norm_X) << ','
        << format_number(d.norm_Y) << ',' << format_number(d.norm_V) << ','
        << format_number(d.norm_W) << ',' << format_number(d.w2_reference) << ','
        << d.merge_events << ',' << d.clusters_rho << ',' << d.clusters_eta << '\n';
  }
}

void write_snapshots_csv(std::ostream& out, const LagrangianRun& run) {
  schema(out, "grid_snapshots");
  out << "time,field,index,value\n";
  for (const LagrangianSnapshot& s : run.snapshots) {
    field_rows(out, s.time, "X", s.X);
    field_rows(out, s.time, "Y", s.Y);
    field_rows(out, s.time, "V", s.V);
    field_rows(out, s.time, "W", s.W);
  }
}

void write_diagnostics_csv(std::ostream& out, const LagrangianRun& run) {
  schema(out, "grid_diagnostics");
  out << "time,energy,norm_X,norm_Y,norm_V,norm_W,w2_initial,clusters_X,clusters_Y\n";
  for (const LagrangianDiagnostics& d : run.diagnostics) {
    out << format_number(d.time) << ','
        << (d.energy ? format_number(*d.energy) : std::string("nan")) << ','
        << format_number(d.norm_X) << ',' << format_number(d.norm_Y) << ','
        << format_number(d.norm_V) << ',' << format_number(d.norm_W) << ','
        << format_number(d.w2_reference) << ',' << d.clusters_X << ',' << d.clusters_Y
        << '\n';
  }
}

void write_trajectory_csv(std::ostream& out, const PicardResult& r, std::size_t stride) {
  schema(out, "grid_snapshots");
  out << "time,field,index,value\n";
  stride = std::max<std::size_t>(stride, 1);
  for (std::size_t k = 0; k < r.times.size(); ++k) {
    if (k % stride != 0 && k + 1 != r.times.size()) continue;
    field_rows(out, r.times[k], "X", r.X[k]);
    field_rows(out, r.times[k], "Y", r.Y[k]);
  }
}

void write_table_csv(std::ostream& out, const Table& t) {
  schema(out, "table");
  for (std::size_t i = 0; i < t.columns.size(); ++i) {
    out << (i ? "," : "") << t.columns[i];
  }
  out << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      out << (i ? "," : "") << format_number(row[i]);
    }
    out << '\n';
  }
}

AtomicMeasure read_measure_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::input, fmt::format("cannot open '{}'", path.string()));
  std::vector<double> positions, masses;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const std::size_t comma = t.find(',');
    const auto x = to_double(t.substr(0, comma));
    if (!x) {
      if (!header_seen && positions.empty()) {
        header_seen = true;
        continue;
      }
      fail(ErrorKind::input,
           fmt::format("{}:{}: malformed position", path.string(), line_no));
    }
    positions.push_back(*x);
    if (comma != std::string_view::npos) {
      const auto m = to_double(t.substr(comma + 1));
      if (!m) {
        fail(ErrorKind::input, fmt::format("{}:{}: malformed mass", path.string(), line_no));
      }
      masses.push_back(*m);
    }
  }
  if (positions.empty()) {
    fail(ErrorKind::input, fmt::format("{}: no atoms", path.string()));
  }
  if (!masses.empty() && masses.size() != positions.size()) {
    fail(ErrorKind::input, fmt::format("{}: some rows lack a mass", path.string()));
  }
  std::vector<Atom> atoms;
  for (std::size_t i = 0; i < positions.size(); ++i) {
    atoms.push_back({positions[i], masses.empty()
                                       ? 1.0 / static_cast<double>(positions.size())
                                       : masses[i]});
  }
  return AtomicMeasure::from_unsorted(std::move(atoms));
}

Bundle::Bundle(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) {
    fail(ErrorKind::config,
         fmt::format("cannot create output directory '{}': {}", dir_.string(), ec.message()));
  }
}

std::ofstream Bundle::open(std::string_view name) const {
  std::ofstream out(dir_ / std::string(name), std::ios::binary);
  if (!out) {
    fail(ErrorKind::config,
         fmt::format("cannot write '{}'", (dir_ / std::string(name)).string()));
  }
  return out;
}

void Bundle::write_text(std::string_view name, std::string_view text) const {
  open(name) << text;
}

void Bundle::write_json(std::string_view name, const nlohmann::json& j) const {
  open(name) << j.dump(2) << '\n';
}

nlohmann::json summary_json(const std::vector<PropertyCheck>& checks) {
  nlohmann::json j;
  j["passed"] = std::all_of(checks.begin(), checks.end(),
                            [](const PropertyCheck& c) { return c.pass; });
  j["criteria"] = nlohmann::json::array();
  for (const PropertyCheck& c : checks) {
    j["criteria"].push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
  }
  return j;
}

}  // namespace stickylab
