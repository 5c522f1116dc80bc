#include "stickylab/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "stickylab/error.hpp"

namespace stickylab {

namespace pt = boost::property_tree;

namespace {

const char* const kSlots[] = {"K_rho", "K_eta", "H_rho", "H_eta", "A_rho", "A_eta"};

PotentialSpec& slot(PotentialSet& p, std::string_view name) {
  if (name == "K_rho") return p.K_rho;
  if (name == "K_eta") return p.K_eta;
  if (name == "H_rho") return p.H_rho;
  if (name == "H_eta") return p.H_eta;
  if (name == "A_rho") return p.A_rho;
  return p.A_eta;
}

const PotentialSpec& slot(const PotentialSet& p, std::string_view name) {
  return slot(const_cast<PotentialSet&>(p), name);
}

[[noreturn]] void bad_field(std::string_view field, std::string_view why) {
  fail(ErrorKind::config, fmt::format("field '{}': {}", field, why));
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double parse_double(std::string_view text, std::string_view field) {
  const std::string_view t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    bad_field(field, fmt::format("'{}' is not a number", t));
  }
  if (!std::isfinite(v)) bad_field(field, "must be finite");
  return v;
}

std::uint64_t parse_unsigned(std::string_view text, std::string_view field) {
  const std::string_view t = trim(text);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    bad_field(field, fmt::format("'{}' is not a non-negative integer", t));
  }
  return v;
}

std::vector<double> parse_list(std::string_view text, std::string_view field) {
  std::vector<double> out;
  if (trim(text).empty()) return out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = text.find(',', start);
    out.push_back(parse_double(text.substr(start, comma - start), field));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

VelocityRange parse_range(std::string_view text, std::string_view field) {
  const std::vector<double> v = parse_list(text, field);
  if (v.size() != 2) bad_field(field, "expected 'lo, hi'");
  if (v[0] > v[1]) bad_field(field, "lo must not exceed hi");
  return {v[0], v[1]};
}

Solver parse_solver(std::string_view s) {
  for (Solver v : {Solver::eulerian, Solver::lagrangian_second, Solver::lagrangian_first,
                   Solver::lagrangian_newtonian, Solver::picard}) {
    if (to_string(v) == s) return v;
  }
  bad_field("solver", fmt::format("unknown solver '{}'", s));
}

InitialLayout parse_layout(std::string_view s) {
  for (InitialLayout v : {InitialLayout::uniform_grid, InitialLayout::random_positions,
                          InitialLayout::explicit_list}) {
    if (to_string(v) == s) return v;
  }
  bad_field("initial_layout", fmt::format("unknown layout '{}'", s));
}

MergeRule parse_merge_rule(std::string_view s) {
  if (s == "momentum") return MergeRule::momentum;
  if (s == "paper") return MergeRule::paper;
  bad_field("merge_rule", fmt::format("unknown rule '{}'", s));
}

PotentialSpec parse_potential(const pt::ptree& section, std::string_view name) {
  static const std::set<std::string> keys{"family", "amplitude", "scale", "exponent",
                                          "center"};
  for (const auto& [key, child] : section) {
    if (!keys.count(key)) bad_field(fmt::format("{}.{}", name, key), "unknown key");
  }
  const auto family_text = section.get_optional<std::string>("family");
  if (!family_text) bad_field(fmt::format("{}.family", name), "missing");
  const auto family = parse_family(*family_text);
  if (!family) {
    bad_field(fmt::format("{}.family", name),
              fmt::format("unknown family '{}'", *family_text));
  }
  if (*family == Family::zero) return PotentialSpec::zero();

  auto number = [&](const char* key, double fallback) {
    const auto v = section.get_optional<std::string>(key);
    return v ? parse_double(*v, fmt::format("{}.{}", name, key)) : fallback;
  };
  PotentialSpec s;
  s.family = *family;
  s.amplitude = number("amplitude", 1.0);
  s.center = number("center", 0.0);
  switch (*family) {
    case Family::gaussian_exp:
      s.scale = number("scale", 1.0);
      s.exponent = number("exponent", 2.0);
      break;
    case Family::power:
      s.exponent = number("exponent", 2.0);
      break;
    case Family::newtonian:
    case Family::quadratic_well: {
      const double fixed = *family == Family::newtonian ? 1.0 : 2.0;
      if (number("exponent", fixed) != fixed) {
        bad_field(fmt::format("{}.exponent", name),
                  fmt::format("fixed to {} for this family", fixed));
      }
      if (number("scale", 1.0) != 1.0) {
        bad_field(fmt::format("{}.scale", name), "not used by this family");
      }
      s.exponent = fixed;
      break;
    }
    case Family::zero:
      break;
  }
  try {
    check_valid(s);
  } catch (const Error& e) {
    bad_field(name, e.what());
  }
  return s;
}

ExplicitSpecies parse_species(const pt::ptree& section, std::string_view name) {
  ExplicitSpecies s;
  for (const auto& [key, child] : section) {
    const std::string field = fmt::format("{}.{}", name, key);
    if (key == "positions") {
      s.positions = parse_list(child.data(), field);
    } else if (key == "velocities") {
      s.velocities = parse_list(child.data(), field);
    } else if (key == "masses") {
      s.masses = parse_list(child.data(), field);
    } else {
      bad_field(field, "unknown key");
    }
  }
  return s;
}

void check_species(const ExplicitSpecies& s, std::string_view name) {
  if (s.positions.empty()) bad_field(fmt::format("{}.positions", name), "empty");
  if (!s.velocities.empty() && s.velocities.size() != s.positions.size()) {
    bad_field(fmt::format("{}.velocities", name), "length differs from positions");
  }
  if (!s.masses.empty()) {
    if (s.masses.size() != s.positions.size()) {
      bad_field(fmt::format("{}.masses", name), "length differs from positions");
    }
    double total = 0.0;
    for (double m : s.masses) {
      if (!(m > 0.0)) bad_field(fmt::format("{}.masses", name), "must be > 0");
      total += m;
    }
    if (std::abs(total - 1.0) > 1e-12) {
      bad_field(fmt::format("{}.masses", name), "must sum to 1");
    }
  }
}

std::string fmt_double(double v) { return fmt::format("{:.17g}", v); }

std::string fmt_list(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i > 0) out += ", ";
    out += fmt_double(v[i]);
  }
  return out;
}

}  // namespace

std::string_view to_string(Solver s) noexcept {
  switch (s) {
    case Solver::eulerian: return "eulerian";
    case Solver::lagrangian_second: return "lagrangian_second";
    case Solver::lagrangian_first: return "lagrangian_first";
    case Solver::lagrangian_newtonian: return "lagrangian_newtonian";
    case Solver::picard: return "picard";
  }
  return "unknown";
}

std::string_view to_string(InitialLayout l) noexcept {
  switch (l) {
    case InitialLayout::uniform_grid: return "uniform_grid";
    case InitialLayout::random_positions: return "random_positions";
    case InitialLayout::explicit_list: return "explicit_list";
  }
  return "unknown";
}

double SimConfig::sigma_value() const {
  if (sigma) return *sigma;
  const double e = epsilon.value_or(1.0);
  return e > 0.0 ? 1.0 / std::sqrt(e) : std::numeric_limits<double>::infinity();
}

double SimConfig::epsilon_value() const {
  if (epsilon) return *epsilon;
  const double s = sigma.value_or(1.0);
  return 1.0 / (s * s);
}

bool SimConfig::uses_randomness() const {
  if (initial_layout == InitialLayout::explicit_list) return false;
  return velocity_range.lo != velocity_range.hi ||
         initial_layout == InitialLayout::random_positions;
}

std::size_t SimConfig::cells() const {
  if (n_cells) return *n_cells;
  if (N) return *N;
  if (initial_layout == InitialLayout::explicit_list) return initial_rho.positions.size();
  return 0;
}

SimConfig parse_config(const std::string& text) {
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    fail(ErrorKind::config, fmt::format("line {}: {}", e.line(), e.message()));
  }

  SimConfig c;
  static const std::set<std::string> sections{"K_rho", "K_eta", "H_rho", "H_eta",
                                              "A_rho", "A_eta", "initial_rho",
                                              "initial_eta"};
  bool have_solver = false, have_T = false;
  for (const auto& [key, node] : tree) {
    if (sections.count(key)) {
      if (key.rfind("initial_", 0) == 0) {
        (key == "initial_rho" ? c.initial_rho : c.initial_eta) = parse_species(node, key);
      } else {
        slot(c.potentials, key) = parse_potential(node, key);
      }
      continue;
    }
    if (!node.empty()) bad_field(key, "unknown section");
    const std::string& v = node.data();
    if (key == "solver") {
      c.solver = parse_solver(trim(v));
      have_solver = true;
    } else if (key == "N") {
      c.N = parse_unsigned(v, key);
    } else if (key == "M") {
      c.M = parse_unsigned(v, key);
    } else if (key == "n_cells") {
      c.n_cells = parse_unsigned(v, key);
    } else if (key == "sigma") {
      c.sigma = parse_double(v, key);
    } else if (key == "epsilon") {
      c.epsilon = parse_double(v, key);
    } else if (key == "T") {
      c.T = parse_double(v, key);
      have_T = true;
    } else if (key == "dt") {
      c.dt = parse_double(v, key);
    } else if (key == "output_stride") {
      c.output_stride = parse_unsigned(v, key);
    } else if (key == "toll") {
      c.toll = parse_double(v, key);
    } else if (key == "merge_rule") {
      c.merge_rule = parse_merge_rule(trim(v));
    } else if (key == "velocity_range") {
      c.velocity_range = parse_range(v, key);
    } else if (key == "position_range") {
      c.position_range = parse_range(v, key);
    } else if (key == "seed") {
      c.seed = parse_unsigned(v, key);
    } else if (key == "initial_layout") {
      c.initial_layout = parse_layout(trim(v));
    } else {
      bad_field(key, "unknown key");
    }
  }
  if (!have_solver) bad_field("solver", "missing");
  if (!have_T) bad_field("T", "missing");
  validate(c);
  return c;
}

SimConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::config, fmt::format("cannot open config '{}'", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_config(buf.str());
  } catch (const Error& e) {
    fail(e.kind(), fmt::format("{}: {}", path.string(), e.what()));
  }
}

void validate(const SimConfig& c) {
  if (c.sigma.has_value() == c.epsilon.has_value()) {
    bad_field("sigma/epsilon", "give exactly one of sigma and epsilon");
  }
  if (c.sigma && !(*c.sigma > 0.0)) bad_field("sigma", "must be > 0");
  if (c.epsilon) {
    if (*c.epsilon < 0.0) bad_field("epsilon", "must be >= 0");
    if (*c.epsilon == 0.0 && c.solver != Solver::lagrangian_first) {
      bad_field("epsilon", "0 is only valid for the lagrangian_first solver");
    }
  }
  if (!(c.T > 0.0)) bad_field("T", "must be > 0");
  if (!(c.dt > 0.0)) bad_field("dt", "must be > 0");
  if (!(c.toll > 0.0)) bad_field("toll", "must be > 0");
  if (c.output_stride == 0) bad_field("output_stride", "must be >= 1");
  if (c.initial_layout == InitialLayout::random_positions &&
      !(c.position_range.lo < c.position_range.hi)) {
    bad_field("position_range", "lo must be < hi");
  }
  try {
    check_valid(c.potentials);
  } catch (const Error& e) {
    bad_field("potentials", e.what());
  }

  if (c.initial_layout == InitialLayout::explicit_list) {
    check_species(c.initial_rho, "initial_rho");
    check_species(c.initial_eta, "initial_eta");
    if (c.N && *c.N != c.initial_rho.positions.size()) {
      bad_field("N", "differs from the length of initial_rho.positions");
    }
    if (c.M && *c.M != c.initial_eta.positions.size()) {
      bad_field("M", "differs from the length of initial_eta.positions");
    }
  } else if (c.solver == Solver::eulerian) {
    if (!c.N || *c.N == 0) bad_field("N", "required (>= 1) for the eulerian solver");
    if (!c.M || *c.M == 0) bad_field("M", "required (>= 1) for the eulerian solver");
  }
  if (c.solver != Solver::eulerian && c.cells() == 0) {
    bad_field("n_cells", "required (>= 1) for the Lagrangian solvers (or give N)");
  }
  if (c.solver == Solver::lagrangian_newtonian) {
    if (c.potentials.K_rho.family != Family::newtonian ||
        c.potentials.K_eta.family != Family::newtonian) {
      bad_field("K_rho/K_eta", "the Newtonian solver needs Newtonian self kernels");
    }
    if (!c.potentials.symmetric_cross()) {
      bad_field("H_rho/H_eta", "the Newtonian solver needs H_rho == H_eta");
    }
  }
}

std::uint64_t effective_seed(const SimConfig& c) {
  if (c.seed) return *c.seed;
  if (c.uses_randomness()) {
    bad_field("seed", "required: the initial layout draws random numbers");
  }
  return 0;
}

std::string serialize(const SimConfig& c) {
  std::string s;
  auto line = [&](std::string_view key, const std::string& value) {
    s += fmt::format("{} = {}\n", key, value);
  };
  line("solver", std::string(to_string(c.solver)));
  line("initial_layout", std::string(to_string(c.initial_layout)));
  if (c.N) line("N", std::to_string(*c.N));
  if (c.M) line("M", std::to_string(*c.M));
  if (c.n_cells) line("n_cells", std::to_string(*c.n_cells));
  if (c.sigma) line("sigma", fmt_double(*c.sigma));
  if (c.epsilon) line("epsilon", fmt_double(*c.epsilon));
  line("T", fmt_double(c.T));
  line("dt", fmt_double(c.dt));
  line("output_stride", std::to_string(c.output_stride));
  line("toll", fmt_double(c.toll));
  line("merge_rule", std::string(to_string(c.merge_rule)));
  line("velocity_range", fmt_list({c.velocity_range.lo, c.velocity_range.hi}));
  line("position_range", fmt_list({c.position_range.lo, c.position_range.hi}));
  if (c.seed) line("seed", std::to_string(*c.seed));
  for (const char* name : kSlots) {
    const PotentialSpec& p = slot(c.potentials, name);
    s += fmt::format("\n[{}]\n", name);
    line("family", std::string(to_string(p.family)));
    line("amplitude", fmt_double(p.amplitude));
    line("scale", fmt_double(p.scale));
    line("exponent", fmt_double(p.exponent));
    line("center", fmt_double(p.center));
  }
  if (c.initial_layout == InitialLayout::explicit_list) {
    for (const auto& [name, sp] : {std::pair{"initial_rho", &c.initial_rho},
                                   std::pair{"initial_eta", &c.initial_eta}}) {
      s += fmt::format("\n[{}]\n", name);
      line("positions", fmt_list(sp->positions));
      if (!sp->velocities.empty()) line("velocities", fmt_list(sp->velocities));
      if (!sp->masses.empty()) line("masses", fmt_list(sp->masses));
    }
  }
  return s;
}

std::uint64_t config_hash(const SimConfig& c) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : serialize(c)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hash_hex(std::uint64_t hash) { return fmt::format("{:016x}", hash); }

nlohmann::json to_json(const PotentialSpec& p) {
  return {{"family", std::string(to_string(p.family))},
          {"amplitude", p.amplitude},
          {"scale", p.scale},
          {"exponent", p.exponent},
          {"center", p.center}};
}

nlohmann::json to_json(const SimConfig& c) {
  nlohmann::json j;
  j["solver"] = std::string(to_string(c.solver));
  j["initial_layout"] = std::string(to_string(c.initial_layout));
  auto opt = [](const auto& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
  j["N"] = opt(c.N);
  j["M"] = opt(c.M);
  j["n_cells"] = opt(c.n_cells);
  j["sigma"] = opt(c.sigma);
  j["epsilon"] = opt(c.epsilon);
  j["T"] = c.T;
  j["dt"] = c.dt;
  j["output_stride"] = c.output_stride;
  j["toll"] = c.toll;
  j["merge_rule"] = std::string(to_string(c.merge_rule));
  j["velocity_range"] = {c.velocity_range.lo, c.velocity_range.hi};
  j["position_range"] = {c.position_range.lo, c.position_range.hi};
  j["seed"] = opt(c.seed);
  for (const char* name : kSlots) j["potentials"][name] = to_json(slot(c.potentials, name));
  return j;
}

}  // namespace stickylab
