#include "stickylab/eulerian.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "stickylab/error.hpp"
#include "stickylab/rng.hpp"

namespace stickylab {

std::string_view to_string(Species s) noexcept {
  return s == Species::rho ? "rho" : "eta";
}

std::string_view to_string(MergeRule rule) noexcept {
  return rule == MergeRule::momentum ? "momentum" : "paper";
}

double SpeciesState::momentum() const {
  double p = 0.0;
  for (std::size_t i = 0; i < size(); ++i) p += masses[i] * velocities[i];
  return p;
}

double SpeciesState::kinetic_energy() const {
  double e = 0.0;
  for (std::size_t i = 0; i < size(); ++i) {
    e += 0.5 * masses[i] * velocities[i] * velocities[i];
  }
  return e;
}

double SpeciesState::total_mass() const {
  return std::accumulate(masses.begin(), masses.end(), 0.0);
}

AtomicMeasure SpeciesState::measure() const {
  std::vector<Atom> atoms(size());
  for (std::size_t i = 0; i < size(); ++i) atoms[i] = {positions[i], masses[i]};
  return AtomicMeasure::from_unsorted(std::move(atoms));
}

void SpeciesState::check() const {
  if (positions.empty()) fail(ErrorKind::input, "species has no particles");
  if (velocities.size() != positions.size() || masses.size() != positions.size()) {
    fail(ErrorKind::input, "species arrays differ in length");
  }
  for (std::size_t i = 0; i < size(); ++i) {
    if (!std::isfinite(positions[i]) || !std::isfinite(velocities[i])) {
      fail(ErrorKind::input, fmt::format("particle {} is not finite", i));
    }
    if (!(masses[i] > 0.0)) {
      fail(ErrorKind::input, fmt::format("particle {} has non-positive mass", i));
    }
  }
  if (std::abs(total_mass() - 1.0) > 1e-12) {
    fail(ErrorKind::input, "species masses do not sum to 1");
  }
}

bool SpeciesState::ordered() const {
  return std::is_sorted(positions.begin(), positions.end());
}

namespace {

// Self-interaction, each unordered pair evaluated once: K' is odd.
void add_self_forces(const SpeciesState& s, const PotentialSpec& K,
                     std::vector<double>& acc) {
  if (K.is_zero()) return;
  const std::size_t n = s.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = i + 1; k < n; ++k) {
      const double f = derivative_unchecked(K, s.positions[i] - s.positions[k]);
      acc[i] -= s.masses[k] * f;
      acc[k] += s.masses[i] * f;
    }
  }
}

void add_cross_forces(const SpeciesState& self, const SpeciesState& other,
                      const PotentialSpec& H, std::vector<double>& acc) {
  if (H.is_zero()) return;
  for (std::size_t i = 0; i < self.size(); ++i) {
    double f = 0.0;
    for (std::size_t k = 0; k < other.size(); ++k) {
      f += other.masses[k] * derivative_unchecked(H, self.positions[i] - other.positions[k]);
    }
    acc[i] -= f;
  }
}

std::vector<double> species_acceleration(const SpeciesState& self,
                                         const SpeciesState& other,
                                         const PotentialSpec& K,
                                         const PotentialSpec& H,
                                         const PotentialSpec& A,
                                         const TimeMode& mode) {
  std::vector<double> acc(self.size(), 0.0);
  add_self_forces(self, K, acc);
  add_cross_forces(self, other, H, acc);
  for (std::size_t i = 0; i < self.size(); ++i) {
    double a = acc[i] - mode.damping * self.velocities[i];
    if (!A.is_zero()) a -= derivative_unchecked(A, self.positions[i]);
    acc[i] = a / mode.inertia;
  }
  return acc;
}

// u <- a * u0 + b * (u1 + dt * L(u1)), componentwise on both species.
void combine(SpeciesState& out, const SpeciesState& u0, const SpeciesState& u1,
             const std::vector<double>& acc1, double a, double b, double dt) {
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.positions[i] =
        a * u0.positions[i] + b * (u1.positions[i] + dt * u1.velocities[i]);
    out.velocities[i] =
        a * u0.velocities[i] + b * (u1.velocities[i] + dt * acc1[i]);
  }
}

bool finite(const SpeciesState& s) {
  auto ok = [](double v) { return std::isfinite(v); };
  return std::all_of(s.positions.begin(), s.positions.end(), ok) &&
         std::all_of(s.velocities.begin(), s.velocities.end(), ok);
}

void merge_species(SpeciesState& s, Species species, double time, double toll,
                   MergeRule rule, std::vector<MergeEvent>& events) {
  bool changed = true;
  while (changed) {
    changed = false;
    std::size_t i = 0;
    while (i + 1 < s.size()) {
      if (!(s.positions[i + 1] - s.positions[i] < toll)) {
        ++i;
        continue;
      }
      const double m1 = s.masses[i], m2 = s.masses[i + 1];
      const double x1 = s.positions[i], x2 = s.positions[i + 1];
      const double v1 = s.velocities[i], v2 = s.velocities[i + 1];
      const double mass = m1 + m2;
      double x, v;
      if (rule == MergeRule::momentum) {
        x = (m1 * x1 + m2 * x2) / mass;
        v = (m1 * v1 + m2 * v2) / mass;
      } else {
        x = 0.5 * (x1 + x2);
        v = 0.5 * (v1 + v2);
      }
      MergeEvent ev;
      ev.time = time;
      ev.species = species;
      ev.left = i;
      ev.right = i + 1;
      ev.momentum_pre = m1 * v1 + m2 * v2;
      ev.momentum_post = mass * v;
      ev.ke_lost = 0.5 * (m1 * v1 * v1 + m2 * v2 * v2) - 0.5 * mass * v * v;
      events.push_back(ev);

      s.positions[i] = x;
      s.velocities[i] = v;
      s.masses[i] = mass;
      const auto next = static_cast<std::ptrdiff_t>(i + 1);
      s.positions.erase(s.positions.begin() + next);
      s.velocities.erase(s.velocities.begin() + next);
      s.masses.erase(s.masses.begin() + next);
      changed = true;
    }
  }
}

std::size_t count_crossings(const SpeciesState& s) {
  std::size_t c = 0;
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    if (s.positions[i + 1] < s.positions[i]) ++c;
  }
  return c;
}

double l2_norm_of_positions(const SpeciesState& s) {
  double acc = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    acc += s.masses[i] * s.positions[i] * s.positions[i];
  }
  return std::sqrt(acc);
}

double l2_norm_of_velocities(const SpeciesState& s) {
  return std::sqrt(2.0 * s.kinetic_energy());
}

}  // namespace

Accelerations rhs(const TwoSpeciesState& state, const PotentialSet& potentials,
                  const TimeMode& mode) {
  return {species_acceleration(state.rho, state.eta, potentials.K_rho,
                               potentials.H_rho, potentials.A_rho, mode),
          species_acceleration(state.eta, state.rho, potentials.K_eta,
                               potentials.H_eta, potentials.A_eta, mode)};
}

TwoSpeciesState step_rk3(const TwoSpeciesState& u0, double dt,
                         const PotentialSet& potentials, const TimeMode& mode) {
  if (!(dt > 0.0)) fail(ErrorKind::input, "step_rk3: dt must be > 0");

  TwoSpeciesState u1 = u0, u2 = u0, out = u0;
  const Accelerations a0 = rhs(u0, potentials, mode);
  combine(u1.rho, u0.rho, u0.rho, a0.rho, 0.0, 1.0, dt);
  combine(u1.eta, u0.eta, u0.eta, a0.eta, 0.0, 1.0, dt);

  const Accelerations a1 = rhs(u1, potentials, mode);
  combine(u2.rho, u0.rho, u1.rho, a1.rho, 0.75, 0.25, dt);
  combine(u2.eta, u0.eta, u1.eta, a1.eta, 0.75, 0.25, dt);

  const Accelerations a2 = rhs(u2, potentials, mode);
  combine(out.rho, u0.rho, u2.rho, a2.rho, 1.0 / 3.0, 2.0 / 3.0, dt);
  combine(out.eta, u0.eta, u2.eta, a2.eta, 1.0 / 3.0, 2.0 / 3.0, dt);
  out.time = u0.time + dt;

  if (!finite(out.rho) || !finite(out.eta)) {
    fail(ErrorKind::numerical,
         fmt::format("step_rk3: non-finite state at t = {:.17g} (dt = {:g})",
                     out.time, dt));
  }
  return out;
}

MergeResult detect_and_merge(const TwoSpeciesState& state, double toll,
                             MergeRule rule) {
  if (!(toll > 0.0)) fail(ErrorKind::input, "detect_and_merge: toll must be > 0");
  MergeResult r{state, {}};
  merge_species(r.state.rho, Species::rho, state.time, toll, rule, r.events);
  merge_species(r.state.eta, Species::eta, state.time, toll, rule, r.events);
  return r;
}

std::optional<double> total_energy(const TwoSpeciesState& state,
                                   const PotentialSet& potentials) {
  if (!potentials.symmetric_cross()) return std::nullopt;
  const SpeciesState& r = state.rho;
  const SpeciesState& e = state.eta;
  double energy = r.kinetic_energy() + e.kinetic_energy();

  auto self = [](const SpeciesState& s, const PotentialSpec& K) {
    if (K.is_zero()) return 0.0;
    double acc = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      for (std::size_t k = 0; k < s.size(); ++k) {
        acc += s.masses[i] * s.masses[k] *
               eval_unchecked(K, s.positions[i] - s.positions[k]);
      }
    }
    return 0.5 * acc;
  };
  energy += self(r, potentials.K_rho) + self(e, potentials.K_eta);

  if (!potentials.H_rho.is_zero()) {
    double cross = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
      for (std::size_t j = 0; j < e.size(); ++j) {
        cross += r.masses[i] * e.masses[j] *
                 eval_unchecked(potentials.H_rho, r.positions[i] - e.positions[j]);
      }
    }
    energy += cross;
  }

  auto external = [](const SpeciesState& s, const PotentialSpec& A) {
    double acc = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      acc += s.masses[i] * eval_unchecked(A, s.positions[i]);
    }
    return acc;
  };
  energy += external(r, potentials.A_rho) + external(e, potentials.A_eta);
  return energy;
}

SpeciesState uniform_species(std::size_t n, double v_lo, double v_hi,
                             std::uint64_t seed) {
  if (n == 0) fail(ErrorKind::config, "species needs at least one particle");
  SpeciesState s;
  s.positions.resize(n);
  s.velocities.resize(n);
  s.masses.assign(n, 1.0 / static_cast<double>(n));
  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    s.positions[i] = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    s.velocities[i] = v_lo == v_hi ? v_lo : rng.uniform(v_lo, v_hi);
  }
  return s;
}

void sort_species(SpeciesState& s) {
  std::vector<std::size_t> order(s.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return s.positions[a] < s.positions[b];
  });
  SpeciesState sorted;
  for (std::size_t i : order) {
    sorted.positions.push_back(s.positions[i]);
    sorted.velocities.push_back(s.velocities[i]);
    sorted.masses.push_back(s.masses[i]);
  }
  s = std::move(sorted);
}

EulerianRun simulate(TwoSpeciesState state, const PotentialSet& potentials,
                     const EulerianOptions& opt) {
  check_valid(potentials);
  if (!(opt.dt > 0.0)) fail(ErrorKind::config, "dt must be > 0");
  if (!(opt.horizon > 0.0)) fail(ErrorKind::config, "horizon T must be > 0");
  if (!(opt.toll > 0.0)) fail(ErrorKind::config, "toll must be > 0");
  if (opt.output_stride == 0) fail(ErrorKind::config, "output_stride must be >= 1");
  if (!(opt.mode.inertia > 0.0)) fail(ErrorKind::config, "inertia must be > 0");
  state.rho.check();
  state.eta.check();
  if (!state.rho.ordered()) sort_species(state.rho);
  if (!state.eta.ordered()) sort_species(state.eta);

  EulerianRun run;
  MergeResult merged = detect_and_merge(state, opt.toll, opt.merge_rule);
  state = std::move(merged.state);
  run.events = std::move(merged.events);

  const MeasurePair reference{state.rho.measure(), state.eta.measure()};
  const auto steps = static_cast<std::size_t>(std::ceil(opt.horizon / opt.dt - 1e-9));

  auto record = [&] {
    run.snapshots.push_back({state.time, state.rho, state.eta});
    DiagnosticsRecord d;
    d.time = state.time;
    d.energy = total_energy(state, potentials);
    d.kinetic = state.rho.kinetic_energy() + state.eta.kinetic_energy();
    d.norm_X = l2_norm_of_positions(state.rho);
    d.norm_Y = l2_norm_of_positions(state.eta);
    d.norm_V = l2_norm_of_velocities(state.rho);
    d.norm_W = l2_norm_of_velocities(state.eta);
    d.w2_reference = product_w2({state.rho.measure(), state.eta.measure()}, reference);
    d.merge_events = run.events.size();
    d.clusters_rho = state.rho.size();
    d.clusters_eta = state.eta.size();
    run.diagnostics.push_back(d);
  };

  record();
  for (std::size_t step = 1; step <= steps; ++step) {
    TwoSpeciesState next = step_rk3(state, opt.dt, potentials, opt.mode);
    next.time = static_cast<double>(step) * opt.dt;
    run.crossings_resolved += count_crossings(next.rho) + count_crossings(next.eta);
    MergeResult m = detect_and_merge(next, opt.toll, opt.merge_rule);
    state = std::move(m.state);
    run.events.insert(run.events.end(), m.events.begin(), m.events.end());

    if (!state.rho.ordered() || !state.eta.ordered()) ++run.ordering_violations;
    run.max_mass_error = std::max({run.max_mass_error,
                                   std::abs(state.rho.total_mass() - 1.0),
                                   std::abs(state.eta.total_mass() - 1.0)});
    if (step % opt.output_stride == 0 || step == steps) record();
  }
  return run;
}

}  // namespace stickylab
