#include "stickylab/lagrangian.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "stickylab/error.hpp"

namespace stickylab {

namespace {

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

bool nondecreasing(std::span<const double> v) {
  return std::is_sorted(v.begin(), v.end());
}

void require_same_grid(std::span<const double> X, std::span<const double> Y,
                       const char* where) {
  if (X.empty() || X.size() != Y.size()) {
    fail(ErrorKind::input,
         fmt::format("{}: grids differ ({} vs {} cells)", where, X.size(), Y.size()));
  }
}

void require_finite(const LagrangianState& s, const char* where) {
  for (const GridFunction* g : {&s.X, &s.Y, &s.V, &s.W, &s.P, &s.Q}) {
    if (!all_finite(*g)) {
      fail(ErrorKind::numerical,
           fmt::format("{}: non-finite state at t = {:.17g}", where, s.time));
    }
  }
}

void add_self(std::span<const double> X, const PotentialSpec& K, double w,
              GridFunction& F) {
  if (K.is_zero()) return;
  const std::size_t n = X.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = i + 1; k < n; ++k) {
      const double f = w * derivative_unchecked(K, X[i] - X[k]);
      F[i] -= f;
      F[k] += f;
    }
  }
}

// F_i += sign * w * sum_k H'(X_i - Y_k)
void add_cross(std::span<const double> X, std::span<const double> Y,
               const PotentialSpec& H, double w, double sign, GridFunction& F) {
  if (H.is_zero()) return;
  for (std::size_t i = 0; i < X.size(); ++i) {
    double acc = 0.0;
    for (double y : Y) acc += derivative_unchecked(H, X[i] - y);
    F[i] += sign * w * acc;
  }
}

void add_external(std::span<const double> X, const PotentialSpec& A,
                  double sign, GridFunction& F) {
  if (A.is_zero()) return;
  for (std::size_t i = 0; i < X.size(); ++i) {
    F[i] += sign * derivative_unchecked(A, X[i]);
  }
}

GridFunction difference_quotient(std::span<const double> next,
                                 std::span<const double> prev, double dt) {
  GridFunction q(next.size());
  for (std::size_t i = 0; i < q.size(); ++i) q[i] = (next[i] - prev[i]) / dt;
  return q;
}

GridFunction resolve(std::span<const double> P, std::span<const double> X,
                     double ratio) {
  GridFunction target(P.size());
  const double denom = 1.0 + ratio;
  for (std::size_t i = 0; i < P.size(); ++i) {
    target[i] = (P[i] + ratio * X[i]) / denom;
  }
  return project_cone(target);
}

double self_pairwise_energy(std::span<const double> X, const PotentialSpec& K) {
  if (K.is_zero()) return 0.0;
  const double n = static_cast<double>(X.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < X.size(); ++i) {
    for (std::size_t k = 0; k < X.size(); ++k) acc += eval_unchecked(K, X[i] - X[k]);
  }
  return 0.5 * acc / (n * n);
}

double self_energy(std::span<const double> X, const PotentialSpec& K) {
  if (K.family == Family::newtonian) return K.amplitude * self_energy_linear(X);
  return self_pairwise_energy(X, K);
}

double mean_of(std::span<const double> X, const PotentialSpec& A) {
  if (A.is_zero()) return 0.0;
  double acc = 0.0;
  for (double x : X) acc += eval_unchecked(A, x);
  return acc / static_cast<double>(X.size());
}

bool admissible(std::span<const double> X, std::span<const double> V) {
  const GridFunction P = project_blocks(clusters(X), V);
  return std::equal(P.begin(), P.end(), V.begin());
}

double sup_distance(const std::vector<GridFunction>& X1,
                    const std::vector<GridFunction>& Y1,
                    const std::vector<GridFunction>& X2,
                    const std::vector<GridFunction>& Y2) {
  double sup = 0.0;
  for (std::size_t k = 0; k < X1.size(); ++k) {
    sup = std::max(sup, std::sqrt(grid_distance_squared(X1[k], X2[k]) +
                                  grid_distance_squared(Y1[k], Y2[k])));
  }
  return sup;
}

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

void LagrangianState::check() const {
  if (X.empty()) fail(ErrorKind::input, "Lagrangian state has an empty grid");
  for (const GridFunction* g : {&Y, &V, &W, &P, &Q}) {
    if (g->size() != X.size()) {
      fail(ErrorKind::input, "Lagrangian state fields differ in length");
    }
  }
  for (const GridFunction* g : {&X, &Y, &V, &W, &P, &Q}) {
    if (!all_finite(*g)) fail(ErrorKind::input, "Lagrangian state is not finite");
  }
  if (!std::isfinite(epsilon) || epsilon < 0.0) {
    fail(ErrorKind::input, "epsilon must be finite and >= 0");
  }
}

bool LagrangianState::monotone() const {
  return nondecreasing(X) && nondecreasing(Y);
}

LagrangianState make_state(GridFunction X, GridFunction Y, GridFunction V,
                           GridFunction W, double epsilon) {
  LagrangianState s;
  s.P.resize(X.size());
  s.Q.resize(Y.size());
  for (std::size_t i = 0; i < X.size() && i < V.size(); ++i) {
    s.P[i] = epsilon * V[i] + X[i];
  }
  for (std::size_t i = 0; i < Y.size() && i < W.size(); ++i) {
    s.Q[i] = epsilon * W[i] + Y[i];
  }
  s.X = std::move(X);
  s.Y = std::move(Y);
  s.V = std::move(V);
  s.W = std::move(W);
  s.epsilon = epsilon;
  s.check();
  return s;
}

std::vector<double> midpoints(std::size_t n) {
  std::vector<double> m(n);
  for (std::size_t i = 0; i < n; ++i) {
    m[i] = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
  }
  return m;
}

std::pair<GridFunction, GridFunction> sample_on_grid(const SpeciesState& s,
                                                     std::size_t n) {
  s.check();
  if (!s.ordered()) fail(ErrorKind::precondition, "sample_on_grid: unsorted species");
  if (n == 0) fail(ErrorKind::input, "sample_on_grid: empty grid");
  GridFunction X(n), V(n);
  std::size_t j = 0;
  double upper = s.masses[0];
  const std::vector<double> m = midpoints(n);
  for (std::size_t i = 0; i < n; ++i) {
    while (m[i] >= upper && j + 1 < s.size()) upper += s.masses[++j];
    X[i] = s.positions[j];
    V[i] = s.velocities[j];
  }
  return {std::move(X), std::move(V)};
}

ForceSample force_FG(std::span<const double> X, std::span<const double> Y,
                     const PotentialSet& potentials) {
  require_same_grid(X, Y, "force_FG");
  const double w = 1.0 / static_cast<double>(X.size());
  ForceSample out{GridFunction(X.size(), 0.0), GridFunction(Y.size(), 0.0)};
  add_self(X, potentials.K_rho, w, out.F);
  add_cross(X, Y, potentials.H_rho, w, -1.0, out.F);
  add_external(X, potentials.A_rho, -1.0, out.F);
  add_self(Y, potentials.K_eta, w, out.G);
  add_cross(Y, X, potentials.H_eta, w, -1.0, out.G);
  add_external(Y, potentials.A_eta, -1.0, out.G);
  return out;
}

ForceSample force_newtonian(std::span<const double> X, std::span<const double> Y,
                            const PotentialSet& potentials) {
  require_same_grid(X, Y, "force_newtonian");
  if (potentials.K_rho.family != Family::newtonian ||
      potentials.K_eta.family != Family::newtonian) {
    fail(ErrorKind::config, "force_newtonian: self kernels must be Newtonian");
  }
  if (!potentials.symmetric_cross()) {
    fail(ErrorKind::config, "force_newtonian: cross potentials must coincide");
  }
  const std::size_t n = X.size();
  const double w = 1.0 / static_cast<double>(n);
  const std::vector<double> m = midpoints(n);
  ForceSample out{GridFunction(n), GridFunction(n)};
  for (std::size_t i = 0; i < n; ++i) {
    out.F[i] = potentials.K_rho.amplitude * (2.0 * m[i] - 1.0);
    out.G[i] = potentials.K_eta.amplitude * (2.0 * m[i] - 1.0);
  }
  add_cross(X, Y, potentials.H_rho, w, 1.0, out.F);
  add_external(X, potentials.A_rho, 1.0, out.F);
  add_cross(Y, X, potentials.H_eta, w, 1.0, out.G);
  add_external(Y, potentials.A_eta, 1.0, out.G);
  return out;
}

double self_energy_linear(std::span<const double> X) {
  if (X.empty()) fail(ErrorKind::input, "self_energy_linear: empty grid");
  if (!nondecreasing(X)) {
    fail(ErrorKind::precondition, "self_energy_linear: X is not nondecreasing");
  }
  const std::size_t n = X.size();
  const std::vector<double> m = midpoints(n);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += (2.0 * m[i] - 1.0) * X[i];
  return acc / static_cast<double>(n);
}

LagrangianState step_second_order(const LagrangianState& state, double dt,
                                  const PotentialSet& potentials) {
  if (!(dt > 0.0)) fail(ErrorKind::input, "step_second_order: dt must be > 0");
  if (!(state.epsilon > 0.0)) {
    fail(ErrorKind::precondition, "step_second_order: epsilon must be > 0");
  }
  const ForceSample f = force_FG(state.X, state.Y, potentials);
  LagrangianState next = state;
  for (std::size_t i = 0; i < state.cells(); ++i) {
    next.P[i] += dt * f.F[i];
    next.Q[i] += dt * f.G[i];
  }
  const double ratio = state.epsilon / dt;
  next.X = resolve(next.P, state.X, ratio);
  next.Y = resolve(next.Q, state.Y, ratio);
  next.V = project_blocks(clusters(next.X), difference_quotient(next.X, state.X, dt));
  next.W = project_blocks(clusters(next.Y), difference_quotient(next.Y, state.Y, dt));
  next.time = state.time + dt;
  require_finite(next, "step_second_order");
  return next;
}

LagrangianState step_first_order(const LagrangianState& state, double dt,
                                 const PotentialSet& potentials) {
  if (!(dt > 0.0)) fail(ErrorKind::input, "step_first_order: dt must be > 0");
  const ForceSample f = force_FG(state.X, state.Y, potentials);
  GridFunction x(state.X), y(state.Y);
  for (std::size_t i = 0; i < state.cells(); ++i) {
    x[i] += dt * f.F[i];
    y[i] += dt * f.G[i];
  }
  LagrangianState next = state;
  next.X = project_cone(x);
  next.Y = project_cone(y);
  next.V = project_blocks(clusters(next.X), difference_quotient(next.X, state.X, dt));
  next.W = project_blocks(clusters(next.Y), difference_quotient(next.Y, state.Y, dt));
  next.P = next.X;
  next.Q = next.Y;
  next.time = state.time + dt;
  require_finite(next, "step_first_order");
  return next;
}

LagrangianState step_newtonian(const LagrangianState& state, double dt,
                               double sigma, const PotentialSet& potentials) {
  if (!(dt > 0.0)) fail(ErrorKind::input, "step_newtonian: dt must be > 0");
  if (!(sigma >= 0.0)) fail(ErrorKind::input, "step_newtonian: sigma must be >= 0");
  const ForceSample f = force_newtonian(state.X, state.Y, potentials);
  const ClusterPartition cx = clusters(state.X);
  const ClusterPartition cy = clusters(state.Y);
  const GridFunction PF = project_blocks(cx, f.F);
  const GridFunction PG = project_blocks(cy, f.G);
  GridFunction V = project_blocks(cx, state.V);
  GridFunction W = project_blocks(cy, state.W);

  const double decay = std::exp(-sigma * dt);
  const double gain = sigma > 0.0 ? -std::expm1(-sigma * dt) / sigma : dt;
  GridFunction x(state.X), y(state.Y);
  for (std::size_t i = 0; i < state.cells(); ++i) {
    V[i] = decay * V[i] - gain * PF[i];
    W[i] = decay * W[i] - gain * PG[i];
    x[i] += dt * V[i];
    y[i] += dt * W[i];
  }

  LagrangianState next = state;
  next.X = project_cone(x);
  next.Y = project_cone(y);
  next.V = project_blocks(clusters(next.X), V);
  next.W = project_blocks(clusters(next.Y), W);
  next.P = next.X;
  next.Q = next.Y;
  next.time = state.time + dt;
  require_finite(next, "step_newtonian");
  return next;
}

double energy_functional(const LagrangianState& state,
                         const PotentialSet& potentials) {
  require_same_grid(state.X, state.Y, "energy_functional");
  if (!potentials.symmetric_cross()) {
    fail(ErrorKind::config, "energy_functional: undefined for H_rho != H_eta");
  }
  const double n = static_cast<double>(state.cells());
  double e = 0.5 * grid_norm_squared(state.V) + 0.5 * grid_norm_squared(state.W);
  e += self_energy(state.X, potentials.K_rho) + self_energy(state.Y, potentials.K_eta);
  if (!potentials.H_rho.is_zero()) {
    double cross = 0.0;
    for (double y : state.Y) {
      for (double x : state.X) cross += eval_unchecked(potentials.H_rho, y - x);
    }
    e += cross / (n * n);
  }
  e += mean_of(state.X, potentials.A_rho) + mean_of(state.Y, potentials.A_eta);
  return e;
}

PicardResult picard_solve(const LagrangianState& initial,
                          const PotentialSet& potentials,
                          const PicardOptions& opt) {
  initial.check();
  check_valid(potentials);
  if (!(initial.epsilon > 0.0)) {
    fail(ErrorKind::precondition, "picard_solve: epsilon must be > 0");
  }
  if (!(opt.dt > 0.0) || !(opt.horizon > 0.0)) {
    fail(ErrorKind::config, "picard_solve: dt and horizon must be > 0");
  }
  if (!(opt.tol > 0.0) || opt.max_iters == 0) {
    fail(ErrorKind::config, "picard_solve: tol must be > 0 and max_iters >= 1");
  }

  // Window length h with L h <= 1/2, L bounding the Lipschitz constant of
  // X -> F in the grid norm.
  const double radius =
      2.0 * std::max(max_abs(initial.X), max_abs(initial.Y)) + 2.0;
  const double L =
      2.0 * std::max(derivative_lipschitz(potentials.K_rho, radius) +
                         derivative_lipschitz(potentials.H_rho, radius) +
                         derivative_lipschitz(potentials.A_rho, radius),
                     derivative_lipschitz(potentials.K_eta, radius) +
                         derivative_lipschitz(potentials.H_eta, radius) +
                         derivative_lipschitz(potentials.A_eta, radius));
  const auto total_steps =
      static_cast<std::size_t>(std::ceil(opt.horizon / opt.dt - 1e-9));
  std::size_t window_steps = total_steps;
  if (L > 0.0) {
    window_steps = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::floor(0.5 / (L * opt.dt))), 1, total_steps);
  }

  const double ratio = initial.epsilon / opt.dt;
  PicardResult result;
  result.times.push_back(initial.time);
  result.X.push_back(initial.X);
  result.Y.push_back(initial.Y);
  LagrangianState start = initial;

  std::size_t done = 0;
  while (done < total_steps) {
    const std::size_t K = std::min(window_steps, total_steps - done);
    std::vector<GridFunction> X(K + 1, start.X), Y(K + 1, start.Y);
    std::vector<GridFunction> P(K + 1, start.P), Q(K + 1, start.Q);
    double previous = 0.0;
    std::size_t sweep = 0;
    while (true) {
      ++sweep;
      std::vector<GridFunction> Xn(K + 1), Yn(K + 1);
      Xn[0] = start.X;
      Yn[0] = start.Y;
      for (std::size_t k = 0; k < K; ++k) {
        const ForceSample f = force_FG(X[k], Y[k], potentials);
        for (std::size_t i = 0; i < start.cells(); ++i) {
          P[k + 1][i] = P[k][i] + opt.dt * f.F[i];
          Q[k + 1][i] = Q[k][i] + opt.dt * f.G[i];
        }
        Xn[k + 1] = resolve(P[k + 1], Xn[k], ratio);
        Yn[k + 1] = resolve(Q[k + 1], Yn[k], ratio);
      }
      const double d = sup_distance(Xn, Yn, X, Y);
      if (!std::isfinite(d)) {
        fail(ErrorKind::numerical, "picard_solve: iterate is not finite");
      }
      if (sweep > 1 && previous > 0.0) result.last_ratio = d / previous;
      previous = d;
      X = std::move(Xn);
      Y = std::move(Yn);
      if (d <= opt.tol) break;
      if (sweep >= opt.max_iters) {
        fail(ErrorKind::iteration,
             fmt::format("picard_solve: no convergence in {} iterations "
                         "(last contraction ratio {:.6g}, distance {:.6g})",
                         opt.max_iters, result.last_ratio, d));
      }
    }
    // The final sweep only confirms the previous iterate.
    result.iterations = std::max(result.iterations, std::max<std::size_t>(sweep - 1, 1));
    ++result.windows;

    LagrangianState end = start;
    end.X = X[K];
    end.Y = Y[K];
    end.P = P[K];
    end.Q = Q[K];
    end.V = project_blocks(clusters(end.X), difference_quotient(X[K], X[K - 1], opt.dt));
    end.W = project_blocks(clusters(end.Y), difference_quotient(Y[K], Y[K - 1], opt.dt));
    for (std::size_t k = 1; k <= K; ++k) {
      result.times.push_back(initial.time + static_cast<double>(done + k) * opt.dt);
      result.X.push_back(std::move(X[k]));
      result.Y.push_back(std::move(Y[k]));
    }
    done += K;
    end.time = result.times.back();
    start = std::move(end);
  }
  result.final_state = std::move(start);
  return result;
}

std::string_view to_string(LagrangianScheme scheme) noexcept {
  switch (scheme) {
    case LagrangianScheme::second_order: return "second_order";
    case LagrangianScheme::first_order: return "first_order";
    case LagrangianScheme::newtonian: return "newtonian";
  }
  return "unknown";
}

LagrangianRun simulate_lagrangian(LagrangianState state,
                                  const PotentialSet& potentials,
                                  const LagrangianOptions& opt) {
  state.check();
  check_valid(potentials);
  if (!state.monotone()) {
    fail(ErrorKind::input, "initial X and Y must be nondecreasing");
  }
  if (!(opt.dt > 0.0)) fail(ErrorKind::config, "dt must be > 0");
  if (!(opt.horizon > 0.0)) fail(ErrorKind::config, "horizon T must be > 0");
  if (opt.output_stride == 0) fail(ErrorKind::config, "output_stride must be >= 1");

  const bool newtonian = opt.scheme == LagrangianScheme::newtonian;
  const bool track_energy =
      newtonian && opt.track_energy && potentials.symmetric_cross();
  if (newtonian) {
    state.V = project_blocks(clusters(state.X), state.V);
    state.W = project_blocks(clusters(state.Y), state.W);
  }

  const GridFunction X0 = state.X, Y0 = state.Y;
  LagrangianRun run;
  auto record = [&] {
    run.snapshots.push_back({state.time, state.X, state.Y, state.V, state.W});
    LagrangianDiagnostics d;
    d.time = state.time;
    if (track_energy) d.energy = energy_functional(state, potentials);
    d.norm_X = grid_norm(state.X);
    d.norm_Y = grid_norm(state.Y);
    d.norm_V = grid_norm(state.V);
    d.norm_W = grid_norm(state.W);
    d.clusters_X = clusters(state.X).count();
    d.clusters_Y = clusters(state.Y).count();
    d.w2_reference = std::sqrt(grid_distance_squared(state.X, X0) +
                               grid_distance_squared(state.Y, Y0));
    run.diagnostics.push_back(d);
  };

  const auto steps = static_cast<std::size_t>(std::ceil(opt.horizon / opt.dt - 1e-9));
  const double t0 = state.time;
  double energy = track_energy ? energy_functional(state, potentials) : 0.0;
  record();
  for (std::size_t step = 1; step <= steps; ++step) {
    switch (opt.scheme) {
      case LagrangianScheme::second_order:
        state = step_second_order(state, opt.dt, potentials);
        break;
      case LagrangianScheme::first_order:
        state = step_first_order(state, opt.dt, potentials);
        break;
      case LagrangianScheme::newtonian:
        state = step_newtonian(state, opt.dt, opt.sigma, potentials);
        break;
    }
    state.time = t0 + static_cast<double>(step) * opt.dt;
    if (!state.monotone()) ++run.monotonicity_violations;
    if (!admissible(state.X, state.V) || !admissible(state.Y, state.W)) {
      ++run.admissibility_violations;
    }
    if (track_energy) {
      const double e = energy_functional(state, potentials);
      run.max_energy_increase = std::max(run.max_energy_increase, e - energy);
      energy = e;
      ++run.energy_steps;
    }
    if (step % opt.output_stride == 0 || step == steps) record();
  }
  return run;
}

}  // namespace stickylab
