#include "stickylab/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <fmt/format.h>

#include "stickylab/error.hpp"

namespace stickylab {

namespace {

double sign(double r) noexcept { return (r > 0.0) - (r < 0.0); }

// |r|^p with the common integer exponents unrolled; pow dominates the force
// loops otherwise.
double abs_pow(double r, double p) noexcept {
  const double a = std::abs(r);
  if (p == 1.0) return a;
  if (p == 2.0) return a * a;
  if (p == 3.0) return a * a * a;
  if (p == 4.0) return (a * a) * (a * a);
  return std::pow(a, p);
}

constexpr double kGrowthSlack = 1e-6;

// Log-log slope of g between the two outermost samples on each side of the
// grid, restricted to |r| > 1. Returns -inf for a side where g is not
// positive at both points, and nullopt when the grid has no such pair.
struct EdgeGrowth {
  double slope;
  double at;  // outermost sample on that side
};

std::optional<EdgeGrowth> edge_growth(const std::vector<double>& r,
                                      const std::vector<double>& g,
                                      bool worst_is_max) {
  const std::size_t n = r.size();
  std::optional<EdgeGrowth> result;
  auto consider = [&](std::size_t outer, std::size_t inner) {
    const double r1 = std::abs(r[inner]);
    const double r2 = std::abs(r[outer]);
    if (r1 <= 1.0 || r2 <= r1) return;
    double slope = -std::numeric_limits<double>::infinity();
    if (g[inner] > 0.0 && g[outer] > 0.0) {
      slope = std::log(g[outer] / g[inner]) / std::log(r2 / r1);
    }
    if (!result || (worst_is_max ? slope > result->slope
                                 : slope < result->slope)) {
      result = EdgeGrowth{slope, r[outer]};
    }
  };
  if (n >= 2) {
    consider(n - 1, n - 2);
    consider(0, 1);
  }
  return result;
}

}  // namespace

std::string_view to_string(Family family) noexcept {
  switch (family) {
    case Family::gaussian_exp: return "gaussian_exp";
    case Family::power: return "power";
    case Family::newtonian: return "newtonian";
    case Family::quadratic_well: return "quadratic_well";
    case Family::zero: return "zero";
  }
  return "zero";
}

std::optional<Family> parse_family(std::string_view name) noexcept {
  for (Family f : {Family::gaussian_exp, Family::power, Family::newtonian,
                   Family::quadratic_well, Family::zero}) {
    if (name == to_string(f)) return f;
  }
  return std::nullopt;
}

void check_valid(const PotentialSpec& spec) {
  auto bad = [&](const std::string& why) {
    fail(ErrorKind::config,
         fmt::format("invalid {} potential: {}", to_string(spec.family), why));
  };
  if (!std::isfinite(spec.amplitude) || !std::isfinite(spec.exponent) ||
      !std::isfinite(spec.scale) || !std::isfinite(spec.center)) {
    bad("non-finite parameter");
  }
  switch (spec.family) {
    case Family::gaussian_exp:
      if (spec.scale <= 0.0) bad("scale must be > 0");
      if (spec.exponent < 1.0) bad("exponent must be >= 1");
      break;
    case Family::power:
      if (spec.exponent < 1.0) bad("exponent must be >= 1");
      break;
    case Family::newtonian:
      if (spec.amplitude <= 0.0) bad("amplitude must be > 0");
      break;
    case Family::quadratic_well:
    case Family::zero:
      break;
  }
}

void check_valid(const PotentialSet& set) {
  for (const PotentialSpec* s : {&set.K_rho, &set.K_eta, &set.H_rho,
                                 &set.H_eta, &set.A_rho, &set.A_eta}) {
    check_valid(*s);
  }
  for (const PotentialSpec* s : {&set.K_rho, &set.K_eta, &set.H_rho, &set.H_eta}) {
    if (s->center != 0.0) {
      fail(ErrorKind::config, "interaction kernels must be centred at 0");
    }
  }
}

double eval_unchecked(const PotentialSpec& spec, double x) noexcept {
  const double r = x - spec.center;
  switch (spec.family) {
    case Family::gaussian_exp:
      return spec.amplitude * std::exp(-spec.scale * abs_pow(r, spec.exponent));
    case Family::power:
      return spec.amplitude * abs_pow(r, spec.exponent);
    case Family::newtonian:
      return spec.amplitude * std::abs(r);
    case Family::quadratic_well:
      return spec.amplitude * r * r;
    case Family::zero:
      return 0.0;
  }
  return 0.0;
}

double derivative_unchecked(const PotentialSpec& spec, double x) noexcept {
  const double r = x - spec.center;
  switch (spec.family) {
    case Family::gaussian_exp: {
      const double p = spec.exponent;
      const double a = spec.scale;
      return -spec.amplitude * a * p * abs_pow(r, p - 1.0) * sign(r) *
             std::exp(-a * abs_pow(r, p));
    }
    case Family::power:
      return spec.amplitude * spec.exponent * abs_pow(r, spec.exponent - 1.0) *
             sign(r);
    case Family::newtonian:
      return spec.amplitude * sign(r);
    case Family::quadratic_well:
      return 2.0 * spec.amplitude * r;
    case Family::zero:
      return 0.0;
  }
  return 0.0;
}

double eval(const PotentialSpec& spec, double x) {
  check_valid(spec);
  if (!std::isfinite(x)) fail(ErrorKind::input, "eval: non-finite argument");
  return eval_unchecked(spec, x);
}

double eval_derivative(const PotentialSpec& spec, double x) {
  check_valid(spec);
  if (!std::isfinite(x)) {
    fail(ErrorKind::input, "eval_derivative: non-finite argument");
  }
  return derivative_unchecked(spec, x);
}

double derivative_lipschitz(const PotentialSpec& spec, double radius,
                            int n_samples) {
  check_valid(spec);
  if (n_samples < 2 || !(radius > 0.0)) return 0.0;
  const double h = 2.0 * radius / (n_samples - 1);
  double lip = 0.0;
  double prev = derivative_unchecked(spec, spec.center - radius);
  for (int k = 1; k < n_samples; ++k) {
    const double cur = derivative_unchecked(spec, spec.center - radius + k * h);
    lip = std::max(lip, std::abs(cur - prev) / h);
    prev = cur;
  }
  return lip;
}

AdmissibilityReport validate(const PotentialSpec& spec, double grid_radius,
                             int n_samples) {
  check_valid(spec);
  if (n_samples < 3) fail(ErrorKind::input, "validate: n_samples must be >= 3");
  if (!(grid_radius > 0.0) || !std::isfinite(grid_radius)) {
    fail(ErrorKind::input, "validate: grid_radius must be finite and > 0");
  }

  const auto n = static_cast<std::size_t>(n_samples);
  std::vector<double> r(n), k(n), dk(n);
  for (std::size_t i = 0; i < n; ++i) {
    r[i] = -grid_radius + 2.0 * grid_radius * static_cast<double>(i) /
                              static_cast<double>(n - 1);
    k[i] = eval_unchecked(spec, spec.center + r[i]);
    dk[i] = derivative_unchecked(spec, spec.center + r[i]);
  }

  AdmissibilityReport rep;

  // (A): evenness of K and oddness of K' about the centre.
  for (std::size_t i = 0; i < n; ++i) {
    const double km = eval_unchecked(spec, spec.center - r[i]);
    const double dm = derivative_unchecked(spec, spec.center - r[i]);
    const bool even = std::abs(k[i] - km) <= 1e-12 * (1.0 + std::abs(k[i]));
    const bool odd = std::abs(dk[i] + dm) <= 1e-12 * (1.0 + std::abs(dk[i]));
    if (!(even && odd)) {
      rep.A = {false, r[i]};
      break;
    }
  }
  rep.vanishes_at_center = std::abs(eval_unchecked(spec, spec.center)) <= 1e-14;
  rep.nonnegative =
      std::all_of(k.begin(), k.end(), [](double v) { return v >= 0.0; });

  // (SQ): K <= C (1 + r^2).
  {
    std::vector<double> ratio(n);
    for (std::size_t i = 0; i < n; ++i) ratio[i] = k[i] / (1.0 + r[i] * r[i]);
    rep.C_SQ = std::max(0.0, *std::max_element(ratio.begin(), ratio.end()));
    if (auto g = edge_growth(r, k, true); g && g->slope > 2.0 + kGrowthSlack) {
      rep.SQ = {false, g->at};
    }
  }

  // (SL): |K'| <= C (1 + |r|).
  {
    std::vector<double> abs_dk(n);
    for (std::size_t i = 0; i < n; ++i) {
      abs_dk[i] = std::abs(dk[i]);
      rep.C_SL = std::max(rep.C_SL, abs_dk[i] / (1.0 + std::abs(r[i])));
    }
    if (auto g = edge_growth(r, abs_dk, true);
        g && g->slope > 1.0 + kGrowthSlack) {
      rep.SL = {false, g->at};
    }
  }

  // (AT): K'(r) r >= 0.
  for (std::size_t i = 0; i < n; ++i) {
    if (dk[i] * r[i] < 0.0) {
      rep.AT = {false, r[i]};
      break;
    }
  }

  // (H1), (H2): coercivity of external potentials.
  {
    double lambda = std::numeric_limits<double>::infinity();
    double alpha = std::numeric_limits<double>::infinity();
    std::optional<double> lambda_at, alpha_at;
    std::vector<double> rdk(n);
    for (std::size_t i = 0; i < n; ++i) {
      rdk[i] = r[i] * dk[i];
      if (r[i] == 0.0) continue;
      const double r2 = r[i] * r[i];
      if (k[i] / r2 < lambda) {
        lambda = k[i] / r2;
        lambda_at = r[i];
      }
      if (rdk[i] / r2 < alpha) {
        alpha = rdk[i] / r2;
        alpha_at = r[i];
      }
    }
    rep.lambda = lambda;
    rep.alpha = alpha;
    if (!(lambda > 0.0)) {
      rep.H1 = {false, lambda_at};
    } else if (auto g = edge_growth(r, k, false);
               g && g->slope < 2.0 - kGrowthSlack) {
      rep.H1 = {false, g->at};
    }
    if (!(alpha > 0.0)) {
      rep.H2 = {false, alpha_at};
    } else if (auto g = edge_growth(r, rdk, false);
               g && g->slope < 2.0 - kGrowthSlack) {
      rep.H2 = {false, g->at};
    }
  }

  rep.derivative_lipschitz = derivative_lipschitz(spec, grid_radius, n_samples);

  rep.satisfies_A = rep.A.ok;
  rep.satisfies_SQ = rep.SQ.ok;
  rep.satisfies_SL = rep.SL.ok;
  rep.satisfies_AT = rep.AT.ok;
  rep.satisfies_H1 = rep.H1.ok;
  rep.satisfies_H2 = rep.H2.ok;
  for (const ConditionCheck* c : {&rep.A, &rep.SQ, &rep.SL, &rep.AT, &rep.H1,
                                  &rep.H2}) {
    if (!c->ok) {
      rep.witness = c->witness.value_or(0.0);
      break;
    }
  }
  return rep;
}

}  // namespace stickylab
