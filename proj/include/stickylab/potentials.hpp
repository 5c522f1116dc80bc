#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace stickylab {

enum class Family { gaussian_exp, power, newtonian, quadratic_well, zero };

std::string_view to_string(Family family) noexcept;
std::optional<Family> parse_family(std::string_view name) noexcept;

/// Closed-form radial potential, evaluated in the shifted variable
/// r = x - center:
///   gaussian_exp    amplitude * exp(-scale * |r|^exponent)
///   power           amplitude * |r|^exponent
///   newtonian       amplitude * |r|
///   quadratic_well  amplitude * |r|^2
///   zero            0
/// Interaction kernels use center = 0; external wells may be shifted.
struct PotentialSpec {
  Family family = Family::zero;
  double amplitude = 0.0;
  double exponent = 2.0;
  double scale = 1.0;
  double center = 0.0;

  static PotentialSpec zero() { return {}; }
  static PotentialSpec gaussian_exp(double amplitude, double scale,
                                    double exponent) {
    return {Family::gaussian_exp, amplitude, exponent, scale, 0.0};
  }
  static PotentialSpec power(double amplitude, double exponent) {
    return {Family::power, amplitude, exponent, 1.0, 0.0};
  }
  static PotentialSpec newtonian(double amplitude = 1.0) {
    return {Family::newtonian, amplitude, 1.0, 1.0, 0.0};
  }
  static PotentialSpec quadratic_well(double amplitude, double center = 0.0) {
    return {Family::quadratic_well, amplitude, 2.0, 1.0, center};
  }

  bool is_zero() const noexcept {
    return family == Family::zero || amplitude == 0.0;
  }

  friend bool operator==(const PotentialSpec&, const PotentialSpec&) = default;
};

/// Throws Error(config) when the parameters are outside the family's domain
/// (non-finite values, scale <= 0, exponent < 1, non-positive Newtonian
/// amplitude).
void check_valid(const PotentialSpec& spec);

double eval(const PotentialSpec& spec, double x);
double eval_derivative(const PotentialSpec& spec, double x);

/// Unchecked variants for inner loops; the caller guarantees a valid spec
/// and finite argument.
double eval_unchecked(const PotentialSpec& spec, double x) noexcept;
double derivative_unchecked(const PotentialSpec& spec, double x) noexcept;

/// The six potential slots of a two-species system.
struct PotentialSet {
  PotentialSpec K_rho;  // self-interaction, first species
  PotentialSpec K_eta;  // self-interaction, second species
  PotentialSpec H_rho;  // cross-interaction felt by the first species
  PotentialSpec H_eta;  // cross-interaction felt by the second species
  PotentialSpec A_rho;  // external potential, first species
  PotentialSpec A_eta;  // external potential, second species

  bool symmetric_cross() const noexcept { return H_rho == H_eta; }

  friend bool operator==(const PotentialSet&, const PotentialSet&) = default;
};

void check_valid(const PotentialSet& set);

struct ConditionCheck {
  bool ok = true;
  std::optional<double> witness;  // sample point violating the condition
};

/// Grid-sampled admissibility conditions for one potential. Conditions are
/// evaluated in the centred variable r = x - center.
struct AdmissibilityReport {
  bool satisfies_A = true;   // even about the centre, C^1
  bool satisfies_SQ = true;  // K <= C (1 + r^2)
  bool satisfies_SL = true;  // |K'| <= C (1 + |r|)
  bool satisfies_AT = true;  // K'(r) r >= 0
  bool satisfies_H1 = true;  // A >= lambda r^2, lambda > 0
  bool satisfies_H2 = true;  // r A'(r) >= alpha r^2, alpha > 0

  // Advisory clauses; never enforced by the solvers.
  bool vanishes_at_center = true;  // K(0) = 0
  bool nonnegative = true;         // K >= 0

  ConditionCheck A, SQ, SL, AT, H1, H2;

  std::optional<double> witness;  // first witness among the failed conditions

  double C_SQ = 0.0;
  double C_SL = 0.0;
  double lambda = 0.0;
  double alpha = 0.0;
  double derivative_lipschitz = 0.0;  // sup |K''| estimated on the grid
};

AdmissibilityReport validate(const PotentialSpec& spec, double grid_radius,
                             int n_samples);

/// Lipschitz constant of K' on [-radius, radius], by finite differences of
/// the analytic derivative on a uniform grid.
double derivative_lipschitz(const PotentialSpec& spec, double radius,
                            int n_samples = 2001);

}  // namespace stickylab
