#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace stickylab {

/// Values of a function on the uniform n-cell grid of (0,1). Cell i is
/// [i/n, (i+1)/n); no monotonicity implied.
using GridFunction = std::vector<double>;

struct Atom {
  double position;
  double mass;
};

/// Probability measure with finitely many atoms, sorted by position.
class AtomicMeasure {
 public:
  /// Validates positivity, finiteness, ordering and unit total mass
  /// (within 1e-12). Throws Error(input).
  explicit AtomicMeasure(std::vector<Atom> atoms);

  /// Sorts by position (stable) before validating.
  static AtomicMeasure from_unsorted(std::vector<Atom> atoms);
  static AtomicMeasure dirac(double position);
  /// n atoms of mass 1/n at the given (nondecreasing) positions.
  static AtomicMeasure equal_masses(std::span<const double> positions);

  const std::vector<Atom>& atoms() const noexcept { return atoms_; }
  std::size_t size() const noexcept { return atoms_.size(); }

 private:
  std::vector<Atom> atoms_;
};

/// Quantile function of a probability measure: a nondecreasing step function
/// on (0,1) with X(m) = values[i] for m in [breakpoints[i], breakpoints[i+1]).
class PseudoInverse {
 public:
  /// Throws Error(input) unless breakpoints run strictly increasing from 0
  /// to 1, there is one value per cell and values are nondecreasing.
  PseudoInverse(std::vector<double> breakpoints, std::vector<double> values);

  /// Step function on the uniform grid with the given cell values.
  static PseudoInverse on_uniform_grid(std::span<const double> values);

  const std::vector<double>& breakpoints() const noexcept { return breaks_; }
  const std::vector<double>& values() const noexcept { return values_; }
  std::size_t cells() const noexcept { return values_.size(); }
  double width(std::size_t cell) const { return breaks_[cell + 1] - breaks_[cell]; }

  double operator()(double m) const;

 private:
  std::vector<double> breaks_;
  std::vector<double> values_;
};

/// Maximal runs of consecutive cells on which a pseudo-inverse is constant.
/// Every cell belongs to exactly one run; singleton runs are included.
struct IndexRange {
  std::size_t begin;
  std::size_t end;  // one past the last cell
  std::size_t size() const noexcept { return end - begin; }
  friend bool operator==(const IndexRange&, const IndexRange&) = default;
};

struct ClusterPartition {
  std::vector<IndexRange> runs;
  std::size_t cells = 0;

  std::size_t count() const noexcept { return runs.size(); }
  /// Runs with more than one cell.
  std::vector<IndexRange> nontrivial() const;
};

PseudoInverse pseudo_inverse(const AtomicMeasure& mu);
AtomicMeasure to_measure(const PseudoInverse& X);

/// Exact 2-Wasserstein distance via the L^2(0,1) distance of the quantile
/// functions on the common refinement of their breakpoints.
double w2(const AtomicMeasure& mu, const AtomicMeasure& nu);
double w2_squared(const PseudoInverse& X, const PseudoInverse& Y);

using MeasurePair = std::pair<AtomicMeasure, AtomicMeasure>;
double product_w2(const MeasurePair& a, const MeasurePair& b);

/// Weighted least-squares projection onto nondecreasing sequences by
/// pool-adjacent-violators. Values inside a pooled block are bitwise equal.
std::vector<double> project_cone(std::span<const double> values,
                                 std::span<const double> weights);
/// Equal weights.
std::vector<double> project_cone(std::span<const double> values);

/// Runs of consecutive values whose neighbouring differences are <= tol.
ClusterPartition clusters(std::span<const double> values, double tol = 0.0);
ClusterPartition clusters(const PseudoInverse& X, double tol = 0.0);

/// Replaces U by its average on every run of the partition (uniform cells).
GridFunction project_blocks(const ClusterPartition& partition,
                            std::span<const double> U);

/// Mean-square norm on the uniform grid: (1/n) sum U_i^2.
double grid_norm_squared(std::span<const double> U);
double grid_norm(std::span<const double> U);
double grid_distance_squared(std::span<const double> U,
                             std::span<const double> V);

}  // namespace stickylab
