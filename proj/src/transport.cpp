#include "stickylab/transport.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "stickylab/error.hpp"

namespace stickylab {

AtomicMeasure::AtomicMeasure(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
  if (atoms_.empty()) fail(ErrorKind::input, "atomic measure has no atoms");
  double total = 0.0;
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    const Atom& a = atoms_[i];
    if (!std::isfinite(a.position) || !std::isfinite(a.mass)) {
      fail(ErrorKind::input, fmt::format("atom {} is not finite", i));
    }
    if (!(a.mass > 0.0)) {
      fail(ErrorKind::input, fmt::format("atom {} has non-positive mass", i));
    }
    if (i > 0 && a.position < atoms_[i - 1].position) {
      fail(ErrorKind::input, fmt::format("atom {} is out of order", i));
    }
    total += a.mass;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    fail(ErrorKind::input,
         fmt::format("total mass {:.17g} differs from 1", total));
  }
}

AtomicMeasure AtomicMeasure::from_unsorted(std::vector<Atom> atoms) {
  std::stable_sort(atoms.begin(), atoms.end(),
                   [](const Atom& a, const Atom& b) { return a.position < b.position; });
  return AtomicMeasure(std::move(atoms));
}

AtomicMeasure AtomicMeasure::dirac(double position) {
  return AtomicMeasure({{position, 1.0}});
}

AtomicMeasure AtomicMeasure::equal_masses(std::span<const double> positions) {
  std::vector<Atom> atoms;
  atoms.reserve(positions.size());
  const double m = 1.0 / static_cast<double>(positions.size());
  for (double x : positions) atoms.push_back({x, m});
  return AtomicMeasure(std::move(atoms));
}

PseudoInverse::PseudoInverse(std::vector<double> breakpoints,
                             std::vector<double> values)
    : breaks_(std::move(breakpoints)), values_(std::move(values)) {
  if (values_.empty() || breaks_.size() != values_.size() + 1) {
    fail(ErrorKind::input, "pseudo-inverse needs one value per cell");
  }
  if (breaks_.front() != 0.0 || breaks_.back() != 1.0) {
    fail(ErrorKind::input, "pseudo-inverse breakpoints must span [0, 1]");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!(breaks_[i + 1] > breaks_[i])) {
      fail(ErrorKind::input, fmt::format("cell {} has non-positive width", i));
    }
    if (!std::isfinite(values_[i])) {
      fail(ErrorKind::input, fmt::format("cell {} value is not finite", i));
    }
    if (i > 0 && values_[i] < values_[i - 1]) {
      fail(ErrorKind::input,
           fmt::format("pseudo-inverse decreases at cell {}", i));
    }
  }
}

PseudoInverse PseudoInverse::on_uniform_grid(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<double> breaks(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    breaks[i] = static_cast<double>(i) / static_cast<double>(n);
  }
  return PseudoInverse(std::move(breaks), {values.begin(), values.end()});
}

double PseudoInverse::operator()(double m) const {
  auto it = std::upper_bound(breaks_.begin(), breaks_.end(), m);
  std::size_t cell = it == breaks_.begin()
                         ? 0
                         : static_cast<std::size_t>(it - breaks_.begin()) - 1;
  return values_[std::min(cell, values_.size() - 1)];
}

std::vector<IndexRange> ClusterPartition::nontrivial() const {
  std::vector<IndexRange> out;
  for (const IndexRange& r : runs) {
    if (r.size() > 1) out.push_back(r);
  }
  return out;
}

PseudoInverse pseudo_inverse(const AtomicMeasure& mu) {
  const auto& atoms = mu.atoms();
  std::vector<double> breaks(atoms.size() + 1);
  std::vector<double> values(atoms.size());
  double cumulative = 0.0;
  breaks[0] = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    cumulative += atoms[i].mass;
    breaks[i + 1] = cumulative;
    values[i] = atoms[i].position;
  }
  breaks.back() = 1.0;
  return PseudoInverse(std::move(breaks), std::move(values));
}

AtomicMeasure to_measure(const PseudoInverse& X) {
  std::vector<Atom> atoms;
  const auto& v = X.values();
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double w = X.width(i);
    if (!atoms.empty() && atoms.back().position == v[i]) {
      atoms.back().mass += w;
    } else {
      atoms.push_back({v[i], w});
    }
  }
  return AtomicMeasure(std::move(atoms));
}

constexpr double kBreakpointSnap = 1e-13;

double w2_squared(const PseudoInverse& X, const PseudoInverse& Y) {
  const auto& bx = X.breakpoints();
  const auto& by = Y.breakpoints();
  const auto& vx = X.values();
  const auto& vy = Y.values();
  std::size_t i = 0, j = 0;
  double m = 0.0;
  double sum = 0.0;
  while (i < vx.size() && j < vy.size()) {
    const double next = std::min(bx[i + 1], by[j + 1]);
    const double d = vx[i] - vy[j];
    sum += (next - m) * d * d;
    m = next;
    // Breakpoints built by different summation orders differ by roundoff;
    // treating them as one keeps identical measures at distance exactly 0.
    if (bx[i + 1] <= next + kBreakpointSnap) ++i;
    if (by[j + 1] <= next + kBreakpointSnap) ++j;
  }
  return sum;
}

double w2(const AtomicMeasure& mu, const AtomicMeasure& nu) {
  return std::sqrt(w2_squared(pseudo_inverse(mu), pseudo_inverse(nu)));
}

double product_w2(const MeasurePair& a, const MeasurePair& b) {
  const double d1 = w2(a.first, b.first);
  const double d2 = w2(a.second, b.second);
  return std::sqrt(d1 * d1 + d2 * d2);
}

std::vector<double> project_cone(std::span<const double> values,
                                 std::span<const double> weights) {
  if (values.size() != weights.size()) {
    fail(ErrorKind::input,
         fmt::format("project_cone: {} values but {} weights", values.size(),
                     weights.size()));
  }
  struct Block {
    double weighted_sum;
    double weight;
    std::size_t count;
    double mean() const { return weighted_sum / weight; }
  };
  std::vector<Block> blocks;
  blocks.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(weights[i] > 0.0) || !std::isfinite(weights[i])) {
      fail(ErrorKind::input,
           fmt::format("project_cone: weight {} is not positive", i));
    }
    if (!std::isfinite(values[i])) {
      fail(ErrorKind::input, fmt::format("project_cone: value {} is not finite", i));
    }
    blocks.push_back({weights[i] * values[i], weights[i], 1});
    while (blocks.size() >= 2 &&
           blocks[blocks.size() - 2].mean() > blocks.back().mean()) {
      Block last = blocks.back();
      blocks.pop_back();
      Block& prev = blocks.back();
      prev.weighted_sum += last.weighted_sum;
      prev.weight += last.weight;
      prev.count += last.count;
    }
  }
  std::vector<double> out;
  out.reserve(values.size());
  for (const Block& b : blocks) {
    // A singleton keeps its input bitwise; w * v / w can round.
    const double mean = b.count == 1 ? values[out.size()] : b.mean();
    out.insert(out.end(), b.count, mean);
  }
  return out;
}

std::vector<double> project_cone(std::span<const double> values) {
  const std::vector<double> ones(values.size(), 1.0);
  return project_cone(values, ones);
}

ClusterPartition clusters(std::span<const double> values, double tol) {
  ClusterPartition p;
  p.cells = values.size();
  std::size_t begin = 0;
  for (std::size_t i = 1; i <= values.size(); ++i) {
    if (i == values.size() || !(std::abs(values[i] - values[i - 1]) <= tol)) {
      p.runs.push_back({begin, i});
      begin = i;
    }
  }
  return p;
}

ClusterPartition clusters(const PseudoInverse& X, double tol) {
  return clusters(X.values(), tol);
}

GridFunction project_blocks(const ClusterPartition& partition,
                            std::span<const double> U) {
  if (partition.cells != U.size()) {
    fail(ErrorKind::input,
         fmt::format("project_blocks: partition of {} cells applied to {} values",
                     partition.cells, U.size()));
  }
  GridFunction out(U.begin(), U.end());
  for (const IndexRange& r : partition.runs) {
    if (r.size() < 2) continue;
    // Offsets from the first entry keep a block that is already constant
    // bitwise unchanged.
    const double base = U[r.begin];
    double offset = 0.0;
    for (std::size_t i = r.begin; i < r.end; ++i) offset += U[i] - base;
    const double mean = base + offset / static_cast<double>(r.size());
    std::fill(out.begin() + static_cast<std::ptrdiff_t>(r.begin),
              out.begin() + static_cast<std::ptrdiff_t>(r.end), mean);
  }
  return out;
}

double grid_norm_squared(std::span<const double> U) {
  double s = 0.0;
  for (double u : U) s += u * u;
  return U.empty() ? 0.0 : s / static_cast<double>(U.size());
}

double grid_norm(std::span<const double> U) {
  return std::sqrt(grid_norm_squared(U));
}

double grid_distance_squared(std::span<const double> U,
                             std::span<const double> V) {
  if (U.size() != V.size()) {
    fail(ErrorKind::input, "grid_distance: size mismatch");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < U.size(); ++i) {
    const double d = U[i] - V[i];
    s += d * d;
  }
  return U.empty() ? 0.0 : s / static_cast<double>(U.size());
}

}  // namespace stickylab
