#pragma once

// Independent reference computations and random generators shared by the
// unit tests and the acceptance binary. Nothing here calls the library's
// numerics.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "stickylab/rng.hpp"
#include "stickylab/transport.hpp"

namespace oracle {

using stickylab::Atom;
using stickylab::AtomicMeasure;
using stickylab::Rng;

inline std::size_t pick(Rng& rng, std::size_t lo, std::size_t hi) {
  return lo + static_cast<std::size_t>(rng.uniform() * static_cast<double>(hi - lo + 1));
}

/// Between 1 and max_atoms atoms; positions in [-2, 2], occasionally
/// repeated, masses bounded away from zero.
inline AtomicMeasure random_measure(Rng& rng, std::size_t max_atoms) {
  const std::size_t k = pick(rng, 1, max_atoms);
  std::vector<Atom> atoms(k);
  double total = 0.0;
  for (Atom& a : atoms) {
    a.position = rng.uniform(-2.0, 2.0);
    a.mass = rng.uniform(0.05, 1.0);
    total += a.mass;
  }
  if (k > 1 && rng.uniform() < 0.2) atoms[1].position = atoms[0].position;
  for (Atom& a : atoms) a.mass /= total;
  return AtomicMeasure::from_unsorted(std::move(atoms));
}

/// Nondecreasing sequence with a mix of ties and jumps.
inline std::vector<double> random_monotone(Rng& rng, std::size_t n, double start = -1.0) {
  std::vector<double> x(n);
  double v = start + rng.uniform(-0.5, 0.5);
  for (double& xi : x) {
    if (rng.uniform() > 0.3) v += rng.uniform(0.0, 2.0 / static_cast<double>(n));
    xi = v;
  }
  return x;
}

/// Cost of the monotone (north-west corner) coupling of two sorted measures.
inline double sorted_matching_cost(const AtomicMeasure& mu, const AtomicMeasure& nu) {
  const auto& a = mu.atoms();
  const auto& b = nu.atoms();
  std::vector<double> ra, rb;
  for (const Atom& x : a) ra.push_back(x.mass);
  for (const Atom& y : b) rb.push_back(y.mass);
  std::size_t i = 0, j = 0;
  double cost = 0.0;
  while (i < a.size() && j < b.size()) {
    const double m = std::min(ra[i], rb[j]);
    const double d = a[i].position - b[j].position;
    cost += m * d * d;
    ra[i] -= m;
    rb[j] -= m;
    if (ra[i] <= rb[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  return cost;
}

/// Minimum of the transport linear program over all couplings, found by
/// enumerating basic feasible solutions. Exponential; meant for <= 4 atoms
/// per side.
inline double coupling_brute_force(const AtomicMeasure& mu, const AtomicMeasure& nu) {
  const std::size_t m = mu.size(), n = nu.size(), cells = m * n;
  const std::size_t rows = m + n, basis = m + n - 1;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows),
                                            static_cast<Eigen::Index>(cells));
  Eigen::VectorXd b(static_cast<Eigen::Index>(rows));
  std::vector<double> c(cells);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const auto col = static_cast<Eigen::Index>(i * n + j);
      A(static_cast<Eigen::Index>(i), col) = 1.0;
      A(static_cast<Eigen::Index>(m + j), col) = 1.0;
      const double d = mu.atoms()[i].position - nu.atoms()[j].position;
      c[i * n + j] = d * d;
    }
  }
  for (std::size_t i = 0; i < m; ++i) b(static_cast<Eigen::Index>(i)) = mu.atoms()[i].mass;
  for (std::size_t j = 0; j < n; ++j) b(static_cast<Eigen::Index>(m + j)) = nu.atoms()[j].mass;

  double best = std::numeric_limits<double>::infinity();
  std::vector<bool> chosen(cells, false);
  std::fill(chosen.begin(), chosen.begin() + static_cast<std::ptrdiff_t>(basis), true);
  std::sort(chosen.begin(), chosen.end());
  do {
    Eigen::MatrixXd B(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(basis));
    std::vector<std::size_t> idx;
    for (std::size_t k = 0; k < cells; ++k) {
      if (!chosen[k]) continue;
      B.col(static_cast<Eigen::Index>(idx.size())) = A.col(static_cast<Eigen::Index>(k));
      idx.push_back(k);
    }
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(B);
    if (qr.rank() < static_cast<Eigen::Index>(basis)) continue;
    const Eigen::VectorXd x = qr.solve(b);
    if ((B * x - b).cwiseAbs().maxCoeff() > 1e-12) continue;
    if (x.minCoeff() < -1e-13) continue;
    double cost = 0.0;
    for (std::size_t k = 0; k < basis; ++k) cost += x(static_cast<Eigen::Index>(k)) * c[idx[k]];
    best = std::min(best, cost);
  } while (std::next_permutation(chosen.begin(), chosen.end()));
  return best;
}

struct ProjectionOracle {
  std::vector<double> point;
  double cost = std::numeric_limits<double>::infinity();
};

/// Weighted projection onto nondecreasing sequences by enumerating every
/// partition into consecutive blocks: the projection is the cheapest
/// block-average that is itself nondecreasing.
inline ProjectionOracle projection_brute_force(const std::vector<double>& x,
                                               const std::vector<double>& w) {
  const std::size_t n = x.size();
  ProjectionOracle best;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << (n - 1)); ++mask) {
    std::vector<double> y(n);
    std::size_t begin = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const bool cut = i + 1 == n || ((mask >> i) & 1U);
      if (!cut) continue;
      double sw = 0.0, swx = 0.0;
      for (std::size_t k = begin; k <= i; ++k) {
        sw += w[k];
        swx += w[k] * x[k];
      }
      for (std::size_t k = begin; k <= i; ++k) y[k] = swx / sw;
      begin = i + 1;
    }
    if (!std::is_sorted(y.begin(), y.end())) continue;
    double cost = 0.0;
    for (std::size_t k = 0; k < n; ++k) cost += w[k] * (x[k] - y[k]) * (x[k] - y[k]);
    if (cost < best.cost) best = {y, cost};
  }
  return best;
}

/// Half the mean pairwise distance of a step function on the uniform grid:
/// (1/2) int int |X(s) - X(t)| ds dt.
inline double half_mean_pairwise_distance(const std::vector<double>& X) {
  const double n = static_cast<double>(X.size());
  double acc = 0.0;
  for (double a : X) {
    for (double b : X) acc += std::abs(a - b);
  }
  return 0.5 * acc / (n * n);
}

/// Squared W2 between two equal-mass empirical measures with the same
/// number of atoms: mean squared gap after sorting both.
inline double equal_mass_w2_squared(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += (a[i] - b[i]) * (a[i] - b[i]);
  return acc / static_cast<double>(a.size());
}

}  // namespace oracle
