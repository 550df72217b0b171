#pragma once

#include <string>
#include <vector>

#include "psiapprox/manifold.hpp"

namespace psiapprox {

/// Discretization of a compact set K with normalized positive weights.
struct CompactSample {
  std::vector<Point> points;
  Eigen::VectorXd weights;
  std::string mesh_descriptor;

  std::size_t size() const { return points.size(); }
};

/// Validates invariants (>= 2 points, positive weights, no duplicates),
/// normalizes weights to unit sum and canonicalizes points for `model`.
CompactSample make_sample(const ManifoldModel& model, std::vector<Point> points, Eigen::VectorXd weights,
                          std::string descriptor);

/// Textual descriptors:
///   "interval a b"          Chebyshev extrema on [a,b] (N = 1)
///   "circle r [cx cy]"      equispaced on |z - c| = r (N = 1)
///   "disc r [cx cy]"        centre plus concentric equispaced rings (N = 1)
///   "torus-slice"           equispaced grid on {Im z = 0} (Torus; M = m^N)
///   "points x1 y1 x2 y2 .." explicit list, 2N reals per point (M ignored)
/// Unknown descriptor -> ConfigError; M < 2 -> std::invalid_argument.
CompactSample sample_compact(const std::string& spec, const ManifoldModel& model, int M);

/// exp(2 pi i k / M) with exact values at quarter turns.
Complex unit_root(long k, long M);

}  // namespace psiapprox
