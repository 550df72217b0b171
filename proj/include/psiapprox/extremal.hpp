#pragma once

#include <optional>
#include <string>

#include "psiapprox/compact.hpp"

namespace psiapprox {

struct ExtremalEstimate {
  Point z;
  double t = 0.0;
  double log_phi_t = 0.0;
  std::optional<double> reference;
  double bracket = 0.0;  ///< (1/2t) log d, the kernel-vs-sup-norm slack
  Eigen::Index dim = 0;
  bool rank_deficient = false;
};

/// (1/2t) log sum_j |q_j(z)|^2 with q an orthonormal basis of P_t^psi under
/// the sample's normalized weights.
ExtremalEstimate christoffel_log_phi(const ManifoldModel& model, const CompactSample& K, const Point& z, double t);

/// Benchmark geometries recognised in a compact descriptor.
enum class BenchmarkGeometry { Interval, Disc, TorusSlice, None };

BenchmarkGeometry benchmark_geometry(const std::string& k_spec);

/// Joukowski: log|z + sqrt(z^2 - 1)| >= 0 for K = [-1, 1].
double interval_extremal(Complex z);

/// V_{K,psi}(z) for K = [-1,1] or the closed unit disc (Classic, N = 1) and
/// the torus real slice; nullopt otherwise.
std::optional<double> reference_extremal(const ManifoldModel& model, const std::string& k_spec, const Point& z);

}  // namespace psiapprox
