#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "psiapprox/asymptotics.hpp"
#include "psiapprox/manifold.hpp"

namespace psiapprox {

using ScalarField = std::function<long double(const VectorXcl&)>;

inline constexpr double kDefaultFdStep = 1e-4;
inline constexpr double kFallbackFdStep = 1e-3;
/// S = {psi <= 0} is widened by this margin for curvature audits.
inline constexpr double kSMargin = 0.1;

/// Complex Hessian d^2 u / dz_j dzbar_k by central differences in the 2N
/// real coordinates. If halving the step changes the result by more than
/// 1e-6 relative, a Richardson-extrapolated estimate at kFallbackFdStep is used.
/// Throws NumericalError when the result is not Hermitian to 1e-10.
Eigen::MatrixXcd complex_hessian(const ScalarField& u, const VectorXcl& z, double h_step = kDefaultFdStep);

struct HermitianFormSample {
  Point z;
  Eigen::MatrixXcd matrix;
  Eigen::VectorXd eigenvalues;  ///< ascending
  bool positive_definite = false;
};

HermitianFormSample make_hermitian_sample(Point z, const Eigen::MatrixXcd& m, double pd_tol = 1e-12);

enum class MetricMethod { ClosedForm, FiniteDifference };

/// Complex Hessian h_jk of e^psi. ClosedForm uses the holomorphic Jacobian
/// (h = J^T conj(J)) for mapped and graph models and explicit formulas for
/// Classic and Torus. Throws DomainError when z lies in the S-neighbourhood.
HermitianFormSample metric_form(const ManifoldModel& model, const Point& z, double h_step = kDefaultFdStep,
                                MetricMethod method = MetricMethod::ClosedForm);

Eigen::MatrixXcd metric_matrix_closed(const ManifoldModel& model, const VectorXcl& z);

/// log sum_{|L| = N} |det Jac(g_L)|^2 over all N-row subcollections of the
/// holomorphic Jacobian (mapped and graph models); log det h in closed form
/// for Torus and Classic. Ricci = -i dd^c of this field.
ScalarField ricci_potential(const ManifoldModel& model);

/// -complex_hessian(ricci_potential) at z.
Eigen::MatrixXcd ricci_form(const ManifoldModel& model, const Point& z, double h_step = kDefaultFdStep);

struct ThetaSpec {
  enum class Kind { Zero, RicciPotential, LogOnePlusInvF, LogSumSquares };
  Kind kind = Kind::Zero;
  int power = 2;                       ///< LogOnePlusInvF: log(1 + |F|^{-power})
  std::vector<MultiPoly> polys;        ///< LogSumSquares: log sum |P_j|^2
  std::optional<MultiPoly> pluriharmonic;  ///< adds Re P(z)
  std::string describe() const;
};

ScalarField theta_field(const ManifoldModel& model, const ThetaSpec& theta);

struct CompensatorPoint {
  Point z;
  double psi_plus = 0.0;
  double theta = 0.0;
  Eigen::VectorXd ricci_eigenvalues;
  Eigen::VectorXd sum_eigenvalues;
};

struct CompensatorAudit {
  ThetaSpec theta;
  std::vector<CompensatorPoint> points;
  std::vector<std::pair<Point, std::string>> skipped;
  double min_eig_sum = 0.0;
  double growth_A = 0.0;
  double growth_B = 0.0;
  double growth_residual = 0.0;
  double tol = 1e-6;
  std::optional<double> near_S_min_eig;  ///< min eigenvalue of Hess(theta) on the neighbourhood sample
  Verdict verdict = Verdict::Inconclusive;
};

/// min over points of the smallest eigenvalue of Hess(theta) + Ricci, and a
/// growth fit |theta| <= A psi^+ + B. PASS when min_eig_sum >= -tol and the
/// growth residual is <= 0. Points in the S-neighbourhood or where theta is
/// undefined are skipped and reported.
CompensatorAudit compensator_check(const ManifoldModel& model, const ThetaSpec& theta,
                                   const std::vector<Point>& points, double tol = 1e-6,
                                   double h_step = kDefaultFdStep, const std::vector<Point>& near_S = {});

struct VolumeEstimate {
  double L = 0.0;
  double value = 0.0;
  double std_error = 0.0;
  double rel_std_error = 0.0;
  std::size_t samples = 0;
  double box_half_width = 0.0;  ///< non-torus kinds: box [-R, R]^{2N}
};

/// Sublevel volume int_{psi < log L} (i/2 dd^c e^psi)^N = int N! det(h) dLebesgue,
/// by Monte Carlo in a bounding box. Samples are split into fixed shards with
/// seeds derived from `seed`, so the result does not depend on `jobs`.
VolumeEstimate volume_sublevel(const ManifoldModel& model, double L, std::size_t mc_samples, std::uint64_t seed,
                               int jobs = 1);

struct VolumeGrowthFit {
  double r = 0.0;
  double A = 0.0;
  double B = 0.0;
  bool satisfiable = false;
  std::vector<VolumeEstimate> table;
};

/// Fits log V(L) <= A L^r + B on an L-grid.
VolumeGrowthFit fit_volume_growth(const ManifoldModel& model, const std::vector<double>& L_grid, double r,
                                  std::size_t mc_samples, std::uint64_t seed, int jobs = 1);

/// splitmix64 step, used to derive per-shard seeds.
std::uint64_t splitmix64(std::uint64_t& state);

}  // namespace psiapprox
