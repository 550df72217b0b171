#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "psiapprox/compact.hpp"
#include "psiapprox/function_spec.hpp"
#include "psiapprox/orthonormal.hpp"
#include "psiapprox/polyspace.hpp"

namespace psiapprox {

struct ApproxProblem {
  CompactSample sample;
  Eigen::VectorXcd target;
  Eigen::MatrixXcd basis_matrix;
  double t = 0.0;
};

struct ApproxSolution {
  Eigen::VectorXcd coeffs;
  double d_value = 0.0;
  double lower_bound = 0.0;
  int iterations = 0;
  bool converged = false;
  double ls_residual = 0.0;  ///< sup-norm residual of the plain weighted least-squares fit
};

struct MinimaxOptions {
  double tol = 1e-10;        ///< Lawson stop: relative change of the max residual
  int max_iter = 500;        ///< Lawson iteration cap
  double handoff = 1e-2;     ///< relative bracket gap at which Lawson hands off to the barrier polish
  double barrier_gap = 1e-13;
  bool polish = true;
};

/// Minimax in orthonormal coordinates: min_y max_i |f_i - (Q y)_i|.
/// `coeffs` of the result are the coordinates y.
ApproxSolution solve_minimax_orthonormal(const Eigen::MatrixXcd& Q, const Eigen::VectorXd& weights,
                                         const Eigen::VectorXcd& target, const MinimaxOptions& options = {});

/// Orthonormalizes the basis matrix, solves, and maps coordinates back to
/// basis coefficients (dropped dependent columns receive 0).
ApproxSolution solve_minimax(const ApproxProblem& problem, double tol = 1e-10, int max_iter = 500);
ApproxSolution solve_minimax(const ApproxProblem& problem, const MinimaxOptions& options);

/// Computed best approximant, evaluable off the sample through the stable recurrence.
struct Approximant {
  std::shared_ptr<const OrthonormalBasis> basis;
  Eigen::VectorXcd y;

  Complex operator()(const Point& z) const { return basis->evaluate(z).cwiseProduct(y).sum(); }
  PsiPolynomial to_polynomial(std::shared_ptr<const ManifoldModel> model) const;
};

inline constexpr double kPrecisionFloor = 1e-12;

struct ApproxRecord {
  double t = 0.0;
  Eigen::Index dim = 0;
  Eigen::Index effective_dim = 0;
  double d_value = 0.0;
  double lower_bound = 0.0;
  double ls_residual = 0.0;
  int iterations = 0;
  bool converged = false;
  bool floor_flag = false;
  std::optional<std::string> error;
  std::optional<Approximant> approximant;

  bool usable() const { return !error && converged && !floor_flag && d_value > 0.0; }
};

struct SweepOptions {
  MinimaxOptions minimax;
  int jobs = 1;
};

/// One record per t (t_list strictly increasing); a failing record carries
/// its error message and does not abort the sweep.
std::vector<ApproxRecord> approx_sweep(const ManifoldModel& model, const CompactSample& K, const FunctionSpec& f,
                                       const std::vector<double>& t_list, const SweepOptions& options = {});

/// CSV with columns t,dim,d_value,lower_bound,iterations,converged,floor_flag.
void write_sweep_csv(const std::vector<ApproxRecord>& records, std::ostream& out);

/// printf("%.17g") formatting used by all CSV output.
std::string format_double(double v);

}  // namespace psiapprox
