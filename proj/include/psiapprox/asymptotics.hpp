#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "psiapprox/extremal.hpp"
#include "psiapprox/function_spec.hpp"
#include "psiapprox/minimax.hpp"

namespace psiapprox {

enum class Verdict { Pass, Fail, Inconclusive };
std::string to_string(Verdict v);

inline constexpr double kDefaultVerdictTol = 0.03;
inline constexpr std::size_t kMinUsableRecords = 4;

struct RateReport {
  double slope_fit = 0.0;
  double L_hat = 0.0;
  double t_min = 0.0;  ///< fit window
  double t_max = 0.0;
  double residual = 0.0;  ///< RMS residual of the fit
  Verdict verdict = Verdict::Inconclusive;
  std::optional<double> target;  ///< L_true for rates, (e sigma rho)^{1/rho} for Winiarski
  std::optional<double> plateau;
  double tolerance = kDefaultVerdictTol;
  std::vector<double> used_t;
  std::size_t usable_count = 0;
  std::string note;
};

/// Least-squares line through (t, log d_t) over the top half (at least 4)
/// of usable records; L_hat = exp(-slope). PASS when L_hat >= L_true (1 - tol).
RateReport rate_limsup(const std::vector<ApproxRecord>& records, std::optional<double> L_true = std::nullopt,
                       double tol = kDefaultVerdictTol);

/// s_t = t^{1/rho} d_t^{1/t}; the plateau is the constant A of the fit
/// ln s_t = A + B ln(t)/t + C/t over the usable records (fewer terms when
/// fewer records). PASS when exp(A) <= (e sigma rho)^{1/rho} (1 + tol).
RateReport winiarski_check(const std::vector<ApproxRecord>& records, double rho, double sigma,
                           double tol = kDefaultVerdictTol);

struct OrderTypeEstimate {
  double rho_hat = 0.0;
  double sigma_hat = 0.0;
  std::vector<double> r_grid;
  std::vector<double> log_max_modulus;  ///< running maximum, so monotone
};

/// Boundary of {phi <= log r}: circle |z| = r (Disc), Joukowski ellipse
/// (Interval), lines Im z = +-log r (TorusSlice).
std::vector<Point> sublevel_boundary(BenchmarkGeometry geometry, double r, int samples);

OrderTypeEstimate order_type_estimate(const FunctionSpec& f, const ManifoldModel& model, BenchmarkGeometry phi,
                                      const std::vector<double>& r_grid, int samples = 720);

struct TelescopeResult {
  Complex value;
  double last_term = 0.0;
  int terms_used = 0;
  bool converged = false;   ///< a term fell below 1e-12
  bool diverged = false;    ///< terms grew for 3 consecutive steps (out of domain)
};

using Evaluator = std::function<Complex(const Point&)>;

/// p_1(z) + sum_n (p_{n+1}(z) - p_n(z)) until a term is < 1e-12 or the list ends.
TelescopeResult telescope_extend(const std::vector<Evaluator>& p_list, const Point& z);
TelescopeResult telescope_extend(const std::vector<PsiPolynomial>& p_list, const Point& z);

/// Approximants of the usable records of a sweep, in sweep order.
std::vector<Evaluator> usable_approximants(const std::vector<ApproxRecord>& records);
/// Converged, error-free records including floor-flagged ones; the input to telescope_extend.
std::vector<Evaluator> converged_approximants(const std::vector<ApproxRecord>& records);

struct Lemma54Result {
  double bound = 0.0;
  double partial_sum = 0.0;
  double log_bound = 0.0;  ///< exact logs survive overflow of the plain values
  double log_partial_sum = 0.0;
  int terms = 0;
  bool holds() const { return log_partial_sum <= log_bound; }
};

/// bound = 1 + 2^rho a e^{a/(e rho)}; partial sum of (a/n)^{n/rho} with tail < 1e-12.
Lemma54Result lemma54_bound(double a, double rho);

}  // namespace psiapprox
