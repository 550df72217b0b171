#include "psiapprox/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace psiapprox {
namespace {

std::vector<const ApproxRecord*> usable(const std::vector<ApproxRecord>& records) {
  std::vector<const ApproxRecord*> out;
  for (const ApproxRecord& r : records) {
    if (r.usable()) out.push_back(&r);
  }
  return out;
}

// Least squares with residual RMS.
Eigen::VectorXd lsq(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, double& rms) {
  const Eigen::VectorXd x = A.colPivHouseholderQr().solve(b);
  rms = std::sqrt((A * x - b).squaredNorm() / static_cast<double>(b.size()));
  return x;
}

double log_sum_exp(const std::vector<long double>& v) {
  long double top = -std::numeric_limits<long double>::infinity();
  for (long double x : v) top = std::max(top, x);
  if (!std::isfinite(static_cast<double>(top))) return static_cast<double>(top);
  long double s = 0;
  for (long double x : v) s += std::exp(x - top);
  return static_cast<double>(top + std::log(s));
}

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass:
      return "PASS";
    case Verdict::Fail:
      return "FAIL";
    case Verdict::Inconclusive:
      return "INCONCLUSIVE";
  }
  return "INCONCLUSIVE";
}

RateReport rate_limsup(const std::vector<ApproxRecord>& records, std::optional<double> L_true, double tol) {
  RateReport rep;
  rep.tolerance = tol;
  rep.target = L_true;
  const auto use = usable(records);
  rep.usable_count = use.size();
  if (use.size() < kMinUsableRecords) {
    rep.note = "fewer than 4 usable records (converged, above precision floor)";
    return rep;
  }
  const std::size_t n = std::max(kMinUsableRecords, (use.size() + 1) / 2);
  const std::size_t first = use.size() - n;
  Eigen::MatrixXd A(static_cast<Eigen::Index>(n), 2);
  Eigen::VectorXd b(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const ApproxRecord* r = use[first + i];
    A(static_cast<Eigen::Index>(i), 0) = 1.0;
    A(static_cast<Eigen::Index>(i), 1) = r->t;
    b(static_cast<Eigen::Index>(i)) = std::log(r->d_value);
    rep.used_t.push_back(r->t);
  }
  const Eigen::VectorXd x = lsq(A, b, rep.residual);
  rep.slope_fit = x(1);
  rep.L_hat = std::exp(-x(1));
  rep.t_min = rep.used_t.front();
  rep.t_max = rep.used_t.back();
  if (L_true) {
    rep.verdict = rep.L_hat >= *L_true * (1.0 - tol) ? Verdict::Pass : Verdict::Fail;
  } else {
    rep.note = "no L_true supplied";
  }
  return rep;
}

RateReport winiarski_check(const std::vector<ApproxRecord>& records, double rho, double sigma, double tol) {
  if (!(rho > 0.0) || !(sigma >= 0.0)) throw std::invalid_argument("winiarski_check: need rho > 0, sigma >= 0");
  RateReport rep;
  rep.tolerance = tol;
  rep.target = std::pow(std::numbers::e * sigma * rho, 1.0 / rho);
  const auto use = usable(records);
  rep.usable_count = use.size();
  if (use.size() < kMinUsableRecords) {
    rep.note = "fewer than 4 usable records (converged, above precision floor)";
    return rep;
  }
  const Eigen::Index n = static_cast<Eigen::Index>(use.size());
  const int terms = n >= 6 ? 3 : (n >= 5 ? 2 : 1);
  Eigen::MatrixXd A(n, terms);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = use[static_cast<std::size_t>(i)]->t;
    const double d = use[static_cast<std::size_t>(i)]->d_value;
    A(i, 0) = 1.0;
    if (terms >= 2) A(i, 1) = 1.0 / t;
    if (terms >= 3) A(i, 2) = std::log(t) / t;
    b(i) = std::log(t) / rho + std::log(d) / t;
    rep.used_t.push_back(t);
  }
  const Eigen::VectorXd x = lsq(A, b, rep.residual);
  rep.plateau = std::exp(x(0));
  rep.t_min = rep.used_t.front();
  rep.t_max = rep.used_t.back();
  // Rate columns alongside the plateau for the report.
  double rms = 0.0;
  Eigen::MatrixXd R(n, 2);
  R.col(0).setOnes();
  for (Eigen::Index i = 0; i < n; ++i) R(i, 1) = rep.used_t[static_cast<std::size_t>(i)];
  Eigen::VectorXd logd(n);
  for (Eigen::Index i = 0; i < n; ++i) logd(i) = std::log(use[static_cast<std::size_t>(i)]->d_value);
  rep.slope_fit = lsq(R, logd, rms)(1);
  rep.L_hat = std::exp(-rep.slope_fit);
  rep.verdict = *rep.plateau <= *rep.target * (1.0 + tol) ? Verdict::Pass : Verdict::Fail;
  return rep;
}

std::vector<Point> sublevel_boundary(BenchmarkGeometry geometry, double r, int samples) {
  std::vector<Point> out;
  switch (geometry) {
    case BenchmarkGeometry::Disc:
      for (int k = 0; k < samples; ++k) out.push_back(Point{r * unit_root(k, samples)});
      break;
    case BenchmarkGeometry::Interval:
      for (int k = 0; k < samples; ++k) {
        const Complex w = unit_root(k, samples);
        out.push_back(Point{0.5 * (r * w + std::conj(w) / r)});
      }
      break;
    case BenchmarkGeometry::TorusSlice: {
      const double y = std::log(r);
      for (int k = 0; k < samples; ++k) {
        const double x = static_cast<double>(k) / samples;
        out.push_back(Point{Complex(x, y)});
        out.push_back(Point{Complex(x, -y)});
      }
      break;
    }
    case BenchmarkGeometry::None:
      throw std::invalid_argument("sublevel_boundary: no closed form for this geometry");
  }
  return out;
}

OrderTypeEstimate order_type_estimate(const FunctionSpec& f, const ManifoldModel& model, BenchmarkGeometry phi,
                                      const std::vector<double>& r_grid, int samples) {
  if (r_grid.size() < 5) throw std::invalid_argument("order_type_estimate: need at least 5 radii");
  for (std::size_t i = 0; i < r_grid.size(); ++i) {
    if (!(r_grid[i] > 1.0) || (i > 0 && !(r_grid[i] > r_grid[i - 1]))) {
      throw std::invalid_argument("order_type_estimate: radii must be increasing and > 1");
    }
  }
  if (!f.entire()) throw std::invalid_argument("order_type_estimate: function must be entire");
  OrderTypeEstimate est;
  est.r_grid = r_grid;
  double running = -std::numeric_limits<double>::infinity();
  for (double r : r_grid) {
    for (const Point& z : sublevel_boundary(phi, r, samples)) {
      const Point zc = model.canonical(z);
      running = std::max(running, f.log_abs(zc));
    }
    est.log_max_modulus.push_back(running);
  }
  const std::size_t n = std::max<std::size_t>(2, (r_grid.size() + 1) / 2);
  const std::size_t first = r_grid.size() - n;
  Eigen::MatrixXd A(static_cast<Eigen::Index>(n), 2);
  Eigen::VectorXd b(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    A(static_cast<Eigen::Index>(i), 0) = 1.0;
    A(static_cast<Eigen::Index>(i), 1) = std::log(r_grid[first + i]);
    // log+ log M
    b(static_cast<Eigen::Index>(i)) = std::log(std::max(1.0, est.log_max_modulus[first + i]));
  }
  double rms = 0.0;
  est.rho_hat = std::max(0.0, lsq(A, b, rms)(1));
  for (std::size_t i = first; i < r_grid.size(); ++i) {
    est.sigma_hat =
        std::max(est.sigma_hat, std::max(0.0, est.log_max_modulus[i]) / std::pow(r_grid[i], est.rho_hat));
  }
  return est;
}

TelescopeResult telescope_extend(const std::vector<Evaluator>& p_list, const Point& z) {
  TelescopeResult res;
  if (p_list.empty()) throw std::invalid_argument("telescope_extend: empty approximant list");
  Complex prev = p_list[0](z);
  res.value = prev;
  res.last_term = std::abs(prev);
  res.terms_used = 1;
  int growth = 0;
  double last = std::numeric_limits<double>::infinity();
  for (std::size_t n = 1; n < p_list.size(); ++n) {
    const Complex cur = p_list[n](z);
    const Complex term = cur - prev;
    res.value += term;
    const double mag = std::abs(term);
    res.last_term = mag;
    ++res.terms_used;
    growth = mag > last ? growth + 1 : 0;
    last = mag;
    prev = cur;
    if (growth >= 3) res.diverged = true;
    if (mag < 1e-12) {
      res.converged = true;
      break;
    }
  }
  return res;
}

TelescopeResult telescope_extend(const std::vector<PsiPolynomial>& p_list, const Point& z) {
  std::vector<Evaluator> ev;
  for (const PsiPolynomial& p : p_list) ev.emplace_back([&p](const Point& w) { return poly_eval(p, w); });
  return telescope_extend(ev, z);
}

std::vector<Evaluator> usable_approximants(const std::vector<ApproxRecord>& records) {
  std::vector<Evaluator> out;
  for (const ApproxRecord& r : records) {
    if (r.usable() && r.approximant) {
      Approximant a = *r.approximant;
      out.emplace_back([a](const Point& z) { return a(z); });
    }
  }
  return out;
}

std::vector<Evaluator> converged_approximants(const std::vector<ApproxRecord>& records) {
  std::vector<Evaluator> out;
  for (const ApproxRecord& r : records) {
    if (!r.error && r.converged && r.approximant) {
      Approximant a = *r.approximant;
      out.emplace_back([a](const Point& z) { return a(z); });
    }
  }
  return out;
}

Lemma54Result lemma54_bound(double a, double rho) {
  if (!(a > 0.0) || !(rho > 0.0) || !std::isfinite(a) || !std::isfinite(rho)) {
    throw std::invalid_argument("lemma54_bound: a and rho must be positive and finite");
  }
  Lemma54Result res;
  const long double la = std::log(static_cast<long double>(a));
  const long double lr = static_cast<long double>(rho);
  // log(1 + 2^rho a e^{a/(e rho)})
  const long double lt = lr * std::log(2.0L) + la + static_cast<long double>(a) / (std::numbers::e_v<long double> * lr);
  res.log_bound = static_cast<double>(lt > 0 ? lt + std::log1p(std::exp(-lt)) : std::log1p(std::exp(lt)));
  // Beyond n >= 2^rho a each term is <= 2^{-n}, so 41 more terms leave a tail < 1e-12.
  const double knee = std::ceil(std::pow(2.0, rho) * a);
  if (knee > 5e7) throw std::invalid_argument("lemma54_bound: (a, rho) too large for direct summation");
  const int N = static_cast<int>(knee) + 41;
  std::vector<long double> logs;
  logs.reserve(static_cast<std::size_t>(N));
  for (int n = 1; n <= N; ++n) {
    logs.push_back(static_cast<long double>(n) / lr * (la - std::log(static_cast<long double>(n))));
  }
  res.terms = N;
  res.log_partial_sum = log_sum_exp(logs);
  res.bound = std::exp(res.log_bound);
  res.partial_sum = std::exp(res.log_partial_sum);
  return res;
}

}  // namespace psiapprox
