#include "psiapprox/curvature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <thread>

namespace psiapprox {
namespace {

constexpr int kVolumeShards = 64;

VectorXcl perturbed(const VectorXcl& z, int a, long double d) {
  VectorXcl w = z;
  const Eigen::Index j = a / 2;
  if (a % 2 == 0) {
    w(j) = ComplexL(w(j).real() + d, w(j).imag());
  } else {
    w(j) = ComplexL(w(j).real(), w(j).imag() + d);
  }
  return w;
}

Eigen::MatrixXcd hessian_at_step(const ScalarField& u, const VectorXcl& z, long double h) {
  const int n = static_cast<int>(z.size());
  const int R = 2 * n;
  Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic> H(R, R);
  const long double u0 = u(z);
  for (int a = 0; a < R; ++a) {
    H(a, a) = (u(perturbed(z, a, h)) - 2 * u0 + u(perturbed(z, a, -h))) / (h * h);
    for (int b = a + 1; b < R; ++b) {
      const VectorXcl pp = perturbed(perturbed(z, a, h), b, h);
      const VectorXcl pm = perturbed(perturbed(z, a, h), b, -h);
      const VectorXcl mp = perturbed(perturbed(z, a, -h), b, h);
      const VectorXcl mm = perturbed(perturbed(z, a, -h), b, -h);
      H(a, b) = (u(pp) - u(pm) - u(mp) + u(mm)) / (4 * h * h);
      H(b, a) = H(a, b);
    }
  }
  // d^2/dz_j dzbar_k = 1/4 [(u_xjxk + u_yjyk) + i (u_xjyk - u_yjxk)]
  Eigen::MatrixXcd out(n, n);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      const long double re = H(2 * j, 2 * k) + H(2 * j + 1, 2 * k + 1);
      const long double im = H(2 * j, 2 * k + 1) - H(2 * j + 1, 2 * k);
      out(j, k) = Complex(static_cast<double>(re / 4), static_cast<double>(im / 4));
    }
  }
  return out;
}

long double sum_norm(const VectorXcl& v, Eigen::Index count) {
  long double s = 0;
  for (Eigen::Index j = 0; j < count; ++j) s += std::norm(v(j));
  return s;
}

void require_outside_S(const ManifoldModel& model, const Point& z) {
  const double p = model.psi(z);
  if (!(p > kSMargin)) {
    std::ostringstream os;
    os << "point lies in the S-neighbourhood {psi <= " << kSMargin << "} (psi = " << p << ")";
    throw DomainError(os.str());
  }
}

// Lexicographic N-subsets of {0..m-1}.
bool next_combination(std::vector<int>& c, int m) {
  const int n = static_cast<int>(c.size());
  for (int i = n - 1; i >= 0; --i) {
    if (c[i] < m - n + i) {
      ++c[i];
      for (int j = i + 1; j < n; ++j) c[j] = c[j - 1] + 1;
      return true;
    }
  }
  return false;
}

// N! det(h) at z in closed form; -1 when z is outside the sublevel set.
double volume_density(const ManifoldModel& model, const VectorXcl& z, double L, double factorial) {
  long double e;
  try {
    e = model.exp_psi(z);
  } catch (const DomainError&) {
    return -1.0;
  }
  if (!(e < L)) return -1.0;
  if (model.dimension() == 1) {
    switch (model.kind()) {
      case ModelKind::Classic:
        return static_cast<double>(1.0L / (4.0L * std::abs(z(0))));
      case ModelKind::Torus:
        return static_cast<double>(e / 4.0L);
      default: {
        const HolomorphicJet j = model.jet(z);
        long double s = 0;
        for (Eigen::Index r = 0; r < j.jacobian.rows(); ++r) s += std::norm(j.jacobian(r, 0));
        return static_cast<double>(s);
      }
    }
  }
  const Eigen::MatrixXcd h = metric_matrix_closed(model, z);
  return factorial * h.determinant().real();
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Eigen::MatrixXcd complex_hessian(const ScalarField& u, const VectorXcl& z, double h_step) {
  if (!(h_step > 0.0)) throw std::invalid_argument("complex_hessian: h_step must be positive");
  const Eigen::MatrixXcd H1 = hessian_at_step(u, z, h_step);
  const Eigen::MatrixXcd H2 = hessian_at_step(u, z, h_step / 2);
  if (!H1.allFinite() || !H2.allFinite()) throw NumericalError("complex_hessian: non-finite field values");
  Eigen::MatrixXcd H = H1;
  if ((H1 - H2).norm() > 1e-6 * (1.0 + H1.norm())) {
    const Eigen::MatrixXcd F1 = hessian_at_step(u, z, kFallbackFdStep);
    const Eigen::MatrixXcd F2 = hessian_at_step(u, z, kFallbackFdStep / 2);
    H = (4.0 * F2 - F1) / 3.0;
  }
  const double defect = (H - H.adjoint()).norm();
  if (defect > 1e-10 * (1.0 + H.norm())) {
    std::ostringstream os;
    os << "complex_hessian: result not Hermitian (defect " << defect << "); try a smaller or larger h_step";
    throw NumericalError(os.str());
  }
  return 0.5 * (H + H.adjoint());
}

HermitianFormSample make_hermitian_sample(Point z, const Eigen::MatrixXcd& m, double pd_tol) {
  HermitianFormSample s;
  s.z = std::move(z);
  s.matrix = m;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
  s.eigenvalues = es.eigenvalues();
  s.positive_definite = s.eigenvalues.size() > 0 && s.eigenvalues(0) > pd_tol;
  return s;
}

Eigen::MatrixXcd metric_matrix_closed(const ManifoldModel& model, const VectorXcl& z) {
  const int n = model.dimension();
  switch (model.kind()) {
    case ModelKind::MappedPolynomial:
    case ModelKind::GraphComplement: {
      const Eigen::MatrixXcd J = model.jet(z).jacobian.cast<Complex>();
      return J.transpose() * J.conjugate();
    }
    case ModelKind::Torus: {
      Eigen::VectorXd y(n);
      for (int j = 0; j < n; ++j) y(j) = static_cast<double>(z(j).imag());
      const double rho = y.norm();
      if (rho == 0.0) throw DomainError("torus metric is singular at Im z = 0");
      const Eigen::VectorXd yh = y / rho;
      const Eigen::MatrixXd P = yh * yh.transpose();
      const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
      return (std::exp(rho) / 4.0 * (P + (I - P) / rho)).cast<Complex>();
    }
    case ModelKind::Classic: {
      const Eigen::VectorXcd w = z.cast<Complex>();
      const double r = w.norm();
      if (r == 0.0) throw DomainError("classic metric is singular at the origin");
      Eigen::MatrixXcd h = Eigen::MatrixXcd::Identity(n, n) / (2.0 * r);
      for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) h(j, k) -= w(k) * std::conj(w(j)) / (4.0 * r * r * r);
      }
      return h;
    }
  }
  return {};
}

HermitianFormSample metric_form(const ManifoldModel& model, const Point& z, double h_step, MetricMethod method) {
  require_outside_S(model, z);
  const VectorXcl zl = z.to_long_double();
  Eigen::MatrixXcd m;
  if (method == MetricMethod::ClosedForm) {
    m = metric_matrix_closed(model, zl);
  } else {
    const ManifoldModel* mp = &model;
    m = complex_hessian([mp](const VectorXcl& w) { return mp->exp_psi(w); }, zl, h_step);
  }
  return make_hermitian_sample(z, m);
}

ScalarField ricci_potential(const ManifoldModel& model) {
  const int n = model.dimension();
  switch (model.kind()) {
    case ModelKind::MappedPolynomial:
    case ModelKind::GraphComplement:
      return [model, n](const VectorXcl& z) -> long double {
        const MatrixXcl J = model.jet(z).jacobian;
        const int m = static_cast<int>(J.rows());
        std::vector<int> rows(n);
        for (int i = 0; i < n; ++i) rows[i] = i;
        long double sum = 0;
        do {
          MatrixXcl sub(n, n);
          for (int i = 0; i < n; ++i) sub.row(i) = J.row(rows[i]);
          sum += std::norm(sub.partialPivLu().determinant());
        } while (next_combination(rows, m));
        if (!(sum > 0)) throw ModelValidationError("ricci_potential: all Jacobian subdeterminants vanish");
        return std::log(sum);
      };
    case ModelKind::Torus:
      // log det h = N psi - (N-1) log psi - N log 4
      return [n](const VectorXcl& z) -> long double {
        long double s = 0;
        for (Eigen::Index j = 0; j < z.size(); ++j) s += z(j).imag() * z(j).imag();
        const long double psi = std::sqrt(s);
        return n * psi - (n - 1) * std::log(psi) - n * std::log(4.0L);
      };
    case ModelKind::Classic:
      // log det h = -(N-1) log(2r) - log(4r)
      return [n](const VectorXcl& z) -> long double {
        const long double r = std::sqrt(sum_norm(z, z.size()));
        return -(n - 1) * std::log(2 * r) - std::log(4 * r);
      };
  }
  return {};
}

Eigen::MatrixXcd ricci_form(const ManifoldModel& model, const Point& z, double h_step) {
  return -complex_hessian(ricci_potential(model), z.to_long_double(), h_step);
}

std::string ThetaSpec::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::Zero:
      os << "zero";
      break;
    case Kind::RicciPotential:
      os << "ricci_potential";
      break;
    case Kind::LogOnePlusInvF:
      os << "log(1+|F|^-" << power << ")";
      break;
    case Kind::LogSumSquares:
      os << "log_sum_squares(" << polys.size() << ")";
      break;
  }
  if (pluriharmonic) os << " + Re P";
  return os.str();
}

ScalarField theta_field(const ManifoldModel& model, const ThetaSpec& theta) {
  ScalarField base;
  switch (theta.kind) {
    case ThetaSpec::Kind::Zero:
      base = [](const VectorXcl&) -> long double { return 0; };
      break;
    case ThetaSpec::Kind::RicciPotential:
      base = ricci_potential(model);
      break;
    case ThetaSpec::Kind::LogOnePlusInvF: {
      if (model.kind() != ModelKind::GraphComplement) {
        throw std::invalid_argument("theta log(1+|F|^-p) requires a graph_complement model");
      }
      const int p = theta.power;
      base = [model, p](const VectorXcl& z) -> long double {
        const long double f2 = std::norm(model.graph_F(z));
        if (f2 == 0) throw DomainError("theta undefined where F = 0");
        return std::log1p(std::pow(f2, -0.5L * p));
      };
      break;
    }
    case ThetaSpec::Kind::LogSumSquares: {
      const std::vector<MultiPoly> polys = theta.polys;
      base = [polys](const VectorXcl& z) -> long double {
        long double s = 0;
        for (const MultiPoly& p : polys) s += std::norm(p.eval<long double>(z));
        if (!(s > 0)) throw DomainError("theta log sum |P|^2 undefined at a common zero");
        return std::log(s);
      };
      break;
    }
  }
  if (!theta.pluriharmonic) return base;
  const MultiPoly ph = *theta.pluriharmonic;
  return [base, ph](const VectorXcl& z) -> long double { return base(z) + ph.eval<long double>(z).real(); };
}

CompensatorAudit compensator_check(const ManifoldModel& model, const ThetaSpec& theta,
                                   const std::vector<Point>& points, double tol, double h_step,
                                   const std::vector<Point>& near_S) {
  CompensatorAudit audit;
  audit.theta = theta;
  audit.tol = tol;
  const ScalarField th = theta_field(model, theta);
  const ScalarField rho = ricci_potential(model);
  const ScalarField combined = [th, rho](const VectorXcl& z) { return th(z) - rho(z); };
  audit.min_eig_sum = std::numeric_limits<double>::infinity();
  for (const Point& z : points) {
    try {
      model.validate_point(z);
      const double p = model.psi(z);
      if (!(p > kSMargin)) {
        audit.skipped.emplace_back(z, "inside S-neighbourhood");
        continue;
      }
      const VectorXcl zl = z.to_long_double();
      CompensatorPoint cp;
      cp.z = z;
      cp.psi_plus = std::max(0.0, p);
      cp.theta = static_cast<double>(th(zl));
      if (!std::isfinite(cp.theta)) throw DomainError("theta is not finite");
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ric(-complex_hessian(rho, zl, h_step), Eigen::EigenvaluesOnly);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> sum(complex_hessian(combined, zl, h_step),
                                                          Eigen::EigenvaluesOnly);
      cp.ricci_eigenvalues = ric.eigenvalues();
      cp.sum_eigenvalues = sum.eigenvalues();
      audit.min_eig_sum = std::min(audit.min_eig_sum, cp.sum_eigenvalues(0));
      audit.points.push_back(std::move(cp));
    } catch (const DomainError& e) {
      audit.skipped.emplace_back(z, e.what());
    }
  }
  if (audit.points.empty()) return audit;

  // |theta| <= A psi^+ + B: A from least squares (clamped at 0), B the smallest shift that covers all points.
  const Eigen::Index n = static_cast<Eigen::Index>(audit.points.size());
  Eigen::MatrixXd X(n, 2);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    X(i, 0) = 1.0;
    X(i, 1) = audit.points[static_cast<std::size_t>(i)].psi_plus;
    y(i) = std::abs(audit.points[static_cast<std::size_t>(i)].theta);
  }
  const Eigen::VectorXd c = X.colPivHouseholderQr().solve(y);
  audit.growth_A = std::isfinite(c(1)) ? std::max(0.0, c(1)) : 0.0;
  audit.growth_B = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < n; ++i) audit.growth_B = std::max(audit.growth_B, y(i) - audit.growth_A * X(i, 1));
  audit.growth_B = std::max(audit.growth_B, 0.0);
  audit.growth_residual = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < n; ++i) {
    audit.growth_residual = std::max(audit.growth_residual, y(i) - audit.growth_A * X(i, 1) - audit.growth_B);
  }
  if (!near_S.empty()) {
    double mn = std::numeric_limits<double>::infinity();
    for (const Point& z : near_S) {
      try {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(complex_hessian(th, z.to_long_double(), h_step),
                                                           Eigen::EigenvaluesOnly);
        mn = std::min(mn, es.eigenvalues()(0));
      } catch (const DomainError& e) {
        audit.skipped.emplace_back(z, std::string("near-S sample: ") + e.what());
      }
    }
    if (std::isfinite(mn)) audit.near_S_min_eig = mn;
  }
  audit.verdict = (audit.min_eig_sum >= -tol && audit.growth_residual <= 0.0) ? Verdict::Pass : Verdict::Fail;
  return audit;
}

VolumeEstimate volume_sublevel(const ManifoldModel& model, double L, std::size_t mc_samples, std::uint64_t seed,
                               int jobs) {
  if (!(L > 1.0) || !std::isfinite(L)) throw std::invalid_argument("volume_sublevel: L must be > 1");
  if (mc_samples < static_cast<std::size_t>(kVolumeShards)) {
    throw std::invalid_argument("volume_sublevel: need at least 64 samples");
  }
  const int n = model.dimension();
  const int R2 = 2 * n;
  double factorial = 1.0;
  for (int k = 2; k <= n; ++k) factorial *= k;

  VolumeEstimate est;
  est.L = L;
  est.samples = mc_samples;
  const bool torus = model.kind() == ModelKind::Torus;

  // Bounding radius from ray probes: the largest radius along each ray still inside the sublevel set.
  double R = 0.0;
  std::vector<std::string> probe_log;
  if (!torus) {
    std::uint64_t st = 0x5EEDULL;
    std::vector<Eigen::VectorXd> dirs;
    for (int a = 0; a < R2; ++a) {
      for (double sgn : {1.0, -1.0}) {
        Eigen::VectorXd d = Eigen::VectorXd::Zero(R2);
        d(a) = sgn;
        dirs.push_back(d);
      }
    }
    for (int k = 0; k < 64; ++k) {
      Eigen::VectorXd d(R2);
      for (int a = 0; a < R2; ++a) d(a) = static_cast<double>(splitmix64(st) >> 11) * 0x1.0p-53 - 0.5;
      if (d.norm() > 0) dirs.push_back(d / d.norm());
    }
    for (const Eigen::VectorXd& d : dirs) {
      double last_inside = 0.0;
      int outside_run = 0;
      // Radii 1e-3 * 1.1^k up to ~1e9.
      for (int k = 0; k < 300 && outside_run < 24; ++k) {
        const double rad = 1e-3 * std::pow(1.1, k);
        VectorXcl z(n);
        for (int j = 0; j < n; ++j) z(j) = ComplexL(rad * d(2 * j), rad * d(2 * j + 1));
        bool inside = false;
        try {
          inside = model.exp_psi(z) < L;
        } catch (const DomainError&) {
        }
        if (inside) {
          last_inside = rad;
          outside_run = 0;
        } else {
          ++outside_run;
        }
      }
      std::ostringstream os;
      os << "ray |d|=1 last inside radius " << last_inside;
      probe_log.push_back(os.str());
      R = std::max(R, last_inside);
    }
    if (!(R > 0.0) || R > 1e8) {
      std::ostringstream os;
      os << "volume_sublevel: bounding-box search failed; probes:";
      for (const auto& p : probe_log) os << "\n  " << p;
      throw NumericalError(os.str());
    }
    R *= 1.25;
  }

  for (int attempt = 0; attempt < 6; ++attempt) {
    const double ylim = std::log(L);
    const double box = torus ? std::pow(2.0 * ylim, n) : std::pow(2.0 * R, R2);
    std::vector<double> s1(kVolumeShards, 0.0), s2(kVolumeShards, 0.0);
    std::vector<int> near_edge(kVolumeShards, 0);
    auto shard = [&](int s) {
      std::uint64_t state = seed;
      for (int k = 0; k <= s; ++k) splitmix64(state);
      std::mt19937_64 gen(splitmix64(state));
      const std::size_t count = mc_samples / kVolumeShards + (static_cast<std::size_t>(s) < mc_samples % kVolumeShards);
      VectorXcl z(n);
      for (std::size_t i = 0; i < count; ++i) {
        double maxc = 0.0;
        for (int j = 0; j < n; ++j) {
          const double u1 = static_cast<double>(gen() >> 11) * 0x1.0p-53;
          const double u2 = static_cast<double>(gen() >> 11) * 0x1.0p-53;
          if (torus) {
            z(j) = ComplexL(u1, ylim * (2.0 * u2 - 1.0));
          } else {
            const double x = R * (2.0 * u1 - 1.0);
            const double y = R * (2.0 * u2 - 1.0);
            maxc = std::max({maxc, std::abs(x), std::abs(y)});
            z(j) = ComplexL(x, y);
          }
        }
        const double g = volume_density(model, z, L, factorial);
        if (g < 0.0) continue;
        s1[s] += g;
        s2[s] += g * g;
        if (!torus && maxc > 0.97 * R) ++near_edge[s];
      }
    };
    const int workers = std::max(1, std::min(jobs, kVolumeShards));
    if (workers == 1) {
      for (int s = 0; s < kVolumeShards; ++s) shard(s);
    } else {
      std::vector<std::thread> pool;
      for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w]() {
          for (int s = w; s < kVolumeShards; s += workers) shard(s);
        });
      }
      for (auto& t : pool) t.join();
    }
    int edge = 0;
    double sum = 0.0, sumsq = 0.0;
    for (int s = 0; s < kVolumeShards; ++s) {
      sum += s1[s];
      sumsq += s2[s];
      edge += near_edge[s];
    }
    if (edge > 0) {
      R *= 1.5;
      continue;
    }
    const double N = static_cast<double>(mc_samples);
    const double mean = sum / N;
    const double var = std::max(0.0, sumsq / N - mean * mean);
    est.value = box * mean;
    est.std_error = box * std::sqrt(var / N);
    est.rel_std_error = est.value > 0.0 ? est.std_error / est.value : 0.0;
    est.box_half_width = R;
    return est;
  }
  throw NumericalError("volume_sublevel: sublevel set keeps reaching the bounding box");
}

VolumeGrowthFit fit_volume_growth(const ManifoldModel& model, const std::vector<double>& L_grid, double r,
                                  std::size_t mc_samples, std::uint64_t seed, int jobs) {
  if (L_grid.size() < 2) throw std::invalid_argument("fit_volume_growth: need at least 2 values of L");
  if (!(r > 0.0)) throw std::invalid_argument("fit_volume_growth: r must be positive");
  VolumeGrowthFit fit;
  fit.r = r;
  for (double L : L_grid) fit.table.push_back(volume_sublevel(model, L, mc_samples, seed, jobs));
  const Eigen::Index n = static_cast<Eigen::Index>(L_grid.size());
  Eigen::MatrixXd X(n, 2);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    X(i, 0) = 1.0;
    X(i, 1) = std::pow(L_grid[static_cast<std::size_t>(i)], r);
    y(i) = std::log(fit.table[static_cast<std::size_t>(i)].value);
  }
  const Eigen::VectorXd c = X.colPivHouseholderQr().solve(y);
  fit.A = std::max(0.0, c(1));
  fit.B = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < n; ++i) fit.B = std::max(fit.B, y(i) - fit.A * X(i, 1));
  // Growth consistent with exponent r: log V / L^r nonincreasing over the top half of the grid.
  bool monotone = true;
  const Eigen::Index first = n / 2;
  for (Eigen::Index i = first + 1; i < n; ++i) {
    if (y(i) / X(i, 1) > y(i - 1) / X(i - 1, 1) + 1e-12) monotone = false;
  }
  fit.satisfiable = std::isfinite(fit.A) && std::isfinite(fit.B) && y.allFinite() && monotone;
  return fit;
}

}  // namespace psiapprox
