#include "psiapprox/minimax.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <thread>

namespace psiapprox {
namespace {

constexpr double kWeightFloor = 1e-300;
constexpr double kNoiseFloor = 1e-15;  // normalized units

struct Iterate {
  Eigen::VectorXcd y;
  double d = std::numeric_limits<double>::infinity();
};

// Weighted least squares in orthonormal coordinates with weights u (sum 1).
Eigen::VectorXcd weighted_ls(const Eigen::MatrixXcd& Q, const Eigen::VectorXd& u, const Eigen::VectorXcd& f) {
  const Eigen::VectorXd su = u.cwiseSqrt();
  const Eigen::MatrixXcd A = su.asDiagonal() * Q;
  const Eigen::VectorXcd b = su.asDiagonal() * f;
  return A.householderQr().solve(b);
}

// Dual bound sqrt(sum u |r_u|^2) >= sum u |r_u|, valid for any u >= 0 with sum 1
// when r_u is the u-weighted least-squares residual.
double dual_bound(const Eigen::VectorXd& u, const Eigen::VectorXd& abs_r) {
  return std::sqrt(u.dot(abs_r.cwiseAbs2()));
}

// Lawson-Hanson nonnegative least squares: min ||A u - b||, u >= 0.
Eigen::VectorXd nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
  const Eigen::Index n = A.cols();
  Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
  std::vector<bool> passive(static_cast<std::size_t>(n), false);
  for (int outer = 0; outer < 3 * n + 10; ++outer) {
    const Eigen::VectorXd w = A.transpose() * (b - A * u);
    Eigen::Index pick = -1;
    double best = 1e-14 * (1.0 + b.norm()) * std::max(1.0, A.norm());
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!passive[j] && w(j) > best) {
        best = w(j);
        pick = j;
      }
    }
    if (pick < 0) break;
    passive[pick] = true;
    for (int inner = 0; inner < 3 * n + 10; ++inner) {
      std::vector<Eigen::Index> idx;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[j]) idx.push_back(j);
      }
      Eigen::MatrixXd Ap(A.rows(), static_cast<Eigen::Index>(idx.size()));
      for (std::size_t k = 0; k < idx.size(); ++k) Ap.col(static_cast<Eigen::Index>(k)) = A.col(idx[k]);
      const Eigen::VectorXd z = Ap.colPivHouseholderQr().solve(b);
      if ((z.array() > 0.0).all()) {
        u.setZero();
        for (std::size_t k = 0; k < idx.size(); ++k) u(idx[k]) = z(static_cast<Eigen::Index>(k));
        break;
      }
      double alpha = 1.0;
      for (std::size_t k = 0; k < idx.size(); ++k) {
        const double zk = z(static_cast<Eigen::Index>(k));
        if (zk <= 0.0) alpha = std::min(alpha, u(idx[k]) / (u(idx[k]) - zk));
      }
      for (std::size_t k = 0; k < idx.size(); ++k) {
        u(idx[k]) += alpha * (z(static_cast<Eigen::Index>(k)) - u(idx[k]));
        if (u(idx[k]) <= 1e-300) {
          u(idx[k]) = 0.0;
          passive[idx[k]] = false;
        }
      }
    }
  }
  return u;
}

class Tracker {
 public:
  explicit Tracker(const Eigen::MatrixXcd& Q, const Eigen::VectorXcd& f) : Q_(Q), f_(f) {}

  double offer(const Eigen::VectorXcd& y) {
    const double d = (f_ - Q_ * y).cwiseAbs().maxCoeff();
    if (d < best_.d) {
      best_.d = d;
      best_.y = y;
    }
    return d;
  }
  // Lower bound from a candidate weight vector.
  double bound_from_weights(Eigen::VectorXd u) {
    u = u.cwiseMax(kWeightFloor);
    u /= u.sum();
    const Eigen::VectorXcd y = weighted_ls(Q_, u, f_);
    const Eigen::VectorXd a = (f_ - Q_ * y).cwiseAbs();
    offer(y);
    lb_ = std::max(lb_, dual_bound(u, a));
    return lb_;
  }
  void raise_bound(double lb) { lb_ = std::max(lb_, lb); }

  // Dual weights supported on the near-extremal set of the best iterate,
  // chosen so that sum u_i conj(q(x_i)) r_i ~ 0 (the Kolmogorov condition).
  void extremal_bound() {
    const Eigen::VectorXcd r = f_ - Q_ * best_.y;
    const Eigen::VectorXd a = r.cwiseAbs();
    const double d = a.maxCoeff();
    if (!(d > 0.0)) return;
    for (double delta : {1e-3, 1e-5, 1e-7, 1e-9}) {
      std::vector<Eigen::Index> act;
      for (Eigen::Index i = 0; i < a.size(); ++i) {
        if (a(i) >= d * (1.0 - delta)) act.push_back(i);
      }
      if (act.size() > 4 * static_cast<std::size_t>(Q_.cols()) + 50) continue;
      const Eigen::Index p = Q_.cols();
      const double rho = 1e3;
      Eigen::MatrixXd A(2 * p + 1, static_cast<Eigen::Index>(act.size()));
      for (std::size_t k = 0; k < act.size(); ++k) {
        const Eigen::VectorXcd v = Q_.row(act[k]).adjoint() * (r(act[k]) / d);
        A.col(static_cast<Eigen::Index>(k)) << v.real(), v.imag(), rho;
      }
      Eigen::VectorXd b = Eigen::VectorXd::Zero(2 * p + 1);
      b(2 * p) = rho;
      const Eigen::VectorXd uact = nnls(A, b);
      if (!(uact.sum() > 0.0)) continue;
      Eigen::VectorXd u = Eigen::VectorXd::Zero(a.size());
      for (std::size_t k = 0; k < act.size(); ++k) u(act[k]) = uact(static_cast<Eigen::Index>(k));
      bound_from_weights(u);
    }
  }

  const Iterate& best() const { return best_; }
  double lb() const { return lb_; }

 private:
  const Eigen::MatrixXcd& Q_;
  const Eigen::VectorXcd& f_;
  Iterate best_;
  double lb_ = 0.0;
};

// Log-barrier interior-point method for min s s.t. |f_i - (Q y)_i| <= s,
// written over real variables (k = 1 real problems, k = 2 complex ones).
class BarrierPolish {
 public:
  BarrierPolish(const Eigen::MatrixXcd& Q, const Eigen::VectorXcd& f, bool real_mode)
      : M_(Q.rows()), k_(real_mode ? 1 : 2), real_(real_mode) {
    const Eigen::Index r = Q.cols();
    p_ = real_mode ? r : 2 * r;
    B_.resize(k_ * M_, p_);
    b_.resize(k_ * M_);
    for (Eigen::Index i = 0; i < M_; ++i) {
      if (real_mode) {
        B_.row(i) = Q.row(i).real();
        b_(i) = f(i).real();
      } else {
        B_.row(2 * i) << Q.row(i).real(), -Q.row(i).imag();
        B_.row(2 * i + 1) << Q.row(i).imag(), Q.row(i).real();
        b_(2 * i) = f(i).real();
        b_(2 * i + 1) = f(i).imag();
      }
    }
  }

  Eigen::VectorXd to_real(const Eigen::VectorXcd& y) const {
    if (real_) return y.real();
    Eigen::VectorXd x(p_);
    x << y.real(), y.imag();
    return x;
  }
  Eigen::VectorXcd to_complex(const Eigen::VectorXd& x) const {
    if (real_) return x.cast<Complex>();
    const Eigen::Index r = p_ / 2;
    Eigen::VectorXcd y(r);
    for (Eigen::Index j = 0; j < r; ++j) y(j) = Complex(x(j), x(r + j));
    return y;
  }

  // Returns true with D filled when (x, s) is strictly feasible.
  bool slack(const Eigen::VectorXd& x, double s, Eigen::VectorXd& u, Eigen::VectorXd& D) const {
    if (!(s > 0.0)) return false;
    u = b_ - B_ * x;
    D.resize(M_);
    for (Eigen::Index i = 0; i < M_; ++i) {
      const double n2 = k_ == 1 ? u(i) * u(i) : u(2 * i) * u(2 * i) + u(2 * i + 1) * u(2 * i + 1);
      D(i) = s * s - n2;
      if (!(D(i) > 0.0)) return false;
    }
    return true;
  }

  double barrier(double tau, double s, const Eigen::VectorXd& D) const {
    return tau * s - D.array().log().sum();
  }

  int run(Eigen::VectorXd x, double s, double lb, double gap_rel, Tracker& tracker) {
    Eigen::VectorXd u, D;
    if (!slack(x, s, u, D)) return 0;
    const double nu = 2.0 * static_cast<double>(M_);
    double tau = nu / std::max(s - lb, 1e-3 * s);
    int steps = 0;
    for (int outer = 0; outer < 60; ++outer) {
      bool stalled = false;
      for (int inner = 0; inner < 60; ++inner) {
        // Gradient and Hessian of tau s - sum log D_i.
        Eigen::VectorXd invD = D.cwiseInverse();
        Eigen::VectorXd scale(k_ * M_);
        for (Eigen::Index i = 0; i < M_; ++i) {
          for (int c = 0; c < k_; ++c) scale(k_ * i + c) = invD(i);
        }
        Eigen::MatrixXd G(M_, p_);  // row i: 2 B_i^T u_i / D_i
        const Eigen::MatrixXd Bu = (2.0 * u.cwiseProduct(scale)).asDiagonal() * B_;
        if (k_ == 1) {
          G = Bu;
        } else {
          for (Eigen::Index i = 0; i < M_; ++i) G.row(i) = Bu.row(2 * i) + Bu.row(2 * i + 1);
        }
        const Eigen::VectorXd sD = (2.0 * s) * invD;
        Eigen::VectorXd grad(p_ + 1);
        grad.head(p_) = -G.colwise().sum().transpose();
        grad(p_) = tau - sD.sum();
        Eigen::MatrixXd H(p_ + 1, p_ + 1);
        H.topLeftCorner(p_, p_) = G.transpose() * G + 2.0 * B_.transpose() * scale.asDiagonal() * B_;
        H.topRightCorner(p_, 1) = G.transpose() * sD;
        H.bottomLeftCorner(1, p_) = H.topRightCorner(p_, 1).transpose();
        H(p_, p_) = sD.squaredNorm() - 2.0 * invD.sum();
        Eigen::LDLT<Eigen::MatrixXd> ldlt(H);
        if (ldlt.info() != Eigen::Success) {
          stalled = true;
          break;
        }
        const Eigen::VectorXd step = -ldlt.solve(grad);
        const double decrement = -grad.dot(step);
        if (!std::isfinite(decrement) || decrement < 0.0) {
          stalled = true;
          break;
        }
        if (decrement < 1e-10) break;
        const double f0 = barrier(tau, s, D);
        double alpha = 1.0;
        Eigen::VectorXd xn, un, Dn;
        double sn = 0.0;
        bool accepted = false;
        for (int ls = 0; ls < 80; ++ls, alpha *= 0.5) {
          xn = x + alpha * step.head(p_);
          sn = s + alpha * step(p_);
          if (!slack(xn, sn, un, Dn)) continue;
          if (barrier(tau, sn, Dn) <= f0 - 0.25 * alpha * decrement) {
            accepted = true;
            break;
          }
        }
        ++steps;
        // Below this decrement the gradient is dominated by cancellation error.
        if (!accepted || (alpha < 1.0 && decrement < 1e-5)) {
          stalled = decrement > 1e-4;
          break;
        }
        x = xn;
        s = sn;
        u = un;
        D = Dn;
      }
      tracker.offer(to_complex(x));
      // Barrier duals lambda_i ~ 1 / D_i give a weight vector for a dual bound.
      tracker.bound_from_weights(D.cwiseInverse());
      if (stalled) break;
      if (nu / tau <= std::max(gap_rel * s, kNoiseFloor)) break;
      const double gap = tracker.best().d - tracker.lb();
      if (gap <= std::max(gap_rel * tracker.best().d, kNoiseFloor)) break;
      tau *= 10.0;
      // Re-enter the new tau's central path from the current point.
      if (!slack(x, s, u, D)) break;
    }
    return steps;
  }

 private:
  Eigen::Index M_;
  int k_;
  bool real_;
  Eigen::Index p_;
  Eigen::MatrixXd B_;
  Eigen::VectorXd b_;
};

bool is_real(const Eigen::MatrixXcd& Q, const Eigen::VectorXcd& f) {
  return (Q.imag().array() == 0.0).all() && (f.imag().array() == 0.0).all();
}

}  // namespace

ApproxSolution solve_minimax_orthonormal(const Eigen::MatrixXcd& Q, const Eigen::VectorXd& weights,
                                         const Eigen::VectorXcd& target, const MinimaxOptions& options) {
  if (!(options.tol > 0.0)) throw std::invalid_argument("solve_minimax: tol must be positive");
  if (Q.rows() != target.size() || weights.size() != target.size()) {
    throw std::invalid_argument("solve_minimax: dimension mismatch");
  }
  if (!Q.allFinite() || !target.allFinite()) throw std::invalid_argument("solve_minimax: non-finite input");
  ApproxSolution sol;
  const double scale = target.cwiseAbs().maxCoeff();
  if (scale == 0.0) {
    sol.coeffs = Eigen::VectorXcd::Zero(Q.cols());
    sol.converged = true;
    return sol;
  }
  const Eigen::VectorXcd f = target / scale;
  Tracker tracker(Q, f);

  Eigen::VectorXd u = weights / weights.sum();
  // Plain weighted least squares: Q is orthonormal in the sample weights.
  const Eigen::VectorXcd y_ls = Q.adjoint() * u.asDiagonal() * f;
  const Eigen::VectorXd a_ls = (f - Q * y_ls).cwiseAbs();
  const double d_ls = a_ls.maxCoeff();
  tracker.offer(y_ls);
  tracker.raise_bound(dual_bound(u, a_ls));
  sol.ls_residual = d_ls * scale;

  const auto closed = [&]() {
    const double d = tracker.best().d;
    return d - tracker.lb() <= 1e-6 * d + 1e-13;
  };

  int iterations = 0;
  if (d_ls > kNoiseFloor * 10.0) {
    double d_prev = d_ls;
    Eigen::VectorXd abs_r = a_ls;
    for (int it = 0; it < options.max_iter; ++it) {
      u = u.cwiseProduct(abs_r).cwiseMax(kWeightFloor);
      u /= u.sum();
      const Eigen::VectorXcd y = weighted_ls(Q, u, f);
      abs_r = (f - Q * y).cwiseAbs();
      const double d = abs_r.maxCoeff();
      tracker.offer(y);
      tracker.raise_bound(dual_bound(u, abs_r));
      ++iterations;
      const double gap = tracker.best().d - tracker.lb();
      if (gap <= options.handoff * tracker.best().d && options.polish) break;
      if (std::abs(d - d_prev) < options.tol * d) break;
      d_prev = d;
    }
    if (options.polish && !closed()) {
      BarrierPolish bp(Q, f, is_real(Q, f));
      const Iterate start = tracker.best();
      const double s0 = start.d * (1.0 + 1e-2) + 1e-300;
      iterations += bp.run(bp.to_real(start.y), s0, tracker.lb(), options.barrier_gap, tracker);
    }
    if (!closed()) tracker.extremal_bound();
  }
  sol.coeffs = tracker.best().y * scale;
  sol.d_value = tracker.best().d * scale;
  sol.lower_bound = std::min(tracker.lb(), tracker.best().d) * scale;
  sol.iterations = iterations;
  sol.converged = closed();
  return sol;
}

ApproxSolution solve_minimax(const ApproxProblem& problem, double tol, int max_iter) {
  MinimaxOptions o;
  o.tol = tol;
  o.max_iter = max_iter;
  return solve_minimax(problem, o);
}

ApproxSolution solve_minimax(const ApproxProblem& problem, const MinimaxOptions& options) {
  const Eigen::Index M = static_cast<Eigen::Index>(problem.sample.size());
  if (problem.basis_matrix.rows() != M || problem.target.size() != M) {
    throw std::invalid_argument("solve_minimax: basis matrix rows / target length != sample size");
  }
  const Orthonormalization o = orthonormalize(problem.basis_matrix, problem.sample.weights);
  ApproxSolution sol = solve_minimax_orthonormal(o.Q, problem.sample.weights, problem.target, options);
  const Eigen::Index r = o.effective_dimension;
  Eigen::MatrixXcd Rk(r, r);
  for (Eigen::Index j = 0; j < r; ++j) Rk.col(j) = o.R.col(o.kept[j]);
  const Eigen::VectorXcd ck = Rk.triangularView<Eigen::Upper>().solve(sol.coeffs);
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(problem.basis_matrix.cols());
  for (Eigen::Index j = 0; j < r; ++j) c(o.kept[j]) = ck(j);
  sol.coeffs = c;
  return sol;
}

PsiPolynomial Approximant::to_polynomial(std::shared_ptr<const ManifoldModel> model) const {
  return PsiPolynomial(std::move(model), basis->basis(), basis->basis_coefficients(y));
}

std::vector<ApproxRecord> approx_sweep(const ManifoldModel& model, const CompactSample& K, const FunctionSpec& f,
                                       const std::vector<double>& t_list, const SweepOptions& options) {
  for (std::size_t i = 1; i < t_list.size(); ++i) {
    if (!(t_list[i] > t_list[i - 1])) throw std::invalid_argument("approx_sweep: t_list must be strictly increasing");
  }
  Eigen::VectorXcd target(static_cast<Eigen::Index>(K.size()));
  for (std::size_t i = 0; i < K.size(); ++i) target(static_cast<Eigen::Index>(i)) = f(K.points[i]);

  std::vector<ApproxRecord> records(t_list.size());
  auto work = [&](std::size_t idx) {
    ApproxRecord& rec = records[idx];
    rec.t = t_list[idx];
    try {
      std::vector<BasisElement> basis = basis_enumerate(model, rec.t);
      rec.dim = static_cast<Eigen::Index>(basis.size());
      auto ob = OrthonormalBasis::build(model, std::move(basis), K);
      rec.effective_dim = ob->dimension();
      const ApproxSolution sol = solve_minimax_orthonormal(ob->values(), ob->weights(), target, options.minimax);
      rec.d_value = sol.d_value;
      rec.lower_bound = sol.lower_bound;
      rec.ls_residual = sol.ls_residual;
      rec.iterations = sol.iterations;
      rec.converged = sol.converged;
      rec.floor_flag = sol.d_value <= kPrecisionFloor;
      rec.approximant = Approximant{ob, sol.coeffs};
    } catch (const std::exception& e) {
      rec.error = e.what();
    }
  };
  const int jobs = std::max(1, std::min<int>(options.jobs, static_cast<int>(t_list.size())));
  if (jobs == 1) {
    for (std::size_t i = 0; i < t_list.size(); ++i) work(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) {
      pool.emplace_back([&]() {
        for (std::size_t i = next++; i < t_list.size(); i = next++) work(i);
      });
    }
    for (auto& th : pool) th.join();
  }
  return records;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_sweep_csv(const std::vector<ApproxRecord>& records, std::ostream& out) {
  out << "t,dim,d_value,lower_bound,iterations,converged,floor_flag\n";
  for (const ApproxRecord& r : records) {
    out << format_double(r.t) << ',' << r.dim << ',' << (r.error ? "nan" : format_double(r.d_value)) << ','
        << (r.error ? "nan" : format_double(r.lower_bound)) << ',' << r.iterations << ','
        << (r.converged ? "true" : "false") << ',' << (r.floor_flag ? "true" : "false") << '\n';
  }
}

}  // namespace psiapprox
