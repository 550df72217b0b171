#pragma once

#include <memory>
#include <vector>

#include "psiapprox/compact.hpp"
#include "psiapprox/polyspace.hpp"

namespace psiapprox {

/// A = Q R with Q orthonormal under <u,v> = sum_i w_i u_i conj(v_i).
/// R has one row per kept column; dropped columns keep their projections.
struct Orthonormalization {
  Eigen::MatrixXcd Q;
  Eigen::MatrixXcd R;
  std::vector<int> kept;
  Eigen::Index effective_dimension = 0;
  bool rank_deficient() const { return effective_dimension < R.cols(); }
};

/// Weighted modified Gram-Schmidt with one reorthogonalization pass.
/// Columns whose residual pivot falls below 1e-12 of the largest column
/// norm are dropped.
Orthonormalization orthonormalize(const Eigen::MatrixXcd& A, const Eigen::VectorXd& weights);

/// Orthonormal basis of a structured P_t^psi on a sample, evaluable at new
/// points. Multiplicative models use a Vandermonde-with-Arnoldi recurrence
/// (column k = generator * column parent(k)), which keeps the basis well
/// conditioned; the Torus uses its characters directly.
class OrthonormalBasis {
 public:
  static std::shared_ptr<const OrthonormalBasis> build(const ManifoldModel& model,
                                                       std::vector<BasisElement> basis,
                                                       const CompactSample& sample);

  const Eigen::MatrixXcd& values() const { return Q_; }
  const Eigen::VectorXd& weights() const { return weights_; }
  Eigen::Index dimension() const { return Q_.cols(); }
  Eigen::Index nominal_dimension() const { return static_cast<Eigen::Index>(basis_.size()); }
  bool rank_deficient() const { return dimension() < nominal_dimension(); }
  const std::vector<BasisElement>& basis() const { return basis_; }
  const ManifoldModel& model() const { return model_; }

  /// (q_1(z), ..., q_r(z)).
  Eigen::VectorXcd evaluate(const Point& z) const;
  /// Coefficients over basis() of sum_j y_j q_j.
  Eigen::VectorXcd basis_coefficients(const Eigen::VectorXcd& y) const;

 private:
  explicit OrthonormalBasis(const ManifoldModel& model) : model_(model) {}

  struct Step {
    int generator = -1;
    int parent = -1;
    bool kept = false;
    int q_index = -1;
    Eigen::VectorXcd h;  // projections on q_0..q_{q_index-1}
    double pivot = 1.0;
  };

  ManifoldModel model_;
  std::vector<BasisElement> basis_;
  Eigen::VectorXd weights_;
  Eigen::MatrixXcd Q_;
  bool recurrence_ = false;
  std::vector<Step> steps_;  // recurrence mode, one per basis element
  Eigen::MatrixXcd T_;       // basis coefficients of each q (d x r)
};

}  // namespace psiapprox
