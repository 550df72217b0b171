#pragma once

#include <memory>
#include <vector>

#include "json.hpp"

#include "psiapprox/manifold.hpp"

namespace psiapprox {

/// Dense coefficient vector over an ordered list of basis elements.
class PsiPolynomial {
 public:
  /// psi_degree is recomputed from coefficients with magnitude > 1e-300.
  PsiPolynomial(std::shared_ptr<const ManifoldModel> model, std::vector<BasisElement> basis,
                Eigen::VectorXcd coeffs);

  static PsiPolynomial zero(std::shared_ptr<const ManifoldModel> model);
  static PsiPolynomial element(std::shared_ptr<const ManifoldModel> model, const BasisElement& b,
                               Complex coeff = 1.0);

  const ManifoldModel& model() const { return *model_; }
  const std::shared_ptr<const ManifoldModel>& model_ptr() const { return model_; }
  const std::vector<BasisElement>& basis() const { return basis_; }
  const Eigen::VectorXcd& coeffs() const { return coeffs_; }
  double psi_degree() const { return psi_degree_; }

  nlohmann::ordered_json to_json() const;
  static PsiPolynomial from_json(std::shared_ptr<const ManifoldModel> model, const nlohmann::json& j);

 private:
  std::shared_ptr<const ManifoldModel> model_;
  std::vector<BasisElement> basis_;
  Eigen::VectorXcd coeffs_;
  double psi_degree_ = 0.0;
};

/// Sum of c_j b_j(z) with pairwise summation.
Complex poly_eval(const PsiPolynomial& p, const Point& z);
PsiPolynomial poly_add(const PsiPolynomial& p, const PsiPolynomial& q);
PsiPolynomial poly_sub(const PsiPolynomial& p, const PsiPolynomial& q);
PsiPolynomial poly_scale(const PsiPolynomial& p, Complex c);

std::size_t space_dimension(const ManifoldModel& model, double t);

/// Pairwise (cascade) summation used by poly_eval.
Complex pairwise_sum(const std::vector<Complex>& terms);

}  // namespace psiapprox
