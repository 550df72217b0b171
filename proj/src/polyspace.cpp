#include "psiapprox/polyspace.hpp"

#include <algorithm>
#include <map>

namespace psiapprox {
namespace {

constexpr double kSurvivor = 1e-300;

Complex pairwise_range(const std::vector<Complex>& v, std::size_t lo, std::size_t hi) {
  if (hi - lo <= 8) {
    Complex s(0.0);
    for (std::size_t i = lo; i < hi; ++i) s += v[i];
    return s;
  }
  const std::size_t mid = lo + (hi - lo) / 2;
  return pairwise_range(v, lo, mid) + pairwise_range(v, mid, hi);
}

void require_same_model(const PsiPolynomial& p, const PsiPolynomial& q) {
  if (p.model_ptr() != q.model_ptr() && !(p.model() == q.model())) {
    throw std::invalid_argument("psi-polynomial arithmetic across different models");
  }
}

PsiPolynomial combine(const PsiPolynomial& p, const PsiPolynomial& q, Complex sign) {
  require_same_model(p, q);
  const ManifoldModel& model = p.model();
  std::map<std::vector<int>, std::pair<BasisElement, Complex>> merged;
  for (std::size_t i = 0; i < p.basis().size(); ++i) {
    auto& slot = merged[p.basis()[i].exponents];
    slot.first = p.basis()[i];
    slot.second += p.coeffs()(static_cast<Eigen::Index>(i));
  }
  for (std::size_t i = 0; i < q.basis().size(); ++i) {
    auto& slot = merged[q.basis()[i].exponents];
    slot.first = q.basis()[i];
    slot.second += sign * q.coeffs()(static_cast<Eigen::Index>(i));
  }
  std::vector<std::pair<BasisElement, Complex>> items;
  items.reserve(merged.size());
  for (auto& [key, v] : merged) items.push_back(v);
  std::sort(items.begin(), items.end(),
            [&](const auto& a, const auto& b) { return basis_less(model, a.first, b.first); });
  std::vector<BasisElement> basis;
  Eigen::VectorXcd c(static_cast<Eigen::Index>(items.size()));
  for (std::size_t i = 0; i < items.size(); ++i) {
    basis.push_back(items[i].first);
    c(static_cast<Eigen::Index>(i)) = items[i].second;
  }
  return PsiPolynomial(p.model_ptr(), std::move(basis), std::move(c));
}

}  // namespace

PsiPolynomial::PsiPolynomial(std::shared_ptr<const ManifoldModel> model, std::vector<BasisElement> basis,
                             Eigen::VectorXcd coeffs)
    : model_(std::move(model)), basis_(std::move(basis)), coeffs_(std::move(coeffs)) {
  if (!model_) throw std::invalid_argument("psi-polynomial requires a model");
  if (static_cast<Eigen::Index>(basis_.size()) != coeffs_.size()) {
    throw std::invalid_argument("psi-polynomial: coefficient count != basis size");
  }
  for (std::size_t i = 0; i < basis_.size(); ++i) {
    if (std::abs(coeffs_(static_cast<Eigen::Index>(i))) > kSurvivor) {
      psi_degree_ = std::max(psi_degree_, basis_[i].psi_degree);
    }
  }
}

PsiPolynomial PsiPolynomial::zero(std::shared_ptr<const ManifoldModel> model) {
  return PsiPolynomial(std::move(model), {}, Eigen::VectorXcd());
}

PsiPolynomial PsiPolynomial::element(std::shared_ptr<const ManifoldModel> model, const BasisElement& b,
                                     Complex coeff) {
  Eigen::VectorXcd c(1);
  c(0) = coeff;
  return PsiPolynomial(std::move(model), {b}, c);
}

nlohmann::ordered_json PsiPolynomial::to_json() const {
  nlohmann::ordered_json j;
  j["model"] = model_->describe();
  j["psi_degree"] = psi_degree_;
  nlohmann::ordered_json terms = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < basis_.size(); ++i) {
    const Complex c = coeffs_(static_cast<Eigen::Index>(i));
    terms.push_back({{"basis", basis_[i].exponents}, {"coeff", {c.real(), c.imag()}}});
  }
  j["terms"] = std::move(terms);
  return j;
}

PsiPolynomial PsiPolynomial::from_json(std::shared_ptr<const ManifoldModel> model, const nlohmann::json& j) {
  std::vector<BasisElement> basis;
  std::vector<Complex> c;
  for (const auto& term : j.at("terms")) {
    basis.push_back(make_basis_element(*model, term.at("basis").get<std::vector<int>>()));
    c.emplace_back(term.at("coeff").at(0).get<double>(), term.at("coeff").at(1).get<double>());
  }
  Eigen::VectorXcd v(static_cast<Eigen::Index>(c.size()));
  for (std::size_t i = 0; i < c.size(); ++i) v(static_cast<Eigen::Index>(i)) = c[i];
  return PsiPolynomial(std::move(model), std::move(basis), std::move(v));
}

Complex pairwise_sum(const std::vector<Complex>& terms) { return pairwise_range(terms, 0, terms.size()); }

Complex poly_eval(const PsiPolynomial& p, const Point& z) {
  p.model().validate_point(z);
  std::vector<Complex> terms;
  terms.reserve(p.basis().size());
  for (std::size_t i = 0; i < p.basis().size(); ++i) {
    const Complex c = p.coeffs()(static_cast<Eigen::Index>(i));
    if (c == Complex(0.0)) continue;
    terms.push_back(c * basis_value(p.model(), p.basis()[i], z));
  }
  return pairwise_sum(terms);
}

PsiPolynomial poly_add(const PsiPolynomial& p, const PsiPolynomial& q) { return combine(p, q, 1.0); }
PsiPolynomial poly_sub(const PsiPolynomial& p, const PsiPolynomial& q) { return combine(p, q, -1.0); }

PsiPolynomial poly_scale(const PsiPolynomial& p, Complex c) {
  return PsiPolynomial(p.model_ptr(), p.basis(), p.coeffs() * c);
}

std::size_t space_dimension(const ManifoldModel& model, double t) { return basis_enumerate(model, t).size(); }

}  // namespace psiapprox
