#include "psiapprox/multipoly.hpp"

#include <algorithm>
#include <map>

namespace psiapprox {

MultiPoly::MultiPoly(int num_vars, std::vector<Term> terms) : num_vars_(num_vars) {
  if (num_vars < 0) throw std::invalid_argument("MultiPoly: negative variable count");
  std::map<std::vector<int>, Complex> merged;
  for (Term& term : terms) {
    if (static_cast<int>(term.exponents.size()) != num_vars) {
      throw std::invalid_argument("MultiPoly: exponent tuple length does not match variable count");
    }
    for (int e : term.exponents) {
      if (e < 0) throw std::invalid_argument("MultiPoly: negative exponent");
    }
    merged[term.exponents] += term.coeff;
  }
  for (auto& [exps, c] : merged) {
    if (c != Complex(0.0)) terms_.push_back({exps, c});
  }
}

MultiPoly MultiPoly::variable(int num_vars, int index) {
  std::vector<int> e(num_vars, 0);
  e.at(index) = 1;
  return MultiPoly(num_vars, {{e, Complex(1.0)}});
}

MultiPoly MultiPoly::constant(int num_vars, Complex value) {
  return MultiPoly(num_vars, {{std::vector<int>(num_vars, 0), value}});
}

int MultiPoly::total_degree() const {
  int deg = 0;
  for (const Term& t : terms_) {
    int d = 0;
    for (int e : t.exponents) d += e;
    deg = std::max(deg, d);
  }
  return deg;
}

MultiPoly MultiPoly::derivative(int var) const {
  std::vector<Term> out;
  for (const Term& t : terms_) {
    const int e = t.exponents.at(var);
    if (e == 0) continue;
    Term d = t;
    d.exponents[var] = e - 1;
    d.coeff *= static_cast<double>(e);
    out.push_back(std::move(d));
  }
  return MultiPoly(num_vars_, std::move(out));
}

bool MultiPoly::operator==(const MultiPoly& other) const {
  if (num_vars_ != other.num_vars_ || terms_.size() != other.terms_.size()) return false;
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (terms_[i].exponents != other.terms_[i].exponents || terms_[i].coeff != other.terms_[i].coeff) {
      return false;
    }
  }
  return true;
}

}  // namespace psiapprox
