#pragma once

#include <vector>

#include "psiapprox/types.hpp"

namespace psiapprox {

/// Sparse multivariate polynomial with complex coefficients.
class MultiPoly {
 public:
  struct Term {
    std::vector<int> exponents;
    Complex coeff;
  };

  MultiPoly() = default;
  /// Terms with equal exponents are merged; zero coefficients dropped.
  MultiPoly(int num_vars, std::vector<Term> terms);

  static MultiPoly variable(int num_vars, int index);
  static MultiPoly constant(int num_vars, Complex value);

  int num_vars() const { return num_vars_; }
  const std::vector<Term>& terms() const { return terms_; }
  int total_degree() const;

  template <class T>
  std::complex<T> eval(const Eigen::Matrix<std::complex<T>, Eigen::Dynamic, 1>& z) const {
    std::complex<T> sum(0);
    for (const Term& term : terms_) {
      std::complex<T> mono(static_cast<T>(term.coeff.real()), static_cast<T>(term.coeff.imag()));
      for (int j = 0; j < num_vars_; ++j) {
        for (int e = 0; e < term.exponents[j]; ++e) mono *= z(j);
      }
      sum += mono;
    }
    return sum;
  }

  Complex operator()(const Eigen::VectorXcd& z) const { return eval<double>(z); }

  MultiPoly derivative(int var) const;

  bool operator==(const MultiPoly& other) const;

 private:
  int num_vars_ = 0;
  std::vector<Term> terms_;
};

}  // namespace psiapprox
