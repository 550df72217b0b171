#pragma once

#include <complex>
#include <initializer_list>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace psiapprox {

using Complex = std::complex<double>;
using ComplexL = std::complex<long double>;
using VectorXcl = Eigen::Matrix<ComplexL, Eigen::Dynamic, 1>;
using MatrixXcl = Eigen::Matrix<ComplexL, Eigen::Dynamic, Eigen::Dynamic>;

inline constexpr char kVersion[] = "psiapprox 0.1.0";

/// Evaluation outside the natural domain of a field (pole, F = 0, strip edge).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Malformed or unknown configuration input.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A model descriptor that violates its structural invariants.
class ModelValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Finite-difference or solver failure that cannot be recovered locally.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A point of a model manifold given by its N complex coordinates.
class Point {
 public:
  Point() = default;
  explicit Point(Eigen::VectorXcd coords) : coords_(std::move(coords)) {}
  Point(std::initializer_list<Complex> values)
      : coords_(static_cast<Eigen::Index>(values.size())) {
    Eigen::Index i = 0;
    for (const Complex& v : values) coords_(i++) = v;
  }

  Eigen::Index dim() const { return coords_.size(); }
  const Complex& operator[](Eigen::Index i) const { return coords_(i); }
  const Eigen::VectorXcd& coords() const { return coords_; }
  VectorXcl to_long_double() const { return coords_.cast<ComplexL>(); }

  bool operator==(const Point& other) const {
    return coords_.size() == other.coords_.size() && coords_ == other.coords_;
  }

 private:
  Eigen::VectorXcd coords_;
};

}  // namespace psiapprox
