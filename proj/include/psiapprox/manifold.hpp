#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "psiapprox/multipoly.hpp"
#include "psiapprox/types.hpp"

namespace psiapprox {

enum class ModelKind { Classic, MappedPolynomial, Torus, GraphComplement };

std::string to_string(ModelKind kind);

/// Values and holomorphic Jacobian (rows = components, cols = coordinates)
/// of the map whose squared norm defines e^psi for mapped and graph models.
struct HolomorphicJet {
  VectorXcl values;
  MatrixXcl jacobian;
};

/// One element of the structured basis of P_t^psi.
///
/// Exponent layout per kind: Classic z^a (N entries >= 0); MappedPolynomial
/// g^a (m entries >= 0); Torus lattice vector a (N signed entries);
/// GraphComplement (beta_1..beta_{N-1} >= 0, k signed) for z'^beta F^k.
struct BasisElement {
  std::vector<int> exponents;
  double psi_degree = 0.0;

  bool operator==(const BasisElement& other) const { return exponents == other.exponents; }
};

/// Descriptor of (X, psi) for the four supported model classes.
class ManifoldModel {
 public:
  static ManifoldModel classic(int dimension);
  /// Throws ModelValidationError when m < N or a polynomial has the wrong arity.
  static ManifoldModel mapped_polynomial(int dimension, std::vector<MultiPoly> maps);
  static ManifoldModel torus(int dimension);
  /// f is a polynomial in the first N-1 coordinates; F(z) = z_N - f(z').
  static ManifoldModel graph_complement(int dimension, MultiPoly f);

  ModelKind kind() const { return kind_; }
  int dimension() const { return dimension_; }
  const std::vector<MultiPoly>& maps() const { return maps_; }
  const MultiPoly& graph_function() const { return graph_f_; }

  /// psi(z). Classic at the origin returns -infinity.
  double psi(const Point& z) const;
  double psi_plus(const Point& z) const;
  /// e^psi in extended precision, the potential of the metric form.
  long double exp_psi(const VectorXcl& z) const;

  /// F(z) = z_N - f(z') (GraphComplement only).
  ComplexL graph_F(const VectorXcl& z) const;

  /// Torus: reduce real parts to [0,1). Other kinds: identity.
  Point canonical(const Point& z) const;
  /// Throws std::invalid_argument for wrong dimension or non-finite entries,
  /// DomainError for GraphComplement points with F(z) = 0.
  void validate_point(const Point& z) const;

  /// Checks rank N of the Jacobian of g at every probe (MappedPolynomial only).
  void validate_jacobian_rank(std::span<const Point> probes) const;

  /// Number of multiplicative generators of the structured basis
  /// (Classic N, Mapped m, Graph N+1: z', F, 1/F; Torus 0).
  int generator_count() const;
  Complex generator(int index, const Point& z) const;
  /// Exponent vector of generator(index) * (basis element with `exponents`).
  std::vector<int> multiply_by_generator(const std::vector<int>& exponents, int index) const;

  /// Holomorphic component map and Jacobian (MappedPolynomial, GraphComplement).
  HolomorphicJet jet(const VectorXcl& z) const;

  std::string describe() const;
  bool operator==(const ManifoldModel& other) const;

 private:
  ManifoldModel(ModelKind kind, int dimension) : kind_(kind), dimension_(dimension) {}

  ModelKind kind_;
  int dimension_;
  std::vector<MultiPoly> maps_;
  std::vector<std::vector<MultiPoly>> map_derivatives_;
  MultiPoly graph_f_;
  std::vector<MultiPoly> graph_f_derivatives_;
};

/// Basis of P_t^psi in graded order: ascending psi-degree, then descending
/// lexicographic exponent vector. Always contains the constant first.
std::vector<BasisElement> basis_enumerate(const ManifoldModel& model, double t);

/// Strict weak order consistent with basis_enumerate.
bool basis_less(const ManifoldModel& model, const BasisElement& a, const BasisElement& b);

BasisElement make_basis_element(const ManifoldModel& model, std::vector<int> exponents);

Complex basis_value(const ManifoldModel& model, const BasisElement& element, const Point& z);

}  // namespace psiapprox
