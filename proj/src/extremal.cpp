#include "psiapprox/extremal.hpp"

#include <cmath>
#include <sstream>

#include "psiapprox/orthonormal.hpp"

namespace psiapprox {

ExtremalEstimate christoffel_log_phi(const ManifoldModel& model, const CompactSample& K, const Point& z,
                                     double t) {
  model.validate_point(z);
  auto ob = OrthonormalBasis::build(model, basis_enumerate(model, t), K);
  ExtremalEstimate e;
  e.z = model.canonical(z);
  e.t = t;
  e.dim = ob->dimension();
  e.rank_deficient = ob->rank_deficient();
  const double kernel = ob->evaluate(e.z).squaredNorm();
  e.log_phi_t = std::log(kernel) / (2.0 * t);
  e.bracket = std::log(static_cast<double>(e.dim)) / (2.0 * t);
  return e;
}

BenchmarkGeometry benchmark_geometry(const std::string& k_spec) {
  std::istringstream in(k_spec);
  std::string kind;
  in >> kind;
  std::vector<double> v;
  for (double x; in >> x;) v.push_back(x);
  if (kind == "interval" && v.size() == 2 && v[0] == -1.0 && v[1] == 1.0) return BenchmarkGeometry::Interval;
  if ((kind == "disc" || kind == "circle") && (v.size() == 1 || (v.size() == 3 && v[1] == 0.0 && v[2] == 0.0)) &&
      v[0] == 1.0) {
    return BenchmarkGeometry::Disc;
  }
  if (kind == "torus-slice") return BenchmarkGeometry::TorusSlice;
  return BenchmarkGeometry::None;
}

double interval_extremal(Complex z) {
  // Branch of sqrt(z^2-1) = sqrt(z-1) sqrt(z+1): continuous off [-1,1], ~ z at infinity.
  const Complex w = z + std::sqrt(z - 1.0) * std::sqrt(z + 1.0);
  return std::max(0.0, std::log(std::abs(w)));
}

std::optional<double> reference_extremal(const ManifoldModel& model, const std::string& k_spec, const Point& z) {
  const BenchmarkGeometry g = benchmark_geometry(k_spec);
  switch (g) {
    case BenchmarkGeometry::Interval:
      if (model.dimension() != 1 || model.kind() != ModelKind::Classic) return std::nullopt;
      return interval_extremal(z[0]);
    case BenchmarkGeometry::Disc:
      if (model.dimension() != 1 || model.kind() != ModelKind::Classic) return std::nullopt;
      return std::max(0.0, std::log(std::abs(z[0])));
    case BenchmarkGeometry::TorusSlice:
      if (model.kind() != ModelKind::Torus) return std::nullopt;
      return z.coords().imag().norm();
    case BenchmarkGeometry::None:
      break;
  }
  return std::nullopt;
}

}  // namespace psiapprox
