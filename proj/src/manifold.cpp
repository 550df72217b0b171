#include "psiapprox/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace psiapprox {
namespace {

constexpr double kDegreeSlack = 1e-9;
constexpr double kTwoPi = 6.283185307179586476925286766559;

// All exponent vectors of length n with entries >= 0 summing to d,
// in descending lexicographic order.
void compositions_desc(int n, int d, std::vector<int>& prefix, std::vector<std::vector<int>>& out) {
  if (static_cast<int>(prefix.size()) == n - 1) {
    prefix.push_back(d);
    out.push_back(prefix);
    prefix.pop_back();
    return;
  }
  for (int first = d; first >= 0; --first) {
    prefix.push_back(first);
    compositions_desc(n, d - first, prefix, out);
    prefix.pop_back();
  }
}

std::vector<std::vector<int>> graded_monomials(int n, int max_degree) {
  std::vector<std::vector<int>> out;
  std::vector<int> prefix;
  for (int d = 0; d <= max_degree; ++d) {
    if (n == 0) {
      if (d == 0) out.emplace_back();
      continue;
    }
    compositions_desc(n, d, prefix, out);
  }
  return out;
}

int abs_sum(const std::vector<int>& e) {
  int s = 0;
  for (int v : e) s += std::abs(v);
  return s;
}

long norm2(const std::vector<int>& e) {
  long s = 0;
  for (int v : e) s += static_cast<long>(v) * v;
  return s;
}

bool lex_desc(const std::vector<int>& a, const std::vector<int>& b) {
  return std::lexicographical_compare(b.begin(), b.end(), a.begin(), a.end());
}

// Lattice vectors of Z^n with norm2 <= bound.
void lattice_ball(int n, long bound, std::vector<int>& prefix, long used, std::vector<std::vector<int>>& out) {
  if (static_cast<int>(prefix.size()) == n) {
    out.push_back(prefix);
    return;
  }
  const long room = bound - used;
  const int reach = static_cast<int>(std::floor(std::sqrt(static_cast<double>(room)) + 1e-9));
  for (int v = -reach; v <= reach; ++v) {
    const long add = static_cast<long>(v) * v;
    if (add > room) continue;
    prefix.push_back(v);
    lattice_ball(n, bound, prefix, used + add, out);
    prefix.pop_back();
  }
}

}  // namespace

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Classic:
      return "classic";
    case ModelKind::MappedPolynomial:
      return "mapped_polynomial";
    case ModelKind::Torus:
      return "torus";
    case ModelKind::GraphComplement:
      return "graph_complement";
  }
  return "unknown";
}

ManifoldModel ManifoldModel::classic(int dimension) {
  if (dimension < 1) throw ModelValidationError("model dimension must be >= 1");
  return ManifoldModel(ModelKind::Classic, dimension);
}

ManifoldModel ManifoldModel::torus(int dimension) {
  if (dimension < 1) throw ModelValidationError("model dimension must be >= 1");
  return ManifoldModel(ModelKind::Torus, dimension);
}

ManifoldModel ManifoldModel::mapped_polynomial(int dimension, std::vector<MultiPoly> maps) {
  if (dimension < 1) throw ModelValidationError("model dimension must be >= 1");
  if (static_cast<int>(maps.size()) < dimension) {
    throw ModelValidationError("mapped_polynomial requires m >= N polynomials");
  }
  ManifoldModel m(ModelKind::MappedPolynomial, dimension);
  for (const MultiPoly& g : maps) {
    if (g.num_vars() != dimension) throw ModelValidationError("mapped_polynomial: polynomial arity != N");
    std::vector<MultiPoly> d;
    for (int k = 0; k < dimension; ++k) d.push_back(g.derivative(k));
    m.map_derivatives_.push_back(std::move(d));
  }
  m.maps_ = std::move(maps);
  return m;
}

ManifoldModel ManifoldModel::graph_complement(int dimension, MultiPoly f) {
  if (dimension < 1) throw ModelValidationError("model dimension must be >= 1");
  if (f.num_vars() != dimension - 1) {
    throw ModelValidationError("graph_complement: f must be a polynomial in N-1 variables");
  }
  ManifoldModel m(ModelKind::GraphComplement, dimension);
  for (int k = 0; k < dimension - 1; ++k) m.graph_f_derivatives_.push_back(f.derivative(k));
  m.graph_f_ = std::move(f);
  return m;
}

ComplexL ManifoldModel::graph_F(const VectorXcl& z) const {
  const int n = dimension_;
  VectorXcl zp = z.head(n - 1);
  return z(n - 1) - graph_f_.eval<long double>(zp);
}

double ManifoldModel::psi(const Point& z) const {
  validate_point(z);
  switch (kind_) {
    case ModelKind::Classic: {
      const double r = z.coords().norm();
      return r == 0.0 ? -std::numeric_limits<double>::infinity() : std::log(r);
    }
    case ModelKind::Torus:
      return z.coords().imag().norm();
    case ModelKind::MappedPolynomial:
    case ModelKind::GraphComplement:
      return static_cast<double>(std::log(exp_psi(z.to_long_double())));
  }
  return 0.0;
}

double ManifoldModel::psi_plus(const Point& z) const { return std::max(0.0, psi(z)); }

long double ManifoldModel::exp_psi(const VectorXcl& z) const {
  switch (kind_) {
    case ModelKind::Classic: {
      long double s = 0;
      for (Eigen::Index j = 0; j < z.size(); ++j) s += std::norm(z(j));
      return std::sqrt(s);
    }
    case ModelKind::Torus: {
      long double s = 0;
      for (Eigen::Index j = 0; j < z.size(); ++j) s += z(j).imag() * z(j).imag();
      return std::exp(std::sqrt(s));
    }
    case ModelKind::MappedPolynomial: {
      long double s = 0;
      for (const MultiPoly& g : maps_) s += std::norm(g.eval<long double>(z));
      return s;
    }
    case ModelKind::GraphComplement: {
      long double s = 0;
      for (int j = 0; j < dimension_ - 1; ++j) s += std::norm(z(j));
      const long double f2 = std::norm(graph_F(z));
      if (f2 == 0) throw DomainError("graph_complement: F(z) = 0");
      return s + f2 + 1.0L / f2;
    }
  }
  return 0;
}

Point ManifoldModel::canonical(const Point& z) const {
  if (kind_ != ModelKind::Torus) return z;
  Eigen::VectorXcd c = z.coords();
  for (Eigen::Index j = 0; j < c.size(); ++j) {
    double x = c(j).real() - std::floor(c(j).real());
    if (x >= 1.0) x = 0.0;
    c(j) = Complex(x, c(j).imag());
  }
  return Point(c);
}

void ManifoldModel::validate_point(const Point& z) const {
  if (z.dim() != dimension_) throw std::invalid_argument("point dimension does not match model dimension");
  for (Eigen::Index j = 0; j < z.dim(); ++j) {
    if (!std::isfinite(z[j].real()) || !std::isfinite(z[j].imag())) {
      throw std::invalid_argument("point has non-finite coordinates");
    }
  }
  if (kind_ == ModelKind::GraphComplement && graph_F(z.to_long_double()) == ComplexL(0)) {
    throw DomainError("graph_complement: F(z) = 0 at point");
  }
}

void ManifoldModel::validate_jacobian_rank(std::span<const Point> probes) const {
  if (kind_ != ModelKind::MappedPolynomial) return;
  for (const Point& p : probes) {
    const HolomorphicJet j = jet(p.to_long_double());
    Eigen::MatrixXcd jac = j.jacobian.cast<Complex>();
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(jac);
    const Eigen::VectorXd sv = svd.singularValues();
    if (sv.size() < dimension_ || sv(dimension_ - 1) <= 1e-12 * std::max(1.0, sv(0))) {
      std::ostringstream os;
      os << "mapped_polynomial: Jacobian rank < N at probe point (";
      for (Eigen::Index k = 0; k < p.dim(); ++k) os << (k ? ", " : "") << p[k];
      os << ")";
      throw ModelValidationError(os.str());
    }
  }
}

int ManifoldModel::generator_count() const {
  switch (kind_) {
    case ModelKind::Classic:
      return dimension_;
    case ModelKind::MappedPolynomial:
      return static_cast<int>(maps_.size());
    case ModelKind::GraphComplement:
      return dimension_ + 1;
    case ModelKind::Torus:
      return 0;
  }
  return 0;
}

Complex ManifoldModel::generator(int index, const Point& z) const {
  switch (kind_) {
    case ModelKind::Classic:
      return z[index];
    case ModelKind::MappedPolynomial:
      return maps_.at(index)(z.coords());
    case ModelKind::GraphComplement: {
      if (index < dimension_ - 1) return z[index];
      const Complex F = static_cast<Complex>(graph_F(z.to_long_double()));
      return index == dimension_ - 1 ? F : 1.0 / F;
    }
    case ModelKind::Torus:
      break;
  }
  throw std::logic_error("torus model has no multiplicative generators");
}

std::vector<int> ManifoldModel::multiply_by_generator(const std::vector<int>& exponents, int index) const {
  std::vector<int> out = exponents;
  if (kind_ == ModelKind::GraphComplement) {
    if (index < dimension_ - 1) {
      ++out[index];
    } else if (index == dimension_ - 1) {
      ++out[dimension_ - 1];
    } else {
      --out[dimension_ - 1];
    }
    return out;
  }
  ++out.at(index);
  return out;
}

HolomorphicJet ManifoldModel::jet(const VectorXcl& z) const {
  HolomorphicJet out;
  const int n = dimension_;
  if (kind_ == ModelKind::MappedPolynomial) {
    const int m = static_cast<int>(maps_.size());
    out.values.resize(m);
    out.jacobian.resize(m, n);
    for (int r = 0; r < m; ++r) {
      out.values(r) = maps_[r].eval<long double>(z);
      for (int k = 0; k < n; ++k) out.jacobian(r, k) = map_derivatives_[r][k].eval<long double>(z);
    }
    return out;
  }
  if (kind_ == ModelKind::GraphComplement) {
    // Components (z'_1..z'_{N-1}, F, 1/F).
    out.values.resize(n + 1);
    out.jacobian = MatrixXcl::Zero(n + 1, n);
    VectorXcl zp = z.head(n - 1);
    const ComplexL F = graph_F(z);
    if (F == ComplexL(0)) throw DomainError("graph_complement: F(z) = 0");
    for (int j = 0; j < n - 1; ++j) {
      out.values(j) = z(j);
      out.jacobian(j, j) = 1;
    }
    out.values(n - 1) = F;
    out.values(n) = ComplexL(1) / F;
    for (int k = 0; k < n - 1; ++k) {
      const ComplexL dF = -graph_f_derivatives_[k].eval<long double>(zp);
      out.jacobian(n - 1, k) = dF;
      out.jacobian(n, k) = -dF / (F * F);
    }
    out.jacobian(n - 1, n - 1) = 1;
    out.jacobian(n, n - 1) = -ComplexL(1) / (F * F);
    return out;
  }
  throw std::logic_error("jet is defined for mapped_polynomial and graph_complement models");
}

std::string ManifoldModel::describe() const {
  std::ostringstream os;
  os << to_string(kind_) << " N=" << dimension_;
  if (kind_ == ModelKind::MappedPolynomial) os << " m=" << maps_.size();
  return os.str();
}

bool ManifoldModel::operator==(const ManifoldModel& other) const {
  return kind_ == other.kind_ && dimension_ == other.dimension_ && maps_ == other.maps_ &&
         graph_f_ == other.graph_f_;
}

BasisElement make_basis_element(const ManifoldModel& model, std::vector<int> exponents) {
  BasisElement b;
  switch (model.kind()) {
    case ModelKind::Classic:
      b.psi_degree = abs_sum(exponents);
      break;
    case ModelKind::MappedPolynomial:
    case ModelKind::GraphComplement:
      b.psi_degree = 0.5 * abs_sum(exponents);
      break;
    case ModelKind::Torus:
      b.psi_degree = kTwoPi * std::sqrt(static_cast<double>(norm2(exponents)));
      break;
  }
  b.exponents = std::move(exponents);
  return b;
}

bool basis_less(const ManifoldModel& model, const BasisElement& a, const BasisElement& b) {
  if (model.kind() == ModelKind::Torus) {
    const long na = norm2(a.exponents);
    const long nb = norm2(b.exponents);
    if (na != nb) return na < nb;
  } else {
    const int da = abs_sum(a.exponents);
    const int db = abs_sum(b.exponents);
    if (da != db) return da < db;
  }
  return lex_desc(a.exponents, b.exponents);
}

std::vector<BasisElement> basis_enumerate(const ManifoldModel& model, double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw std::invalid_argument("basis_enumerate: t must be positive");
  std::vector<std::vector<int>> exps;
  const int n = model.dimension();
  switch (model.kind()) {
    case ModelKind::Classic:
      exps = graded_monomials(n, static_cast<int>(std::floor(t + kDegreeSlack)));
      break;
    case ModelKind::MappedPolynomial:
      exps = graded_monomials(static_cast<int>(model.maps().size()),
                              static_cast<int>(std::floor(2.0 * t + kDegreeSlack)));
      break;
    case ModelKind::GraphComplement: {
      const int D = static_cast<int>(std::floor(2.0 * t + kDegreeSlack));
      for (int d = 0; d <= D; ++d) {
        for (int k = d; k >= -d; --k) {
          const int rest = d - std::abs(k);
          std::vector<std::vector<int>> betas;
          std::vector<int> prefix;
          if (n - 1 == 0) {
            if (rest == 0) betas.emplace_back();
          } else {
            compositions_desc(n - 1, rest, prefix, betas);
          }
          for (auto& beta : betas) {
            beta.push_back(k);
            exps.push_back(std::move(beta));
          }
        }
      }
      break;
    }
    case ModelKind::Torus: {
      const double r = t / kTwoPi;
      const long bound = static_cast<long>(std::floor(r * r * (1.0 + kDegreeSlack) + kDegreeSlack));
      std::vector<int> prefix;
      lattice_ball(n, bound, prefix, 0, exps);
      break;
    }
  }
  std::vector<BasisElement> out;
  out.reserve(exps.size());
  for (auto& e : exps) out.push_back(make_basis_element(model, std::move(e)));
  std::stable_sort(out.begin(), out.end(),
                   [&](const BasisElement& a, const BasisElement& b) { return basis_less(model, a, b); });
  return out;
}

Complex basis_value(const ManifoldModel& model, const BasisElement& element, const Point& z) {
  const auto& e = element.exponents;
  switch (model.kind()) {
    case ModelKind::Torus: {
      double phase = 0.0;
      double decay = 0.0;
      for (Eigen::Index j = 0; j < z.dim(); ++j) {
        // Reduce the real part so the character is exactly periodic.
        const double x = z[j].real() - std::floor(z[j].real());
        phase += e[j] * x;
        decay += e[j] * z[j].imag();
      }
      phase -= std::floor(phase);
      return std::exp(-kTwoPi * decay) * Complex(std::cos(kTwoPi * phase), std::sin(kTwoPi * phase));
    }
    case ModelKind::GraphComplement: {
      const int n = model.dimension();
      Complex v(1.0);
      for (int j = 0; j < n - 1; ++j) {
        for (int i = 0; i < e[j]; ++i) v *= z[j];
      }
      const Complex F = static_cast<Complex>(model.graph_F(z.to_long_double()));
      if (F == Complex(0.0)) throw DomainError("graph_complement: F(z) = 0");
      const int k = e[n - 1];
      Complex fk(1.0);
      for (int i = 0; i < std::abs(k); ++i) fk *= F;
      return k >= 0 ? v * fk : v / fk;
    }
    case ModelKind::Classic:
    case ModelKind::MappedPolynomial: {
      Complex v(1.0);
      for (std::size_t j = 0; j < e.size(); ++j) {
        const Complex g = model.generator(static_cast<int>(j), z);
        for (int i = 0; i < e[j]; ++i) v *= g;
      }
      return v;
    }
  }
  return 0.0;
}

}  // namespace psiapprox
