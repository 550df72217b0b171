#include "psiapprox/compact.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace psiapprox {
namespace {

bool point_less(const Point& a, const Point& b) {
  for (Eigen::Index j = 0; j < a.dim(); ++j) {
    if (a[j].real() != b[j].real()) return a[j].real() < b[j].real();
    if (a[j].imag() != b[j].imag()) return a[j].imag() < b[j].imag();
  }
  return false;
}

std::vector<double> parse_numbers(std::istringstream& in, const std::string& spec) {
  std::vector<double> out;
  std::string tok;
  while (in >> tok) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw ConfigError("compact spec '" + spec + "': expected a number, got '" + tok + "'");
    }
  }
  return out;
}

void require_dim1(const ManifoldModel& model, const std::string& spec) {
  if (model.dimension() != 1) throw ConfigError("compact spec '" + spec + "' requires a one-dimensional model");
}

Complex centre_from(const std::vector<double>& v, std::size_t offset) {
  if (v.size() == offset) return 0.0;
  if (v.size() == offset + 2) return {v[offset], v[offset + 1]};
  throw ConfigError("compact spec: centre must be given as two reals");
}

}  // namespace

Complex unit_root(long k, long M) {
  k %= M;
  if (k < 0) k += M;
  if ((4 * k) % M == 0) {
    switch ((4 * k) / M) {
      case 0:
        return {1.0, 0.0};
      case 1:
        return {0.0, 1.0};
      case 2:
        return {-1.0, 0.0};
      default:
        return {0.0, -1.0};
    }
  }
  const double a = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(M);
  return {std::cos(a), std::sin(a)};
}

CompactSample make_sample(const ManifoldModel& model, std::vector<Point> points, Eigen::VectorXd weights,
                          std::string descriptor) {
  if (points.size() < 2) throw std::invalid_argument("compact sample needs at least 2 points");
  if (weights.size() != static_cast<Eigen::Index>(points.size())) {
    throw std::invalid_argument("compact sample: weight count != point count");
  }
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    if (!(weights(i) > 0.0) || !std::isfinite(weights(i))) {
      throw std::invalid_argument("compact sample: weights must be strictly positive");
    }
  }
  for (Point& p : points) {
    model.validate_point(p);
    p = model.canonical(p);
  }
  std::vector<Point> sorted = points;
  std::sort(sorted.begin(), sorted.end(), point_less);
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i] == sorted[i - 1]) throw std::invalid_argument("compact sample contains duplicate points");
  }
  CompactSample s;
  s.points = std::move(points);
  s.weights = weights / weights.sum();
  s.mesh_descriptor = std::move(descriptor);
  return s;
}

CompactSample sample_compact(const std::string& spec, const ManifoldModel& model, int M) {
  std::istringstream in(spec);
  std::string kind;
  in >> kind;
  if (kind != "points" && M < 2) throw std::invalid_argument("sample_compact: M must be >= 2");
  const std::vector<double> v = parse_numbers(in, spec);
  std::vector<Point> pts;
  std::ostringstream desc;

  if (kind == "interval") {
    require_dim1(model, spec);
    if (v.size() != 2 || !(v[0] < v[1])) throw ConfigError("interval spec needs 'interval a b' with a < b");
    const double a = v[0];
    const double b = v[1];
    for (int k = 0; k < M; ++k) {
      // Chebyshev extrema, ascending, symmetric so the midpoint is exact.
      const double s = std::sin(std::numbers::pi * (2.0 * k - (M - 1)) / (2.0 * (M - 1)));
      pts.emplace_back(Point{Complex(0.5 * (a + b) + 0.5 * (b - a) * s, 0.0)});
    }
    desc << "chebyshev-1d [" << a << "," << b << "] M=" << M;
  } else if (kind == "circle") {
    require_dim1(model, spec);
    if (v.empty() || !(v[0] > 0.0)) throw ConfigError("circle spec needs a positive radius");
    const Complex c = centre_from(v, 1);
    for (int k = 0; k < M; ++k) pts.emplace_back(Point{c + v[0] * unit_root(k, M)});
    desc << "circle r=" << v[0] << " M=" << M;
  } else if (kind == "disc") {
    require_dim1(model, spec);
    if (v.empty() || !(v[0] > 0.0)) throw ConfigError("disc spec needs a positive radius");
    const Complex c = centre_from(v, 1);
    // Rings j = 1..R carry approximately proportional-to-j point counts.
    const int R = std::max(1, static_cast<int>(std::round(std::sqrt((M - 1) / std::numbers::pi))));
    const long denom = static_cast<long>(R) * (R + 1) / 2;
    pts.emplace_back(Point{c});
    int placed = 1;
    for (int j = 1; j <= R; ++j) {
      int count = j == R ? M - placed : static_cast<int>(std::lround(static_cast<double>(M - 1) * j / denom));
      count = std::max(count, 1);
      for (int k = 0; k < count; ++k) pts.emplace_back(Point{c + (v[0] * j / R) * unit_root(k, count)});
      placed += count;
    }
    desc << "disc-rings r=" << v[0] << " rings=" << R << " M=" << pts.size();
  } else if (kind == "torus-slice") {
    if (model.kind() != ModelKind::Torus) throw ConfigError("torus-slice requires a torus model");
    if (!v.empty()) throw ConfigError("torus-slice takes no parameters");
    const int n = model.dimension();
    const int m = static_cast<int>(std::lround(std::pow(static_cast<double>(M), 1.0 / n)));
    long total = 1;
    for (int j = 0; j < n; ++j) total *= m;
    if (total != M) throw std::invalid_argument("torus-slice: M must be a perfect N-th power");
    for (long idx = 0; idx < M; ++idx) {
      Eigen::VectorXcd c(n);
      long rem = idx;
      for (int j = n - 1; j >= 0; --j) {
        c(j) = Complex(static_cast<double>(rem % m) / m, 0.0);
        rem /= m;
      }
      pts.emplace_back(c);
    }
    desc << "torus-slice grid m=" << m << " M=" << M;
  } else if (kind == "points") {
    const std::size_t stride = 2 * static_cast<std::size_t>(model.dimension());
    if (v.empty() || v.size() % stride != 0) throw ConfigError("points spec needs 2N reals per point");
    for (std::size_t i = 0; i < v.size(); i += stride) {
      Eigen::VectorXcd c(model.dimension());
      for (int j = 0; j < model.dimension(); ++j) c(j) = Complex(v[i + 2 * j], v[i + 2 * j + 1]);
      pts.emplace_back(c);
    }
    desc << "explicit M=" << pts.size();
  } else {
    throw ConfigError("unknown compact spec '" + spec + "'");
  }
  const Eigen::VectorXd w = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(pts.size()), 1.0);
  return make_sample(model, std::move(pts), w, desc.str());
}

}  // namespace psiapprox
