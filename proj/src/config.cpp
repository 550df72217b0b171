#include "psiapprox/config.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace psiapprox {
namespace {

using json = nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw ConfigError("config field '" + path + "': " + msg);
}

const json& need(const json& j, const char* key, const std::string& path) {
  if (!j.is_object() || !j.contains(key)) fail(path + "." + key, "missing");
  return j.at(key);
}

double as_double(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

int as_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<int>();
}

Complex as_complex(const json& j, const std::string& path) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    fail(path, "expected a complex pair [re, im]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

std::vector<double> as_doubles(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected a list of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_double(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

std::vector<Point> as_points(const json& j, int dim, const std::string& path) {
  if (!j.is_array()) fail(path, "expected a list of points");
  std::vector<Point> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(parse_point(j[i], dim, path + "[" + std::to_string(i) + "]"));
  return out;
}

std::shared_ptr<const ManifoldModel> parse_model(const json& j, const std::string& path) {
  const std::string kind = need(j, "kind", path).is_string() ? j.at("kind").get<std::string>() : "";
  const int n = as_int(need(j, "dimension", path), path + ".dimension");
  try {
    if (kind == "classic") return std::make_shared<const ManifoldModel>(ManifoldModel::classic(n));
    if (kind == "torus") return std::make_shared<const ManifoldModel>(ManifoldModel::torus(n));
    if (kind == "mapped_polynomial") {
      const json& maps = need(j, "maps", path);
      if (!maps.is_array()) fail(path + ".maps", "expected a list of polynomials");
      std::vector<MultiPoly> g;
      for (std::size_t i = 0; i < maps.size(); ++i) {
        g.push_back(parse_polynomial(maps[i], n, path + ".maps[" + std::to_string(i) + "]"));
      }
      return std::make_shared<const ManifoldModel>(ManifoldModel::mapped_polynomial(n, std::move(g)));
    }
    if (kind == "graph_complement") {
      return std::make_shared<const ManifoldModel>(
          ManifoldModel::graph_complement(n, parse_polynomial(need(j, "f", path), n - 1, path + ".f")));
    }
  } catch (const ModelValidationError& e) {
    fail(path, e.what());
  }
  fail(path + ".kind", "unknown model kind '" + kind + "'");
}

ThetaSpec parse_theta(const json& j, int dim, const std::string& path) {
  ThetaSpec th;
  const std::string kind = need(j, "kind", path).is_string() ? j.at("kind").get<std::string>() : "";
  if (kind == "zero") {
    th.kind = ThetaSpec::Kind::Zero;
  } else if (kind == "ricci_potential") {
    th.kind = ThetaSpec::Kind::RicciPotential;
  } else if (kind == "log_one_plus_inv_F") {
    th.kind = ThetaSpec::Kind::LogOnePlusInvF;
    th.power = j.contains("power") ? as_int(j.at("power"), path + ".power") : 2;
  } else if (kind == "log_sum_squares") {
    th.kind = ThetaSpec::Kind::LogSumSquares;
    const json& ps = need(j, "polys", path);
    if (!ps.is_array()) fail(path + ".polys", "expected a list of polynomials");
    for (std::size_t i = 0; i < ps.size(); ++i) {
      th.polys.push_back(parse_polynomial(ps[i], dim, path + ".polys[" + std::to_string(i) + "]"));
    }
  } else {
    fail(path + ".kind", "unknown theta kind '" + kind + "'");
  }
  if (j.contains("pluriharmonic")) th.pluriharmonic = parse_polynomial(j.at("pluriharmonic"), dim, path + ".pluriharmonic");
  return th;
}

BenchmarkGeometry parse_geometry(const json& j, const std::string& path) {
  const std::string g = j.is_string() ? j.get<std::string>() : "";
  if (g == "interval") return BenchmarkGeometry::Interval;
  if (g == "disc") return BenchmarkGeometry::Disc;
  if (g == "torus-slice") return BenchmarkGeometry::TorusSlice;
  fail(path, "geometry must be one of interval, disc, torus-slice");
}

std::pair<int, int> line_col(const std::string& text, std::size_t byte) {
  int line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace

MultiPoly parse_polynomial(const json& j, int num_vars, const std::string& path) {
  const json& terms = need(j, "terms", path);
  if (!terms.is_array()) fail(path + ".terms", "expected a list of terms");
  std::vector<MultiPoly::Term> out;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const std::string tp = path + ".terms[" + std::to_string(i) + "]";
    const json& e = need(terms[i], "exponents", tp);
    if (!e.is_array() || static_cast<int>(e.size()) != num_vars) {
      fail(tp + ".exponents", "expected " + std::to_string(num_vars) + " exponents");
    }
    std::vector<int> exps;
    for (std::size_t k = 0; k < e.size(); ++k) {
      const int v = as_int(e[k], tp + ".exponents");
      if (v < 0) fail(tp + ".exponents", "negative exponent");
      exps.push_back(v);
    }
    out.push_back({exps, as_complex(need(terms[i], "coeff", tp), tp + ".coeff")});
  }
  return MultiPoly(num_vars, std::move(out));
}

FunctionSpec parse_function(const json& j, const std::string& path) {
  const std::string type = need(j, "type", path).is_string() ? j.at("type").get<std::string>() : "";
  try {
    if (type == "rational_pole") return FunctionSpec(RationalPole{as_complex(need(j, "pole", path), path + ".pole")});
    if (type == "exp") {
      const json& c = need(j, "c", path);
      std::vector<Complex> cs;
      if (c.is_array() && !c.empty() && c[0].is_array()) {
        for (std::size_t i = 0; i < c.size(); ++i) cs.push_back(as_complex(c[i], path + ".c"));
      } else {
        cs.push_back(as_complex(c, path + ".c"));
      }
      return FunctionSpec(ExpLinear{cs});
    }
    if (type == "torus_geometric_kernel") return FunctionSpec(TorusGeometricKernel{as_double(need(j, "h", path), path + ".h")});
    if (type == "fourier_finite") {
      FourierFinite f;
      for (const json& t : need(j, "terms", path)) {
        f.terms.emplace_back(need(t, "a", path + ".terms").get<std::vector<int>>(),
                             as_complex(need(t, "coeff", path + ".terms"), path + ".terms.coeff"));
      }
      return FunctionSpec(f);
    }
    if (type == "polynomial") {
      const int nv = j.contains("variables") ? as_int(j.at("variables"), path + ".variables") : 1;
      return FunctionSpec(PolynomialFn{parse_polynomial(j, nv, path)});
    }
    if (type == "exp_of_monomial") {
      return FunctionSpec(ExpOfMonomial{as_int(need(j, "power", path), path + ".power"),
                                        j.contains("scale") ? as_complex(j.at("scale"), path + ".scale") : Complex(1.0)});
    }
  } catch (const std::invalid_argument& e) {
    fail(path, e.what());
  } catch (const json::exception& e) {
    fail(path, e.what());
  }
  fail(path + ".type", "unknown function type '" + type + "'");
}

Point parse_point(const json& j, int dimension, const std::string& path) {
  Eigen::VectorXcd c(dimension);
  if (dimension == 1 && j.is_array() && j.size() == 2 && j[0].is_number()) {
    c(0) = as_complex(j, path);
    return Point(c);
  }
  if (!j.is_array() || static_cast<int>(j.size()) != dimension) {
    fail(path, "expected " + std::to_string(dimension) + " complex coordinates");
  }
  for (int k = 0; k < dimension; ++k) c(k) = as_complex(j[static_cast<std::size_t>(k)], path);
  return Point(c);
}

ExperimentConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_col(text, e.byte == 0 ? 0 : e.byte - 1);
    std::ostringstream os;
    os << "config parse error at line " << line << ", column " << col << ": " << e.what();
    throw ConfigError(os.str());
  }
  return parse_config(doc);
}

ExperimentConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config: top level must be an object");
  ExperimentConfig cfg;
  cfg.resolved = nlohmann::ordered_json::parse(doc.dump());
  cfg.model = parse_model(need(doc, "model", "$"), "$.model");
  const int dim = cfg.model->dimension();

  if (doc.contains("K")) {
    const json& k = doc.at("K");
    const json& spec = need(k, "spec", "$.K");
    if (!spec.is_string()) fail("$.K.spec", "expected a string descriptor");
    cfg.k_spec = spec.get<std::string>();
    cfg.k_points = k.contains("points") ? as_int(k.at("points"), "$.K.points") : 0;
  }
  if (doc.contains("function")) cfg.function = parse_function(doc.at("function"), "$.function");

  if (doc.contains("degrees")) {
    const json& d = doc.at("degrees");
    double scale = 1.0;
    if (d.contains("scale")) {
      if (d.at("scale").is_string() && d.at("scale").get<std::string>() == "2pi") {
        scale = 2.0 * std::numbers::pi;
      } else {
        scale = as_double(d.at("scale"), "$.degrees.scale");
      }
    }
    if (d.contains("list")) {
      for (double t : as_doubles(d.at("list"), "$.degrees.list")) cfg.t_list.push_back(scale * t);
    } else {
      const double lo = as_double(need(d, "min", "$.degrees"), "$.degrees.min");
      const double hi = as_double(need(d, "max", "$.degrees"), "$.degrees.max");
      const double step = d.contains("step") ? as_double(d.at("step"), "$.degrees.step") : 1.0;
      if (!(step > 0.0) || hi < lo) fail("$.degrees", "need min <= max and step > 0");
      const long count = std::lround(std::floor((hi - lo) / step + 1e-9)) + 1;
      for (long i = 0; i < count; ++i) cfg.t_list.push_back(scale * (lo + step * static_cast<double>(i)));
    }
    for (double t : cfg.t_list) {
      if (!(t > 0.0)) fail("$.degrees", "degrees must be positive");
    }
  }

  if (doc.contains("verdict")) {
    const json& v = doc.at("verdict");
    if (!v.is_object()) fail("$.verdict", "expected an object");
    int groups = 0;
    if (v.contains("L_true")) {
      ++groups;
      cfg.verdict.kind = VerdictBlock::Kind::RateTarget;
      cfg.verdict.L_true = as_double(v.at("L_true"), "$.verdict.L_true");
    }
    if (v.contains("rho") || v.contains("sigma")) {
      ++groups;
      cfg.verdict.kind = VerdictBlock::Kind::OrderType;
      cfg.verdict.rho = as_double(need(v, "rho", "$.verdict"), "$.verdict.rho");
      cfg.verdict.sigma = as_double(need(v, "sigma", "$.verdict"), "$.verdict.sigma");
    }
    if (v.contains("estimate_order_type")) {
      ++groups;
      const json& e = v.at("estimate_order_type");
      cfg.verdict.kind = VerdictBlock::Kind::EstimateOrderType;
      cfg.verdict.geometry = parse_geometry(need(e, "geometry", "$.verdict.estimate_order_type"),
                                            "$.verdict.estimate_order_type.geometry");
      cfg.verdict.r_grid = as_doubles(need(e, "r_grid", "$.verdict.estimate_order_type"),
                                      "$.verdict.estimate_order_type.r_grid");
    }
    if (v.contains("theta")) {
      ++groups;
      cfg.verdict.kind = VerdictBlock::Kind::Compensator;
      cfg.verdict.theta = parse_theta(v.at("theta"), dim, "$.verdict.theta");
    }
    if (groups != 1) fail("$.verdict", "exactly one of L_true, (rho, sigma), estimate_order_type, theta is required");
  }

  if (doc.contains("solver")) {
    const json& s = doc.at("solver");
    if (s.contains("tol")) cfg.solver.tol = as_double(s.at("tol"), "$.solver.tol");
    if (s.contains("max_iter")) cfg.solver.max_iter = as_int(s.at("max_iter"), "$.solver.max_iter");
    if (!(cfg.solver.tol > 0.0)) fail("$.solver.tol", "must be positive");
  }
  if (doc.contains("tolerance")) cfg.tolerance = as_double(doc.at("tolerance"), "$.tolerance");
  if (doc.contains("seed")) {
    if (!doc.at("seed").is_number_unsigned()) fail("$.seed", "expected a non-negative integer");
    cfg.seed = doc.at("seed").get<std::uint64_t>();
  }
  if (doc.contains("jobs")) cfg.jobs = as_int(doc.at("jobs"), "$.jobs");
  if (doc.contains("output")) {
    const json& o = doc.at("output");
    if (o.contains("dir")) {
      if (!o.at("dir").is_string()) fail("$.output.dir", "expected a string");
      cfg.out_dir = o.at("dir").get<std::string>();
    }
  }
  if (doc.contains("extremal")) {
    const json& e = doc.at("extremal");
    cfg.extremal_points = as_points(need(e, "points", "$.extremal"), dim, "$.extremal.points");
    if (e.contains("t_list")) cfg.extremal_t = as_doubles(e.at("t_list"), "$.extremal.t_list");
  }
  if (doc.contains("extend")) {
    cfg.extend_points = as_points(need(doc.at("extend"), "points", "$.extend"), dim, "$.extend.points");
  }
  if (doc.contains("curvature")) {
    const json& c = doc.at("curvature");
    if (c.contains("points")) cfg.curvature_points = as_points(c.at("points"), dim, "$.curvature.points");
    if (c.contains("near_S")) cfg.near_S_points = as_points(c.at("near_S"), dim, "$.curvature.near_S");
    if (c.contains("h_step")) cfg.h_step = as_double(c.at("h_step"), "$.curvature.h_step");
    if (c.contains("tol")) cfg.curvature_tol = as_double(c.at("tol"), "$.curvature.tol");
    if (c.contains("random")) {
      const json& r = c.at("random");
      const int count = as_int(need(r, "count", "$.curvature.random"), "$.curvature.random.count");
      const double radius = as_double(need(r, "radius", "$.curvature.random"), "$.curvature.random.radius");
      if (!doc.contains("seed")) fail("$.seed", "required for random curvature points");
      std::uint64_t st = doc.at("seed").get<std::uint64_t>();
      for (int i = 0; i < count; ++i) {
        Eigen::VectorXcd z(dim);
        for (int k = 0; k < dim; ++k) {
          const double a = static_cast<double>(splitmix64(st) >> 11) * 0x1.0p-53;
          const double b = static_cast<double>(splitmix64(st) >> 11) * 0x1.0p-53;
          z(k) = Complex(radius * (2.0 * a - 1.0), radius * (2.0 * b - 1.0));
        }
        cfg.curvature_points.emplace_back(z);
      }
    }
  }
  if (doc.contains("volume")) {
    const json& v = doc.at("volume");
    cfg.volume_L = as_doubles(need(v, "L_grid", "$.volume"), "$.volume.L_grid");
    if (v.contains("r")) cfg.volume_r = as_double(v.at("r"), "$.volume.r");
    if (v.contains("samples")) {
      if (!v.at("samples").is_number_unsigned()) fail("$.volume.samples", "expected a positive integer");
      cfg.volume_samples = v.at("samples").get<std::size_t>();
    }
  }
  return cfg;
}

}  // namespace psiapprox
