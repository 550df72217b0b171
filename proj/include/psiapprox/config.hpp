#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "psiapprox/asymptotics.hpp"
#include "psiapprox/compact.hpp"
#include "psiapprox/curvature.hpp"
#include "psiapprox/function_spec.hpp"
#include "psiapprox/minimax.hpp"

namespace psiapprox {

/// The single verdict block of an experiment.
struct VerdictBlock {
  enum class Kind { None, RateTarget, OrderType, EstimateOrderType, Compensator };
  Kind kind = Kind::None;
  double L_true = 0.0;
  double rho = 0.0;
  double sigma = 0.0;
  BenchmarkGeometry geometry = BenchmarkGeometry::None;
  std::vector<double> r_grid;
  ThetaSpec theta;
};

struct ExperimentConfig {
  std::shared_ptr<const ManifoldModel> model;
  std::optional<std::string> k_spec;
  int k_points = 0;
  std::optional<FunctionSpec> function;
  std::vector<double> t_list;
  VerdictBlock verdict;
  MinimaxOptions solver;
  double tolerance = kDefaultVerdictTol;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  std::optional<std::string> out_dir;

  std::vector<Point> extremal_points;
  std::vector<double> extremal_t;
  std::vector<Point> extend_points;
  std::vector<Point> curvature_points;
  std::vector<Point> near_S_points;
  double h_step = kDefaultFdStep;
  double curvature_tol = 1e-6;
  std::vector<double> volume_L;
  double volume_r = 0.5;
  std::size_t volume_samples = 1000000;

  /// Input document with defaults filled in (embedded in every report).
  nlohmann::ordered_json resolved;
};

/// Parses JSON text; malformed input raises ConfigError naming the line
/// and column or the offending field path.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig parse_config(const nlohmann::json& doc);

MultiPoly parse_polynomial(const nlohmann::json& j, int num_vars, const std::string& path);
FunctionSpec parse_function(const nlohmann::json& j, const std::string& path);
Point parse_point(const nlohmann::json& j, int dimension, const std::string& path);

}  // namespace psiapprox
