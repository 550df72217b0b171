#include "psiapprox/runner.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "psiapprox/extremal.hpp"

namespace psiapprox {
namespace {

using ojson = nlohmann::ordered_json;

ojson num(double v) { return std::isfinite(v) ? ojson(v) : ojson(nullptr); }

ojson complex_json(Complex c) { return ojson::array({num(c.real()), num(c.imag())}); }

ojson point_json(const Point& z) {
  ojson a = ojson::array();
  for (int k = 0; k < z.dim(); ++k) a.push_back(complex_json(z[k]));
  return a;
}

ojson vector_json(const Eigen::VectorXd& v) {
  ojson a = ojson::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(num(v(i)));
  return a;
}

ojson records_json(const std::vector<ApproxRecord>& recs) {
  ojson a = ojson::array();
  for (const ApproxRecord& r : recs) {
    ojson j;
    j["t"] = num(r.t);
    j["dim"] = r.dim;
    j["effective_dim"] = r.effective_dim;
    j["d_value"] = num(r.d_value);
    j["lower_bound"] = num(r.lower_bound);
    j["ls_residual"] = num(r.ls_residual);
    j["iterations"] = r.iterations;
    j["converged"] = r.converged;
    j["floor_flag"] = r.floor_flag;
    j["error"] = r.error ? ojson(*r.error) : ojson(nullptr);
    a.push_back(j);
  }
  return a;
}

ojson rate_json(const RateReport& r) {
  ojson j;
  j["verdict"] = to_string(r.verdict);
  j["slope_fit"] = num(r.slope_fit);
  j["L_hat"] = num(r.L_hat);
  j["t_min"] = num(r.t_min);
  j["t_max"] = num(r.t_max);
  j["residual"] = num(r.residual);
  j["target"] = r.target ? num(*r.target) : ojson(nullptr);
  j["plateau"] = r.plateau ? num(*r.plateau) : ojson(nullptr);
  j["tolerance"] = num(r.tolerance);
  j["usable_count"] = r.usable_count;
  j["used_t"] = r.used_t;
  j["note"] = r.note;
  return j;
}

std::string fmt(double v) { return format_double(v); }
std::string fmt_bool(bool b) { return b ? "true" : "false"; }

const CompactSample& require_sample(const ExperimentConfig& cfg, std::optional<CompactSample>& cache) {
  if (!cache) {
    if (!cfg.k_spec) throw ConfigError("config field '$.K': required by this command");
    int m = cfg.k_points;
    if (m == 0) {
      double t_max = 0.0;
      for (double t : cfg.t_list) t_max = std::max(t_max, t);
      for (double t : cfg.extremal_t) t_max = std::max(t_max, t);
      m = std::max(200, 20 * static_cast<int>(std::ceil(t_max)));
    }
    if (m < 2) throw ConfigError("config field '$.K.points': at least 2 sample points required");
    cache = sample_compact(*cfg.k_spec, *cfg.model, m);
  }
  return *cache;
}

const FunctionSpec& require_function(const ExperimentConfig& cfg) {
  if (!cfg.function) throw ConfigError("config field '$.function': required by this command");
  return *cfg.function;
}

void require_degrees(const std::vector<double>& t, const char* field) {
  if (t.empty()) throw ConfigError(std::string("config field '") + field + "': at least one degree required");
}

void require_verdict(const ExperimentConfig& cfg, std::initializer_list<VerdictBlock::Kind> kinds, const char* what) {
  for (VerdictBlock::Kind k : kinds) {
    if (cfg.verdict.kind == k) return;
  }
  throw ConfigError(std::string("config field '$.verdict': ") + what);
}

struct Output {
  std::optional<std::filesystem::path> dir;
  std::string prefix;
  std::vector<std::string> files;

  void write(const std::string& suffix, const std::string& body) {
    if (!dir) return;
    const std::filesystem::path p = *dir / (prefix + suffix);
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out << body;
    files.push_back(p.string());
  }
};

std::string sweep_csv(const std::vector<ApproxRecord>& recs) {
  std::ostringstream os;
  write_sweep_csv(recs, os);
  return os.str();
}

bool all_failed(const std::vector<ApproxRecord>& recs) {
  if (recs.empty()) return false;
  for (const ApproxRecord& r : recs) {
    if (!r.error) return false;
  }
  return true;
}

}  // namespace

Command parse_command(const std::string& name) {
  if (name == "approx") return Command::Approx;
  if (name == "bws") return Command::Bws;
  if (name == "winiarski") return Command::Winiarski;
  if (name == "extremal") return Command::Extremal;
  if (name == "curvature") return Command::Curvature;
  if (name == "volume") return Command::Volume;
  if (name == "extend") return Command::Extend;
  throw ConfigError("unknown command '" + name + "'");
}

std::string to_string(Command c) {
  switch (c) {
    case Command::Approx: return "approx";
    case Command::Bws: return "bws";
    case Command::Winiarski: return "winiarski";
    case Command::Extremal: return "extremal";
    case Command::Curvature: return "curvature";
    case Command::Volume: return "volume";
    case Command::Extend: return "extend";
  }
  return "approx";
}

int exit_code_for(const std::vector<Verdict>& verdicts) {
  bool inconclusive = false;
  for (Verdict v : verdicts) {
    if (v == Verdict::Fail) return 1;
    if (v == Verdict::Inconclusive) inconclusive = true;
  }
  return inconclusive ? 2 : 0;
}

RunResult run(Command command, const ExperimentConfig& cfg, const RunOptions& options) {
  const double tol = options.tol.value_or(cfg.tolerance);
  const int jobs = options.jobs.value_or(cfg.jobs);
  const std::optional<std::uint64_t> seed = options.seed ? options.seed : cfg.seed;
  if (!(tol > 0.0)) throw ConfigError("config field '$.tolerance': must be positive");
  if (jobs < 1) throw ConfigError("config field '$.jobs': must be at least 1");

  Output out;
  if (options.out_dir) {
    out.dir = *options.out_dir;
  } else if (cfg.out_dir) {
    out.dir = *cfg.out_dir;
  }
  if (out.dir) std::filesystem::create_directories(*out.dir);
  out.prefix = to_string(command) + "_";

  ojson report;
  report["version"] = kVersion;
  report["command"] = to_string(command);
  ojson resolved;
  resolved["input"] = cfg.resolved;
  resolved["model"] = cfg.model->describe();
  resolved["t_list"] = cfg.t_list;
  resolved["tolerance"] = tol;
  resolved["seed"] = seed ? ojson(*seed) : ojson(nullptr);
  resolved["solver"] = {{"tol", cfg.solver.tol},
                        {"max_iter", cfg.solver.max_iter},
                        {"handoff", cfg.solver.handoff},
                        {"barrier_gap", cfg.solver.barrier_gap},
                        {"polish", cfg.solver.polish}};
  if (cfg.function) resolved["function"] = cfg.function->describe();
  report["resolved_config"] = resolved;

  std::vector<Verdict> verdicts;
  std::optional<CompactSample> sample;
  SweepOptions sweep_opts{cfg.solver, jobs};
  bool records_all_failed = false;

  auto sweep = [&]() {
    require_degrees(cfg.t_list, "$.degrees");
    const CompactSample& K = require_sample(cfg, sample);
    std::vector<ApproxRecord> recs = approx_sweep(*cfg.model, K, require_function(cfg), cfg.t_list, sweep_opts);
    report["records"] = records_json(recs);
    out.write("sweep.csv", sweep_csv(recs));
    records_all_failed = all_failed(recs);
    return recs;
  };

  ojson results;
  switch (command) {
    case Command::Approx: {
      sweep();
      break;
    }
    case Command::Bws: {
      require_verdict(cfg, {VerdictBlock::Kind::RateTarget}, "bws needs an L_true verdict block");
      const auto recs = sweep();
      const RateReport r = rate_limsup(recs, cfg.verdict.L_true, tol);
      results["rate"] = rate_json(r);
      verdicts.push_back(r.verdict);
      break;
    }
    case Command::Winiarski: {
      require_verdict(cfg, {VerdictBlock::Kind::OrderType, VerdictBlock::Kind::EstimateOrderType},
                      "winiarski needs (rho, sigma) or estimate_order_type");
      const auto recs = sweep();
      double rho = cfg.verdict.rho;
      double sigma = cfg.verdict.sigma;
      if (cfg.verdict.kind == VerdictBlock::Kind::EstimateOrderType) {
        const OrderTypeEstimate est =
            order_type_estimate(require_function(cfg), *cfg.model, cfg.verdict.geometry, cfg.verdict.r_grid);
        rho = est.rho_hat;
        sigma = est.sigma_hat;
        ojson e;
        e["rho_hat"] = num(est.rho_hat);
        e["sigma_hat"] = num(est.sigma_hat);
        e["r_grid"] = est.r_grid;
        ojson lm = ojson::array();
        for (double v : est.log_max_modulus) lm.push_back(num(v));
        e["log_max_modulus"] = lm;
        results["order_type"] = e;
      }
      const RateReport r = winiarski_check(recs, rho, sigma, tol);
      results["winiarski"] = rate_json(r);
      verdicts.push_back(r.verdict);
      break;
    }
    case Command::Extremal: {
      const CompactSample& K = require_sample(cfg, sample);
      const std::vector<double>& ts = cfg.extremal_t.empty() ? cfg.t_list : cfg.extremal_t;
      require_degrees(ts, "$.extremal.t_list");
      if (cfg.extremal_points.empty()) throw ConfigError("config field '$.extremal.points': at least one point required");
      const int n = cfg.model->dimension();
      std::ostringstream csv;
      if (n == 1) {
        csv << "re,im";
      } else {
        for (int k = 0; k < n; ++k) csv << (k ? "," : "") << "re" << k << ",im" << k;
      }
      csv << ",t,log_phi_t,reference,bracket\n";
      ojson grid = ojson::array();
      for (const Point& z : cfg.extremal_points) {
        for (double t : ts) {
          ExtremalEstimate e = christoffel_log_phi(*cfg.model, K, z, t);
          if (!e.reference) e.reference = reference_extremal(*cfg.model, *cfg.k_spec, z);
          for (int k = 0; k < n; ++k) csv << (k ? "," : "") << fmt(z[k].real()) << ',' << fmt(z[k].imag());
          csv << ',' << fmt(t) << ',' << fmt(e.log_phi_t) << ',' << (e.reference ? fmt(*e.reference) : "") << ','
              << fmt(e.bracket) << '\n';
          ojson j;
          j["z"] = point_json(z);
          j["t"] = num(t);
          j["log_phi_t"] = num(e.log_phi_t);
          j["reference"] = e.reference ? num(*e.reference) : ojson(nullptr);
          j["bracket"] = num(e.bracket);
          j["dim"] = e.dim;
          j["rank_deficient"] = e.rank_deficient;
          grid.push_back(j);
        }
      }
      results["grid"] = grid;
      out.write("grid.csv", csv.str());
      break;
    }
    case Command::Extend: {
      if (cfg.extend_points.empty()) throw ConfigError("config field '$.extend.points': at least one point required");
      const auto recs = sweep();
      const std::vector<Evaluator> ps = converged_approximants(recs);
      ojson grid = ojson::array();
      std::ostringstream csv;
      csv << "point,value_re,value_im,last_term,terms_used,converged,diverged,direct_re,direct_im\n";
      for (std::size_t i = 0; i < cfg.extend_points.size(); ++i) {
        const Point& z = cfg.extend_points[i];
        ojson j;
        j["z"] = point_json(z);
        std::optional<Complex> direct;
        try {
          direct = require_function(cfg)(z);
        } catch (const DomainError&) {
        }
        j["direct"] = direct ? complex_json(*direct) : ojson(nullptr);
        if (ps.empty()) {
          j["error"] = "no converged approximants";
          verdicts.push_back(Verdict::Inconclusive);
          csv << i << ",,,,0,false,false," << (direct ? fmt(direct->real()) : "") << ','
              << (direct ? fmt(direct->imag()) : "") << '\n';
        } else {
          const TelescopeResult t = telescope_extend(ps, z);
          j["value"] = complex_json(t.value);
          j["last_term"] = num(t.last_term);
          j["terms_used"] = t.terms_used;
          j["converged"] = t.converged;
          j["diverged"] = t.diverged;
          csv << i << ',' << fmt(t.value.real()) << ',' << fmt(t.value.imag()) << ',' << fmt(t.last_term) << ','
              << t.terms_used << ',' << fmt_bool(t.converged) << ',' << fmt_bool(t.diverged) << ','
              << (direct ? fmt(direct->real()) : "") << ',' << (direct ? fmt(direct->imag()) : "") << '\n';
        }
        grid.push_back(j);
      }
      results["extension"] = grid;
      out.write("grid.csv", csv.str());
      break;
    }
    case Command::Curvature: {
      require_verdict(cfg, {VerdictBlock::Kind::Compensator}, "curvature needs a theta verdict block");
      if (cfg.curvature_points.empty()) throw ConfigError("config field '$.curvature.points': at least one point required");
      const CompensatorAudit a =
          compensator_check(*cfg.model, cfg.verdict.theta, cfg.curvature_points, cfg.curvature_tol, cfg.h_step,
                            cfg.near_S_points);
      ojson j;
      j["theta"] = a.theta.describe();
      j["verdict"] = to_string(a.verdict);
      j["min_eig_sum"] = num(a.min_eig_sum);
      j["tol"] = num(a.tol);
      j["growth_A"] = num(a.growth_A);
      j["growth_B"] = num(a.growth_B);
      j["growth_residual"] = num(a.growth_residual);
      j["near_S_min_eig"] = a.near_S_min_eig ? num(*a.near_S_min_eig) : ojson(nullptr);
      ojson pts = ojson::array();
      std::ostringstream csv;
      csv << "point,psi_plus,theta,ricci_min,ricci_max,sum_min,sum_max\n";
      for (std::size_t i = 0; i < a.points.size(); ++i) {
        const CompensatorPoint& p = a.points[i];
        ojson q;
        q["z"] = point_json(p.z);
        q["psi_plus"] = num(p.psi_plus);
        q["theta"] = num(p.theta);
        q["ricci_eigenvalues"] = vector_json(p.ricci_eigenvalues);
        q["sum_eigenvalues"] = vector_json(p.sum_eigenvalues);
        pts.push_back(q);
        const auto& re = p.ricci_eigenvalues;
        const auto& se = p.sum_eigenvalues;
        csv << i << ',' << fmt(p.psi_plus) << ',' << fmt(p.theta) << ',' << fmt(re(0)) << ','
            << fmt(re(re.size() - 1)) << ',' << fmt(se(0)) << ',' << fmt(se(se.size() - 1)) << '\n';
      }
      j["points"] = pts;
      ojson skipped = ojson::array();
      for (const auto& [z, why] : a.skipped) skipped.push_back({{"z", point_json(z)}, {"reason", why}});
      j["skipped"] = skipped;
      ojson metrics = ojson::array();
      for (const CompensatorPoint& p : a.points) {
        try {
          const HermitianFormSample m = metric_form(*cfg.model, p.z, cfg.h_step);
          metrics.push_back({{"z", point_json(p.z)}, {"eigenvalues", vector_json(m.eigenvalues)},
                             {"positive_definite", m.positive_definite}});
        } catch (const DomainError& e) {
          metrics.push_back({{"z", point_json(p.z)}, {"error", e.what()}});
        }
      }
      j["metric"] = metrics;
      results["compensator"] = j;
      out.write("ricci.csv", csv.str());
      verdicts.push_back(a.verdict);
      break;
    }
    case Command::Volume: {
      if (!seed) throw ConfigError("config field '$.seed': required for Monte Carlo volume estimates");
      if (cfg.volume_L.empty()) throw ConfigError("config field '$.volume.L_grid': required");
      const VolumeGrowthFit fit = fit_volume_growth(*cfg.model, cfg.volume_L, cfg.volume_r, cfg.volume_samples, *seed, jobs);
      ojson j;
      j["r"] = num(fit.r);
      j["A"] = num(fit.A);
      j["B"] = num(fit.B);
      j["satisfiable"] = fit.satisfiable;
      j["verdict"] = to_string(fit.satisfiable ? Verdict::Pass : Verdict::Fail);
      ojson table = ojson::array();
      std::ostringstream csv;
      csv << "L,volume,std_error,rel_std_error,samples,box_half_width\n";
      for (const VolumeEstimate& v : fit.table) {
        table.push_back({{"L", num(v.L)},
                         {"volume", num(v.value)},
                         {"std_error", num(v.std_error)},
                         {"rel_std_error", num(v.rel_std_error)},
                         {"samples", v.samples},
                         {"box_half_width", num(v.box_half_width)}});
        csv << fmt(v.L) << ',' << fmt(v.value) << ',' << fmt(v.std_error) << ',' << fmt(v.rel_std_error) << ','
            << v.samples << ',' << fmt(v.box_half_width) << '\n';
      }
      j["table"] = table;
      results["volume"] = j;
      out.write("table.csv", csv.str());
      verdicts.push_back(fit.satisfiable ? Verdict::Pass : Verdict::Fail);
      break;
    }
  }

  report["results"] = results;
  ojson vs = ojson::array();
  for (Verdict v : verdicts) vs.push_back(to_string(v));
  report["verdicts"] = vs;

  RunResult res;
  res.exit_code = records_all_failed ? 1 : exit_code_for(verdicts);
  report["exit_code"] = res.exit_code;
  res.report = report;

  Output rep = out;
  rep.files.clear();
  rep.write("report.json", report.dump(2) + "\n");
  res.files = rep.files;
  res.files.insert(res.files.end(), out.files.begin(), out.files.end());
  return res;
}

}  // namespace psiapprox
