#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <utility>

#include "CLI11.hpp"
#include "psiapprox/runner.hpp"

int main(int argc, char** argv) {
  using namespace psiapprox;
  CLI::App app{"psi-polynomial approximation experiments"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  std::optional<int> jobs;

  const std::pair<const char*, const char*> commands[] = {
      {"approx", "minimax sweep d_t over the degree list"},
      {"bws", "sweep plus geometric rate L_hat against L_true"},
      {"winiarski", "sweep plus the order/type plateau check"},
      {"extremal", "Christoffel surrogate of log Phi on a point grid"},
      {"curvature", "metric eigenvalues and the Ricci compensator audit"},
      {"volume", "Monte Carlo sublevel volumes and growth fit"},
      {"extend", "telescoping extension of the sweep approximants"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory (default: $PSIAPPROX_OUT_DIR, else .)");
    sub->add_option("--seed", seed, "Monte Carlo seed, overrides the config");
    sub->add_option("--tol", tol, "relative verdict tolerance, overrides the config")->check(CLI::PositiveNumber);
    sub->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    const Command command = parse_command(app.get_subcommands().front()->get_name());
    std::ifstream in(config_path, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    const ExperimentConfig cfg = parse_config(buf.str());

    RunOptions opts;
    opts.seed = seed;
    opts.tol = tol;
    opts.jobs = jobs;
    if (out_dir) {
      opts.out_dir = out_dir;
    } else if (!cfg.out_dir) {
      const char* env = std::getenv("PSIAPPROX_OUT_DIR");
      opts.out_dir = env && *env ? std::string(env) : std::string(".");
    }

    const RunResult res = run(command, cfg, opts);
    for (const std::string& f : res.files) std::cout << "wrote " << f << '\n';
    for (const auto& v : res.report.at("verdicts")) std::cout << "verdict " << v.get<std::string>() << '\n';
    return res.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
