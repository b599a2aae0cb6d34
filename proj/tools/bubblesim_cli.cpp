#include "bubblesim/driver.hpp"
#include "bubblesim/transport.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace bubblesim;
namespace fs = std::filesystem;

namespace {

std::string read_text(const fs::path& p)
{
  std::ifstream in(p);
  if (!in) throw SimulationError(AbortCause::validation, "cannot read " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int cmd_run(const fs::path& config_path, const fs::path& out, bool override_horizon, bool verbose)
{
  RunConfig c = load_config(config_path);
  c.override_horizon = c.override_horizon || override_horizon;
  RunOptions opt;
  opt.out_dir = out;
  opt.quiet = !verbose;
  const RunSummary s = run(c, opt);
  if (!s.ok) {
    std::cerr << "aborted (" << to_string(*s.cause) << "): " << s.message << "\n";
    return s.exit_code();
  }
  std::cout << "completed " << s.steps_completed << " steps, t = " << s.t_end << "\n"
            << "E(0) = " << s.initial_energy() << ", max positive energy residual = " << s.max_positive_residual()
            << "\n"
            << "output: " << out << "\n";
  return 0;
}

int cmd_sweep(const fs::path& spec_path, const fs::path& out, int jobs_override)
{
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text(spec_path));
  } catch (const nlohmann::json::exception& e) {
    throw SimulationError(AbortCause::validation, std::string("sweep spec is not valid JSON: ") + e.what());
  }
  RunConfig base;
  if (j.contains("base") && j["base"].is_string())
    base = load_config(spec_path.parent_path() / j["base"].get<std::string>());
  else if (j.contains("base")) base = config_from_json_text(j["base"].dump());
  else if (j.contains("base_config")) base = load_config(spec_path.parent_path() / j["base_config"].get<std::string>());
  SweepSpec spec;
  spec.axis = parse_axis(j.at("axis").get<std::string>());
  spec.values = j.at("values").get<std::vector<double>>();
  spec.metrics = j.value("metrics", known_metrics());
  const int jobs = jobs_override > 0 ? jobs_override : j.value("jobs", 1);
  const SweepResult r = sweep(spec, base, out, jobs);
  for (const auto& row : r.rows)
    std::cout << axis_name(spec.axis) << " = " << row.value << ": exit " << row.summary.exit_code() << "\n";
  for (const auto& m : spec.metrics) std::cout << "slope[" << m << "] = " << r.slope(m) << "\n";
  return 0;
}

int cmd_check(const fs::path& dir)
{
  bool ok = true;
  for (const auto& l : check_run_dir(dir)) {
    std::cout << (l.ok ? "PASS " : "FAIL ") << l.name << ": " << l.detail << "\n";
    ok = ok && l.ok;
  }
  return ok ? 0 : 2;
}

int cmd_constants(const fs::path& config_path)
{
  const RunConfig c = load_config(config_path);
  const ValidationReport v = validate_params(c.params);
  if (!v.passed()) {
    for (const auto& f : v.failures()) std::cerr << "invalid: " << f << "\n";
    return 2;
  }
  const GalerkinBasis basis = GalerkinBasis::sine(c.domain, c.N, c.max_wavenumber);
  const InitialState init = initial_state(c, basis);
  const double dist0 = c.domain.distance_to_boundary(c.initial.x0) - c.initial.R0;
  const ContinuationConstants k = continuation_constants(c.params, init.rho, basis.evaluate(init.alpha), basis,
                                                         c.initial.R0, dist0, c.sigma, c.T);
  std::cout << "Q         " << k.Q << "\n"
            << "T_seed    " << k.T_seed << "\n"
            << "T1        " << k.T1 << "\n"
            << "T2        " << k.T2 << "\n"
            << "K         " << k.K << "\n"
            << "c_p       " << k.c_p << "\n"
            << "c_0       " << k.c_0 << "\n"
            << "c_N       " << k.c_N << "\n"
            << "safe_time " << k.safe_time << "\n";
  return 0;
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Single-bubble penalized Galerkin simulator"};
  app.require_subcommand(1);

  fs::path run_config, run_out = "run";
  bool override_horizon = false, verbose = false;
  auto* run_cmd = app.add_subcommand("run", "run one simulation");
  run_cmd->add_option("config", run_config, "config JSON")->required();
  run_cmd->add_option("-o,--out", run_out, "output directory");
  run_cmd->add_flag("--override-horizon", override_horizon, "run past min{T1, T2}");
  run_cmd->add_flag("-v,--verbose", verbose, "progress on stderr");

  fs::path sweep_spec, sweep_out = "sweep";
  int jobs = 0;
  auto* sweep_cmd = app.add_subcommand("sweep", "run a parameter sweep");
  sweep_cmd->add_option("spec", sweep_spec, "sweep JSON")->required();
  sweep_cmd->add_option("-o,--out", sweep_out, "output directory");
  sweep_cmd->add_option("-j,--jobs", jobs, "concurrent member runs");

  fs::path check_dir;
  auto* check_cmd = app.add_subcommand("check", "re-validate a run directory");
  check_cmd->add_option("run_dir", check_dir, "run output directory")->required();

  fs::path constants_config;
  auto* const_cmd = app.add_subcommand("constants", "print continuation constants");
  const_cmd->add_option("config", constants_config, "config JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run_cmd) return cmd_run(run_config, run_out, override_horizon, verbose);
    if (*sweep_cmd) return cmd_sweep(sweep_spec, sweep_out, jobs);
    if (*check_cmd) return cmd_check(check_dir);
    if (*const_cmd) return cmd_constants(constants_config);
  } catch (const SimulationError& e) {
    std::cerr << "error (" << to_string(e.cause()) << "): " << e.what() << "\n";
    return exit_code(e.cause());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
