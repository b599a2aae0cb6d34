#include "bubblesim/driver.hpp"

#include "bubblesim/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <future>
#include <map>

namespace bubblesim {

namespace fs = std::filesystem;

SweepAxis parse_axis(const std::string& name)
{
  static const std::map<std::string, SweepAxis> axes{{"n_pen", SweepAxis::n_pen}, {"epsilon", SweepAxis::epsilon},
                                                     {"delta", SweepAxis::delta}, {"N", SweepAxis::N},
                                                     {"dt", SweepAxis::dt},       {"h", SweepAxis::h}};
  const auto it = axes.find(name);
  if (it == axes.end()) throw SimulationError(AbortCause::validation, "unknown sweep axis '" + name + "'");
  return it->second;
}

std::string axis_name(SweepAxis axis)
{
  switch (axis) {
  case SweepAxis::n_pen: return "n_pen";
  case SweepAxis::epsilon: return "epsilon";
  case SweepAxis::delta: return "delta";
  case SweepAxis::N: return "N";
  case SweepAxis::dt: return "dt";
  case SweepAxis::h: return "h";
  }
  return "?";
}

RunConfig apply_axis(const RunConfig& base, SweepAxis axis, double value)
{
  RunConfig c = base;
  switch (axis) {
  case SweepAxis::n_pen: c.params.n_pen = value; break;
  case SweepAxis::epsilon: c.params.epsilon = value; break;
  case SweepAxis::delta: c.params.delta = value; break;
  case SweepAxis::N: c.N = int(std::lround(value)); break;
  case SweepAxis::dt: c.dt = value; break;
  case SweepAxis::h:
    for (int a = 0; a < 3; ++a) c.domain.resolution[a] = int(std::lround(c.domain.extent()[a] / value));
    break;
  }
  return c;
}

const std::vector<std::string>& known_metrics()
{
  static const std::vector<std::string> m{"penalization_integral", "velocity_deviation_rms", "max_density_deviation",
                                          "max_positive_residual", "max_abs_residual", "max_abs_entropy_residual",
                                          "drift", "final_kinetic", "initial_energy"};
  return m;
}

double metric_value(const RunSummary& s, const std::string& metric)
{
  if (metric == "penalization_integral") return s.penalization_integral;
  if (metric == "velocity_deviation_rms") return s.velocity_deviation_rms();
  if (metric == "max_density_deviation") return s.max_density_deviation();
  if (metric == "max_positive_residual") return s.max_positive_residual();
  if (metric == "max_abs_residual") return s.max_abs_residual();
  if (metric == "max_abs_entropy_residual") return s.max_abs_entropy_residual();
  if (metric == "drift") return s.drift();
  if (metric == "final_kinetic") return s.kinetic.empty() ? 0.0 : s.kinetic.back();
  if (metric == "initial_energy") return s.initial_energy();
  throw SimulationError(AbortCause::validation, "unknown sweep metric '" + metric + "'");
}

void validate_sweep(const SweepSpec& spec)
{
  if (spec.values.size() < 2) throw SimulationError(AbortCause::validation, "a sweep needs at least two values");
  bool up = true, down = true;
  for (std::size_t i = 1; i < spec.values.size(); ++i) {
    up = up && spec.values[i] > spec.values[i - 1];
    down = down && spec.values[i] < spec.values[i - 1];
  }
  if (!up && !down) throw SimulationError(AbortCause::validation, "sweep values must be strictly monotone");
  for (const auto& m : spec.metrics) metric_value(RunSummary{}, m);
}

double SweepResult::slope(const std::string& metric) const
{
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (const auto& r : rows) {
    if (!r.summary.ok) continue;
    const double y = metric_value(r.summary, metric);
    if (!(y > 0.0) || !(r.value > 0.0)) continue;
    const double lx = std::log(r.value), ly = std::log(y);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 2) return std::nan("");
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::vector<double> SweepResult::kinetic_cauchy_differences() const
{
  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
    const auto& a = rows[i].summary.kinetic;
    const auto& b = rows[i + 1].summary.kinetic;
    if (a.size() != b.size() || a.empty()) {
      out.push_back(std::nan(""));
      continue;
    }
    double m = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
    out.push_back(m);
  }
  return out;
}

SweepResult sweep(const SweepSpec& spec, const RunConfig& base, const std::optional<fs::path>& out_dir, int jobs)
{
  validate_sweep(spec);
  SweepResult result;
  result.spec = spec;
  result.rows.resize(spec.values.size());
  jobs = std::max(1, jobs);

  const auto member = [&](std::size_t i) {
    RunOptions opt;
    if (out_dir) opt.out_dir = *out_dir / ("run_" + std::to_string(i));
    return run(apply_axis(base, spec.axis, spec.values[i]), opt);
  };
  for (std::size_t start = 0; start < spec.values.size(); start += std::size_t(jobs)) {
    std::vector<std::future<RunSummary>> pending;
    const std::size_t stop = std::min(spec.values.size(), start + std::size_t(jobs));
    for (std::size_t i = start; i < stop; ++i)
      pending.push_back(std::async(jobs > 1 ? std::launch::async : std::launch::deferred, member, i));
    for (std::size_t i = start; i < stop; ++i) result.rows[i] = {spec.values[i], pending[i - start].get()};
  }

  if (out_dir) {
    fs::create_directories(*out_dir);
    std::vector<std::string> head{axis_name(spec.axis), "exit_code"};
    head.insert(head.end(), spec.metrics.begin(), spec.metrics.end());
    CsvWriter csv(*out_dir / "summary.csv", head);
    for (const auto& r : result.rows) {
      std::vector<double> row{r.value, double(r.summary.exit_code())};
      for (const auto& m : spec.metrics) row.push_back(metric_value(r.summary, m));
      csv.row(row);
    }
    nlohmann::json j;
    j["axis"] = axis_name(spec.axis);
    j["values"] = spec.values;
    for (const auto& m : spec.metrics) {
      const double s = result.slope(m);
      j["slopes"][m] = std::isfinite(s) ? nlohmann::json(s) : nlohmann::json(nullptr);
    }
    for (double d : result.kinetic_cauchy_differences())
      j["kinetic_cauchy"].push_back(std::isfinite(d) ? nlohmann::json(d) : nlohmann::json(nullptr));
    for (const auto& r : result.rows)
      j["runs"].push_back({{"value", r.value}, {"exit_code", r.summary.exit_code()}, {"message", r.summary.message}});
    std::ofstream(*out_dir / "sweep.json") << j.dump(2) << "\n";
  }
  return result;
}

} // namespace bubblesim
