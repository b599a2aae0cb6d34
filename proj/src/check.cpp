#include "bubblesim/driver.hpp"

#include "bubblesim/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace bubblesim {

namespace fs = std::filesystem;

namespace {

std::string fmt(double v)
{
  std::ostringstream s;
  s << v;
  return s.str();
}

} // namespace

std::vector<CheckLine> check_run_dir(const fs::path& dir)
{
  std::vector<CheckLine> lines;
  std::ifstream in(dir / "summary.json");
  if (!in) return {{"summary", false, "summary.json missing"}};
  const nlohmann::json summary = nlohmann::json::parse(in);
  const double R0 = summary.at("R0").get<double>();
  const double dt = summary.at("dt").get<double>();

  const bool aborted = summary.at("status") != "ok";
  const std::string status = aborted ? "run aborted (see error.json)" : "completed with dt = " + fmt(dt);
  if (!fs::exists(dir / "energy.csv")) return {{"outputs", false, "no time series written"}, {"completed", !aborted, status}};

  const CsvTable energy = read_csv(dir / "energy.csv");
  {
    double worst = 0.0;
    for (const char* col : {"dissipation", "penalization", "diffusion"})
      for (double v : energy.values(col)) worst = std::min(worst, v);
    lines.push_back({"dissipation_nonnegative", worst >= 0.0, "min entry " + fmt(worst)});
  }
  {
    const auto E = energy.values("energy");
    const auto r = energy.values("r");
    double rmax = 0.0;
    for (double v : r) rmax = std::max(rmax, v);
    const double E0 = E.empty() ? 0.0 : E.front();
    lines.push_back({"energy_residual", rmax <= 1e-3 * E0,
                     "max positive r " + fmt(rmax) + " vs 1e-3 E(0) = " + fmt(1e-3 * E0)});
  }
  {
    const CsvTable traj = read_csv(dir / "trajectory.csv");
    const auto R = traj.values("R_b");
    const double rmin = R.empty() ? R0 : *std::min_element(R.begin(), R.end());
    lines.push_back({"radius_bound", rmin >= 0.5 * R0, "min R_b " + fmt(rmin) + ", R0/2 = " + fmt(0.5 * R0)});
  }
  {
    const CsvTable compat = read_csv(dir / "compatibility.csv");
    const auto margin = compat.values("distance_margin");
    const double mmin = margin.empty() ? 0.0 : *std::min_element(margin.begin(), margin.end());
    lines.push_back({"distance_margin", mmin >= 0.0, "min margin over sigma " + fmt(mmin)});
    const auto lo = compat.values("bound_lower"), hi = compat.values("bound_upper");
    const auto rmin = compat.values("rho_min"), rmax = compat.values("rho_max");
    long bad = 0;
    for (std::size_t k = 0; k < lo.size(); ++k) {
      const double tol = 1e-6 * (hi[k] - lo[k]);
      if (rmin[k] < lo[k] - tol || rmax[k] > hi[k] + tol) ++bad;
    }
    lines.push_back({"max_principle", bad == 0, std::to_string(bad) + " rows outside the bounds"});
  }
  {
    const CsvTable cont = read_csv(dir / "continuity.csv");
    const auto defect = cont.values("relative_mass_defect");
    const double worst = defect.empty() ? 0.0 : *std::max_element(defect.begin(), defect.end());
    lines.push_back({"mass_conservation", worst <= 1e-10, "max relative defect " + fmt(worst)});
    const auto adv = cont.values("advective_number");
    const double amax = adv.empty() ? 0.0 : *std::max_element(adv.begin(), adv.end());
    lines.push_back({"advective_limit", amax <= 0.5, "max advective number " + fmt(amax)});
  }
  lines.push_back({"completed", !aborted, status});
  return lines;
}

} // namespace bubblesim
