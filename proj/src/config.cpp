#include "bubblesim/driver.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace bubblesim {

using nlohmann::json;

long RunConfig::steps() const { return std::lround(T / dt); }

namespace {

Eigen::Vector3d vec3(const json& j)
{
  if (!j.is_array() || j.size() != 3) throw SimulationError(AbortCause::validation, "expected a 3-vector in config");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json to_json(const Eigen::Vector3d& v) { return json::array({v[0], v[1], v[2]}); }

template <typename T>
void read(const json& j, const char* key, T& out)
{
  if (j.contains(key)) out = j.at(key).get<T>();
}

void read(const json& j, const char* key, Eigen::Vector3d& out)
{
  if (j.contains(key)) out = vec3(j.at(key));
}

void reject_unknown(const json& j, std::initializer_list<const char*> keys, const std::string& section)
{
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : keys) known = known || it.key() == k;
    if (!known) throw SimulationError(AbortCause::validation, "unknown config key '" + section + it.key() + "'");
  }
}

DensityProfile parse_profile(const std::string& s)
{
  if (s == "uniform") return DensityProfile::uniform;
  if (s == "pressure_balanced") return DensityProfile::pressure_balanced;
  throw SimulationError(AbortCause::validation, "unknown density profile '" + s + "'");
}

VelocityInit parse_velocity(const std::string& s)
{
  if (s == "zero") return VelocityInit::zero;
  if (s == "modes") return VelocityInit::modes;
  if (s == "coefficients") return VelocityInit::coefficients;
  throw SimulationError(AbortCause::validation, "unknown velocity initialisation '" + s + "'");
}

} // namespace

RunConfig config_from_json_text(const std::string& text)
{
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw SimulationError(AbortCause::validation, std::string("config is not valid JSON: ") + e.what());
  }
  try {
    const int version = j.value("schema_version", kConfigSchemaVersion);
    if (version != kConfigSchemaVersion)
      throw SimulationError(AbortCause::validation, "unsupported config schema_version " + std::to_string(version));
    reject_unknown(j, {"schema_version", "params", "domain", "galerkin", "initial", "time", "guards", "output", "seed"}, "");

    RunConfig c;
    if (j.contains("params")) {
      const json& p = j["params"];
      reject_unknown(p, {"mu_f", "nu_f", "nu_b", "a_f", "gamma_f", "a_b", "gamma_b", "delta", "beta", "epsilon",
                         "n_pen", "kappa_b", "g", "rho_b0"}, "params.");
      auto& s = c.params;
      read(p, "mu_f", s.mu_f);
      read(p, "nu_f", s.nu_f);
      read(p, "nu_b", s.nu_b);
      read(p, "a_f", s.a_f);
      read(p, "gamma_f", s.gamma_f);
      read(p, "a_b", s.a_b);
      read(p, "gamma_b", s.gamma_b);
      read(p, "delta", s.delta);
      read(p, "beta", s.beta);
      read(p, "epsilon", s.epsilon);
      read(p, "n_pen", s.n_pen);
      read(p, "kappa_b", s.kappa_b);
      read(p, "g", s.g);
      read(p, "rho_b0", s.rho_b0);
    }
    if (j.contains("domain")) {
      const json& d = j["domain"];
      reject_unknown(d, {"lower", "upper", "resolution"}, "domain.");
      read(d, "lower", c.domain.lower);
      read(d, "upper", c.domain.upper);
      if (d.contains("resolution")) {
        const json& r = d["resolution"];
        if (r.is_number_integer()) c.domain.resolution = {r.get<int>(), r.get<int>(), r.get<int>()};
        else c.domain.resolution = r.get<std::array<int, 3>>();
      }
    }
    if (j.contains("galerkin")) {
      reject_unknown(j["galerkin"], {"N", "max_wavenumber"}, "galerkin.");
      read(j["galerkin"], "N", c.N);
      read(j["galerkin"], "max_wavenumber", c.max_wavenumber);
    }
    if (j.contains("initial")) {
      const json& i = j["initial"];
      reject_unknown(i, {"x0", "R0", "rho_f", "density_profile", "velocity", "V0", "omega0", "Lambda0",
                         "cutoff_width", "coefficients"}, "initial.");
      auto& s = c.initial;
      read(i, "x0", s.x0);
      read(i, "R0", s.R0);
      read(i, "rho_f", s.rho_f);
      if (i.contains("density_profile")) s.density = parse_profile(i["density_profile"].get<std::string>());
      if (i.contains("velocity")) s.velocity = parse_velocity(i["velocity"].get<std::string>());
      read(i, "V0", s.V0);
      read(i, "omega0", s.omega0);
      read(i, "Lambda0", s.Lambda0);
      read(i, "cutoff_width", s.cutoff_width);
      read(i, "coefficients", s.coefficients);
    }
    if (j.contains("time")) {
      reject_unknown(j["time"], {"dt", "T", "picard_iterations", "picard_tolerance"}, "time.");
      read(j["time"], "dt", c.dt);
      read(j["time"], "T", c.T);
      read(j["time"], "picard_iterations", c.picard_iterations);
      read(j["time"], "picard_tolerance", c.picard_tolerance);
    }
    if (j.contains("guards")) {
      reject_unknown(j["guards"], {"sigma", "override_horizon"}, "guards.");
      read(j["guards"], "sigma", c.sigma);
      read(j["guards"], "override_horizon", c.override_horizon);
    }
    if (j.contains("output")) {
      reject_unknown(j["output"], {"cadence", "field_cadence"}, "output.");
      read(j["output"], "cadence", c.cadence);
      read(j["output"], "field_cadence", c.field_cadence);
    }
    read(j, "seed", c.seed);
    return c;
  } catch (const json::exception& e) {
    throw SimulationError(AbortCause::validation, std::string("malformed config: ") + e.what());
  }
}

RunConfig load_config(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in) throw SimulationError(AbortCause::validation, "cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_json_text(ss.str());
}

std::string config_to_json_text(const RunConfig& c)
{
  const auto& p = c.params;
  const auto& i = c.initial;
  json j;
  j["schema_version"] = kConfigSchemaVersion;
  j["params"] = {{"mu_f", p.mu_f}, {"nu_f", p.nu_f}, {"nu_b", p.nu_b}, {"a_f", p.a_f}, {"gamma_f", p.gamma_f},
                 {"a_b", p.a_b}, {"gamma_b", p.gamma_b}, {"delta", p.delta}, {"beta", p.beta},
                 {"epsilon", p.epsilon}, {"n_pen", p.n_pen}, {"kappa_b", p.kappa_b}, {"g", to_json(p.g)},
                 {"rho_b0", p.rho_b0}};
  j["domain"] = {{"lower", to_json(c.domain.lower)}, {"upper", to_json(c.domain.upper)},
                 {"resolution", c.domain.resolution}};
  j["galerkin"] = {{"N", c.N}, {"max_wavenumber", c.max_wavenumber}};
  const char* profile = i.density == DensityProfile::uniform ? "uniform" : "pressure_balanced";
  const char* velocity = i.velocity == VelocityInit::zero ? "zero"
                         : i.velocity == VelocityInit::modes ? "modes" : "coefficients";
  j["initial"] = {{"x0", to_json(i.x0)}, {"R0", i.R0}, {"rho_f", i.rho_f}, {"density_profile", profile},
                  {"velocity", velocity}, {"V0", to_json(i.V0)}, {"omega0", to_json(i.omega0)},
                  {"Lambda0", i.Lambda0}, {"cutoff_width", i.cutoff_width}, {"coefficients", i.coefficients}};
  j["time"] = {{"dt", c.dt}, {"T", c.T}, {"picard_iterations", c.picard_iterations},
               {"picard_tolerance", c.picard_tolerance}};
  j["guards"] = {{"sigma", c.sigma}, {"override_horizon", c.override_horizon}};
  j["output"] = {{"cadence", c.cadence}, {"field_cadence", c.field_cadence}};
  j["seed"] = c.seed;
  return j.dump(2);
}

} // namespace bubblesim
