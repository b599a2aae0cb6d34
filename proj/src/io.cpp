#include "bubblesim/io.hpp"

#include "bubblesim/errors.hpp"

#include <json.hpp>

#include <bit>
#include <cstring>
#include <iomanip>
#include <limits>
#include <sstream>

namespace bubblesim {

namespace {

static_assert(std::endian::native == std::endian::little, "field dumps assume a little-endian host");

void write_sidecar(const std::filesystem::path& stem, const BoxDomain& dom, const std::string& name, double time,
                   int components)
{
  nlohmann::json j;
  j["name"] = name;
  j["time"] = time;
  j["lower"] = {dom.lower[0], dom.lower[1], dom.lower[2]};
  j["upper"] = {dom.upper[0], dom.upper[1], dom.upper[2]};
  j["resolution"] = dom.resolution;
  j["components"] = components;
  j["dtype"] = "float64";
  j["endianness"] = "little";
  j["order"] = "x-fastest";
  std::ofstream(stem.string() + ".json") << j.dump(2) << "\n";
}

void write_raw(const std::filesystem::path& stem, const double* data, std::size_t count)
{
  std::ofstream out(stem.string() + ".bin", std::ios::binary);
  if (!out) throw SimulationError(AbortCause::validation, "cannot write " + stem.string() + ".bin");
  out.write(reinterpret_cast<const char*>(data), std::streamsize(count * sizeof(double)));
}

} // namespace

void write_field(const std::filesystem::path& stem, const ScalarField& f, const std::string& name, double time)
{
  write_raw(stem, f.values.data(), std::size_t(f.values.size()));
  write_sidecar(stem, f.domain, name, time, 1);
}

void write_field(const std::filesystem::path& stem, const VectorField& f, const std::string& name, double time)
{
  write_raw(stem, f.values.data(), std::size_t(f.values.size()));
  write_sidecar(stem, f.domain, name, time, 3);
}

ScalarField read_scalar_field(const std::filesystem::path& stem)
{
  std::ifstream side(stem.string() + ".json");
  if (!side) throw SimulationError(AbortCause::validation, "missing sidecar for " + stem.string());
  const nlohmann::json j = nlohmann::json::parse(side);
  BoxDomain dom;
  for (int a = 0; a < 3; ++a) {
    dom.lower[a] = j.at("lower")[a];
    dom.upper[a] = j.at("upper")[a];
    dom.resolution[a] = j.at("resolution")[a];
  }
  ScalarField f(dom);
  std::ifstream in(stem.string() + ".bin", std::ios::binary);
  in.read(reinterpret_cast<char*>(f.values.data()), std::streamsize(f.values.size() * sizeof(double)));
  if (!in) throw SimulationError(AbortCause::validation, "truncated field dump " + stem.string());
  return f;
}

void write_matrix(const std::filesystem::path& stem, const Eigen::MatrixXd& m, const std::string& name, double time)
{
  write_raw(stem, m.data(), std::size_t(m.size()));
  nlohmann::json j;
  j["name"] = name;
  j["time"] = time;
  j["rows"] = m.rows();
  j["cols"] = m.cols();
  j["dtype"] = "float64";
  j["endianness"] = "little";
  j["order"] = "column-major";
  std::ofstream(stem.string() + ".json") << j.dump(2) << "\n";
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header) : out_(path)
{
  if (!out_) throw SimulationError(AbortCause::validation, "cannot write " + path.string());
  out_ << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
  out_ << "\n";
}

void CsvWriter::row(const std::vector<double>& values)
{
  for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << values[i];
  out_ << "\n";
}

int CsvTable::column(const std::string& name) const
{
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return int(i);
  return -1;
}

std::vector<double> CsvTable::values(const std::string& name) const
{
  const int c = column(name);
  if (c < 0) throw SimulationError(AbortCause::validation, "csv column '" + name + "' missing");
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.at(std::size_t(c)));
  return out;
}

CsvTable read_csv(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in) throw SimulationError(AbortCause::validation, "cannot read " + path.string());
  CsvTable t;
  std::string line;
  if (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) t.header.push_back(cell);
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    t.rows.push_back(std::move(row));
  }
  return t;
}

} // namespace bubblesim
