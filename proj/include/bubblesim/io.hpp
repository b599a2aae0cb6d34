#pragma once

#include <Eigen/Core>

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "bubblesim/grid.hpp"

namespace bubblesim {

// Flat little-endian float64, x-fastest; vector fields are written one
// component block after another. A JSON sidecar <stem>.json describes it.
void write_field(const std::filesystem::path& stem, const ScalarField& f, const std::string& name, double time);
void write_field(const std::filesystem::path& stem, const VectorField& f, const std::string& name, double time);
ScalarField read_scalar_field(const std::filesystem::path& stem);
void write_matrix(const std::filesystem::path& stem, const Eigen::MatrixXd& m, const std::string& name, double time);

class CsvWriter {
public:
  CsvWriter() = default;
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);

  bool is_open() const { return out_.is_open(); }
  void row(const std::vector<double>& values);

private:
  std::ofstream out_;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  int column(const std::string& name) const; // -1 if absent
  std::vector<double> values(const std::string& name) const;
};

CsvTable read_csv(const std::filesystem::path& path);

} // namespace bubblesim
