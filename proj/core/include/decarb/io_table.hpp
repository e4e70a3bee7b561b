#pragma once

#include <filesystem>
#include <vector>

namespace decarb {

/// Technical coefficients a(i, j): units of sector-i input per unit of
/// sector-j output. Stored row-major.
struct IOTable {
  int sectors = 0;
  std::vector<double> coefficients;
  std::vector<double> labor_coefficients;  // workers per unit output
  std::vector<double> emission_intensity;  // tCO2 per unit output

  double a(int i, int j) const { return coefficients[static_cast<std::size_t>(i * sectors + j)]; }
  double& a(int i, int j) { return coefficients[static_cast<std::size_t>(i * sectors + j)]; }
  double column_sum(int j) const;

  /// Throws InfeasibleIO naming the first column whose sum is >= 1, or
  /// std::invalid_argument for negative entries and shape errors.
  void validate() const;
};

IOTable make_io_table(int sectors, std::vector<double> coefficients, std::vector<double> labor,
                      std::vector<double> emissions);

/// S rows of S coefficients, one row of labor coefficients, one row of
/// emission intensities. Blank lines and lines starting with '#' are skipped.
IOTable load_io_table(const std::filesystem::path& path);

}  // namespace decarb
