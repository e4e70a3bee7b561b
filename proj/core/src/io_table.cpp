#include "decarb/io_table.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "decarb/error.hpp"

namespace decarb {

double IOTable::column_sum(int j) const {
  double sum = 0.0;
  for (int i = 0; i < sectors; ++i) sum += a(i, j);
  return sum;
}

void IOTable::validate() const {
  const auto s = static_cast<std::size_t>(sectors);
  if (sectors < 1 || coefficients.size() != s * s || labor_coefficients.size() != s || emission_intensity.size() != s) {
    throw std::invalid_argument("io table: inconsistent dimensions");
  }
  for (double v : coefficients) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("io table: coefficients must be finite and >= 0");
  }
  for (std::size_t k = 0; k < s; ++k) {
    if (!(labor_coefficients[k] >= 0.0) || !(emission_intensity[k] >= 0.0)) {
      throw std::invalid_argument("io table: labor coefficients and emission intensities must be >= 0");
    }
  }
  for (int j = 0; j < sectors; ++j) {
    const double sum = column_sum(j);
    if (!(sum < 1.0)) throw InfeasibleIO(j, sum);
  }
}

IOTable make_io_table(int sectors, std::vector<double> coefficients, std::vector<double> labor,
                      std::vector<double> emissions) {
  IOTable io;
  io.sectors = sectors;
  io.coefficients = std::move(coefficients);
  io.labor_coefficients = std::move(labor);
  io.emission_intensity = std::move(emissions);
  io.validate();
  return io;
}

IOTable load_io_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open io table " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    std::vector<double> row;
    std::istringstream fields(line);
    std::string field;
    while (std::getline(fields, field, ',')) {
      while (!field.empty() && field.front() == ' ') field.erase(field.begin());
      while (!field.empty() && field.back() == ' ') field.pop_back();
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
      if (ec != std::errc() || ptr != field.data() + field.size()) {
        throw ParseError("io table: not a number '" + field + "'", line_no);
      }
      row.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  if (rows.size() < 3) throw ParseError("io table: need S coefficient rows plus labor and emission rows");
  const auto s = rows.size() - 2;
  std::vector<double> coefficients;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != s) {
      throw ParseError("io table: row " + std::to_string(r + 1) + " has " + std::to_string(rows[r].size()) +
                       " values, expected " + std::to_string(s));
    }
    if (r < s) coefficients.insert(coefficients.end(), rows[r].begin(), rows[r].end());
  }
  return make_io_table(static_cast<int>(s), std::move(coefficients), rows[s], rows[s + 1]);
}

}  // namespace decarb
