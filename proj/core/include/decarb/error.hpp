#pragma once

#include <stdexcept>
#include <string>

namespace decarb {

/// Base of every exception the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when the technical-coefficient matrix is not productive.
class InfeasibleIO : public Error {
 public:
  InfeasibleIO(int sector, double column_sum)
      : Error("infeasible input-output table: column " + std::to_string(sector) + " sums to " +
              std::to_string(column_sum) + " (must be < 1)"),
        sector_(sector),
        column_sum_(column_sum) {}

  int sector() const { return sector_; }
  double column_sum() const { return column_sum_; }

 private:
  int sector_;
  double column_sum_;
};

/// Malformed input file or config document.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line = 0)
      : Error(line > 0 ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}

  int line() const { return line_; }

 private:
  int line_;
};

}  // namespace decarb
