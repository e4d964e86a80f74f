#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace crp {

/// Shortest round-trip decimal form; locale independent.
std::string format_number(double v);

/// One line of the check CSV:
/// `scenario,check,statistic,value,std_error,z,pass,seed,n_paths`.
struct CheckRow {
  std::string scenario;
  std::string check;
  std::string statistic;
  double value = 0.0;
  double std_error = 0.0;
  double z = 0.0;
  bool pass = true;
  unsigned long long seed = 0;
  unsigned long long n_paths = 0;
};

void write_check_header(std::ostream& os);
void write_check_row(std::ostream& os, const CheckRow& row);
void write_check_csv(std::ostream& os, const std::vector<CheckRow>& rows);

}  // namespace crp
