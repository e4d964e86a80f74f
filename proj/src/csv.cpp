#include "crp/csv.hpp"

#include <charconv>
#include <cmath>
#include <ostream>

namespace crp {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

// RFC 4180 quoting
std::string field(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

}  // namespace

void write_check_header(std::ostream& os) {
  os << "scenario,check,statistic,value,std_error,z,pass,seed,n_paths\n";
}

void write_check_row(std::ostream& os, const CheckRow& r) {
  os << field(r.scenario) << ',' << field(r.check) << ',' << field(r.statistic) << ',' << format_number(r.value) << ','
     << format_number(r.std_error) << ',' << format_number(r.z) << ',' << (r.pass ? 1 : 0) << ','
     << r.seed << ',' << r.n_paths << '\n';
}

void write_check_csv(std::ostream& os, const std::vector<CheckRow>& rows) {
  write_check_header(os);
  for (const auto& r : rows) write_check_row(os, r);
}

}  // namespace crp
