#include "rmf/statistics/csv.hpp"

#include <cstdio>

#include "rmf/core/errors.hpp"

namespace rmf::statistics {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : out_(path, std::ios::binary | std::ios::trunc) {
  if (!out_) throw Error("CsvWriter: cannot open " + path);
  row(header);
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out_ << ',';
    out_ << csv_field(fields[i]);
  }
  out_ << "\r\n";
}

void CsvWriter::sample(const std::string& run_id, std::uint64_t realization, double t, const std::string& statistic,
                       double value) {
  row({run_id, std::to_string(realization), format_double(t), statistic, format_double(value)});
}

}  // namespace rmf::statistics
