#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

namespace rmf::statistics {

// %.17g, so values round-trip exactly.
std::string format_double(double v);
// RFC 4180 field quoting.
std::string csv_field(const std::string& s);

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);

  void row(const std::vector<std::string>& fields);
  // run_id, realization, t, statistic, value
  void sample(const std::string& run_id, std::uint64_t realization, double t, const std::string& statistic,
              double value);
  void flush() { out_.flush(); }

 private:
  std::ofstream out_;
};

}  // namespace rmf::statistics
