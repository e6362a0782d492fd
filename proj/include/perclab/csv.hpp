#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "perclab/lattice.hpp"

namespace perclab {

inline constexpr int kCsvSchemaVersion = 1;

// Every table starts with "# perclab-schema <table> v<version>" followed by the
// column header. Bumping a table's layout means bumping its version.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, std::string_view table, std::vector<std::string> columns,
            int version = kCsvSchemaVersion);
  void row(const std::vector<std::string>& cells);
  // trailing marker for tables cut short by a failure
  void mark_partial(std::string_view reason);
  std::size_t rows() const { return rows_; }

 private:
  std::ostream& out_;
  std::size_t columns_;
  std::size_t rows_ = 0;
};

std::string format_real(double x);  // shortest round-trip form; inf, -inf, nan spelled out
std::string format_distance(std::uint32_t d);  // "inf" for unreachable
std::string format_coords(const Point& x);     // "1;-2;3", safe inside a CSV cell

}  // namespace perclab
