#include "perclab/csv.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

#include "perclab/metric.hpp"

namespace perclab {

CsvWriter::CsvWriter(std::ostream& out, std::string_view table, std::vector<std::string> columns, int version)
    : out_(out), columns_(columns.size()) {
  out_ << "# perclab-schema " << table << " v" << version << '\n';
  for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
  out_ << '\n';
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_) throw std::logic_error("csv row width does not match the header");
  for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
  out_ << '\n';
  ++rows_;
}

void CsvWriter::mark_partial(std::string_view reason) { out_ << "# partial: " << reason << '\n'; }

std::string format_real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return fmt::format("{}", x);
}

std::string format_distance(std::uint32_t d) { return d == kInfinity ? "inf" : std::to_string(d); }

std::string format_coords(const Point& x) {
  std::string s;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i) s += ';';
    s += std::to_string(x[i]);
  }
  return s;
}

}  // namespace perclab
