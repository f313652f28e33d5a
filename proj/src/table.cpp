#include "amem/table.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include "amem/errors.hpp"

namespace amem {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string format_number(std::uint64_t v) { return std::to_string(v); }

Table::Table(std::vector<std::string> header) : header_(std::move(header)) {
  if (header_.empty()) throw DimensionError("table needs at least one column");
}

void Table::add_row(std::vector<std::string> cells) {
  if (cells.size() != header_.size()) throw DimensionError("table row width does not match header");
  for (const auto& c : cells) {
    if (c.find_first_of(",\n\r") != std::string::npos) throw FormatError("table cell contains a separator: " + c);
  }
  rows_.push_back(std::move(cells));
}

std::string Table::to_csv() const {
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i > 0) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  line(header_);
  for (const auto& r : rows_) line(r);
  return out;
}

void Table::write(const std::filesystem::path& path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw FormatError("cannot open " + path.string() + " for writing");
  f << to_csv();
  if (!f) throw FormatError("failed writing " + path.string());
}

}  // namespace amem
