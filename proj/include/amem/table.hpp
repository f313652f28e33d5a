#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace amem {

// Shortest decimal text that parses back to the same double.
std::string format_number(double v);
std::string format_number(std::uint64_t v);

/// Comma-separated table with a header row; cells must not contain commas.
class Table {
 public:
  explicit Table(std::vector<std::string> header);

  void add_row(std::vector<std::string> cells);
  const std::vector<std::string>& header() const { return header_; }
  const std::vector<std::vector<std::string>>& rows() const { return rows_; }

  std::string to_csv() const;
  void write(const std::filesystem::path& path) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace amem
