#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace sparse_jacobi::io {

std::string sha256_hex(std::string_view data);

// Writes to a temporary sibling and renames it over path, so readers never see a partial file.
void write_atomic(const std::filesystem::path& path, std::string_view content);

// Shortest round-trip form; nan and inf spelled out.
std::string format_double(double v);

// RFC 4180: quotes fields holding commas, quotes or line breaks, doubling inner quotes.
std::string csv_field(std::string_view s);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  void add_row(std::vector<std::string> row);
  std::size_t rows() const { return rows_.size(); }

  // comment lines go first, each prefixed with "# "
  std::string str(const std::vector<std::string>& comments = {}) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace sparse_jacobi::io
