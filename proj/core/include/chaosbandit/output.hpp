#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace chaosbandit {

/// Writes `contents` to a sibling temp file, then renames it over `path`.
/// Readers never observe a partially written file.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

/// Shortest round-trip decimal form of `v` ("0.95", "1e-09", "inf").
/// Locale-independent, so outputs are byte-stable.
std::string format_real(double v);

/// Small CSV builder. Every file starts with "# <comment>" lines (typically
/// the resolved run configuration) followed by the header row.
class CsvWriter {
 public:
  CsvWriter(std::vector<std::string> comments, std::vector<std::string> columns);

  CsvWriter& row(const std::vector<std::string>& cells);
  std::string str() const { return text_; }
  void save(const std::filesystem::path& path) const { write_file_atomic(path, text_); }

 private:
  std::size_t columns_;
  std::string text_;
};

}  // namespace chaosbandit
