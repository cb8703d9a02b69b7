#include "chaosbandit/output.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <system_error>

#include "chaosbandit/error.hpp"

namespace chaosbandit {

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory " + path.parent_path().string());
  }
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw IoError("write failed: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot rename temp file onto " + path.string());
  }
}

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw Error("cannot format number");
  return std::string(buf, ptr);
}

CsvWriter::CsvWriter(std::vector<std::string> comments, std::vector<std::string> columns)
    : columns_(columns.size()) {
  for (const auto& c : comments) {
    text_ += "# ";
    text_ += c;
    text_ += '\n';
  }
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) text_ += ',';
    text_ += columns[i];
  }
  text_ += '\n';
}

CsvWriter& CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_)
    throw InvalidArgument("CSV row has " + std::to_string(cells.size()) +
                          " cells, expected " + std::to_string(columns_));
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) text_ += ',';
    text_ += cells[i];
  }
  text_ += '\n';
  return *this;
}

}  // namespace chaosbandit
