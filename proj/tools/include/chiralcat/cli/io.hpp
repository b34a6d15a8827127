#pragma once

#include <filesystem>
#include <initializer_list>
#include <string>
#include <string_view>

namespace chiralcat::cli {

/// Shortest round-trip form; "nan", "inf", "-inf" for non-finite values.
std::string format_double(double v);

class CsvWriter {
 public:
  explicit CsvWriter(std::initializer_list<std::string_view> header);

  void row(std::initializer_list<double> values);
  const std::string& str() const { return body_; }

 private:
  std::size_t columns_;
  std::string body_;
};

std::string sha256_hex(std::string_view data);

/// Writes to a sibling temporary and renames it into place.
void write_atomic(const std::filesystem::path& path, std::string_view content);

std::string read_file(const std::filesystem::path& path);

}  // namespace chiralcat::cli
