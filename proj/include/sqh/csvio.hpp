#pragma once
#include <cstdint>
#include <string>
#include <vector>

namespace sqh {

// Locale-independent shortest round-trip decimal formatting (std::to_chars).
std::string format_double(double v);

uint64_t fnv1a64(const void* data, size_t n);
uint64_t fnv1a64(const std::string& s);

// Minimal CSV writer: header row then numeric rows, '\n' line endings,
// buffered in memory so the file hash is available after write_file().
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> columns);
  void row(const std::vector<double>& values);
  void raw_row(const std::vector<std::string>& cells);
  // Writes the buffer to path; returns the byte count written.
  size_t write_file(const std::string& path);
  uint64_t hash() const;
  const std::string& buffer() const { return buf_; }

 private:
  size_t ncols_;
  std::string buf_;
};

}  // namespace sqh
