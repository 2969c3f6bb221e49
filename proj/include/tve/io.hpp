#pragma once

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

namespace tve {

/// 64-bit FNV-1a over the byte image of the values fed to it.
class Fnv1a {
public:
  void add_bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) {
      h_ ^= b[i];
      h_ *= 1099511628211ULL;
    }
  }
  void add(double v) { add_bytes(&v, sizeof v); }
  void add(std::int64_t v) { add_bytes(&v, sizeof v); }
  std::uint64_t value() const { return h_; }

private:
  std::uint64_t h_ = 14695981039346656037ULL;
};

/// Writes contents to a sibling temporary file, then renames it over path.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

std::string read_file(const std::filesystem::path& path);

/// Little-endian binary encoding helpers.
class BinaryWriter {
public:
  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void f64(double v);
  void bytes(const char* s, std::size_t n) { buf_.append(s, n); }
  const std::string& str() const { return buf_; }

private:
  std::string buf_;
};

class BinaryReader {
public:
  explicit BinaryReader(std::string data) : data_(std::move(data)) {}
  std::uint32_t u32();
  std::uint64_t u64();
  double f64();
  std::string bytes(std::size_t n);
  bool at_end() const { return pos_ == data_.size(); }

private:
  void need(std::size_t n) const;
  std::string data_;
  std::size_t pos_ = 0;
};

/// Shortest round-trip decimal text of a double.
std::string format_double(double v);

/// Simple CSV table: header + numeric rows.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::string to_string() const;
};

}  // namespace tve
