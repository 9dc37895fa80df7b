#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace halo {

// Minimal CSV emitter with deterministic number formatting (%.12g).
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);
  ~CsvWriter();
  CsvWriter(const CsvWriter&) = delete;
  CsvWriter& operator=(const CsvWriter&) = delete;

  void field(const std::string& v);
  void field(double v);
  void field(long v);
  void field(int v) { field(static_cast<long>(v)); }
  void end_row();
  void close();

  template <typename... Ts>
  void row(const Ts&... vs) {
    (field(vs), ...);
    end_row();
  }

 private:
  void* out_;  // FILE*
  std::string path_;
  bool first_in_row_ = true;
};

std::string format_double(double v);  // %.12g

// FNV-1a 64-bit digest of a file's bytes, as 16 hex chars.
std::string fnv1a64_file(const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace halo
