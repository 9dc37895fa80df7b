#include "halolab/csvio.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "halolab/errors.hpp"

namespace halo {

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : path_(path) {
  FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw ConfigError("CsvWriter: cannot open " + path);
  out_ = f;
  for (const auto& h : header) field(h);
  end_row();
}

CsvWriter::~CsvWriter() { close(); }

void CsvWriter::close() {
  if (out_) {
    std::fclose(static_cast<FILE*>(out_));
    out_ = nullptr;
  }
}

void CsvWriter::field(const std::string& v) {
  FILE* f = static_cast<FILE*>(out_);
  if (!first_in_row_) std::fputc(',', f);
  std::fputs(v.c_str(), f);
  first_in_row_ = false;
}

void CsvWriter::field(double v) { field(format_double(v)); }

void CsvWriter::field(long v) { field(std::to_string(v)); }

void CsvWriter::end_row() {
  std::fputc('\n', static_cast<FILE*>(out_));
  first_in_row_ = true;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string fnv1a64_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("fnv1a64_file: cannot open " + path);
  uint64_t h = UINT64_C(0xcbf29ce484222325);
  char buf[8192];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    const std::streamsize n = in.gcount();
    for (std::streamsize i = 0; i < n; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= UINT64_C(0x100000001b3);
    }
    if (!in) break;
  }
  char out[17];
  std::snprintf(out, sizeof(out), "%016llx", static_cast<unsigned long long>(h));
  return out;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("read_text_file: cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("write_text_file: cannot open " + path);
  out << content;
  if (!out) throw ConfigError("write_text_file: write failed for " + path);
}

}  // namespace halo
