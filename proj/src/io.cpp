#include "lobosc/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace lobosc::io {

std::string fp(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string json_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

std::string comment_block(const std::vector<MetaLine>& meta) {
  std::string out;
  for (const auto& m : meta) {
    out += "# " + m.key + " = " + m.value + "\n";
  }
  return out;
}

void write_output(const std::string& path, const std::string& content,
                  bool force, std::ostream& fallback) {
  if (path.empty() || path == "-") {
    fallback << content;
    fallback.flush();
    return;
  }
  namespace fs = std::filesystem;
  if (!force && fs::exists(path)) {
    throw std::runtime_error("refusing to overwrite existing file " + path +
                             " (pass --force to allow)");
  }
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << content;
  if (!out) throw std::runtime_error("short write to " + path);
}

}  // namespace lobosc::io
