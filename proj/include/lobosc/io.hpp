#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace lobosc::io {

// Every floating-point number leaving the library goes through this one
// formatter: shortest %.17g form, locale-independent, so identical inputs
// produce byte-identical files.
std::string fp(double v);

std::string json_escape(std::string_view s);

// "# key = value" comment block for CSV headers.
struct MetaLine {
  std::string key;
  std::string value;
};
std::string comment_block(const std::vector<MetaLine>& meta);

// Writes content to path, or to `fallback` when path is empty or "-" (the
// caller passes its data stream, so the library never grabs std::cout).
// Refuses to overwrite an existing file unless force is set.
void write_output(const std::string& path, const std::string& content,
                  bool force, std::ostream& fallback);

}  // namespace lobosc::io
