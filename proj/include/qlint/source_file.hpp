#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace qlint {

/// One analyzed source file. Lines are 1-based everywhere; the text round-trips
/// byte-exact through load/save.
struct SourceFile {
  std::string path;
  std::string text;

  /// Number of source lines. A trailing newline does not start a phantom
  /// final line: "a\nb\n" and "a\nb" both have two lines.
  int line_count() const {
    if (text.empty()) return 0;
    int n = 0;
    for (char ch : text) {
      if (ch == '\n') ++n;
    }
    if (text.back() != '\n') ++n;
    return n;
  }

  /// Text of line `number` (1-based), without the newline.
  std::string line(int number) const {
    auto lines = split_lines();
    if (number < 1 || number > static_cast<int>(lines.size()))
      throw std::out_of_range("line " + std::to_string(number) + " out of range");
    return lines[static_cast<size_t>(number - 1)];
  }

  std::vector<std::string> split_lines() const {
    std::vector<std::string> lines;
    size_t start = 0;
    while (start < text.size()) {
      size_t nl = text.find('\n', start);
      if (nl == std::string::npos) {
        lines.push_back(text.substr(start));
        break;
      }
      lines.push_back(text.substr(start, nl - start));
      start = nl + 1;
    }
    return lines;
  }

  static SourceFile from_text(std::string path, std::string text) {
    return SourceFile{std::move(path), std::move(text)};
  }

  static SourceFile load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return SourceFile{path, buf.str()};
  }

  void save(const std::string& out_path) const {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + out_path);
    out << text;
  }
};

}  // namespace qlint
