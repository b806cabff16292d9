#pragma once

#include <concepts>
#include <cstdio>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace rss::csv {

/// Round-trippable representation (17 significant digits).
inline std::string format(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Splits one CSV line on commas (no quoting; our files never need it).
inline std::vector<std::string> split(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(',', start);
    out.emplace_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

class Writer {
 public:
  explicit Writer(std::ostream& os) : os_(os) {}

  Writer& field(std::string_view s) {
    sep();
    os_ << s;
    return *this;
  }
  Writer& field(double v) { return field(std::string_view(format(v))); }
  Writer& field(const char* s) { return field(std::string_view(s)); }
  Writer& field(const std::string& s) { return field(std::string_view(s)); }
  Writer& field(bool v) { return field(std::string_view(v ? "1" : "0")); }
  template <std::integral T>
  Writer& field(T v) {
    sep();
    os_ << v;
    return *this;
  }
  void end_row() {
    os_ << '\n';
    first_ = true;
  }

 private:
  void sep() {
    if (!first_) os_ << ',';
    first_ = false;
  }
  std::ostream& os_;
  bool first_ = true;
};

}  // namespace rss::csv
