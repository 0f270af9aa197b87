#pragma once

#include <charconv>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "railcal/error.hpp"

namespace railcal::detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    auto next = s.find(sep, pos);
    if (next == std::string_view::npos) {
      out.push_back(trim(s.substr(pos)));
      break;
    }
    out.push_back(trim(s.substr(pos, next - pos)));
    pos = next + 1;
  }
  return out;
}

inline std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

/// Line reader that tracks 1-based line numbers and skips blank lines.
class LineReader {
 public:
  LineReader(std::istream& in, std::string name) : in_(in), name_(std::move(name)) {}

  bool next(std::string_view& line) {
    while (std::getline(in_, buf_)) {
      ++line_no_;
      auto t = trim(buf_);
      if (t.empty()) continue;
      line = t;
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& reason) const { throw ParseError(name_, line_no_, reason); }
  const std::string& name() const { return name_; }
  std::size_t line_no() const { return line_no_; }

  template <class T>
  T parse_int(std::string_view field, const char* what) const {
    T v{};
    auto [p, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc{} || p != field.data() + field.size()) fail(std::string("bad integer for ") + what + ": '" + std::string(field) + "'");
    return v;
  }

  double parse_double(std::string_view field, const char* what) const {
    double v{};
    auto [p, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc{} || p != field.data() + field.size()) fail(std::string("bad number for ") + what + ": '" + std::string(field) + "'");
    return v;
  }

  template <class T>
  std::optional<T> parse_optional_int(std::string_view field, const char* what) const {
    if (field.empty()) return std::nullopt;
    return parse_int<T>(field, what);
  }

  void expect_header(std::string_view line, std::string_view expected) const {
    if (line != expected) fail("expected header '" + std::string(expected) + "', got '" + std::string(line) + "'");
  }

 private:
  std::istream& in_;
  std::string name_;
  std::string buf_;
  std::size_t line_no_ = 0;
};

}  // namespace railcal::detail
