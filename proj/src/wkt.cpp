#include "dlsgraph/wkt.hpp"

#include <cctype>
#include <charconv>
#include <cmath>

namespace dlsgraph {

namespace {

class Cursor {
 public:
  explicit Cursor(std::string_view text) : text_(text) {}

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  void keyword(std::string_view word) {
    skip_space();
    for (char expected : word) {
      if (pos_ >= text_.size() ||
          std::toupper(static_cast<unsigned char>(text_[pos_])) != static_cast<unsigned char>(expected)) {
        fail("expected keyword " + std::string(word));
      }
      ++pos_;
    }
  }

  void expect(char c) {
    skip_space();
    if (pos_ >= text_.size() || text_[pos_] != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  double number() {
    skip_space();
    const char* begin = text_.data() + pos_;
    const char* end = text_.data() + text_.size();
    if (begin != end && *begin == '+') ++begin;
    double value = 0.0;
    auto res = std::from_chars(begin, end, value);
    if (res.ec != std::errc{} || !std::isfinite(value)) fail("expected a finite number");
    pos_ = static_cast<std::size_t>(res.ptr - text_.data());
    return value;
  }

  Point coordinate() {
    const double x = number();
    if (pos_ >= text_.size() || !std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      fail("expected whitespace between coordinates");
    }
    const double y = number();
    return {x, y};
  }

  void finish() {
    skip_space();
    if (pos_ != text_.size()) fail("trailing characters");
  }

  [[noreturn]] void fail(const std::string& what) const { throw ParseError("wkt: " + what, pos_); }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

Point parse_wkt_point(std::string_view text) {
  Cursor c(text);
  c.keyword("POINT");
  c.expect('(');
  const Point p = c.coordinate();
  c.expect(')');
  c.finish();
  return p;
}

std::vector<Point> parse_wkt_linestring(std::string_view text) {
  Cursor c(text);
  c.keyword("LINESTRING");
  c.expect('(');
  std::vector<Point> points;
  do {
    const Point p = c.coordinate();
    if (points.empty() || !(points.back() == p)) points.push_back(p);
  } while (c.accept(','));
  c.expect(')');
  c.finish();
  if (points.size() < 2) throw ParseError("wkt: linestring needs at least two distinct points", text.size());
  return points;
}

}  // namespace dlsgraph
