#include "gnslab/scalar.hpp"

#include <cctype>
#include <cstdio>
#include <string>

namespace gnslab {

std::string format_scalar(const FloatScalar& x) {
  char buf[64];
  if (x.imag() == 0.0) {
    std::snprintf(buf, sizeof(buf), "%.17g", x.real());
    return buf;
  }
  std::string out;
  if (x.real() != 0.0) {
    std::snprintf(buf, sizeof(buf), "%.17g", x.real());
    out = buf;
    if (x.imag() > 0) out += "+";
  }
  std::snprintf(buf, sizeof(buf), "%.17g", x.imag());
  out += buf;
  out += " i";
  return out;
}

namespace {

struct Cursor {
  const std::string& s;
  size_t pos = 0;

  void skip_ws() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }
  bool done() {
    skip_ws();
    return pos >= s.size();
  }
  char peek() {
    skip_ws();
    return pos < s.size() ? s[pos] : '\0';
  }
};

Rational parse_rational(Cursor& c) {
  c.skip_ws();
  size_t start = c.pos;
  if (c.pos < c.s.size() && (c.s[c.pos] == '+' || c.s[c.pos] == '-')) ++c.pos;
  size_t digits = 0;
  while (c.pos < c.s.size() && std::isdigit(static_cast<unsigned char>(c.s[c.pos]))) {
    ++c.pos;
    ++digits;
  }
  if (digits == 0) fail("ParseError", "expected a rational number in '" + c.s + "'");
  std::string num = c.s.substr(start, c.pos - start);
  if (!num.empty() && num[0] == '+') num.erase(0, 1);
  std::string den = "1";
  c.skip_ws();
  if (c.pos < c.s.size() && c.s[c.pos] == '/') {
    ++c.pos;
    c.skip_ws();
    size_t dstart = c.pos;
    while (c.pos < c.s.size() && std::isdigit(static_cast<unsigned char>(c.s[c.pos]))) ++c.pos;
    if (c.pos == dstart) fail("ParseError", "expected a denominator in '" + c.s + "'");
    den = c.s.substr(dstart, c.pos - dstart);
    if (boost::multiprecision::cpp_int(den) == 0)
      fail("DivisionByZero", "zero denominator in '" + c.s + "'");
  }
  return Rational(boost::multiprecision::cpp_int(num), boost::multiprecision::cpp_int(den));
}

// One signed term: either "i", "a/b i", or "a/b"; leading sign already part of
// the rational grammar. Returns (value, is_imaginary).
std::pair<Rational, bool> parse_term(Cursor& c) {
  c.skip_ws();
  if (c.peek() == 'i') {
    ++c.pos;
    return {Rational(1), true};
  }
  if ((c.peek() == '+' || c.peek() == '-')) {
    size_t save = c.pos;
    char sign = c.s[c.pos];
    ++c.pos;
    if (c.peek() == 'i') {
      ++c.pos;
      return {Rational(sign == '-' ? -1 : 1), true};
    }
    c.pos = save;
  }
  Rational r = parse_rational(c);
  c.skip_ws();
  if (c.pos < c.s.size() && c.s[c.pos] == 'i') {
    ++c.pos;
    return {r, true};
  }
  return {r, false};
}

}  // namespace

ExactScalar parse_exact_scalar(const std::string& text) {
  Cursor c{text};
  ExactScalar out;
  bool saw_re = false, saw_im = false;
  while (!c.done()) {
    auto [value, imaginary] = parse_term(c);
    if (imaginary) {
      if (saw_im) fail("ParseError", "duplicate imaginary part in '" + text + "'");
      out.im = value;
      saw_im = true;
    } else {
      if (saw_re) fail("ParseError", "duplicate real part in '" + text + "'");
      out.re = value;
      saw_re = true;
    }
    c.skip_ws();
    if (c.pos < c.s.size() && c.s[c.pos] != '+' && c.s[c.pos] != '-')
      fail("ParseError", "unexpected character in scalar '" + text + "'");
  }
  if (!saw_re && !saw_im) fail("ParseError", "empty scalar literal");
  return out;
}

}  // namespace gnslab
