#include "exchangelab/rational.hpp"

#include <cctype>
#include <cmath>

namespace exchangelab {

namespace {

bool is_integer_literal(const std::string& s) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '+' || s[0] == '-') ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  return true;
}

}  // namespace

Rational parse_rational(const std::string& text) {
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  if (s.empty()) throw std::invalid_argument("empty rational literal");

  auto slash = s.find('/');
  if (slash != std::string::npos) {
    std::string num = s.substr(0, slash), den = s.substr(slash + 1);
    if (!is_integer_literal(num) || !is_integer_literal(den))
      throw std::invalid_argument("malformed rational literal: " + text);
    Rational q;
    if (q.set_str(num + "/" + den, 10) != 0)
      throw std::invalid_argument("malformed rational literal: " + text);
    if (q.get_den() == 0)
      throw std::invalid_argument("zero denominator: " + text);
    q.canonicalize();
    return q;
  }

  if (is_integer_literal(s)) {
    Rational q;
    if (q.set_str(s, 10) != 0)
      throw std::invalid_argument("malformed rational literal: " + text);
    q.canonicalize();
    return q;
  }

  // Decimal (or scientific) literal: parse as double, convert exactly.
  std::size_t pos = 0;
  double x;
  try {
    x = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("malformed rational literal: " + text);
  }
  if (pos != s.size())
    throw std::invalid_argument("malformed rational literal: " + text);
  return rational_from_double(x);
}

Rational rational_from_double(double x) {
  if (!std::isfinite(x))
    throw std::invalid_argument("non-finite value has no rational form");
  return Rational(x);  // exact: doubles are dyadic
}

double to_double(const Rational& q) { return q.get_d(); }

std::string to_string(const Rational& q) {
  Rational c = q;
  c.canonicalize();
  if (c.get_den() == 1) return c.get_num().get_str();
  return c.get_num().get_str() + "/" + c.get_den().get_str();
}

}  // namespace exchangelab
