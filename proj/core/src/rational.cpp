#include "cbpv/rational.hpp"

#include <stdexcept>

namespace cbpv {

std::string to_fraction_string(const Rational& q) {
  Rational c = q;
  c.canonicalize();
  if (c.get_den() == 1) return c.get_num().get_str();
  return c.get_num().get_str() + "/" + c.get_den().get_str();
}

std::string to_decimal_string(const Rational& q, int places) {
  BigInt scale = 1;
  for (int i = 0; i < places; ++i) scale *= 10;
  Rational scaled = q * scale;
  BigInt num = scaled.get_num();
  BigInt den = scaled.get_den();
  bool negative = num < 0;
  if (negative) num = -num;
  BigInt rounded = (2 * num + den) / (2 * den);
  std::string digits = rounded.get_str();
  if (places > 0) {
    if (static_cast<int>(digits.size()) <= places) {
      digits.insert(0, static_cast<std::size_t>(places + 1 - digits.size()), '0');
    }
    digits.insert(digits.size() - static_cast<std::size_t>(places), ".");
  }
  if (negative && rounded != 0) digits.insert(0, "-");
  return digits;
}

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  return true;
}

}  // namespace

BigInt parse_integer(std::string_view text) {
  std::string_view body = text;
  if (!body.empty() && (body.front() == '-' || body.front() == '+')) body.remove_prefix(1);
  if (!all_digits(body)) throw std::invalid_argument("malformed integer '" + std::string(text) + "'");
  std::string s(text);
  if (s.front() == '+') s.erase(0, 1);
  return BigInt(s, 10);
}

Rational parse_rational(std::string_view text) {
  auto slash = text.find('/');
  if (slash != std::string_view::npos) {
    BigInt num = parse_integer(text.substr(0, slash));
    std::string_view den_text = text.substr(slash + 1);
    if (!all_digits(den_text)) throw std::invalid_argument("malformed rational '" + std::string(text) + "'");
    BigInt den(std::string(den_text), 10);
    if (den == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
    Rational q(num, den);
    q.canonicalize();
    return q;
  }
  auto dot = text.find('.');
  if (dot != std::string_view::npos) {
    std::string_view whole = text.substr(0, dot);
    std::string_view frac = text.substr(dot + 1);
    bool negative = !whole.empty() && whole.front() == '-';
    if (negative) whole.remove_prefix(1);
    if ((!whole.empty() && !all_digits(whole)) || !all_digits(frac)) {
      throw std::invalid_argument("malformed decimal '" + std::string(text) + "'");
    }
    BigInt den = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
    BigInt num(std::string(whole.empty() ? "0" : whole) + std::string(frac), 10);
    Rational q(negative ? BigInt(-num) : num, den);
    q.canonicalize();
    return q;
  }
  return Rational(parse_integer(text));
}

}  // namespace cbpv
