#include "pbimpact/rational.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cctype>
#include <cstdlib>

#include "pbimpact/errors.hpp"

namespace pbimpact {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

[[noreturn]] void malformed(std::string_view text) {
  throw Error(ErrorCode::MalformedNumber, "not a decimal number: '" + std::string(text) + "'");
}

mpz_class parse_integer(std::string_view digits) {
  mpz_class z;
  z.set_str(std::string(digits), 10);
  return z;
}

}  // namespace

Rational parse_decimal(std::string_view text) {
  const std::string_view s = trim(text);
  std::string_view body = s;
  bool negative = false;
  if (!body.empty() && (body.front() == '-' || body.front() == '+')) {
    negative = body.front() == '-';
    body.remove_prefix(1);
  }
  if (body.empty()) malformed(text);

  Rational result;
  if (const auto slash = body.find('/'); slash != std::string_view::npos) {
    const auto num = body.substr(0, slash);
    const auto den = body.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den)) malformed(text);
    mpz_class d = parse_integer(den);
    if (d == 0) malformed(text);
    result = Rational(parse_integer(num), d);
  } else {
    const auto dot = body.find('.');
    std::string_view int_part = body.substr(0, dot);
    std::string_view frac_part = dot == std::string_view::npos ? std::string_view{} : body.substr(dot + 1);
    if (int_part.empty() && frac_part.empty()) malformed(text);
    if (!int_part.empty() && !all_digits(int_part)) malformed(text);
    if (dot != std::string_view::npos && !frac_part.empty() && !all_digits(frac_part)) malformed(text);
    if (dot != std::string_view::npos && int_part.empty() && frac_part.empty()) malformed(text);

    std::string digits(int_part);
    digits += frac_part;
    if (digits.empty()) malformed(text);
    mpz_class den;
    mpz_ui_pow_ui(den.get_mpz_t(), 10, frac_part.size());
    result = Rational(parse_integer(digits), den);
  }
  result.canonicalize();
  if (negative) result = -result;
  return result;
}

bool is_terminating_decimal(const Rational& raw) {
  Rational value = raw;
  value.canonicalize();
  mpz_class den = value.get_den();
  mpz_class two = 2, five = 5;
  mpz_remove(den.get_mpz_t(), den.get_mpz_t(), two.get_mpz_t());
  mpz_remove(den.get_mpz_t(), den.get_mpz_t(), five.get_mpz_t());
  return den == 1;
}

std::string to_fraction_string(const Rational& raw) {
  Rational value = raw;
  value.canonicalize();
  return value.get_num().get_str() + "/" + value.get_den().get_str();
}

std::string to_decimal_string(const Rational& raw) {
  Rational value = raw;
  value.canonicalize();
  if (!is_terminating_decimal(value)) return to_fraction_string(value);
  if (value.get_den() == 1) return value.get_num().get_str();

  mpz_class den = value.get_den();
  mpz_class two = 2, five = 5;
  const auto twos = mpz_remove(den.get_mpz_t(), den.get_mpz_t(), two.get_mpz_t());
  den = value.get_den();
  const auto fives = mpz_remove(den.get_mpz_t(), den.get_mpz_t(), five.get_mpz_t());
  const auto places = std::max(twos, fives);

  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, places);
  mpz_class scaled = value.get_num() * scale / value.get_den();
  const bool negative = scaled < 0;
  if (negative) scaled = -scaled;

  std::string digits = scaled.get_str();
  if (digits.size() <= places) digits.insert(0, places - digits.size() + 1, '0');
  digits.insert(digits.size() - places, ".");
  while (digits.back() == '0') digits.pop_back();
  if (digits.back() == '.') digits.pop_back();
  return negative ? "-" + digits : digits;
}

double to_double(const Rational& raw) {
  // mpq_get_d truncates; go through a long decimal expansion so that strtod
  // rounds to nearest.
  Rational value = raw;
  value.canonicalize();
  if (value == 0) return 0.0;
  mpz_class num = abs(value.get_num());
  const mpz_class& den = value.get_den();
  long exponent = 0;
  mpz_class q = num / den;
  const std::size_t want = 40;
  while (q.get_str().size() < want) {
    num *= 10;
    --exponent;
    q = num / den;
  }
  std::string text = (value < 0 ? "-" : "") + q.get_str() + "e" + std::to_string(exponent);
  return std::strtod(text.c_str(), nullptr);
}

std::string format_double(double value) {
  if (std::isnan(value)) return "";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  std::string out(buf, res.ptr);
  if (out.find_first_of(".e") == std::string::npos) out += ".0";
  return out;
}

bool IdLess::operator()(std::string_view a, std::string_view b) const {
  const bool da = all_digits(a);
  const bool db = all_digits(b);
  if (da != db) return da;
  if (da) {
    auto strip = [](std::string_view s) {
      while (s.size() > 1 && s.front() == '0') s.remove_prefix(1);
      return s;
    };
    const auto sa = strip(a);
    const auto sb = strip(b);
    if (sa.size() != sb.size()) return sa.size() < sb.size();
    if (sa != sb) return sa < sb;
  }
  return a < b;
}

}  // namespace pbimpact
