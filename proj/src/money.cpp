#include "ransomneg/money.hpp"

#include <cctype>
#include <stdexcept>

namespace ransomneg {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

mpz_class pow10(unsigned long e) {
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), 10, e);
  return r;
}

Money parse_decimal(std::string_view text) {
  bool negative = false;
  if (!text.empty() && (text.front() == '-' || text.front() == '+')) {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }

  long exponent = 0;
  if (auto e = text.find_first_of("eE"); e != std::string_view::npos) {
    std::string_view exp_part = text.substr(e + 1);
    bool exp_negative = false;
    if (!exp_part.empty() && (exp_part.front() == '-' || exp_part.front() == '+')) {
      exp_negative = exp_part.front() == '-';
      exp_part.remove_prefix(1);
    }
    if (!all_digits(exp_part) || exp_part.size() > 6)
      throw std::invalid_argument("bad exponent in amount");
    exponent = std::stol(std::string(exp_part));
    if (exp_negative) exponent = -exponent;
    text = text.substr(0, e);
  }

  std::string_view int_part = text;
  std::string_view frac_part;
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    int_part = text.substr(0, dot);
    frac_part = text.substr(dot + 1);
  }
  if (int_part.empty() && frac_part.empty())
    throw std::invalid_argument("empty amount");
  if ((!int_part.empty() && !all_digits(int_part)) ||
      (!frac_part.empty() && !all_digits(frac_part)))
    throw std::invalid_argument("malformed amount");

  std::string digits(int_part);
  digits.append(frac_part);
  mpz_class numerator(digits.empty() ? std::string("0") : digits, 10);
  exponent -= static_cast<long>(frac_part.size());

  Money result;
  if (exponent >= 0) {
    result = Money(numerator * pow10(static_cast<unsigned long>(exponent)));
  } else {
    result = Money(numerator, pow10(static_cast<unsigned long>(-exponent)));
    result.canonicalize();
  }
  return negative ? Money(-result) : result;
}

}  // namespace

Money fraction(long num, long den) {
  if (den == 0) throw std::invalid_argument("zero denominator");
  Money m(num, den);
  m.canonicalize();
  return m;
}

Money parse_money(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front())))
    text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back())))
    text.remove_suffix(1);
  if (text.empty()) throw std::invalid_argument("empty amount");

  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    Money num = parse_decimal(text.substr(0, slash));
    Money den = parse_decimal(text.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("zero denominator");
    return num / den;
  }
  return parse_decimal(text);
}

std::string to_string(const Money& value) {
  if (value.get_den() == 1) return value.get_num().get_str();
  return value.get_str();
}

mpz_class floor_of(const Money& value) {
  mpz_class out;
  mpz_fdiv_q(out.get_mpz_t(), value.get_num_mpz_t(), value.get_den_mpz_t());
  return out;
}

std::string to_decimal(const Money& value, int digits) {
  const bool negative = value < 0;
  Money magnitude = abs(value);
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(digits));
  mpz_class scaled = floor_of(magnitude * scale);
  std::string s = scaled.get_str();
  if (digits > 0) {
    if (s.size() <= static_cast<std::size_t>(digits))
      s.insert(0, static_cast<std::size_t>(digits) + 1 - s.size(), '0');
    s.insert(s.size() - static_cast<std::size_t>(digits), ".");
    while (s.back() == '0') s.pop_back();
    if (s.back() == '.') s.pop_back();
  }
  if (negative && s != "0") s.insert(0, "-");
  return s;
}

}  // namespace ransomneg
