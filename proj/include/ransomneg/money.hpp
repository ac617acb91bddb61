#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace ransomneg {

// Exact rational amount. All analytical computations stay in Q so that
// equality checks between independent routes need no tolerance.
using Money = mpq_class;

// num / den in lowest terms. The two-argument mpq_class constructor does not
// reduce, and equality on unreduced values is wrong.
Money fraction(long num, long den);

// Parses "12", "-3.25", "7/4" or "1.5e3" exactly. Throws std::invalid_argument.
Money parse_money(std::string_view text);

// Canonical "p/q" (or "p" when integral) representation.
std::string to_string(const Money& value);

// Fixed-point decimal rendering, rounded toward zero, for tables.
std::string to_decimal(const Money& value, int digits = 6);

// Largest integer not exceeding value.
mpz_class floor_of(const Money& value);

}  // namespace ransomneg
