#pragma once

#include <gmpxx.h>

#include <optional>
#include <stdexcept>
#include <string>

namespace exchangelab {

// Exact rational scalar. All cylinder probabilities for the product, mixture
// and Markov families are computed in this type; conversion to double happens
// only at reporting boundaries.
using Rational = mpq_class;

// Parses "3/4", "-1/3", "2", or a decimal literal like "0.25" (converted
// exactly, 0.25 -> 1/4). Throws std::invalid_argument on malformed input or
// zero denominator.
Rational parse_rational(const std::string& text);

// Exact conversion; every finite double is a dyadic rational.
Rational rational_from_double(double x);

double to_double(const Rational& q);

// Canonical "n/d" form ("n" when d == 1).
std::string to_string(const Rational& q);

}  // namespace exchangelab
