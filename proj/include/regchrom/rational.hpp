#pragma once

#include <gmpxx.h>

#include <string>

namespace regchrom {

// Arbitrary precision values for every exact computation. mpq_class keeps
// its value canonical (reduced, positive denominator) after each operation.
using Integer = mpz_class;
using Rational = mpq_class;

Integer factorial(unsigned long n);
Integer double_factorial(unsigned long n);
Integer binomial(unsigned long n, unsigned long r);

/// "p/q", or just "p" when the denominator is 1.
std::string to_string(const Rational& q);
std::string to_string(const Integer& z);

/// Natural log of a positive value without converting through double
/// (so it works for numbers far beyond the double range).
long double log_of(const Integer& z);
long double log_of(const Rational& q);

double to_double(const Rational& q);

}  // namespace regchrom
