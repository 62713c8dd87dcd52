#include "regchrom/rational.hpp"

#include <cmath>

namespace regchrom {

Integer factorial(unsigned long n) {
    Integer r;
    mpz_fac_ui(r.get_mpz_t(), n);
    return r;
}

Integer double_factorial(unsigned long n) {
    Integer r;
    mpz_2fac_ui(r.get_mpz_t(), n);
    return r;
}

Integer binomial(unsigned long n, unsigned long r) {
    Integer b;
    mpz_bin_uiui(b.get_mpz_t(), n, r);
    return b;
}

std::string to_string(const Integer& z) { return z.get_str(); }

std::string to_string(const Rational& q) {
    if (q.get_den() == 1) return q.get_num().get_str();
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

long double log_of(const Integer& z) {
    long exp2 = 0;
    const double mant = mpz_get_d_2exp(&exp2, z.get_mpz_t());
    return std::log(static_cast<long double>(std::fabs(mant))) +
           static_cast<long double>(exp2) * std::log(2.0L);
}

long double log_of(const Rational& q) { return log_of(q.get_num()) - log_of(q.get_den()); }

double to_double(const Rational& q) {
    const long double l = log_of(q);
    if (std::fabs(static_cast<double>(l)) < 700.0) return q.get_d();
    return static_cast<double>(std::exp(l)) * (q < 0 ? -1.0 : 1.0);
}

}  // namespace regchrom
