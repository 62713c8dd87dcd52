#include "regchrom/asymptotics.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cfloat>
#include <cmath>
#include <numbers>
#include <string>

#include "regchrom/errors.hpp"

namespace regchrom {

namespace {

using Wide = boost::multiprecision::cpp_bin_float_100;

constexpr long double kPi = std::numbers::pi_v<long double>;
constexpr long double kTwoPi = 2 * kPi;

long double ln(long double x) { return std::log(x); }

void check_k(int k) {
    if (k < 3) throw DomainError("formula requires k >= 3, got k = " + std::to_string(k));
}

long double discriminant(int d, int k) {
    return static_cast<long double>(k) * k - 2.0L * k - d + 2.0L;
}

void check_convergent(int d, int k) {
    if (discriminant(d, k) <= 0)
        throw DomainError("k^2 - 2k - d + 2 must be positive (d = " + std::to_string(d) +
                          ", k = " + std::to_string(k) + ")");
}

void check_divisible(long n, int d, int k) {
    if (n < 1 || n % k != 0)
        throw InfeasibleError("k = " + std::to_string(k) + " does not divide n = " + std::to_string(n));
    if ((n * d) % 2 != 0) throw InfeasibleError("dn is odd");
}

}  // namespace

LogReal LogReal::from_log(long double l) {
    LogReal out;
    out.log = l;
    if (std::isfinite(static_cast<double>(l)) && std::fabs(l) < 700.0L) out.value = static_cast<double>(std::exp(l));
    return out;
}

int compare_with_scaled_log(long d, long a, long b) {
    if (a < 0 || b < 1) throw InputError("compare_with_scaled_log needs a >= 0 and b >= 1");
    if (a == 0 || b == 1) return d > 0 ? 1 : (d < 0 ? -1 : 0);
    const long double v = static_cast<long double>(a) * std::log(static_cast<long double>(b));
    const long double err = 64.0L * LDBL_EPSILON * std::fabs(v) + 1e-30L;
    const long double diff = static_cast<long double>(d) - v;
    if (diff > err) return 1;
    if (diff < -err) return -1;
    // ln b is irrational for b >= 2, so equality is impossible; resolve the sign.
    const Wide wide = Wide(d) - Wide(a) * boost::multiprecision::log(Wide(b));
    return wide > 0 ? 1 : -1;
}

bool below_colourability_threshold(long d, long k) {
    if (k < 2) return false;
    return compare_with_scaled_log(d, 2 * (k - 1), k - 1) < 0;
}

ChromaticPrediction predict_chromatic(long d) {
    if (d < 3) throw DomainError("prediction covers d >= 3, got d = " + std::to_string(d));
    ChromaticPrediction out;
    out.d = d;
    long k = 3;
    while (!below_colourability_threshold(d, k)) ++k;
    out.k = k;
    out.second_condition = compare_with_scaled_log(d, 2 * k - 3, k - 1) > 0;
    if (out.second_condition) out.verdict = {k};
    else out.verdict = {k - 1, k};
    return out;
}

MolloyReedCheck molloy_reed_excludes(long d, long q) {
    if (q < 1) throw InputError("q must be >= 1");
    if (d < 0) throw InputError("d must be >= 0");
    MolloyReedCheck out;
    out.weak_criterion = compare_with_scaled_log(d, 2 * q - 1, q) > 0;
    if (q == 1) {
        out.excludes = d > 0;  // 1 * 0^{d/2}
        return out;
    }
    const long double lq = std::log(static_cast<long double>(q));
    const long double lhs = lq + 0.5L * d * std::log1p(-1.0L / q);
    const long double err = 64.0L * LDBL_EPSILON * (lq + 0.5L * d * std::fabs(std::log1p(-1.0L / q))) + 1e-30L;
    if (lhs < -err) {
        out.excludes = true;
    } else if (lhs > err) {
        out.excludes = false;
    } else {
        // Square both sides: q^2 (q-1)^d < q^d.
        Integer left, right, qm1;
        mpz_ui_pow_ui(qm1.get_mpz_t(), static_cast<unsigned long>(q - 1), static_cast<unsigned long>(d));
        left = qm1 * q * q;
        mpz_ui_pow_ui(right.get_mpz_t(), static_cast<unsigned long>(q), static_cast<unsigned long>(d));
        out.excludes = left < right;
    }
    return out;
}

CycleCorrection cycle_correction(int d, int k, int m) {
    if (d < 1 || k < 2 || m < 1) throw InputError("cycle_correction needs d >= 1, k >= 2, m >= 1");
    CycleCorrection out;
    out.m = m;
    Integer num, den;
    mpz_ui_pow_ui(num.get_mpz_t(), static_cast<unsigned long>(d - 1), static_cast<unsigned long>(m));
    out.lambda = Rational(num, Integer(2 * m));
    out.lambda.canonicalize();
    mpz_ui_pow_ui(den.get_mpz_t(), static_cast<unsigned long>(k - 1), static_cast<unsigned long>(m - 1));
    out.delta = Rational(m % 2 == 0 ? Integer(1) : Integer(-1), den);
    out.delta.canonicalize();
    return out;
}

long double sum_lambda_delta_sq(int d, int k) {
    check_convergent(d, k);
    const long double km1 = k - 1;
    return km1 * km1 * (ln(km1) - 0.5L * ln(discriminant(d, k)));
}

long double sum_lambda_delta_sq_series(int d, int k, int terms) {
    check_convergent(d, k);
    const long double km1 = k - 1;
    long double sum = 0;
    long double lambda_num = 1;  // (d-1)^m
    long double delta_den = 1;   // (k-1)^{m-1}
    for (int m = 1; m <= terms; ++m) {
        lambda_num *= (d - 1);
        if (m > 1) delta_den *= km1;
        const long double lambda = lambda_num / (2.0L * m);
        sum += lambda / (delta_den * delta_den);
    }
    return sum;
}

long double second_moment_ratio(int d, int k) {
    check_convergent(d, k);
    const long double km1 = k - 1;
    return std::pow(km1 / std::sqrt(discriminant(d, k)), km1 * km1);
}

LogReal ey_asym(long n, int d, int k) {
    check_k(k);
    check_divisible(n, d, k);
    const long double K = k, N = static_cast<long double>(n), D = d;
    const long double l = 0.5L * K * ln(K) + 0.5L * (K - 1) * ln((K - 1) / (kTwoPi * (K - 2))) -
                          0.5L * (K - 1) * ln(N) + N * ln(K) + 0.5L * D * N * std::log1p(-1.0L / K);
    return LogReal::from_log(l);
}

LogReal ey2_asym(long n, int d, int k) {
    check_k(k);
    if (!below_colourability_threshold(d, k))
        throw DomainError("second moment asymptotics need d < 2(k-1) ln(k-1) (d = " + std::to_string(d) +
                          ", k = " + std::to_string(k) + ")");
    check_divisible(n, d, k);
    const long double K = k, N = static_cast<long double>(n), D = d;
    const long double l = K * ln(K) + K * (K - 1) * ln(K - 1) - 0.5L * (K - 1) * (K - 1) * ln(discriminant(d, k)) -
                          (K - 1) * ln(kTwoPi * (K - 2)) - (K - 1) * ln(N) + 2 * N * ln(K) +
                          D * N * std::log1p(-1.0L / K);
    return LogReal::from_log(l);
}

LogReal coeff_asym(long n, int d, int k, int s) {
    check_k(k);
    if (s % 2 != 0) throw DomainError("coefficient asymptotics need an even offset s, got " + std::to_string(s));
    if ((n * d) % 2 != 0) throw InfeasibleError("dn is odd");
    const long double K = k, DN = static_cast<long double>(d) * static_cast<long double>(n);
    const long double base = ln(K * (K - 1) / DN);
    const long double l = -K * ln(kTwoPi) + 0.5L * (DN + s) * base + ln(2.0L) + 0.5L * DN + 0.5L * K * ln(kTwoPi) +
                          0.5L * K * base - 0.5L * ln(2 * K - 2) - 0.5L * (K - 1) * ln(K - 2);
    return LogReal::from_log(l);
}

LogReal gamma_const(int k) {
    check_k(k);
    const long double K = k;
    const long double l = K * K * ln(K) + K * (K - 1) * ln(K - 1) - 0.5L * (K * K - 1) * ln(kTwoPi) -
                          0.5L * (K - 1) * (K - 1) * ln(K * K - 2 * K + 2) - (K - 1) * ln(K - 2);
    return LogReal::from_log(l);
}

LogReal det_H(int d, int k) {
    check_k(k);
    check_convergent(d, k);
    const long double K = k;
    const long double l = (2 * K - 2) * ln(K) + (K - 1) * (K - 1) * ln(discriminant(d, k) / (K * K - 2 * K + 2));
    return LogReal::from_log(l);
}

LogReal s1_reassembled(long n, int d, int k) {
    check_k(k);
    check_divisible(n, d, k);
    const long double K = k, N = static_cast<long double>(n), D = d;
    const long double free_dims = (K - 1) * (K - 1);
    const long double l = gamma_const(k).log + D * N * ln(K - 1) - (0.5L * K * K - 0.5L) * ln(N) -
                          (D - 2) * N * ln(K) + free_dims * ln(N / K) + 0.5L * free_dims * ln(kTwoPi / N) -
                          0.5L * det_H(d, k).log;
    return LogReal::from_log(l);
}

}  // namespace regchrom
