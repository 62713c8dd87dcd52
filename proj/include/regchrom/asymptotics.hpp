#pragma once

#include <optional>
#include <vector>

#include "regchrom/rational.hpp"

namespace regchrom {

/// A positive quantity carried in log space. `value` is filled in only when
/// |log| < 700, i.e. when it is representable as a double.
struct LogReal {
    long double log = 0;
    std::optional<double> value;

    static LogReal from_log(long double l);
};

struct ChromaticPrediction {
    long d = 0;
    long k = 0;                 // smallest k with d < 2(k-1) ln(k-1)
    bool second_condition = false;  // d > (2k-3) ln(k-1)
    std::vector<long> verdict;  // {k} or {k-1, k}
};

/// Throws DomainError for d < 3.
ChromaticPrediction predict_chromatic(long d);

/// Sign of d - a * ln(b) for integers a >= 0, b >= 1, certified: evaluated in
/// extended precision with an error bound and re-evaluated at 100 digits
/// whenever d falls inside the uncertainty interval.
int compare_with_scaled_log(long d, long a, long b);

struct MolloyReedCheck {
    bool excludes = false;         // q (1 - 1/q)^{d/2} < 1, so chi > q a.a.s.
    bool weak_criterion = false;   // d > (2q - 1) ln q
};

MolloyReedCheck molloy_reed_excludes(long d, long q);

struct CycleCorrection {
    int m = 0;
    Rational lambda;  // (d-1)^m / (2m)
    Rational delta;   // (-1)^m / (k-1)^{m-1}

    /// lambda (1 + delta), the factor each m-cycle contributes to E[Y [X_m]_p] / E[Y].
    Rational multiplier() const { return lambda * (1 + delta); }
};

CycleCorrection cycle_correction(int d, int k, int m);

/// d < 2(k-1) ln(k-1), certified.
bool below_colourability_threshold(long d, long k);

/// Closed form (k-1)^2 ln((k-1)/sqrt(k^2-2k-d+2)). DomainError unless k^2-2k-d+2 > 0.
long double sum_lambda_delta_sq(int d, int k);
/// Partial sum of lambda_m delta_m^2 over m = 1..terms.
long double sum_lambda_delta_sq_series(int d, int k, int terms = 200);

/// ((k-1)/sqrt(k^2-2k-d+2))^{(k-1)^2}, the limiting E[Y^2]/E[Y]^2.
long double second_moment_ratio(int d, int k);

/// Asymptotic E[Y] (k >= 3, k | n, dn even).
LogReal ey_asym(long n, int d, int k);
/// Asymptotic E[Y^2]; DomainError unless d < 2(k-1) ln(k-1).
LogReal ey2_asym(long n, int d, int k);
/// Saddle-point estimate C(s) of the single-colouring coefficient with total
/// offset s (s even, dn even, k >= 3).
LogReal coeff_asym(long n, int d, int k, int s);

LogReal gamma_const(int k);
/// k^{2k-2} ((k^2-2k-d+2)/(k^2-2k+2))^{(k-1)^2}.
LogReal det_H(int d, int k);
/// The near-centre contribution S_1 to E[Y^2] reassembled from gamma(k),
/// det_H and the Gaussian integral over the (k-1)^2 free entries.
LogReal s1_reassembled(long n, int d, int k);

}  // namespace regchrom
