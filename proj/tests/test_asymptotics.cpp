#include <doctest.h>

#include <cmath>

#include "regchrom/asymptotics.hpp"
#include "regchrom/errors.hpp"

using namespace regchrom;

namespace {

double rel(double a, double b) { return std::fabs(a - b) / std::fabs(b); }

}  // namespace

TEST_CASE("predictor reproduces the headline values") {
    CHECK(predict_chromatic(10).verdict == std::vector<long>{5});
    CHECK(predict_chromatic(1000000).verdict == std::vector<long>{46523});
    CHECK(predict_chromatic(6).verdict == std::vector<long>{4});
    CHECK(predict_chromatic(4).verdict == std::vector<long>{3, 4});
    CHECK(predict_chromatic(3).k == 4);
    CHECK_THROWS_AS(predict_chromatic(2), DomainError);
}

TEST_CASE("predictor matches a long double scan and is monotone") {
    long previous = 0;
    for (long d = 3; d <= 5000; ++d) {
        const ChromaticPrediction p = predict_chromatic(d);
        long k = 3;
        while (!(d < 2.0L * (k - 1) * std::log(static_cast<long double>(k - 1)))) ++k;
        REQUIRE(p.k == k);
        REQUIRE(p.k >= 4);
        REQUIRE(p.k >= previous);
        const bool second = d > (2.0L * k - 3) * std::log(static_cast<long double>(k - 1));
        REQUIRE(p.second_condition == second);
        REQUIRE(p.verdict.size() == (second ? 1u : 2u));
        REQUIRE(p.verdict.back() == k);
        previous = p.k;
    }
}

TEST_CASE("certified comparison") {
    CHECK(compare_with_scaled_log(6, 6, 3) < 0);   // 6 < 6 ln 3
    CHECK(compare_with_scaled_log(7, 6, 3) > 0);
    CHECK(compare_with_scaled_log(0, 5, 1) == 0);  // 5 ln 1 = 0
    CHECK(below_colourability_threshold(6, 4));
    CHECK_FALSE(below_colourability_threshold(7, 4));
}

TEST_CASE("Molloy-Reed exclusion") {
    CHECK(molloy_reed_excludes(6, 3).excludes);
    CHECK_FALSE(molloy_reed_excludes(4, 3).excludes);
    CHECK(molloy_reed_excludes(4, 1).excludes);
    CHECK(molloy_reed_excludes(6, 3).weak_criterion == (6 > 5 * std::log(3.0)));
    // Equality q (1-1/q)^{d/2} = 1 at q = 2, d = 2 must not exclude.
    CHECK_FALSE(molloy_reed_excludes(2, 2).excludes);
}

TEST_CASE("cycle corrections") {
    for (int d = 3; d <= 8; ++d)
        for (int k = 3; k <= 8; ++k) {
            const CycleCorrection c = cycle_correction(d, k, 1);
            REQUIRE(c.multiplier() == 0);
            for (int m = 1; m <= 6; ++m) {
                const CycleCorrection x = cycle_correction(d, k, m);
                REQUIRE(x.lambda > 0);
                REQUIRE(1 + x.delta >= 0);
                REQUIRE(abs(x.delta) <= 1);
            }
        }
    const CycleCorrection a = cycle_correction(6, 4, 2);
    CHECK(a.lambda == Rational(25, 4));
    CHECK(a.delta == Rational(1, 3));
    const CycleCorrection b = cycle_correction(3, 3, 2);
    CHECK(b.lambda == 1);
    CHECK(b.delta == Rational(1, 2));
    CHECK(b.multiplier() == Rational(3, 2));
}

TEST_CASE("sum of lambda delta squared") {
    CHECK(static_cast<double>(sum_lambda_delta_sq(6, 4)) == doctest::Approx(3.64918597297347943).epsilon(1e-14));
    CHECK(static_cast<double>(sum_lambda_delta_sq(9, 4)) == doctest::Approx(9 * std::log(3.0)).epsilon(1e-14));
    CHECK_THROWS_AS(sum_lambda_delta_sq(10, 4), DomainError);
    for (auto [d, k] : {std::pair{3, 4}, std::pair{6, 4}, std::pair{9, 4}, std::pair{10, 5}, std::pair{20, 7}})
        CHECK(std::fabs(static_cast<double>(sum_lambda_delta_sq(d, k) - sum_lambda_delta_sq_series(d, k))) < 1e-8);
}

TEST_CASE("second moment ratio") {
    CHECK(static_cast<double>(second_moment_ratio(6, 4)) == doctest::Approx(38.443359375).epsilon(1e-15));
    // (3/sqrt 7)^9.
    CHECK(static_cast<double>(second_moment_ratio(3, 4)) == doctest::Approx(3.09849009672662204).epsilon(1e-14));
    CHECK_THROWS_AS(second_moment_ratio(10, 4), DomainError);
    for (int k = 4; k <= 50; ++k)
        for (int d = 3; below_colourability_threshold(d, k); ++d) {
            const long double r = second_moment_ratio(d, k);
            REQUIRE(std::fabs(static_cast<double>((r - std::exp(sum_lambda_delta_sq(d, k))) / r)) <= 1e-10);
        }
}

TEST_CASE("E[Y] asymptotics") {
    const LogReal e = ey_asym(12, 4, 3);
    REQUIRE(e.value);
    CHECK(*e.value == doctest::Approx(4.3512656934320164).epsilon(1e-12));
    const LogReal small = ey_asym(6, 3, 3);
    CHECK(std::isfinite(static_cast<double>(small.log)));
    CHECK(*small.value > 0);
    // Consecutive ratio k^k (1-1/k)^{dk/2} (n/(n+k))^{(k-1)/2}.
    const int d = 5, k = 4;
    const long n = 40;
    const long double expected = k * std::log(4.0L) + 0.5L * d * k * std::log(0.75L) +
                                 0.5L * (k - 1) * std::log(static_cast<long double>(n) / (n + k));
    CHECK(static_cast<double>(ey_asym(n + k, d, k).log - ey_asym(n, d, k).log) ==
          doctest::Approx(static_cast<double>(expected)).epsilon(1e-12));
    CHECK_FALSE(ey_asym(100000, 5, 4).value.has_value());
    CHECK_THROWS(ey_asym(7, 4, 3));
}

TEST_CASE("E[Y^2] asymptotics") {
    CHECK_THROWS_AS(ey2_asym(12, 12, 4), DomainError);
    const LogReal e = ey2_asym(12, 6, 4);
    REQUIRE(e.value);
    CHECK(*e.value > 0);
    const long n = 1000000;
    const double ratio = std::exp(static_cast<double>(ey2_asym(n, 6, 4).log - 2 * ey_asym(n, 6, 4).log));
    CHECK(rel(ratio, 38.443359375) <= 1e-6);
}

TEST_CASE("coefficient asymptotics") {
    CHECK_THROWS_AS(coeff_asym(12, 4, 3, 1), DomainError);
    const long double l0 = coeff_asym(12, 4, 3, 0).log;
    const long double l2 = coeff_asym(12, 4, 3, 2).log;
    CHECK(static_cast<double>(l2 - l0) == doctest::Approx(std::log(6.0 / 48.0)).epsilon(1e-12));
}

TEST_CASE("gamma, det H and the S1 reassembly") {
    for (int k = 3; k <= 50; ++k) {
        const LogReal g = gamma_const(k);
        REQUIRE(std::isfinite(static_cast<double>(g.log)));
        if (g.value) REQUIRE(*g.value > 0);
    }
    CHECK(*det_H(6, 4).value == doctest::Approx(4096 * std::pow(0.4, 9)).epsilon(1e-13));
    CHECK_THROWS_AS(det_H(10, 4), DomainError);
    const double a = static_cast<double>(s1_reassembled(1000, 6, 4).log);
    const double b = static_cast<double>(ey2_asym(1000, 6, 4).log);
    CHECK(std::fabs(std::expm1(a - b)) <= 1e-10);
}
