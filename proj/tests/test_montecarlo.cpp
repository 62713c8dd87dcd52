#include <doctest.h>

#include <cmath>

#include "regchrom/asymptotics.hpp"
#include "regchrom/errors.hpp"
#include "regchrom/genfunc.hpp"
#include "regchrom/montecarlo.hpp"

using namespace regchrom;

TEST_CASE("cycle spec parsing") {
    const CycleSpec s = parse_cycle_spec("1:1;2:1,3:2");
    REQUIRE(s.size() == 2);
    CHECK(s[1].size() == 2);
    CHECK(s[1][1].m == 3);
    CHECK(s[1][1].p == 2);
    CHECK(format_cycle_product(s[1]) == "2:1,3:2");
    CHECK(parse_cycle_spec("").empty());
    CHECK_THROWS_AS(parse_cycle_spec("2"), InputError);
    CHECK_THROWS_AS(parse_cycle_spec("2:x"), InputError);
    CHECK_THROWS_AS(parse_cycle_spec("9:1"), GuardError);
    CHECK_THROWS_AS(parse_cycle_spec("2:0"), InputError);
}

TEST_CASE("falling factorial") {
    CHECK(falling_factorial(5, 0) == 1);
    CHECK(falling_factorial(5, 2) == 20);
    CHECK(falling_factorial(2, 3) == 0);
}

TEST_CASE("moment estimates match the exact oracle") {
    const MomentReport r = estimate_moments(6, 4, 3, 100000, parse_cycle_spec("1:1;2:1"), 11);
    REQUIRE(r.exact_ey);
    const double exact = to_double(*r.exact_ey);
    INFO("estimate " << r.ey.mean << " se " << r.ey.se << " exact " << exact);
    CHECK(std::fabs(r.ey.mean - exact) <= 3 * r.ey.se);
    REQUIRE(r.exact_ey2);
    CHECK(std::fabs(r.ey2.mean - to_double(*r.exact_ey2)) <= 3 * r.ey2.se);
    CHECK(r.joint[0].sum == 0);
    CHECK(r.joint[0].theory == 0);
    CHECK(r.joint[1].theory == doctest::Approx(to_double(cycle_correction(4, 3, 2).multiplier())));
    REQUIRE(r.theory_ey);
    CHECK(r.samples == 100000);
}

TEST_CASE("moment report is independent of the worker count") {
    const CycleSpec spec = parse_cycle_spec("2:1;3:1");
    const MomentReport a = estimate_moments(12, 3, 3, 2000, spec, 5, 1);
    const MomentReport b = estimate_moments(12, 3, 3, 2000, spec, 5, 3);
    CHECK(a.sum_y == b.sum_y);
    CHECK(a.sum_y2 == b.sum_y2);
    CHECK(a.ey.mean == b.ey.mean);
    CHECK(a.ratio.se == b.ratio.se);
    CHECK(a.joint[1].sum == b.joint[1].sum);
    CHECK(a.cycles[2].mean.mean == b.cycles[2].mean.mean);
}

TEST_CASE("moment guards") {
    CHECK_THROWS_AS(estimate_moments(26, 3, 2, 100, {}, 1), GuardError);
    CHECK_THROWS_AS(estimate_moments(7, 2, 3, 100, {}, 1), InputError);
    CHECK_THROWS_AS(estimate_moments(6, 3, 3, 99, {}, 1), InputError);
    CHECK_THROWS_AS(estimate_moments(3, 3, 3, 100, {}, 1), InfeasibleError);
}

TEST_CASE("full enumeration reproduces the exact moments") {
    for (auto [n, d, k] : {std::tuple{4, 3, 2}, std::tuple{6, 2, 3}, std::tuple{2, 2, 2}, std::tuple{6, 2, 2}}) {
        const EnumeratedMoments e = enumerate_moments(n, d, k, parse_cycle_spec("1:1;2:1"));
        CHECK(e.ey == exact_expected_Y(n, d, k));
        CHECK(e.ey2 == exact_second_moment(n, d, k));
        CHECK(e.joint[0] == 0);
        CHECK(e.pairings == double_factorial(static_cast<unsigned long>(n * d - 1)));
    }
}

TEST_CASE("joint moment against enumeration at (4, 3, 2)") {
    const MomentReport r = estimate_moments(4, 3, 2, 100000, parse_cycle_spec("1:1;2:1"), 3);
    REQUIRE(r.joint[1].exact_moment);
    const double exact = to_double(*r.joint[1].exact_moment);
    CHECK(std::fabs(r.joint[1].moment.mean - exact) <= 3 * r.joint[1].moment.se);
    CHECK(r.joint[0].sum == 0);
}

TEST_CASE("chi frequencies") {
    const ChiFrequencyTable t = chi_frequency(12, 3, 400, 2, 1);
    long total = t.rejections;
    for (const auto& [chi, c] : t.counts) total += c;
    CHECK(total == 400);
    CHECK(t.predicted == predict_chromatic(3).verdict);
    CHECK(t.accepted.size() > 0);
    for (const auto& s : t.accepted) {
        REQUIRE(s.chi <= 4);
        if (s.x3 + s.x5 > 0) REQUIRE(s.chi >= 3);
    }
    const ChiFrequencyTable u = chi_frequency(12, 3, 400, 2, 4);
    CHECK(u.counts == t.counts);
    CHECK(u.rejections == t.rejections);
    CHECK_THROWS_AS(chi_frequency(42, 3, 100, 1), GuardError);

    const ChiFrequencyTable six = chi_frequency(12, 6, 500, 1);
    CHECK(six.predicted == std::vector<long>{4});
    long sum6 = six.rejections;
    for (const auto& [chi, c] : six.counts) {
        CHECK(chi <= 7);
        sum6 += c;
    }
    CHECK(sum6 == 500);
}

TEST_CASE("convergence study") {
    const auto rows = convergence_study(4, 3, {6, 12, 18, 24});
    REQUIRE(rows.size() == 4);
    CHECK(std::fabs(rows[3].ratio - 1) < std::fabs(rows[0].ratio - 1));
    CHECK(std::fabs(rows[3].coefficient_ratio - 1) < std::fabs(rows[0].coefficient_ratio - 1));
    CHECK(std::fabs(rows[3].coefficient_ratio - 1) <= 0.2);
    const auto small = convergence_study(3, 3, {6});
    CHECK(small[0].ratio > 0);
    CHECK(std::isfinite(small[0].ratio));
    CHECK_THROWS(convergence_study(4, 3, {7}));
}
