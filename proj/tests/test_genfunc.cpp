#include <doctest.h>

#include <algorithm>
#include <map>

#include "oracles.hpp"
#include "regchrom/coloring.hpp"
#include "regchrom/errors.hpp"
#include "regchrom/genfunc.hpp"
#include "regchrom/pairing.hpp"
#include "regchrom/rational.hpp"

using namespace regchrom;

namespace {

Rational ratio(const Integer& a, const Integer& b) {
    Rational q(a, b);
    q.canonicalize();
    return q;
}

// All balanced proper colourings of g by brute force.
std::vector<std::vector<int>> balanced_list(const Multigraph& g, int k) {
    std::vector<std::vector<int>> out;
    oracle::for_each_proper(g, k, [&](const std::vector<int>& c) {
        std::vector<int> sizes(static_cast<std::size_t>(k), 0);
        for (int x : c) ++sizes[static_cast<std::size_t>(x)];
        for (int s : sizes)
            if (s != g.n() / k) return;
        out.push_back(c);
    });
    return out;
}

// Triples (pairing, C1, C2) grouped by the colour count cells, row-major.
std::map<std::vector<int>, Integer> triple_counts(int n, int d, int k) {
    std::map<std::vector<int>, Integer> out;
    for_each_pairing(n, d, [&](const Pairing& p) {
        const auto cols = balanced_list(to_multigraph(p), k);
        for (const auto& a : cols)
            for (const auto& b : cols) {
                std::vector<int> cells(static_cast<std::size_t>(k * k), 0);
                for (int v = 0; v < n; ++v) ++cells[static_cast<std::size_t>(a[v] * k + b[v])];
                out[cells] += 1;
            }
    });
    return out;
}

}  // namespace

TEST_CASE("coeff_single examples") {
    CHECK(coeff_single(3, std::vector<int>{2, 2, 2}) == 1);
    CHECK(coeff_single(3, std::vector<int>{1, 1, 1}) == 0);
    CHECK(coeff_single(3, std::vector<int>{2, 2, 0}) == Rational(1, 2));
    CHECK(coeff_single(2, std::vector<int>{3, 3}) == Rational(1, 6));
    CHECK(coeff_single(3, std::vector<int>{0, 0, 0}) == 1);
    CHECK_THROWS_AS(coeff_single(3, std::vector<int>{101, 101, 100}), GuardError);
}

TEST_CASE("coeff_single is symmetric and vanishes on infeasible marginals") {
    std::vector<int> c = {1, 2, 3, 4};
    const Rational base = coeff_single(4, c);
    CHECK(base > 0);
    std::sort(c.begin(), c.end());
    do {
        REQUIRE(coeff_single(4, c) == base);
    } while (std::next_permutation(c.begin(), c.end()));
    CHECK(coeff_single(3, std::vector<int>{5, 1, 1}) == 0);
    CHECK(coeff_single(4, std::vector<int>{1, 2, 2, 2}) == 0);
}

TEST_CASE("coeff_single agrees with direct enumeration of b tables") {
    // k = 3: b12 + b13 = c1, b12 + b23 = c2, b13 + b23 = c3 has a unique solution.
    for (int a = 0; a <= 6; ++a)
        for (int b = 0; b <= 6; ++b)
            for (int c = 0; c <= 6; ++c) {
                Rational expected = 0;
                if ((a + b + c) % 2 == 0) {
                    const int b12 = (a + b - c) / 2, b13 = (a + c - b) / 2, b23 = (b + c - a) / 2;
                    if (b12 >= 0 && b13 >= 0 && b23 >= 0)
                        expected = Rational(1) / Rational(factorial(b12) * factorial(b13) * factorial(b23));
                }
                REQUIRE(coeff_single(3, std::vector<int>{a, b, c}) == expected);
            }
}

TEST_CASE("coeff_pair examples") {
    std::vector<int> c(9, 0);
    CHECK(coeff_pair(3, c) == 1);
    c[0] = 1;
    CHECK(coeff_pair(3, c) == 0);
    c[4] = 1;
    CHECK(coeff_pair(3, c) == 1);
    std::vector<int> same(9, 0);
    same[0] = 1;
    same[1] = 1;  // labels (0,0) and (0,1) share a first colour: no edge
    CHECK(coeff_pair(3, same) == 0);
    std::vector<int> big(9, 14);
    CHECK_THROWS_AS(coeff_pair(3, big), GuardError);
}

TEST_CASE("exact_expected_Y examples") {
    CHECK(exact_expected_Y(4, 3, 2) == Rational(32, 77));
    // The three pairings of n = d = 2 give Y = 2, 2, 0.
    CHECK(exact_expected_Y(2, 2, 2) == Rational(4, 3));
    CHECK_THROWS_AS(exact_expected_Y(3, 3, 3), InfeasibleError);
    CHECK_THROWS(exact_expected_Y(4, 3, 3));
}

TEST_CASE("exact moments equal enumeration means for dn <= 12") {
    for (int d = 1; d <= 12; ++d)
        for (int n = 1; n * d <= 12; ++n) {
            if ((n * d) % 2) continue;
            for (int k = 2; k <= n; ++k) {
                if (n % k) continue;
                Integer sy, sy2, count;
                for_each_pairing(n, d, [&](const Pairing& p) {
                    const Integer y = count_balanced_colourings(to_multigraph(p), k);
                    sy += y;
                    sy2 += y * y;
                    ++count;
                });
                INFO("n=" << n << " d=" << d << " k=" << k);
                REQUIRE(exact_expected_Y(n, d, k) == ratio(sy, count));
                REQUIRE(exact_second_moment(n, d, k) == ratio(sy2, count));
            }
        }
}

TEST_CASE("exact second moment small values") {
    CHECK(exact_second_moment(2, 2, 2) == Rational(8, 3));
    CHECK_THROWS(exact_second_moment(4, 3, 3));
}

TEST_CASE("exact_T counts triples") {
    const auto t22 = triple_counts(2, 2, 2);
    const auto id = ColourCountMatrix::identity(2);
    CHECK(exact_T(id, 2, 2) == 4);
    CHECK(t22.at({1, 0, 0, 1}) == 4);

    const auto t = triple_counts(4, 3, 2);
    for (const auto& [cells, count] : t) {
        const auto m = ColourCountMatrix::from_counts(2, 4, cells);
        REQUIRE(exact_T(m, 4, 3) == Rational(count));
    }
    CHECK(exact_T(ColourCountMatrix::uniform(2), 4, 3) == Rational(t.at({1, 1, 1, 1})));
    CHECK_THROWS_AS(ColourCountMatrix(2, {Rational(3, 2), Rational(-1, 2), Rational(-1, 2), Rational(3, 2)}),
                    DomainError);
}

TEST_CASE("permutation colour counts bound the second moment from below") {
    for (auto [n, d, k] : {std::tuple{6, 2, 3}, std::tuple{6, 4, 3}, std::tuple{4, 3, 2}}) {
        const Rational total = exact_second_moment(n, d, k);
        Rational partial = 0;
        std::vector<int> perm(static_cast<std::size_t>(k));
        for (int i = 0; i < k; ++i) perm[static_cast<std::size_t>(i)] = i;
        do {
            std::vector<Rational> e(static_cast<std::size_t>(k * k), 0);
            for (int i = 0; i < k; ++i) e[static_cast<std::size_t>(i * k + perm[static_cast<std::size_t>(i)])] = 1;
            partial += exact_T(ColourCountMatrix(k, e), n, d) /
                       Rational(double_factorial(static_cast<unsigned long>(n * d - 1)));
            REQUIRE(partial <= total);
        } while (std::next_permutation(perm.begin(), perm.end()));
        CHECK(partial > 0);
    }
}

TEST_CASE("count_colour_types") {
    CHECK(count_colour_types(3, 1) == 0);
    CHECK(count_colour_types(3, 2) == 6);
    CHECK(count_colour_types(4, 3) == 24);
    for (int k = 2; k <= 6; ++k)
        for (int m = 2; m <= 8; ++m) {
            Integer km;
            mpz_ui_pow_ui(km.get_mpz_t(), static_cast<unsigned long>(k - 1), static_cast<unsigned long>(m - 1));
            REQUIRE(count_colour_types(k, m) + count_colour_types(k, m - 1) == k * km);
        }
    // Brute force: proper colour sequences around an oriented m-cycle.
    for (int k = 2; k <= 4; ++k)
        for (int m = 2; m <= 6; ++m)
            REQUIRE(count_colour_types(k, m) == oracle::proper_colourings(oracle::cycle(m), k));
}
