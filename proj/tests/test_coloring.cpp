#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "oracles.hpp"
#include "regchrom/coloring.hpp"
#include "regchrom/errors.hpp"
#include "regchrom/pairing.hpp"
#include "regchrom/rng.hpp"

using namespace regchrom;

TEST_CASE("balanced colouring counts on named graphs") {
    CHECK(count_balanced_colourings(oracle::complete(4), 4) == 24);
    CHECK(count_balanced_colourings(oracle::cycle(6), 3) == 24);
    CHECK(count_balanced_colourings(oracle::cycle(6), 2) == 2);
    CHECK(oracle::proper_colourings(oracle::cycle(6), 3) == 66);
    const Multigraph looped(3, {{0, 0}, {1, 2}});
    CHECK(count_balanced_colourings(looped, 3) == 0);
    CHECK_FALSE(exists_balanced_colouring(looped, 3));
    CHECK(exists_balanced_colouring(oracle::complete(4), 4));
    CHECK(exists_balanced_colouring(oracle::cycle(6), 2));
    CHECK(exists_balanced_colouring(oracle::cycle(5), 5));
}

TEST_CASE("balanced colouring guards") {
    CHECK_THROWS_AS(count_balanced_colourings(oracle::cycle(7), 3), InfeasibleError);
    CHECK_THROWS_AS(count_balanced_colourings(oracle::cycle(26), 2), GuardError);
    CHECK_NOTHROW(exists_balanced_colouring(oracle::cycle(26), 2));
    CHECK_THROWS_AS(exists_balanced_colouring(oracle::cycle(42), 2), GuardError);
}

TEST_CASE("chromatic numbers of named graphs") {
    CHECK(chromatic_number(oracle::complete(4)) == 4);
    CHECK(chromatic_number(oracle::cycle(5)) == 3);
    CHECK(chromatic_number(oracle::cycle(6)) == 2);
    CHECK(chromatic_number(oracle::petersen()) == 3);
    CHECK(chromatic_number(Multigraph(3, {})) == 1);
    CHECK(chromatic_number(Multigraph(2, {{0, 1}, {0, 1}})) == 2);
    CHECK_THROWS_AS(chromatic_number(Multigraph(1, {{0, 0}})), DomainError);
    CHECK(is_colourable(oracle::petersen(), 3));
    CHECK_FALSE(is_colourable(oracle::petersen(), 2));
}

TEST_CASE("counter and chromatic number agree with brute force on random multigraphs") {
    for (std::uint64_t s = 0; s < 300; ++s) {
        const int n = (s % 2) ? 6 : 8;
        const int d = (s % 3 == 0) ? 4 : 3;
        const Multigraph g = to_multigraph(sample_pairing(n, d, 17, s));
        for (int k : {2, 3, 4}) {
            if (n % k) continue;
            const auto brute = oracle::balanced_colourings(g, k);
            REQUIRE(count_balanced_colourings(g, k) == brute);
            REQUIRE(exists_balanced_colouring(g, k) == (brute > 0));
            REQUIRE(brute <= oracle::proper_colourings(g, k));
        }
        if (!g.has_loop()) REQUIRE(chromatic_number(g) == oracle::chromatic(g));
    }
}

TEST_CASE("Y is invariant under relabelling") {
    Philox rng(5, 0);
    for (std::uint64_t s = 0; s < 50; ++s) {
        const Multigraph g = to_multigraph(sample_pairing(12, 3, 23, s));
        std::vector<int> perm(12);
        std::iota(perm.begin(), perm.end(), 0);
        for (int i = 11; i > 0; --i) std::swap(perm[static_cast<std::size_t>(i)], perm[rng.uniform_below(i + 1)]);
        const Multigraph h = g.relabelled(perm);
        for (int k : {2, 3, 4}) REQUIRE(count_balanced_colourings(g, k) == count_balanced_colourings(h, k));
        if (!g.has_loop()) REQUIRE(chromatic_number(g) == chromatic_number(h));
    }
}

TEST_CASE("Y vanishes whenever there is a loop") {
    for (std::uint64_t s = 0; s < 500; ++s) {
        const Multigraph g = to_multigraph(sample_pairing(6, 4, 31, s));
        if (count_cycles(g, 1)[1] > 0) REQUIRE(count_balanced_colourings(g, 3) == 0);
    }
}
