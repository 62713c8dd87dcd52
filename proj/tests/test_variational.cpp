#include <doctest.h>

#include <cmath>
#include <numeric>

#include "regchrom/errors.hpp"
#include "regchrom/rational.hpp"
#include "regchrom/rng.hpp"
#include "regchrom/variational.hpp"

using namespace regchrom;

namespace {

Eigen::MatrixXd permutation(const std::vector<int>& p) {
    const auto k = static_cast<int>(p.size());
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(k, k);
    for (int i = 0; i < k; ++i) m(i, p[static_cast<std::size_t>(i)]) = 1;
    return m;
}

std::vector<int> shuffled(int k, Philox& rng) {
    std::vector<int> p(static_cast<std::size_t>(k));
    std::iota(p.begin(), p.end(), 0);
    for (int i = k - 1; i > 0; --i) std::swap(p[static_cast<std::size_t>(i)], p[rng.uniform_below(i + 1)]);
    return p;
}

}  // namespace

TEST_CASE("phi closed forms") {
    for (int k = 2; k <= 6; ++k)
        for (double d : {3.0, 6.0}) {
            const Eigen::MatrixXd j = Eigen::MatrixXd::Constant(k, k, 1.0 / k);
            CHECK(phi(j, d) == doctest::Approx(std::log(k) + d * std::log(1 - 1.0 / k)).epsilon(1e-14));
            CHECK(phi_center(k, d) == doctest::Approx(phi(j, d)).epsilon(1e-14));
            CHECK(phi(Eigen::MatrixXd::Identity(k, k), d) == doctest::Approx(d / 2 * std::log(1 - 1.0 / k)));
        }
    // ln 4 + 6 ln(3/4).
    CHECK(phi(Eigen::MatrixXd::Constant(4, 4, 0.25), 6) == doctest::Approx(-0.33979807359079495).epsilon(1e-14));
    Eigen::MatrixXd neg = Eigen::MatrixXd::Identity(2, 2);
    neg << 1.5, -0.5, -0.5, 1.5;
    CHECK_THROWS_AS(phi(neg, 3), DomainError);
    CHECK_THROWS_AS(phi(Eigen::MatrixXd::Constant(3, 3, 0.5), 3), InputError);
}

TEST_CASE("phi is invariant under row and column permutations") {
    Philox rng(3, 0);
    for (int t = 0; t < 200; ++t) {
        const int k = 3 + t % 4;
        const Eigen::MatrixXd m = random_doubly_stochastic(k, rng);
        const Eigen::MatrixXd p = permutation(shuffled(k, rng)), q = permutation(shuffled(k, rng));
        REQUIRE(phi(p * m * q, 5) == doctest::Approx(phi(m, 5)).epsilon(1e-13));
    }
}

TEST_CASE("Sinkhorn matrices are doubly stochastic") {
    Philox rng(1, 1);
    for (int k = 2; k <= 8; ++k) {
        const Eigen::MatrixXd m = random_doubly_stochastic(k, rng);
        CHECK(stochastic_defect(m) <= 1e-12);
        CHECK(m.minCoeff() > 0);
    }
}

TEST_CASE("Birkhoff projection") {
    Philox rng(2, 0);
    for (int t = 0; t < 50; ++t) {
        const int k = 3 + t % 3;
        Eigen::MatrixXd x(k, k);
        for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = 2 * rng.uniform01() - 0.5;
        const Eigen::MatrixXd p = project_birkhoff(x);
        REQUIRE(p.minCoeff() >= 0);
        REQUIRE(stochastic_defect(p) <= 1e-10);
        // Variational inequality: <x - p, y - p> <= 0 for points y of the polytope.
        for (int s = 0; s < 5; ++s) {
            const Eigen::MatrixXd y = random_doubly_stochastic(k, rng);
            REQUIRE(((x - p).array() * (y - p).array()).sum() <= 1e-8);
        }
    }
    const Eigen::MatrixXd inside = Eigen::MatrixXd::Constant(3, 3, 1.0 / 3);
    CHECK((project_birkhoff(inside) - inside).lpNorm<Eigen::Infinity>() <= 1e-15);
}

TEST_CASE("Achlioptas-Naor gap") {
    CHECK(an_bound_gap(Eigen::MatrixXd::Constant(4, 4, 0.25), 6) == doctest::Approx(0).epsilon(1e-14));
    CHECK(an_bound_gap(Eigen::MatrixXd::Identity(4, 4), 6) == doctest::Approx(0.47394199943049299).epsilon(1e-12));
    CHECK_THROWS_AS(an_bound_gap(Eigen::MatrixXd::Identity(4, 4), 7), DomainError);
    Philox rng(4, 0);
    for (int k = 4; k <= 6; ++k)
        for (int d = 1; d < colourability_threshold(k); ++d)
            for (int t = 0; t < 1000; ++t) REQUIRE(an_bound_gap(random_doubly_stochastic(k, rng), d) >= -1e-9);
}

TEST_CASE("maximize phi below the threshold") {
    PhiOptions o;
    o.restarts = 20;
    o.seed = 9;
    const PhiOptimum r = maximize_phi(6, 4, o);
    CHECK(r.converged);
    CHECK(r.below_threshold);
    CHECK(r.distance_to_center <= 1e-6);
    CHECK(std::fabs(r.phi - phi_center(4, 6)) <= 1e-9);
    for (const auto& t : r.trace) REQUIRE(t.phi <= phi_center(4, 6) + 1e-9);

    PhiOptions from_perm;
    from_perm.restarts = 1;
    from_perm.start = Eigen::MatrixXd::Identity(4, 4);
    const PhiOptimum p = maximize_phi(6, 4, from_perm);
    CHECK(p.distance_to_center <= 1e-6);
}

TEST_CASE("maximize phi is reproducible across worker counts") {
    PhiOptions a;
    a.restarts = 6;
    a.seed = 5;
    PhiOptions b = a;
    b.workers = 3;
    const PhiOptimum x = maximize_phi(7, 5, a), y = maximize_phi(7, 5, b);
    CHECK(x.phi == y.phi);
    CHECK(x.m == y.m);
}

TEST_CASE("maximize phi above the threshold is flagged, not asserted") {
    PhiOptions o;
    o.restarts = 10;
    const PhiOptimum r = maximize_phi(9, 4, o);
    CHECK_FALSE(r.below_threshold);
    CHECK(r.phi >= phi_center(4, 9) - 1e-9);
    // Identity-like points beat the centre once d exceeds d_3.
    CHECK(r.beats_center);
}

TEST_CASE("flow tables") {
    CHECK(flow_pairs(2).size() == 2);
    CHECK(flow_pairs(3).size() == 18);
    Philox rng(6, 0);
    for (int k = 3; k <= 5; ++k) {
        const Eigen::MatrixXd m = random_doubly_stochastic(k, rng);
        const FlowTable l = feasible_flow(m, 4);
        CHECK(flow_violation(m, 4, l).amount <= 1e-12);
        FlowTable broken = l;
        broken.values[0] += 0.1;
        const FlowViolation v = flow_violation(m, 4, broken);
        CHECK(v.amount == doctest::Approx(0.1));
        CHECK(v.constraint.find("marginal") != std::string::npos);
        CHECK_THROWS_AS(psi_bound_check(m, 4, broken), InputError);
    }
}

TEST_CASE("psi bound") {
    const Eigen::MatrixXd j = Eigen::MatrixXd::Constant(4, 4, 0.25);
    const FlowTable star = psi_maximizer(j, 6);
    CHECK(flow_violation(j, 6, star).amount <= 1e-12);
    const PsiCheck at_star = psi_bound_check(j, 6, star);
    CHECK(std::fabs(std::expm1(at_star.log_psi - at_star.log_bound)) <= 1e-9);

    Philox rng(7, 0);
    for (int k = 3; k <= 5; ++k) {
        const Eigen::MatrixXd m = random_doubly_stochastic(k, rng);
        const PsiCheck c = psi_bound_check(m, 5, feasible_flow(m, 5));
        CHECK(c.within_bound());
        // The unconstrained maximiser attains the bound in the extended objective.
        CHECK(std::fabs(std::expm1(log_psi_hat(m, c.maximizer) - c.log_bound)) <= 1e-9);
    }

    for (int t = 0; t < 300; ++t) {
        const FlowTable l = perturb_within_null_space(j, star, rng, 0.5);
        REQUIRE(flow_violation(j, 6, l).amount <= 1e-10);
        const PsiCheck c = psi_bound_check(j, 6, l);
        REQUIRE(c.within_bound());
        REQUIRE(c.log_psi < c.log_bound);
    }
}

TEST_CASE("psi with a zero entry") {
    Eigen::MatrixXd m(3, 3);
    m << 0.5, 0.5, 0, 0.5, 0, 0.5, 0, 0.5, 0.5;
    const FlowTable l = feasible_flow(m, 3);
    const PsiCheck c = psi_bound_check(m, 3, l);
    CHECK(std::isfinite(c.log_psi));
    CHECK(std::isfinite(c.log_bound));
    CHECK(c.within_bound());
}

TEST_CASE("psi maximiser equals the bound in exact arithmetic") {
    // M with entries in (1/6) Z: m m / l* is the same constant for every pair
    // and the l* sum to dk/2, so prod (m m / l*)^{l*} = (S / dk)^{dk/2}.
    const int k = 3, d = 4;
    const std::vector<std::vector<Rational>> m = {{Rational(1, 2), Rational(1, 3), Rational(1, 6)},
                                                  {Rational(1, 6), Rational(1, 2), Rational(1, 3)},
                                                  {Rational(1, 3), Rational(1, 6), Rational(1, 2)}};
    Rational s = 0;
    for (const auto& [p, q, r, t] : flow_pairs(k)) s += 2 * m[p][q] * m[r][t];
    Rational total = 0;
    for (const auto& [p, q, r, t] : flow_pairs(k)) {
        Rational l = Rational(d * k) * m[p][q] * m[r][t] / s;
        l.canonicalize();
        total += l;
        Rational ratio = m[p][q] * m[r][t] / l;
        ratio.canonicalize();
        REQUIRE(ratio == s / Rational(d * k));
    }
    Rational half(d * k, 2);
    half.canonicalize();
    CHECK(total == half);
}
