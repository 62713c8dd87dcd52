#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "regchrom/asymptotics.hpp"
#include "regchrom/rational.hpp"

namespace regchrom {

/// One factor [X_m]_p of a joint factorial moment.
struct CycleTerm {
    int m = 0;
    int p = 0;
};
/// A product of factors; a spec lists several products.
using CycleProduct = std::vector<CycleTerm>;
using CycleSpec = std::vector<CycleProduct>;

/// "m:p,m:p;m:p" -> products separated by ';', factors by ','.
CycleSpec parse_cycle_spec(const std::string& text);
std::string format_cycle_product(const CycleProduct& product);

/// [x]_p = x (x-1) ... (x-p+1).
Integer falling_factorial(std::uint64_t x, int p);

struct Estimate {
    double mean = 0;
    double se = 0;  // sample stdev / sqrt(N), delta method for ratios
};

struct JointMomentRow {
    CycleProduct product;
    Integer sum;                   // exact sum over samples of Y prod [X_m]_p
    Estimate moment;               // E[Y prod [X_m]_p]
    Estimate ratio;                // E[Y prod [X_m]_p] / E[Y]
    double theory = 0;             // prod (lambda_m (1 + delta_m))^p
    std::optional<Rational> exact_moment;  // full enumeration, when small enough
    std::optional<Rational> exact_ratio;
};

struct CycleMeanRow {
    int m = 0;
    Estimate mean;
    double lambda = 0;
};

struct MomentReport {
    int n = 0, d = 0, k = 0;
    long samples = 0;
    std::uint64_t seed = 0;
    Integer sum_y, sum_y2;
    Estimate ey;
    Estimate ey2;
    Estimate ratio;  // E[Y^2] / E[Y]^2
    std::optional<Rational> exact_ey, exact_ey2;
    std::optional<LogReal> theory_ey, theory_ey2;
    std::optional<double> theory_ratio;
    std::vector<JointMomentRow> joint;
    std::vector<CycleMeanRow> cycles;
};

inline constexpr int kMaxMomentVertices = 24;
inline constexpr int kMaxJointEnumerationPoints = 12;

/// N independent pairings; sample i is drawn from Philox(seed, i), so the
/// report does not depend on the worker count. Cycle means are reported for
/// m = 1..max(3, largest m in the spec).
MomentReport estimate_moments(int n, int d, int k, long samples, const CycleSpec& spec, std::uint64_t seed,
                              int workers = 1);

/// Exact means over every pairing (dn <= 16).
struct EnumeratedMoments {
    Integer pairings;
    Rational ey, ey2;
    std::vector<Rational> joint;  // E[Y prod [X_m]_p], aligned with the spec
};
EnumeratedMoments enumerate_moments(int n, int d, int k, const CycleSpec& spec = {});

struct ChiSample {
    long index = 0;  // sample index, i.e. the RNG stream
    int chi = 0;
    std::uint64_t x3 = 0, x5 = 0;
};

struct ChiFrequencyTable {
    int n = 0, d = 0;
    long samples = 0;
    std::uint64_t seed = 0;
    std::map<int, long> counts;
    long rejections = 0;
    std::vector<long> predicted;  // empty for d < 3
    std::vector<ChiSample> accepted;
};

inline constexpr int kMaxChiVertices = 40;

/// Draws N pairings, discards non-simple ones, records chi of the rest.
ChiFrequencyTable chi_frequency(int n, int d, long samples, std::uint64_t seed, int workers = 1);

struct ConvergenceRow {
    int n = 0;
    Rational exact_ey;
    LogReal asymptotic_ey;
    double ratio = 0;        // exact / asymptotic
    Rational coefficient;    // coeff_single at exponents dn/k
    LogReal coefficient_asymptotic;  // C(0)
    double coefficient_ratio = 0;
};

std::vector<ConvergenceRow> convergence_study(int d, int k, const std::vector<int>& ns);

}  // namespace regchrom
