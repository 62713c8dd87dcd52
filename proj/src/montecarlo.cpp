#include "regchrom/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <thread>

#include "regchrom/coloring.hpp"
#include "regchrom/errors.hpp"
#include "regchrom/genfunc.hpp"
#include "regchrom/pairing.hpp"

namespace regchrom {

namespace {

int parse_int(const std::string& s, const std::string& what) {
    std::size_t used = 0;
    int value = 0;
    try {
        value = std::stoi(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != s.size()) throw InputError("cycle spec: bad " + what + " '" + s + "'");
    return value;
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, sep)) out.push_back(item);
    if (!text.empty() && text.back() == sep) out.emplace_back();
    return out;
}

int max_cycle_length(const CycleSpec& spec) {
    int m = 0;
    for (const auto& product : spec)
        for (const auto& t : product) m = std::max(m, t.m);
    return m;
}

void validate_spec(const CycleSpec& spec) {
    for (const auto& product : spec) {
        if (product.empty()) throw InputError("cycle spec: empty product");
        for (const auto& t : product) {
            if (t.m < 1 || t.m > kMaxCycleLength)
                throw GuardError("cycle length " + std::to_string(t.m) + " outside 1.." +
                                 std::to_string(kMaxCycleLength));
            if (t.p < 1) throw InputError("cycle spec: power must be >= 1");
        }
    }
}

Integer product_weight(const CycleProduct& product, const CycleCounts& counts) {
    Integer w = 1;
    for (const auto& t : product) {
        w *= falling_factorial(counts[t.m], t.p);
        if (w == 0) break;
    }
    return w;
}

double to_d(const Integer& z) { return z.get_d(); }

// Mean and standard error from exact sums of x and x^2.
Estimate estimate_from_sums(const Integer& s1, const Integer& s2, long n) {
    Estimate e;
    Rational mean(s1, n);
    mean.canonicalize();
    e.mean = to_double(mean);
    if (n > 1) {
        Rational var = (Rational(s2) - Rational(s1) * mean) / Rational(n - 1);
        var.canonicalize();
        e.se = std::sqrt(std::max(0.0, to_double(var)) / static_cast<double>(n));
    }
    return e;
}

struct Accumulator {
    Integer y, y2, y3, y4;
    std::vector<Integer> yf, y2f, y2f2;
    std::vector<Integer> x, x2;

    Accumulator(std::size_t products, std::size_t cycles)
        : yf(products), y2f(products), y2f2(products), x(cycles), x2(cycles) {}

    void merge(const Accumulator& o) {
        y += o.y;
        y2 += o.y2;
        y3 += o.y3;
        y4 += o.y4;
        for (std::size_t i = 0; i < yf.size(); ++i) {
            yf[i] += o.yf[i];
            y2f[i] += o.y2f[i];
            y2f2[i] += o.y2f2[i];
        }
        for (std::size_t i = 0; i < x.size(); ++i) {
            x[i] += o.x[i];
            x2[i] += o.x2[i];
        }
    }
};

void check_moment_guards(int n, int d, int k, long samples) {
    if (n < 1 || d < 1 || k < 2) throw InputError("need n >= 1, d >= 1, k >= 2");
    if (n % k != 0) throw InputError("k must divide n");
    if ((static_cast<long>(n) * d) % 2 != 0) throw InfeasibleError("dn is odd");
    if (n > kMaxMomentVertices)
        throw GuardError("n = " + std::to_string(n) + " exceeds " + std::to_string(kMaxMomentVertices) +
                         " for exact per-sample Y");
    if (samples < 100) throw InputError("need at least 100 samples");
}

template <class Work>
void run_parallel(long total, int workers, Work&& work) {
    workers = static_cast<int>(std::max(1L, std::min<long>(workers, total)));
    if (workers == 1) {
        work(0, 1);
        return;
    }
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back([&, w] { work(w, workers); });
    for (auto& t : pool) t.join();
}

}  // namespace

CycleSpec parse_cycle_spec(const std::string& text) {
    CycleSpec spec;
    if (text.empty()) return spec;
    for (const auto& product_text : split(text, ';')) {
        CycleProduct product;
        for (const auto& factor : split(product_text, ',')) {
            const auto colon = factor.find(':');
            if (colon == std::string::npos) throw InputError("cycle spec: expected m:p, got '" + factor + "'");
            product.push_back({parse_int(factor.substr(0, colon), "cycle length"),
                               parse_int(factor.substr(colon + 1), "power")});
        }
        spec.push_back(std::move(product));
    }
    validate_spec(spec);
    return spec;
}

std::string format_cycle_product(const CycleProduct& product) {
    std::string out;
    for (const auto& t : product) {
        if (!out.empty()) out += ',';
        out += std::to_string(t.m) + ":" + std::to_string(t.p);
    }
    return out;
}

Integer falling_factorial(std::uint64_t x, int p) {
    Integer out = 1;
    for (int i = 0; i < p; ++i) {
        if (x < static_cast<std::uint64_t>(i)) return 0;
        out *= static_cast<unsigned long>(x - static_cast<std::uint64_t>(i));
    }
    return out;
}

MomentReport estimate_moments(int n, int d, int k, long samples, const CycleSpec& spec, std::uint64_t seed,
                              int workers) {
    check_moment_guards(n, d, k, samples);
    validate_spec(spec);
    const int m_max = std::max(3, max_cycle_length(spec));
    const std::size_t products = spec.size();
    const auto cycles = static_cast<std::size_t>(m_max);

    std::vector<Accumulator> parts;
    const int used = static_cast<int>(std::max(1L, std::min<long>(workers, samples)));
    parts.reserve(static_cast<std::size_t>(used));
    for (int w = 0; w < used; ++w) parts.emplace_back(products, cycles);

    run_parallel(samples, used, [&](int w, int stride) {
        Accumulator& acc = parts[static_cast<std::size_t>(w)];
        for (long i = w; i < samples; i += stride) {
            const Multigraph g = to_multigraph(sample_pairing(n, d, seed, static_cast<std::uint64_t>(i)));
            const CycleCounts c = count_cycles(g, m_max);
            for (std::size_t m = 0; m < cycles; ++m) {
                const auto x = c[static_cast<int>(m) + 1];
                acc.x[m] += static_cast<unsigned long>(x);
                acc.x2[m] += Integer(static_cast<unsigned long>(x)) * static_cast<unsigned long>(x);
            }
            const Integer y = count_balanced_colourings(g, k);
            if (y == 0) continue;
            const Integer y2 = y * y;
            acc.y += y;
            acc.y2 += y2;
            acc.y3 += y2 * y;
            acc.y4 += y2 * y2;
            for (std::size_t j = 0; j < products; ++j) {
                const Integer f = product_weight(spec[j], c);
                if (f == 0) continue;
                acc.yf[j] += y * f;
                acc.y2f[j] += y2 * f;
                acc.y2f2[j] += y2 * f * f;
            }
        }
    });
    Accumulator total(products, cycles);
    for (const auto& p : parts) total.merge(p);

    MomentReport r;
    r.n = n;
    r.d = d;
    r.k = k;
    r.samples = samples;
    r.seed = seed;
    r.sum_y = total.y;
    r.sum_y2 = total.y2;
    r.ey = estimate_from_sums(total.y, total.y2, samples);
    r.ey2 = estimate_from_sums(total.y2, total.y4, samples);
    const double N = static_cast<double>(samples);
    const double b = r.ey.mean;
    if (b > 0) {
        // g(a, b) = a / b^2 with a = mean Y^2, b = mean Y.
        const double a = r.ey2.mean;
        r.ratio.mean = a / (b * b);
        const double var_a = r.ey2.se * r.ey2.se;
        const double var_b = r.ey.se * r.ey.se;
        const double cov = (to_d(total.y3) - to_d(total.y2) * to_d(total.y) / N) / (N - 1) / N;
        const double ga = 1 / (b * b), gb = -2 * a / (b * b * b);
        r.ratio.se = std::sqrt(std::max(0.0, ga * ga * var_a + 2 * ga * gb * cov + gb * gb * var_b));
    }

    try {
        r.exact_ey = exact_expected_Y(n, d, k);
    } catch (const GuardError&) {
    }
    try {
        r.exact_ey2 = exact_second_moment(n, d, k);
    } catch (const GuardError&) {
    }
    if (k >= 3) {
        r.theory_ey = ey_asym(n, d, k);
        try {
            r.theory_ey2 = ey2_asym(n, d, k);
            r.theory_ratio = static_cast<double>(second_moment_ratio(d, k));
        } catch (const DomainError&) {
        }
    }

    std::optional<EnumeratedMoments> enumerated;
    if (n * d <= kMaxJointEnumerationPoints && !spec.empty()) enumerated = enumerate_moments(n, d, k, spec);

    for (std::size_t j = 0; j < products; ++j) {
        JointMomentRow row;
        row.product = spec[j];
        row.sum = total.yf[j];
        row.moment = estimate_from_sums(total.yf[j], total.y2f2[j], samples);
        if (b > 0) {
            // g(a, b) = a / b with a = mean Y F.
            const double a = row.moment.mean;
            row.ratio.mean = a / b;
            const double cov = (to_d(total.y2f[j]) - to_d(total.yf[j]) * to_d(total.y) / N) / (N - 1) / N;
            const double var = (row.moment.se * row.moment.se - 2 * (a / b) * cov +
                                (a / b) * (a / b) * r.ey.se * r.ey.se) /
                               (b * b);
            row.ratio.se = std::sqrt(std::max(0.0, var));
        }
        double theory = 1;
        for (const auto& t : spec[j])
            theory *= std::pow(to_double(cycle_correction(d, k, t.m).multiplier()), t.p);
        row.theory = theory;
        if (enumerated) {
            row.exact_moment = enumerated->joint[j];
            if (enumerated->ey != 0) {
                Rational q = enumerated->joint[j] / enumerated->ey;
                q.canonicalize();
                row.exact_ratio = q;
            }
        }
        r.joint.push_back(std::move(row));
    }
    for (std::size_t m = 0; m < cycles; ++m) {
        CycleMeanRow row;
        row.m = static_cast<int>(m) + 1;
        row.mean = estimate_from_sums(total.x[m], total.x2[m], samples);
        row.lambda = std::pow(static_cast<double>(d - 1), row.m) / (2.0 * row.m);
        r.cycles.push_back(row);
    }
    return r;
}

EnumeratedMoments enumerate_moments(int n, int d, int k, const CycleSpec& spec) {
    if (n < 1 || d < 1 || k < 2) throw InputError("need n >= 1, d >= 1, k >= 2");
    if (n % k != 0) throw InputError("k must divide n");
    validate_spec(spec);
    const int m_max = max_cycle_length(spec);
    EnumeratedMoments out;
    Integer sum_y, sum_y2;
    std::vector<Integer> sum_f(spec.size());
    Integer count;
    for_each_pairing(n, d, [&](const Pairing& p) {
        ++count;
        const Multigraph g = to_multigraph(p);
        const Integer y = count_balanced_colourings(g, k);
        if (y == 0) return;
        sum_y += y;
        sum_y2 += y * y;
        if (m_max == 0) return;
        const CycleCounts c = count_cycles(g, m_max);
        for (std::size_t j = 0; j < spec.size(); ++j) sum_f[j] += y * product_weight(spec[j], c);
    });
    out.pairings = count;
    auto mean = [&](const Integer& s) {
        Rational q(s, count);
        q.canonicalize();
        return q;
    };
    out.ey = mean(sum_y);
    out.ey2 = mean(sum_y2);
    for (const auto& s : sum_f) out.joint.push_back(mean(s));
    return out;
}

ChiFrequencyTable chi_frequency(int n, int d, long samples, std::uint64_t seed, int workers) {
    if (n < 1 || d < 0) throw InputError("need n >= 1, d >= 0");
    if ((static_cast<long>(n) * d) % 2 != 0) throw InfeasibleError("dn is odd");
    if (n > kMaxChiVertices)
        throw GuardError("n = " + std::to_string(n) + " exceeds " + std::to_string(kMaxChiVertices) +
                         " for exact chromatic numbers");
    if (samples < 10) throw InputError("need at least 10 samples");

    std::vector<std::optional<ChiSample>> results(static_cast<std::size_t>(samples));
    run_parallel(samples, workers, [&](int w, int stride) {
        for (long i = w; i < samples; i += stride) {
            const Multigraph g = to_multigraph(sample_pairing(n, d, seed, static_cast<std::uint64_t>(i)));
            if (!is_simple(g)) continue;
            ChiSample s;
            s.index = i;
            s.chi = chromatic_number(g);
            const CycleCounts c = count_cycles(g, 5);
            s.x3 = c[3];
            s.x5 = c[5];
            results[static_cast<std::size_t>(i)] = s;
        }
    });

    ChiFrequencyTable t;
    t.n = n;
    t.d = d;
    t.samples = samples;
    t.seed = seed;
    for (const auto& r : results) {
        if (!r) {
            ++t.rejections;
            continue;
        }
        ++t.counts[r->chi];
        t.accepted.push_back(*r);
    }
    if (d >= 3) t.predicted = predict_chromatic(d).verdict;
    return t;
}

std::vector<ConvergenceRow> convergence_study(int d, int k, const std::vector<int>& ns) {
    if (k < 3) throw InputError("asymptotic E[Y] needs k >= 3");
    std::vector<ConvergenceRow> rows;
    for (int n : ns) {
        if (n < 1 || n % k != 0) throw InputError("k must divide every n (got " + std::to_string(n) + ")");
        if ((static_cast<long>(n) * d) % 2 != 0) throw InfeasibleError("dn is odd for n = " + std::to_string(n));
        ConvergenceRow row;
        row.n = n;
        row.exact_ey = exact_expected_Y(n, d, k);
        row.asymptotic_ey = ey_asym(n, d, k);
        row.ratio = static_cast<double>(std::exp(log_of(row.exact_ey) - row.asymptotic_ey.log));
        const std::vector<int> c(static_cast<std::size_t>(k), d * n / k);
        row.coefficient = coeff_single(k, c);
        row.coefficient_asymptotic = coeff_asym(n, d, k, 0);
        row.coefficient_ratio = static_cast<double>(std::exp(log_of(row.coefficient) - row.coefficient_asymptotic.log));
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace regchrom
