#include "regchrom/genfunc.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <string>

#include "regchrom/errors.hpp"

namespace regchrom {

namespace {

long long total_of(std::span<const int> c) {
    long long total = 0;
    for (int x : c) {
        if (x < 0) throw InputError("negative exponent in degree vector");
        total += x;
    }
    return total;
}

void check_moment_args(int n, int d, int k) {
    if (n < 1 || d < 1) throw InputError("need n >= 1 and d >= 1");
    if (k < 2) throw InputError("need k >= 2");
    if (n % k != 0)
        throw InfeasibleError("k = " + std::to_string(k) + " does not divide n = " + std::to_string(n));
    if ((static_cast<long long>(d) * n) % 2 != 0)
        throw InfeasibleError("dn = " + std::to_string(static_cast<long long>(d) * n) + " is odd");
}

}  // namespace

ColourCountMatrix::ColourCountMatrix(int k, std::vector<Rational> entries) : k_(k), entries_(std::move(entries)) {
    if (k < 1 || entries_.size() != static_cast<std::size_t>(k) * static_cast<std::size_t>(k))
        throw InputError("colour count matrix must be k x k");
    for (const auto& e : entries_)
        if (e < 0) throw DomainError("colour count matrix has a negative entry");
    for (int i = 0; i < k; ++i) {
        Rational row = 0, col = 0;
        for (int j = 0; j < k; ++j) {
            row += (*this)(i, j);
            col += (*this)(j, i);
        }
        if (row != 1 || col != 1) throw DomainError("colour count matrix is not doubly stochastic");
    }
}

ColourCountMatrix ColourCountMatrix::from_counts(int k, int n, std::span<const int> counts) {
    std::vector<Rational> entries;
    entries.reserve(counts.size());
    for (int c : counts) {
        Rational e(c * k, n);
        e.canonicalize();
        entries.push_back(e);
    }
    return ColourCountMatrix(k, std::move(entries));
}

ColourCountMatrix ColourCountMatrix::uniform(int k) {
    Rational e(1, k);
    e.canonicalize();
    return ColourCountMatrix(k, std::vector<Rational>(static_cast<std::size_t>(k * k), e));
}

ColourCountMatrix ColourCountMatrix::identity(int k) {
    std::vector<Rational> entries(static_cast<std::size_t>(k * k), Rational(0));
    for (int i = 0; i < k; ++i) entries[static_cast<std::size_t>(i * k + i)] = 1;
    return ColourCountMatrix(k, std::move(entries));
}

Rational coeff_exp_quadratic(int vertices, std::span<const std::pair<int, int>> edges, std::span<const int> degrees) {
    if (static_cast<int>(degrees.size()) != vertices) throw InputError("degree vector has the wrong length");
    const long long total = total_of(degrees);
    if (total % 2 != 0) return 0;
    if (total == 0) return 1;

    // Only vertices with positive degree matter; relabel them 0..m-1.
    std::vector<int> index(static_cast<std::size_t>(vertices), -1);
    std::vector<int> residual;
    for (int v = 0; v < vertices; ++v) {
        if (degrees[static_cast<std::size_t>(v)] > 0) {
            index[static_cast<std::size_t>(v)] = static_cast<int>(residual.size());
            residual.push_back(degrees[static_cast<std::size_t>(v)]);
        }
    }
    std::vector<std::pair<int, int>> live;
    for (auto [u, v] : edges) {
        if (u < 0 || v < 0 || u >= vertices || v >= vertices || u == v) throw InputError("bad edge in coefficient graph");
        const int a = index[static_cast<std::size_t>(u)], b = index[static_cast<std::size_t>(v)];
        if (a >= 0 && b >= 0) live.emplace_back(std::min(a, b), std::max(a, b));
    }
    std::sort(live.begin(), live.end());
    live.erase(std::unique(live.begin(), live.end()), live.end());

    const std::size_t m = residual.size();
    std::vector<int> last_edge(m, -1);
    for (std::size_t t = 0; t < live.size(); ++t) {
        last_edge[static_cast<std::size_t>(live[t].first)] = static_cast<int>(t);
        last_edge[static_cast<std::size_t>(live[t].second)] = static_cast<int>(t);
    }
    for (std::size_t v = 0; v < m; ++v)
        if (last_edge[v] < 0) return 0;

    const auto edges_left = static_cast<unsigned long>(total / 2);
    std::vector<std::vector<Integer>> choose(edges_left + 1);
    for (unsigned long r = 0; r <= edges_left; ++r) {
        choose[r].resize(r + 1);
        for (unsigned long b = 0; b <= r; ++b) choose[r][b] = binomial(r, b);
    }

    // Capacity still reachable by v through edges after position t.
    auto future_capacity = [&](const std::vector<int>& res, int v, std::size_t t) {
        long long cap = 0;
        for (std::size_t s = t + 1; s < live.size(); ++s) {
            if (live[s].first == v) cap += res[static_cast<std::size_t>(live[s].second)];
            else if (live[s].second == v) cap += res[static_cast<std::size_t>(live[s].first)];
        }
        return cap;
    };

    std::map<std::vector<int>, Integer> states;
    states.emplace(residual, Integer(1));
    for (std::size_t t = 0; t < live.size(); ++t) {
        const auto [u, v] = live[t];
        const auto uu = static_cast<std::size_t>(u), uv = static_cast<std::size_t>(v);
        std::map<std::vector<int>, Integer> next;
        for (const auto& [res, weight] : states) {
            const long long left = std::accumulate(res.begin(), res.end(), 0LL) / 2;
            int lo = 0, hi = std::min(res[uu], res[uv]);
            if (last_edge[uu] == static_cast<int>(t)) lo = std::max(lo, res[uu]);
            if (last_edge[uv] == static_cast<int>(t)) lo = std::max(lo, res[uv]);
            for (int b = lo; b <= hi; ++b) {
                std::vector<int> after = res;
                after[uu] -= b;
                after[uv] -= b;
                if (after[uu] > future_capacity(after, u, t) || after[uv] > future_capacity(after, v, t)) continue;
                next[std::move(after)] += weight * choose[static_cast<std::size_t>(left)][static_cast<std::size_t>(b)];
            }
        }
        states = std::move(next);
        if (states.empty()) return 0;
    }
    const auto it = states.find(std::vector<int>(m, 0));
    if (it == states.end()) return 0;
    Rational out(it->second, factorial(edges_left));
    out.canonicalize();
    return out;
}

Rational coeff_single(int k, std::span<const int> c) {
    if (k < 2) throw InputError("coeff_single needs k >= 2");
    if (static_cast<int>(c.size()) != k) throw InputError("degree vector must have k entries");
    const long long total = total_of(c);
    if (total > kMaxSingleDegree)
        throw GuardError("coefficient extraction refused: total degree " + std::to_string(total) +
                         " exceeds the bound " + std::to_string(kMaxSingleDegree));
    std::vector<std::pair<int, int>> edges;
    for (int j = 0; j < k; ++j)
        for (int l = j + 1; l < k; ++l) edges.emplace_back(j, l);
    return coeff_exp_quadratic(k, edges, c);
}

Rational coeff_pair(int k, std::span<const int> c) {
    if (k < 2) throw InputError("coeff_pair needs k >= 2");
    if (static_cast<int>(c.size()) != k * k) throw InputError("degree vector must have k^2 entries");
    const long long total = total_of(c);
    if (total > kMaxPairDegree)
        throw GuardError("pair coefficient extraction refused: total degree " + std::to_string(total) +
                         " exceeds the bound " + std::to_string(kMaxPairDegree));
    // Each unordered compatible label pair {(p,q),(r,s)} appears twice in the
    // ordered sum, which the factor 1/2 cancels.
    std::vector<std::pair<int, int>> edges;
    for (int p = 0; p < k; ++p)
        for (int q = 0; q < k; ++q)
            for (int r = p + 1; r < k; ++r)
                for (int s = 0; s < k; ++s)
                    if (s != q) edges.emplace_back(p * k + q, r * k + s);
    return coeff_exp_quadratic(k * k, edges, c);
}

Rational exact_expected_Y(int n, int d, int k) {
    check_moment_args(n, d, k);
    const int cls = n / k;
    const int deg = d * n / k;
    Integer multinomial = factorial(static_cast<unsigned long>(n));
    const Integer cls_fact = factorial(static_cast<unsigned long>(cls));
    for (int i = 0; i < k; ++i) multinomial /= cls_fact;
    Integer deg_fact_power;
    mpz_pow_ui(deg_fact_power.get_mpz_t(), factorial(static_cast<unsigned long>(deg)).get_mpz_t(),
               static_cast<unsigned long>(k));
    const std::vector<int> c(static_cast<std::size_t>(k), deg);
    Rational result = coeff_single(k, c) * Rational(multinomial * deg_fact_power);
    result /= Rational(double_factorial(static_cast<unsigned long>(d * n - 1)));
    return result;
}

Rational exact_T(const ColourCountMatrix& m, int n, int d) {
    const int k = m.k();
    check_moment_args(n, d, k);
    std::vector<int> cells(static_cast<std::size_t>(k * k));
    std::vector<int> exponents(cells.size());
    Integer scale = factorial(static_cast<unsigned long>(n));
    for (std::size_t i = 0; i < cells.size(); ++i) {
        Rational cls_size(n, k);
        cls_size.canonicalize();
        const Rational count = m.entries()[i] * cls_size;
        if (count.get_den() != 1)
            throw InfeasibleError("entry " + to_string(m.entries()[i]) + " times n/k is not an integer");
        cells[i] = static_cast<int>(count.get_num().get_si());
        exponents[i] = d * cells[i];
        scale *= factorial(static_cast<unsigned long>(exponents[i]));
        scale /= factorial(static_cast<unsigned long>(cells[i]));
    }
    return coeff_pair(k, exponents) * Rational(scale);
}

long for_each_count_matrix(int k, int line_sum,
                           const std::function<void(std::span<const int>, const Integer&)>& visit) {
    const auto uk = static_cast<std::size_t>(k);
    std::vector<int> counts(uk * uk, 0);
    std::vector<int> budget(uk, line_sum);
    const Integer k_fact = factorial(static_cast<unsigned long>(k));
    long visited = 0;

    auto row_leq_previous = [&](std::size_t row) {
        if (row == 0) return true;
        for (std::size_t j = 0; j < uk; ++j) {
            const int a = counts[row * uk + j], b = counts[(row - 1) * uk + j];
            if (a != b) return a < b;
        }
        return true;
    };
    auto emit = [&] {
        Integer orderings = k_fact;
        std::size_t run = 1;
        for (std::size_t row = 1; row <= uk; ++row) {
            const bool same = row < uk && std::equal(counts.begin() + static_cast<long>(row * uk),
                                                     counts.begin() + static_cast<long>((row + 1) * uk),
                                                     counts.begin() + static_cast<long>((row - 1) * uk));
            if (same) {
                ++run;
            } else {
                orderings /= factorial(run);
                run = 1;
            }
        }
        ++visited;
        visit(counts, orderings);
    };

    // Fill row `row` from column `col` with `left` units still to place.
    std::function<void(std::size_t, std::size_t, int)> fill = [&](std::size_t row, std::size_t col, int left) {
        if (row + 1 == uk) {
            for (std::size_t j = 0; j < uk; ++j) counts[row * uk + j] = budget[j];
            if (row_leq_previous(row)) emit();
            return;
        }
        if (col + 1 == uk) {
            if (left > budget[col]) return;
            counts[row * uk + col] = left;
            if (!row_leq_previous(row)) return;
            budget[col] -= left;
            fill(row + 1, 0, line_sum);
            budget[col] += left;
            return;
        }
        // Descending values give rows in decreasing lexicographic order.
        for (int v = std::min(left, budget[col]); v >= 0; --v) {
            counts[row * uk + col] = v;
            // Early lexicographic cut against the previous row's prefix.
            if (row > 0) {
                bool greater = false, decided = false;
                for (std::size_t j = 0; j <= col && !decided; ++j) {
                    const int a = counts[row * uk + j], b = counts[(row - 1) * uk + j];
                    if (a != b) {
                        greater = a > b;
                        decided = true;
                    }
                }
                if (greater) continue;
            }
            budget[col] -= v;
            fill(row, col + 1, left - v);
            budget[col] += v;
        }
    };
    if (k == 1) {
        counts[0] = line_sum;
        emit();
        return visited;
    }
    fill(0, 0, line_sum);
    return visited;
}

Rational exact_second_moment(int n, int d, int k) {
    check_moment_args(n, d, k);
    if (static_cast<long long>(d) * n > kMaxPairDegree)
        throw GuardError("second moment refused: dn = " + std::to_string(d * n) + " exceeds the bound " +
                         std::to_string(kMaxPairDegree));
    // Count the representatives first so the guard fires before any heavy work.
    const long terms = for_each_count_matrix(k, n / k, [](std::span<const int>, const Integer&) {});
    if (terms > kMaxSecondMomentTerms)
        throw GuardError("second moment refused: " + std::to_string(terms) +
                         " colour count matrices exceed the bound " + std::to_string(kMaxSecondMomentTerms));
    Rational sum = 0;
    for_each_count_matrix(k, n / k, [&](std::span<const int> counts, const Integer& orderings) {
        sum += exact_T(ColourCountMatrix::from_counts(k, n, counts), n, d) * Rational(orderings);
    });
    return sum / Rational(double_factorial(static_cast<unsigned long>(d * n - 1)));
}

Integer count_colour_types(int k, int m) {
    if (k < 2 || m < 1) throw InputError("count_colour_types needs k >= 2 and m >= 1");
    Integer power;
    mpz_ui_pow_ui(power.get_mpz_t(), static_cast<unsigned long>(k - 1), static_cast<unsigned long>(m));
    const Integer tail = (m % 2 == 0) ? Integer(k - 1) : Integer(-(k - 1));
    return power + tail;
}

}  // namespace regchrom
