#pragma once

// Brute-force reference implementations used only by the tests. They share no
// code with the library beyond the Multigraph container.

#include <cstdint>
#include <vector>

#include "regchrom/pairing.hpp"

namespace oracle {

inline regchrom::Multigraph cycle(int n) {
    std::vector<regchrom::Edge> e;
    for (int i = 0; i < n; ++i) e.push_back({std::min(i, (i + 1) % n), std::max(i, (i + 1) % n)});
    return regchrom::Multigraph(n, e);
}

inline regchrom::Multigraph complete(int n) {
    std::vector<regchrom::Edge> e;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) e.push_back({i, j});
    return regchrom::Multigraph(n, e);
}

inline regchrom::Multigraph petersen() {
    std::vector<regchrom::Edge> e;
    for (int i = 0; i < 5; ++i) {
        e.push_back({std::min(i, (i + 1) % 5), std::max(i, (i + 1) % 5)});
        e.push_back({i, i + 5});
        const int a = 5 + i, b = 5 + (i + 2) % 5;
        e.push_back({std::min(a, b), std::max(a, b)});
    }
    return regchrom::Multigraph(10, e);
}

// Every assignment in k^n; calls fn(colours) for the proper ones.
template <class Fn>
void for_each_proper(const regchrom::Multigraph& g, int k, Fn&& fn) {
    const int n = g.n();
    std::vector<int> c(static_cast<std::size_t>(n), 0);
    while (true) {
        bool proper = true;
        for (const auto& e : g.edges())
            if (c[static_cast<std::size_t>(e.u)] == c[static_cast<std::size_t>(e.v)]) {
                proper = false;
                break;
            }
        if (proper) fn(c);
        int i = 0;
        while (i < n && ++c[static_cast<std::size_t>(i)] == k) c[static_cast<std::size_t>(i++)] = 0;
        if (i == n) return;
    }
}

inline std::uint64_t proper_colourings(const regchrom::Multigraph& g, int k) {
    std::uint64_t count = 0;
    for_each_proper(g, k, [&](const std::vector<int>&) { ++count; });
    return count;
}

inline std::uint64_t balanced_colourings(const regchrom::Multigraph& g, int k) {
    if (g.n() % k != 0) return 0;
    std::uint64_t count = 0;
    for_each_proper(g, k, [&](const std::vector<int>& c) {
        std::vector<int> sizes(static_cast<std::size_t>(k), 0);
        for (int x : c) ++sizes[static_cast<std::size_t>(x)];
        for (int s : sizes)
            if (s != g.n() / k) return;
        ++count;
    });
    return count;
}

inline int chromatic(const regchrom::Multigraph& g) {
    if (g.n() == 0) return 0;
    for (int k = 1;; ++k)
        if (proper_colourings(g, k) > 0) return k;
}

// Simple adjacency matrix (multiplicities collapsed).
inline std::vector<std::vector<std::int64_t>> adjacency(const regchrom::Multigraph& g) {
    std::vector<std::vector<std::int64_t>> a(static_cast<std::size_t>(g.n()),
                                             std::vector<std::int64_t>(static_cast<std::size_t>(g.n()), 0));
    for (const auto& e : g.edges())
        if (e.u != e.v) a[static_cast<std::size_t>(e.u)][static_cast<std::size_t>(e.v)] =
                            a[static_cast<std::size_t>(e.v)][static_cast<std::size_t>(e.u)] = 1;
    return a;
}

inline std::int64_t trace_power(const std::vector<std::vector<std::int64_t>>& a, int p) {
    const std::size_t n = a.size();
    auto m = a;
    for (int step = 1; step < p; ++step) {
        std::vector<std::vector<std::int64_t>> next(n, std::vector<std::int64_t>(n, 0));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < n; ++k)
                if (m[i][k])
                    for (std::size_t j = 0; j < n; ++j) next[i][j] += m[i][k] * a[k][j];
        m = std::move(next);
    }
    std::int64_t t = 0;
    for (std::size_t i = 0; i < n; ++i) t += m[i][i];
    return t;
}

// Cycles of length m in a multigraph counted as edge sets: closed walks with
// distinct vertices, each weighted by the product of edge multiplicities,
// divided by the 2m rootings and orientations.
inline std::uint64_t cycles_by_paths(const regchrom::Multigraph& g, int m) {
    const int n = g.n();
    std::uint64_t total = 0;
    std::vector<int> path;
    std::vector<bool> used(static_cast<std::size_t>(n), false);
    auto extend = [&](auto&& self, std::uint64_t weight) -> void {
        const int last = path.back();
        if (static_cast<int>(path.size()) == m) {
            const int close = g.multiplicity(std::min(last, path[0]), std::max(last, path[0]));
            total += weight * static_cast<std::uint64_t>(close);
            return;
        }
        for (int v = 0; v < n; ++v) {
            if (used[static_cast<std::size_t>(v)]) continue;
            const int mu = g.multiplicity(std::min(last, v), std::max(last, v));
            if (mu == 0) continue;
            used[static_cast<std::size_t>(v)] = true;
            path.push_back(v);
            self(self, weight * static_cast<std::uint64_t>(mu));
            path.pop_back();
            used[static_cast<std::size_t>(v)] = false;
        }
    };
    for (int s = 0; s < n; ++s) {
        path = {s};
        used.assign(static_cast<std::size_t>(n), false);
        used[static_cast<std::size_t>(s)] = true;
        extend(extend, 1);
    }
    return total / static_cast<std::uint64_t>(2 * m);
}

}  // namespace oracle
