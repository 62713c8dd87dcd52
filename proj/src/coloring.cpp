#include "regchrom/coloring.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <string>

#include "regchrom/errors.hpp"

namespace regchrom {

namespace {

using Mask = std::uint64_t;

inline Mask bit(int v) { return Mask{1} << v; }

std::vector<Mask> adjacency_masks(const Multigraph& g) {
    std::vector<Mask> adj(static_cast<std::size_t>(g.n()), 0);
    for (int v = 0; v < g.n(); ++v)
        for (int w : g.neighbours(v)) adj[static_cast<std::size_t>(v)] |= bit(w);
    return adj;
}

void check_balanced_args(const Multigraph& g, int k, int limit) {
    if (k < 2) throw InputError("balanced colourings need k >= 2");
    if (g.n() % k != 0)
        throw InfeasibleError("k = " + std::to_string(k) + " does not divide n = " + std::to_string(g.n()));
    if (g.n() > limit)
        throw GuardError("balanced colouring search refused: n = " + std::to_string(g.n()) +
                         " exceeds the bound n <= " + std::to_string(limit));
}

// Backtracking over vertices in saturation order. Colour labels are opened in
// order of first use, so each unordered partition into k independent classes
// of size n/k is visited exactly once; the labelled count is k! times that.
class BalancedSearch {
public:
    BalancedSearch(const Multigraph& g, int k, bool stop_at_first)
        : adj_(adjacency_masks(g)),
          k_(k),
          cap_(g.n() / k),
          stop_(stop_at_first),
          nbr_(static_cast<std::size_t>(k), 0),
          size_(static_cast<std::size_t>(k), 0) {
        uncoloured_ = bit(g.n()) - 1;
    }

    std::uint64_t run() {
        recurse();
        return leaves_;
    }

private:
    void recurse() {
        if (uncoloured_ == 0) {
            ++leaves_;
            return;
        }
        // Every open class must still be completable from the remaining vertices.
        for (int c = 0; c < opened_; ++c) {
            const int need = cap_ - size_[static_cast<std::size_t>(c)];
            if (need > 0 && std::popcount(uncoloured_ & ~nbr_[static_cast<std::size_t>(c)]) < need) return;
        }
        int best = -1;
        int best_options = k_ + 2;
        for (Mask rest = uncoloured_; rest != 0; rest &= rest - 1) {
            const int v = std::countr_zero(rest);
            int options = opened_ < k_ ? 1 : 0;
            for (int c = 0; c < opened_; ++c)
                if (size_[static_cast<std::size_t>(c)] < cap_ && !(nbr_[static_cast<std::size_t>(c)] & bit(v))) ++options;
            if (options == 0) return;
            if (options < best_options) {
                best_options = options;
                best = v;
                if (options == 1) break;
            }
        }
        const int limit = std::min(opened_ + 1, k_);
        for (int c = 0; c < limit; ++c) {
            const auto uc = static_cast<std::size_t>(c);
            if (size_[uc] >= cap_ || (nbr_[uc] & bit(best))) continue;
            const Mask saved_nbr = nbr_[uc];
            const bool opens = c == opened_;
            nbr_[uc] |= adj_[static_cast<std::size_t>(best)];
            ++size_[uc];
            uncoloured_ &= ~bit(best);
            if (opens) ++opened_;
            recurse();
            if (opens) --opened_;
            uncoloured_ |= bit(best);
            --size_[uc];
            nbr_[uc] = saved_nbr;
            if (stop_ && leaves_ > 0) return;
        }
    }

    std::vector<Mask> adj_;
    int k_;
    int cap_;
    bool stop_;
    std::vector<Mask> nbr_;
    std::vector<int> size_;
    Mask uncoloured_ = 0;
    int opened_ = 0;
    std::uint64_t leaves_ = 0;
};

// Plain k-colourability by the same saturation-ordered search without budgets.
class ColourSearch {
public:
    ColourSearch(std::vector<Mask> adj, int n, int k)
        : adj_(std::move(adj)), k_(k), nbr_(static_cast<std::size_t>(k), 0) {
        uncoloured_ = bit(n) - 1;
    }

    bool run() { return recurse(); }

private:
    bool recurse() {
        if (uncoloured_ == 0) return true;
        int best = -1;
        int best_options = k_ + 2;
        int best_degree = -1;
        for (Mask rest = uncoloured_; rest != 0; rest &= rest - 1) {
            const int v = std::countr_zero(rest);
            int options = opened_ < k_ ? 1 : 0;
            for (int c = 0; c < opened_; ++c)
                if (!(nbr_[static_cast<std::size_t>(c)] & bit(v))) ++options;
            if (options == 0) return false;
            const int deg = std::popcount(adj_[static_cast<std::size_t>(v)] & uncoloured_);
            if (options < best_options || (options == best_options && deg > best_degree)) {
                best_options = options;
                best_degree = deg;
                best = v;
            }
        }
        const int limit = std::min(opened_ + 1, k_);
        for (int c = 0; c < limit; ++c) {
            const auto uc = static_cast<std::size_t>(c);
            if (nbr_[uc] & bit(best)) continue;
            const Mask saved = nbr_[uc];
            const bool opens = c == opened_;
            nbr_[uc] |= adj_[static_cast<std::size_t>(best)];
            uncoloured_ &= ~bit(best);
            if (opens) ++opened_;
            const bool ok = recurse();
            if (opens) --opened_;
            uncoloured_ |= bit(best);
            nbr_[uc] = saved;
            if (ok) return true;
        }
        return false;
    }

    std::vector<Mask> adj_;
    int k_;
    std::vector<Mask> nbr_;
    Mask uncoloured_ = 0;
    int opened_ = 0;
};

// DSATUR greedy colouring; returns the number of colours used.
int dsatur_upper_bound(const std::vector<Mask>& adj, int n) {
    std::vector<int> colour(static_cast<std::size_t>(n), -1);
    std::vector<Mask> seen(static_cast<std::size_t>(n), 0);  // colours present around v
    int used = 0;
    for (int step = 0; step < n; ++step) {
        int best = -1, best_sat = -1, best_deg = -1;
        for (int v = 0; v < n; ++v) {
            if (colour[static_cast<std::size_t>(v)] != -1) continue;
            const int sat = std::popcount(seen[static_cast<std::size_t>(v)]);
            const int deg = std::popcount(adj[static_cast<std::size_t>(v)]);
            if (sat > best_sat || (sat == best_sat && deg > best_deg)) {
                best = v;
                best_sat = sat;
                best_deg = deg;
            }
        }
        const int c = std::countr_zero(~seen[static_cast<std::size_t>(best)]);
        colour[static_cast<std::size_t>(best)] = c;
        used = std::max(used, c + 1);
        for (Mask nb = adj[static_cast<std::size_t>(best)]; nb != 0; nb &= nb - 1)
            seen[static_cast<std::size_t>(std::countr_zero(nb))] |= bit(c);
    }
    return used;
}

void max_clique(const std::vector<Mask>& adj, Mask candidates, int size, int& best) {
    if (candidates == 0) {
        best = std::max(best, size);
        return;
    }
    while (candidates != 0) {
        if (size + std::popcount(candidates) <= best) return;
        const int v = std::countr_zero(candidates);
        candidates &= ~bit(v);
        max_clique(adj, candidates & adj[static_cast<std::size_t>(v)], size + 1, best);
    }
}

std::vector<Mask> checked_simple_adjacency(const Multigraph& g) {
    if (g.has_loop()) throw DomainError("chromatic number is undefined for a multigraph with a loop");
    if (g.n() > kMaxSearchVertices)
        throw GuardError("colouring search refused: n = " + std::to_string(g.n()) +
                         " exceeds the bound n <= " + std::to_string(kMaxSearchVertices));
    return adjacency_masks(g);
}

}  // namespace

Integer count_balanced_colourings(const Multigraph& g, int k) {
    check_balanced_args(g, k, kMaxCountVertices);
    if (g.has_loop()) return 0;
    const std::uint64_t partitions = BalancedSearch(g, k, false).run();
    Integer y = partitions;
    return y * factorial(static_cast<unsigned long>(k));
}

bool exists_balanced_colouring(const Multigraph& g, int k) {
    check_balanced_args(g, k, kMaxSearchVertices);
    if (g.has_loop()) return false;
    return BalancedSearch(g, k, true).run() > 0;
}

bool is_colourable(const Multigraph& g, int k) {
    auto adj = checked_simple_adjacency(g);
    if (g.n() == 0) return true;
    if (k <= 0) return false;
    return ColourSearch(std::move(adj), g.n(), k).run();
}

int chromatic_number(const Multigraph& g) {
    const auto adj = checked_simple_adjacency(g);
    const int n = g.n();
    if (n == 0) return 0;
    const int upper = dsatur_upper_bound(adj, n);
    int lower = 1;
    max_clique(adj, bit(n) - 1, 0, lower);
    for (int k = lower; k < upper; ++k)
        if (ColourSearch(adj, n, k).run()) return k;
    return upper;
}

}  // namespace regchrom
