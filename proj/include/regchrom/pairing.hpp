#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

#include "regchrom/rng.hpp"

namespace regchrom {

/// A perfect matching on d*n points grouped into n cells of d points;
/// point i lives in cell i / d. `mates` is a fixed-point-free involution.
class Pairing {
public:
    /// Validates the involution; throws InputError otherwise.
    Pairing(int n, int d, std::vector<int> mates);

    int n() const noexcept { return n_; }
    int d() const noexcept { return d_; }
    int points() const noexcept { return n_ * d_; }
    int cell(int point) const noexcept { return point / d_; }
    int mate(int point) const { return mates_[static_cast<std::size_t>(point)]; }
    const std::vector<int>& mates() const noexcept { return mates_; }

    friend bool operator==(const Pairing&, const Pairing&) = default;

private:
    int n_;
    int d_;
    std::vector<int> mates_;
};

struct Edge {
    int u;
    int v;  // u <= v; u == v is a loop

    friend bool operator==(const Edge&, const Edge&) = default;
    friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Loop and multi-edge aware graph. A loop contributes 2 to its vertex degree.
class Multigraph {
public:
    Multigraph(int n, std::vector<Edge> edges);

    int n() const noexcept { return n_; }
    /// Edge occurrences, each normalised to u <= v, in insertion order.
    const std::vector<Edge>& edges() const noexcept { return edges_; }
    int edge_count() const noexcept { return static_cast<int>(edges_.size()); }
    int degree(int v) const { return degree_[static_cast<std::size_t>(v)]; }
    /// Number of parallel edges between u and v (loops when u == v).
    int multiplicity(int u, int v) const {
        return mult_[static_cast<std::size_t>(u) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(v)];
    }
    /// Distinct neighbours (loops excluded), ascending.
    const std::vector<int>& neighbours(int v) const { return nbrs_[static_cast<std::size_t>(v)]; }
    bool has_loop() const noexcept { return loops_ > 0; }

    /// Common degree if every vertex has the same degree.
    std::optional<int> regular_degree() const;

    /// Same multigraph with vertex v renamed perm[v].
    Multigraph relabelled(const std::vector<int>& perm) const;

private:
    int n_;
    std::vector<Edge> edges_;
    std::vector<int> degree_;
    std::vector<int> mult_;
    std::vector<std::vector<int>> nbrs_;
    int loops_ = 0;
};

/// X_1..X_{m_max}: counts[m] holds X_m; counts[0] is unused.
struct CycleCounts {
    std::vector<std::uint64_t> counts;

    std::uint64_t operator[](int m) const { return counts[static_cast<std::size_t>(m)]; }
    int max_length() const noexcept { return static_cast<int>(counts.size()) - 1; }
};

inline constexpr int kMaxEnumerationPoints = 16;
inline constexpr int kMaxCycleLength = 8;

/// Uniform pairing: shuffle the dn points, pair consecutive entries.
/// Throws InfeasibleError when dn is odd.
Pairing sample_pairing(int n, int d, Philox& rng);
Pairing sample_pairing(int n, int d, std::uint64_t seed, std::uint64_t stream);

/// Streams every pairing once, lexicographically by the mate of the
/// smallest unpaired point. Refuses dn > 16.
class PairingEnumerator {
public:
    PairingEnumerator(int n, int d);

    /// Advances to the next pairing; false once the stream is exhausted.
    bool next();
    Pairing current() const;

private:
    void complete();

    int n_;
    int d_;
    int points_;
    std::vector<int> mates_;  // -1 while unpaired
    std::vector<std::pair<int, int>> stack_;
    bool started_ = false;
    bool done_ = false;
};

template <class Fn>
void for_each_pairing(int n, int d, Fn&& fn) {
    PairingEnumerator e(n, d);
    while (e.next()) fn(e.current());
}

Multigraph to_multigraph(const Pairing& p);

/// Exact X_1..X_{m_max}. Loops count toward X_1 only, each unordered pair of
/// parallel edges toward X_2 only; for m >= 3 each vertex cycle is counted
/// once per choice of parallel edge along it (i.e. as a set of edges of the
/// multigraph). Refuses m_max > 8.
CycleCounts count_cycles(const Multigraph& g, int m_max);

bool is_simple(const Multigraph& g);

/// Text format: "n d" header, then one "u v" line per edge occurrence.
void write_multigraph(std::ostream& out, const Multigraph& g);
/// Reads the text format; the header degree must match every vertex degree.
Multigraph read_multigraph(std::istream& in);

}  // namespace regchrom
