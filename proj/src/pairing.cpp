#include "regchrom/pairing.hpp"

#include <algorithm>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

#include "regchrom/errors.hpp"

namespace regchrom {

namespace {

void check_shape(int n, int d) {
    if (n < 1 || d < 1) throw InputError("pairing needs n >= 1 and d >= 1");
    if ((static_cast<long long>(n) * d) % 2 != 0)
        throw InfeasibleError("dn = " + std::to_string(static_cast<long long>(n) * d) +
                              " is odd; no perfect matching exists");
}

}  // namespace

Pairing::Pairing(int n, int d, std::vector<int> mates) : n_(n), d_(d), mates_(std::move(mates)) {
    check_shape(n, d);
    const int dn = n * d;
    if (static_cast<int>(mates_.size()) != dn) throw InputError("mates must have dn entries");
    for (int i = 0; i < dn; ++i) {
        const int j = mates_[static_cast<std::size_t>(i)];
        if (j < 0 || j >= dn || j == i || mates_[static_cast<std::size_t>(j)] != i)
            throw InputError("mates is not a fixed-point-free involution at point " + std::to_string(i));
    }
}

Multigraph::Multigraph(int n, std::vector<Edge> edges)
    : n_(n),
      edges_(std::move(edges)),
      degree_(static_cast<std::size_t>(n), 0),
      mult_(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0),
      nbrs_(static_cast<std::size_t>(n)) {
    if (n < 0) throw InputError("negative vertex count");
    for (auto& e : edges_) {
        if (e.u < 0 || e.v < 0 || e.u >= n || e.v >= n)
            throw InputError("edge endpoint out of range: " + std::to_string(e.u) + " " + std::to_string(e.v));
        if (e.u > e.v) std::swap(e.u, e.v);
        degree_[static_cast<std::size_t>(e.u)] += 1;
        degree_[static_cast<std::size_t>(e.v)] += 1;
        const auto a = static_cast<std::size_t>(e.u), b = static_cast<std::size_t>(e.v);
        const auto nn = static_cast<std::size_t>(n);
        if (a == b) {
            ++loops_;
            mult_[a * nn + a] += 1;
        } else {
            if (mult_[a * nn + b] == 0) {
                nbrs_[a].push_back(e.v);
                nbrs_[b].push_back(e.u);
            }
            mult_[a * nn + b] += 1;
            mult_[b * nn + a] += 1;
        }
    }
    for (auto& list : nbrs_) std::sort(list.begin(), list.end());
}

std::optional<int> Multigraph::regular_degree() const {
    if (n_ == 0) return std::nullopt;
    const int d = degree_.front();
    for (int x : degree_)
        if (x != d) return std::nullopt;
    return d;
}

Multigraph Multigraph::relabelled(const std::vector<int>& perm) const {
    if (static_cast<int>(perm.size()) != n_) throw InputError("permutation size mismatch");
    std::vector<Edge> out;
    out.reserve(edges_.size());
    for (const auto& e : edges_)
        out.push_back({perm[static_cast<std::size_t>(e.u)], perm[static_cast<std::size_t>(e.v)]});
    return Multigraph(n_, std::move(out));
}

Pairing sample_pairing(int n, int d, Philox& rng) {
    check_shape(n, d);
    const int dn = n * d;
    std::vector<int> points(static_cast<std::size_t>(dn));
    std::iota(points.begin(), points.end(), 0);
    for (int i = dn - 1; i > 0; --i) {
        const auto j = rng.uniform_below(static_cast<std::uint64_t>(i) + 1);
        std::swap(points[static_cast<std::size_t>(i)], points[j]);
    }
    std::vector<int> mates(static_cast<std::size_t>(dn));
    for (std::size_t i = 0; i < points.size(); i += 2) {
        mates[static_cast<std::size_t>(points[i])] = points[i + 1];
        mates[static_cast<std::size_t>(points[i + 1])] = points[i];
    }
    return Pairing(n, d, std::move(mates));
}

Pairing sample_pairing(int n, int d, std::uint64_t seed, std::uint64_t stream) {
    Philox rng(seed, stream);
    return sample_pairing(n, d, rng);
}

PairingEnumerator::PairingEnumerator(int n, int d) : n_(n), d_(d), points_(0) {
    check_shape(n, d);
    points_ = n * d;
    if (points_ > kMaxEnumerationPoints)
        throw GuardError("pairing enumeration refused: dn = " + std::to_string(points_) +
                         " exceeds the bound dn <= " + std::to_string(kMaxEnumerationPoints));
    mates_.assign(static_cast<std::size_t>(points_), -1);
}

void PairingEnumerator::complete() {
    int i = 0;
    while (true) {
        while (i < points_ && mates_[static_cast<std::size_t>(i)] != -1) ++i;
        if (i == points_) return;
        int j = i + 1;
        while (mates_[static_cast<std::size_t>(j)] != -1) ++j;
        mates_[static_cast<std::size_t>(i)] = j;
        mates_[static_cast<std::size_t>(j)] = i;
        stack_.emplace_back(i, j);
    }
}

bool PairingEnumerator::next() {
    if (done_) return false;
    if (!started_) {
        started_ = true;
        complete();
        return true;
    }
    while (!stack_.empty()) {
        auto [i, j] = stack_.back();
        stack_.pop_back();
        mates_[static_cast<std::size_t>(i)] = -1;
        mates_[static_cast<std::size_t>(j)] = -1;
        int next = j + 1;
        while (next < points_ && mates_[static_cast<std::size_t>(next)] != -1) ++next;
        if (next < points_) {
            mates_[static_cast<std::size_t>(i)] = next;
            mates_[static_cast<std::size_t>(next)] = i;
            stack_.emplace_back(i, next);
            complete();
            return true;
        }
    }
    done_ = true;
    return false;
}

Pairing PairingEnumerator::current() const { return Pairing(n_, d_, mates_); }

Multigraph to_multigraph(const Pairing& p) {
    std::vector<Edge> edges;
    edges.reserve(static_cast<std::size_t>(p.points() / 2));
    for (int i = 0; i < p.points(); ++i) {
        const int j = p.mate(i);
        if (i < j) edges.push_back({p.cell(i), p.cell(j)});
    }
    return Multigraph(p.n(), std::move(edges));
}

namespace {

// Depth-first extension of a simple path start -> ... -> v whose interior
// vertices all exceed `start`. Each closed cycle is reached twice (once per
// direction); keeping only first-step < last-step counts it once.
struct CycleWalker {
    const Multigraph& g;
    int m_max;
    std::vector<std::uint64_t>& counts;
    std::vector<char> on_path;
    int start = 0;
    int first = 0;

    void extend(int v, int length, std::uint64_t weight) {
        for (int w : g.neighbours(v)) {
            const auto mult = static_cast<std::uint64_t>(g.multiplicity(v, w));
            if (w == start) {
                if (length + 1 >= 3 && first < v) counts[static_cast<std::size_t>(length + 1)] += weight * mult;
                continue;
            }
            if (w < start || on_path[static_cast<std::size_t>(w)] || length + 1 >= m_max) continue;
            on_path[static_cast<std::size_t>(w)] = 1;
            extend(w, length + 1, weight * mult);
            on_path[static_cast<std::size_t>(w)] = 0;
        }
    }
};

}  // namespace

CycleCounts count_cycles(const Multigraph& g, int m_max) {
    if (m_max < 1) throw InputError("m_max must be >= 1");
    if (m_max > kMaxCycleLength)
        throw GuardError("cycle counting refused: m_max = " + std::to_string(m_max) +
                         " exceeds the bound m_max <= " + std::to_string(kMaxCycleLength));
    CycleCounts out;
    out.counts.assign(static_cast<std::size_t>(m_max) + 1, 0);
    for (int v = 0; v < g.n(); ++v) {
        out.counts[1] += static_cast<std::uint64_t>(g.multiplicity(v, v));
        if (m_max >= 2) {
            for (int w : g.neighbours(v)) {
                if (w <= v) continue;
                const auto mu = static_cast<std::uint64_t>(g.multiplicity(v, w));
                out.counts[2] += mu * (mu - 1) / 2;
            }
        }
    }
    if (m_max >= 3) {
        CycleWalker walker{g, m_max, out.counts, std::vector<char>(static_cast<std::size_t>(g.n()), 0)};
        for (int s = 0; s < g.n(); ++s) {
            walker.start = s;
            walker.on_path[static_cast<std::size_t>(s)] = 1;
            for (int f : g.neighbours(s)) {
                if (f < s) continue;
                walker.first = f;
                walker.on_path[static_cast<std::size_t>(f)] = 1;
                walker.extend(f, 1, static_cast<std::uint64_t>(g.multiplicity(s, f)));
                walker.on_path[static_cast<std::size_t>(f)] = 0;
            }
            walker.on_path[static_cast<std::size_t>(s)] = 0;
        }
    }
    return out;
}

bool is_simple(const Multigraph& g) {
    const CycleCounts c = count_cycles(g, 2);
    return c[1] == 0 && c[2] == 0;
}

void write_multigraph(std::ostream& out, const Multigraph& g) {
    int d = 0;
    if (auto r = g.regular_degree()) d = *r;
    out << g.n() << ' ' << d << '\n';
    for (const auto& e : g.edges()) out << e.u << ' ' << e.v << '\n';
}

Multigraph read_multigraph(std::istream& in) {
    std::string line;
    auto next_line = [&](std::string& dst) {
        while (std::getline(in, dst)) {
            const auto pos = dst.find_first_not_of(" \t\r");
            if (pos != std::string::npos && dst[pos] != '#') return true;
        }
        return false;
    };
    if (!next_line(line)) throw InputError("multigraph file is empty");
    int n = 0, d = 0;
    {
        std::istringstream header(line);
        if (!(header >> n >> d) || n < 0 || d < 0) throw InputError("bad multigraph header: '" + line + "'");
    }
    std::vector<Edge> edges;
    int lineno = 1;
    while (next_line(line)) {
        ++lineno;
        std::istringstream row(line);
        Edge e{};
        std::string extra;
        if (!(row >> e.u >> e.v) || (row >> extra))
            throw InputError("bad edge line " + std::to_string(lineno) + ": '" + line + "'");
        edges.push_back(e);
    }
    Multigraph g(n, std::move(edges));
    // A header degree of 0 means "not regular / unspecified".
    for (int v = 0; v < n && d > 0; ++v)
        if (g.degree(v) != d)
            throw InputError("vertex " + std::to_string(v) + " has degree " + std::to_string(g.degree(v)) +
                             ", header declares " + std::to_string(d));
    return g;
}

}  // namespace regchrom
