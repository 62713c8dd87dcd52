#pragma once

#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "regchrom/rational.hpp"

namespace regchrom {

inline constexpr int kMaxSingleDegree = 300;
inline constexpr int kMaxPairDegree = 120;
inline constexpr long kMaxSecondMomentTerms = 200000;

/// k x k colour count matrix of two balanced colourings: entry (p, q) times
/// n/k is the number of vertices coloured p by the first and q by the second.
class ColourCountMatrix {
public:
    /// Validates non-negativity and unit row and column sums (DomainError).
    ColourCountMatrix(int k, std::vector<Rational> entries);

    /// From integer cell counts with every row and column summing to n/k.
    static ColourCountMatrix from_counts(int k, int n, std::span<const int> counts);
    static ColourCountMatrix uniform(int k);
    static ColourCountMatrix identity(int k);

    int k() const noexcept { return k_; }
    const Rational& operator()(int p, int q) const {
        return entries_[static_cast<std::size_t>(p * k_ + q)];
    }
    const std::vector<Rational>& entries() const noexcept { return entries_; }

private:
    int k_;
    std::vector<Rational> entries_;
};

/// Coefficient of prod_v x_v^{c_v} in exp(sum over `edges` of x_u x_v), i.e.
/// the sum over edge multiplicities b with vertex degrees c of prod 1/b_e!.
/// Evaluated as (sum of multinomials S!/prod b_e!) / S! with S = sum(c)/2, by
/// dynamic programming over the edges keyed on residual degree vectors.
Rational coeff_exp_quadratic(int vertices, std::span<const std::pair<int, int>> edges,
                             std::span<const int> degrees);

/// [x_1^{c_1} ... x_k^{c_k}] exp(sum_{j<l} x_j x_l). Refuses sum(c) > 300.
Rational coeff_single(int k, std::span<const int> c);

/// [prod x_{p,q}^{c_{p,q}}] exp(1/2 sum_{p!=r, q!=s} x_{p,q} x_{r,s}); the
/// exponent of label (p, q) is c[p*k + q]. Refuses sum(c) > 120.
Rational coeff_pair(int k, std::span<const int> c);

/// Exact E[Y] over the pairing model P_{n,d}, Y the balanced k-colouring count.
Rational exact_expected_Y(int n, int d, int k);

/// Exact |T(M)|: triples (pairing, first colouring, second colouring) whose
/// colour count matrix is M.
Rational exact_T(const ColourCountMatrix& m, int n, int d);

/// Exact E[Y^2] as the sum over all admissible M of |T(M)| / (dn-1)!!.
Rational exact_second_moment(int n, int d, int k);

/// Visits every k x k non-negative integer matrix with all row and column
/// sums equal to `line_sum`, up to permutation of rows. `visit` receives the
/// row-major counts and the number of distinct row orderings it stands for.
/// Returns the number of representatives visited.
long for_each_count_matrix(int k, int line_sum,
                           const std::function<void(std::span<const int>, const Integer&)>& visit);

/// Colour types of a rooted oriented m-cycle: (k-1)^m + (k-1)(-1)^m.
Integer count_colour_types(int k, int m);

}  // namespace regchrom
