#pragma once

#include <vector>

#include "regchrom/pairing.hpp"
#include "regchrom/rational.hpp"

namespace regchrom {

inline constexpr int kMaxCountVertices = 24;
inline constexpr int kMaxSearchVertices = 40;

/// Y(g): the number of proper colourings with colours {0..k-1} in which every
/// colour class has exactly n/k vertices. Labelled colourings, so a colouring
/// and its relabellings are all counted. 0 whenever g has a loop.
/// Throws InfeasibleError if k does not divide n, GuardError if n > 24.
Integer count_balanced_colourings(const Multigraph& g, int k);

/// Early-exit variant of the counter; allows n <= 40.
bool exists_balanced_colouring(const Multigraph& g, int k);

/// Exact chromatic number (parallel edges act as single edges).
/// Throws DomainError on loops, GuardError if n > 40.
int chromatic_number(const Multigraph& g);

/// Whether g admits a proper colouring with at most k colours (n <= 40).
bool is_colourable(const Multigraph& g, int k);

}  // namespace regchrom
