#pragma once

// Canonical networks on the 2-torus and seeded random generators used by the
// CLI, the tests and the acceptance suite.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "reticulate/core.hpp"

namespace reticulate::fixtures {

/// One node with a horizontal and a vertical self-loop; Q = I.
PeriodicNetwork square_grid(double weight = 1.0);

/// Two nodes joined by three edges at 120 degrees (hexagonal lattice quotient).
PeriodicNetwork honeycomb(double weight = 1.0);

/// Honeycomb topology with the second node off the Fermat point; unbalanced.
PeriodicNetwork skewed_honeycomb(double weight = 1.0);

/// One node with a single self-loop of class (1,1).
PeriodicNetwork diagonal_loop(double weight = 1.0);

/// A segment that does not close up; Q = 0.
PeriodicNetwork open_segment(double weight = 1.0);

/// Horizontal loop with a vertical dead-end stem; unbalanced at both stem ends.
PeriodicNetwork t_junction(double weight = 1.0, double stem = 0.4);

/// Chain of k rhombi with 30 degree edges along y = 1/2, each closed by a vertical
/// edge through the torus. Balanced with unit weights, valency 4.
PeriodicNetwork diamond_chain(int k);

/// m×m nodes with horizontal, vertical and one diagonal edge per node.
PeriodicNetwork triangulated_grid(int m);

/// Horizontal loops at y = 1/4 (weight w1) and y = 3/4 (weight w2).
PeriodicNetwork two_disjoint_loops(double w1 = 1.0, double w2 = 2.0);

/// Horizontal segment of length 1 - delta; delta = 0 closes it into a loop.
PeriodicNetwork gap_segment(double delta, double weight = 1.0);

/// Fixture by name; std::nullopt for unknown names.
std::optional<PeriodicNetwork> by_name(const std::string& name);
std::vector<std::string> names();

/// Random nodes in [0,1)^2 and random edges with crossing vectors in {-1,0,1}^2
/// and weights in [w_lo, w_hi]. Not planarized.
PeriodicNetwork random_network(std::uint64_t seed, int min_nodes = 3, int max_nodes = 12, int min_edges = 4,
                               int max_edges = 20, double w_lo = 0.1, double w_hi = 2.0);

/// Union of closed geodesics with random small classes and offsets, optionally
/// with a translated honeycomb. Balanced with unit weights once planarized.
PeriodicNetwork random_geodesic_union(std::uint64_t seed);

}  // namespace reticulate::fixtures
