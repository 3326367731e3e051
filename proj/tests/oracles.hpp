// Slow reference implementations used only by the tests. Everything here is
// written independently of the library internals so the two can disagree.
#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "urnnet/linalg.hpp"
#include "urnnet/rng.hpp"

namespace oracle {

// Reachability closure of a boolean adjacency relation (self-reachability
// included). Floyd-Warshall style, O(n^3).
std::vector<std::vector<bool>> transitive_closure(const std::vector<std::vector<bool>>& adj);

// Communication classes of the off-diagonal support of a weight matrix,
// computed from mutual reachability on the closure. Each class is sorted
// ascending; classes are ordered by smallest member.
std::vector<std::vector<std::size_t>> scc_partition(const urnnet::Mat& weights);

// gcd of the lengths of all simple directed cycles, found by exhaustive DFS.
// Suitable for n <= 10 or so. Returns 0 when the graph has no cycle.
unsigned simple_cycle_gcd(const std::vector<std::vector<std::size_t>>& out_edges,
                          std::size_t n);

// Determinant by cofactor expansion, O(n!). Keep n <= 9.
double det_cofactor(const urnnet::Mat& m);

// Monic characteristic polynomial coefficients c so that
// p(x) = x^n + c[0] x^(n-1) + ... + c[n-1], via the Faddeev-LeVerrier
// recurrence.
std::vector<double> char_poly(const urnnet::Mat& m);

// All eigenvalues via Durand-Kerner iteration on the characteristic
// polynomial. Reliable for n <= 6 with simple roots; multiple roots come
// back as nearby clusters.
std::vector<std::complex<double>> eigenvalues(const urnnet::Mat& m);

// Random row-stochastic matrix with zero diagonal whose support is strongly
// connected (a random Hamiltonian cycle plus extra edges).
urnnet::Mat random_scc(std::size_t n, urnnet::Xoshiro256pp& rng);

// Random row-stochastic matrix whose off-diagonal support is strongly
// connected and bipartite between the first ni agents and the remaining nj.
// With allow_self_weight the diagonal may be positive (support bipartiteness
// ignores the diagonal).
urnnet::Mat random_bipartite(std::size_t ni, std::size_t nj, urnnet::Xoshiro256pp& rng,
                             bool allow_self_weight = false);

// Random reducible matrix: agents are split into blocks, block k only points
// at blocks < k (plus internal edges), and rows are scaled to mixed row sums
// (some exactly 1, some below). Exercises the hierarchy decomposition.
urnnet::Mat random_reducible(std::size_t n, urnnet::Xoshiro256pp& rng);

}  // namespace oracle
