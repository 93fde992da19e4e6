#pragma once
#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "chords/chord_system.hpp"

namespace chords {

// Counts of crossing-connected configurations keyed by (k, m) and (k, n).
struct ConnectedTable {
    Family family;
    int k_max = 0;
    std::map<std::pair<int, int>, std::uint64_t> by_blocks;
    std::map<std::pair<int, int>, std::uint64_t> by_vertices;

    std::uint64_t cell(int k, int size, bool vertices = false) const;
    std::uint64_t total(int k) const;
    // Header k,size,count.
    std::string csv(bool vertices = false) const;
    nlohmann::json json() const;
};

// Every crossing-connected configuration with 1..k_max crossings, sorted by
// (crossings, blocks, labels). Supports Matching, Partition(Restricted), Diagram.
std::vector<ChordSystem> enumerate_connected(const Family& family, int k_max);
ConnectedTable connected_table(const Family& family, int k_max);

// Largest k accepted by enumerate_cores, and the vertex bound of a k-core.
int core_k_bound(const Family& family);
// Largest k with a core polynomial: matchings go past core enumeration via
// the tree construction.
int core_poly_k_bound(const Family& family);
int core_vertex_bound(const Family& family, int k);
// All rooted k-cores, sorted by (n, labels).
std::vector<ChordSystem> enumerate_cores(const Family& family, int k);
// Every core of any crossing number on at most max_vertices vertices; the
// cap is small_core_vertex_bound (16 matching, 12 partition, 8 diagram).
int small_core_vertex_bound(const Family& family);
std::vector<ChordSystem> enumerate_small_cores(const Family& family, int max_vertices);

// Monomial of a core polynomial: x_{i,j} exponents plus the block count.
struct Monomial {
    std::map<std::pair<int, int>, int> x;
    int y = 0;

    long long weight() const;  // n(K) = sum of i * exponent
    // Ordered by (weight, y, exponent list).
    bool operator<(const Monomial& o) const;
    bool operator==(const Monomial& o) const = default;
};

struct CorePolynomial {
    Family family;
    int k = 0;
    std::map<Monomial, mpq_class> terms;

    // Variables print as x<i> for matching and partition families and as
    // x<i>_<j> for diagram families; y carries the block count.
    std::string str() const;
    // Inverse of str(); with_y false drops the y exponent check.
    static CorePolynomial parse(const Family& family, int k, const std::string& text);
    // Sum over terms of n(K) * coefficient: the number of rooted cores.
    mpq_class rooted_count() const;
    bool operator==(const CorePolynomial& o) const { return terms == o.terms; }
};

Monomial monomial_of(const ChordSystem& core, bool with_y);
CorePolynomial core_polynomial(const Family& family, int k);
CorePolynomial core_polynomial_from(const Family& family, int k, const std::vector<ChordSystem>& cores);

// Trees with n_i (gaps) and p_j (internal vertices with 2j leaves).
struct TreePolynomial {
    // key: (n_1..n_{p+1}, p_2..p_{p+1}) with trailing zeros removed
    std::map<std::pair<std::vector<int>, std::vector<int>>, mpz_class> terms;
    int p = 0;
    std::string str() const;
};

TreePolynomial tree_poly(int p);
// Matching core polynomial assembled from trees and connected counts.
CorePolynomial core_polynomial_via_trees(int k);

}  // namespace chords
