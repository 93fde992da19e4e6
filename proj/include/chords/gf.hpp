#pragma once
#include <gmpxx.h>

#include <functional>
#include <optional>
#include <vector>

#include "chords/enumeration.hpp"
#include "chords/series.hpp"

namespace chords {

// How the variables of a core polynomial become series.
//   x_i     -> marked_transform(A, i)               (no peaks)
//   x_{i,j} -> marked_transform_diagram(A, i, j)    (peaks, i >= 1)
//   x_{0,j} -> [x^j] A, a polynomial in y           (peaks)
// A is the crossing-free series of the family, built at the order the core
// polynomial needs. The substituted sum is finished by x d/dx.
struct SubstitutionRules {
    Family family;
    bool peaks = false;
    std::function<TruncatedSeries(int order)> base;
    // Set: y is replaced by this value throughout (univariate output).
    std::optional<mpq_class> y_value;

    static SubstitutionRules defaults(const Family& family);
    static SubstitutionRules at_y(const Family& family, const mpq_class& y);
    // Throws std::invalid_argument naming the first variable without a rule.
    void check_covers(const CorePolynomial& core) const;
    // Order of A needed for a result exact through x^N.
    int base_order(const CorePolynomial& core, int N) const;
};

// [z^k] F(x, y, z) through x^N. k = 0 is the crossing-free series. Past
// core_poly_k_bound the core polynomial is truncated to cores on at most N
// vertices, which needs N <= small_core_vertex_bound.
TruncatedSeries gf_k(const Family& family, int k, int N);
// Terms of the k-core polynomial from cores on at most N vertices.
CorePolynomial truncated_core_polynomial(const Family& family, int k, int N);
TruncatedSeries gf_k_from_core_poly(const CorePolynomial& core, const SubstitutionRules& rules, int N);
// Core polynomial of (family, k), memoized across calls.
const CorePolynomial& cached_core_polynomial(const Family& family, int k);

// Number of matchings on 2m points by crossings: coefficient list in z.
std::vector<mpz_class> touchard_riordan(int m);

// Sums of [x^n] F_k(x, 1) over k <= k_max against brute force.
struct TotalsRow {
    int n = 0;
    mpz_class series_sum;
    mpz_class total;                           // all configurations on n vertices
    std::optional<mpz_class> brute_up_to_k;    // configurations with <= k_max crossings
    std::optional<long long> max_crossings;
    bool complete = false;  // k_max reaches the largest crossing number at n
    bool match = true;
};

struct TotalsReport {
    Family family;
    int N = 0;
    int k_max = 0;
    std::vector<TotalsRow> rows;
    bool ok() const;
};

TotalsReport verify_totals(const Family& family, int N, int k_max);

// Number of configurations of the family on n vertices (closed forms where
// known, otherwise brute force).
mpz_class total_configurations(const Family& family, int n);

}  // namespace chords
