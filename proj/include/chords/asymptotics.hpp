#pragma once
#include <gmpxx.h>

#include <boost/multiprecision/mpfr.hpp>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "chords/chord_system.hpp"
#include "chords/enumeration.hpp"

namespace chords {

using Real = boost::multiprecision::mpfr_float;

// Working precision (decimal digits) and series order for truncated
// equations. Read from CHORDS_PRECISION and CHORDS_SERIES_ORDER when set.
struct NumericConfig {
    unsigned digits = 60;
    int series_order = 400;
    static NumericConfig from_env();
};

// The default precision of mpfr_float is process-wide, so every numeric
// computation holds this guard: it serializes callers and restores the
// previous precision on exit.
class PrecisionScope {
public:
    explicit PrecisionScope(unsigned digits);
    ~PrecisionScope();
    PrecisionScope(const PrecisionScope&) = delete;
    PrecisionScope& operator=(const PrecisionScope&) = delete;

private:
    std::unique_lock<std::recursive_mutex> lock_;
    unsigned saved_;
};

std::string real_str(const Real& r);
Real to_real(const mpq_class& q);

// [x^n] ~ Lambda n^alpha rho^-n on n = 0 mod period.
struct AsymptoticEstimate {
    Family family;
    int k = 0;
    Real Lambda;
    mpq_class alpha;
    Real rho;
    Real rho_inverse;
    int period = 1;
    // Lambda period^alpha: the constant in terms of m = n / period.
    Real Lambda_per_period;
    std::string provenance;
    std::map<std::string, Real> residuals;

    Real estimate(long n) const;
    nlohmann::json json() const;
};

// Sigma over i > 1 of (2i - 3) * n_i (all j for diagram profiles).
int potential(const RegionProfile& profile);
int potential(const Monomial& monomial);

struct MaximalCores {
    std::vector<ChordSystem> cores;
    int phi_max = 0;
};
MaximalCores maximal_cores(const Family& family, int k);

// Square-root singularity of the crossing-free series at y = 1:
// A(x) = value - coeff sqrt(1 - x/rho) + O(1 - x/rho).
struct SingularExpansion {
    Family family;
    Real rho;
    Real value;
    Real coeff;
    int period = 1;
    std::string provenance;
    std::map<std::string, Real> residuals;
};
SingularExpansion base_singularity(const Family& family);

// Transfer of a core polynomial through the singular expansion of its base:
// Lambda sums over the cores of maximal potential.
AsymptoticEstimate core_sum_asymptotics(const CorePolynomial& core, const SingularExpansion& base);

// k = 0 gives the crossing-free estimate (alpha = -3/2).
AsymptoticEstimate crossing_free_asymptotics(const Family& family);
// Matching, Partition, Diagram, Hyperchord with k >= 1.
AsymptoticEstimate closed_form_asymptotics(const Family& family, int k);

struct RestrictedConstants {
    SizeSet S;
    Real tau;
    Real rho;
    Real alpha;
    Real beta;
    std::string provenance;
    std::map<std::string, Real> residuals;
    nlohmann::json json() const;
};

// Sigma (s-1) tau^s = 1, rho = tau / Sigma s tau^s, alpha = 1 + Sigma tau^s,
// beta = sqrt(2 (Sigma s tau^s)^3 / Sigma s(s-1) tau^s).
RestrictedConstants restricted_partition_constants(const SizeSet& S);
AsymptoticEstimate restricted_partition_asymptotics(const SizeSet& S, int k);

struct HyperchordConstants {
    Real rho;
    Real h0;
    Real h1;
    mpq_class lo, hi;  // isolating interval of rho
    std::map<std::string, Real> residuals;
    nlohmann::json json() const;
};
// Smallest positive root of 256x^4 - 768x^3 + 736x^2 - 336x + 5, then the
// double root h0 of the cubic for H at that point and the Puiseux coefficient.
HyperchordConstants hyperchord_constants();
// Restricted sizes: tau solves 1 + C(tau) = tau C'(tau) on the truncated
// connected series C, rho = tau / (1 + C(tau)), alpha = tau / rho.
RestrictedConstants hyperchord_constants(const SizeSet& S, int N);

// Mean and variance per vertex of the block (edge) count.
struct BlockLaw {
    Real mu;
    Real sigma2;
    std::optional<mpq_class> mu_exact, sigma2_exact;
    Real rho, rho_d1, rho_d2;  // rho(1), rho'(1), rho''(1)
};
BlockLaw block_law_constants(const Family& family);

struct RatioRow {
    long m = 0;
    long n = 0;
    Real ratio;
};
struct RatioReport {
    AsymptoticEstimate estimate;
    std::vector<RatioRow> rows;
    bool improving = false;  // |ratio - 1| never increases along the rows
    Real final_error;
};
// Rows at m = 20, 40, ..., m_max where n = period * m.
RatioReport empirical_ratio_check(const Family& family, int k, int m_max);

}  // namespace chords
