#include "chords/asymptotics.hpp"

#include <cstdlib>
#include <stdexcept>
#include <tuple>

#include "chords/gf.hpp"
#include "chords/series.hpp"

namespace chords {

namespace {

std::recursive_mutex& precision_mutex() {
    static std::recursive_mutex m;
    return m;
}

template <class T>
T ipow_t(T b, long e) {
    T r = 1;
    if (e < 0) {
        b = T(1) / b;
        e = -e;
    }
    while (e) {
        if (e & 1) r *= b;
        b *= b;
        e >>= 1;
    }
    return r;
}

Real ipow(const Real& b, long e) { return ipow_t<Real>(b, e); }
mpq_class ipow(const mpq_class& b, long e) { return ipow_t<mpq_class>(b, e); }

Real pi_const() {
    Real p;
    mpfr_const_pi(p.backend().data(), MPFR_RNDN);
    return p;
}

// Gamma(h / 2) for h >= 1.
Real gamma_half(int h) { return boost::multiprecision::tgamma(Real(h) / 2); }

// m!! for odd m >= -1.
Real odd_double_factorial(int m) {
    Real r = 1;
    for (int v = m; v > 1; v -= 2) r *= v;
    return r;
}

Real factorial(int m) {
    Real r = 1;
    for (int v = 2; v <= m; ++v) r *= v;
    return r;
}

Real sqrt2() { return boost::multiprecision::sqrt(Real(2)); }

// Polynomial in (x, y, a) with rational coefficients.
struct Curve {
    struct Term {
        mpq_class c;
        int dx, dy, da;
    };
    std::vector<Term> terms;

    template <class T>
    T d(int ox, int oy, int oa, const T& x, const T& y, const T& a) const {
        auto ff = [](int p, int o) {
            long r = 1;
            for (int t = 0; t < o; ++t) r *= p - t;
            return r;
        };
        T s = 0;
        for (const auto& t : terms) {
            if (t.dx < ox || t.dy < oy || t.da < oa) continue;
            T c;
            if constexpr (std::is_same_v<T, Real>) c = to_real(t.c);
            else c = t.c;
            c *= ff(t.dx, ox) * ff(t.dy, oy) * ff(t.da, oa);
            s += c * ipow(x, t.dx - ox) * ipow(y, t.dy - oy) * ipow(a, t.da - oa);
        }
        return s;
    }
};

// x a^2 + (x(y - 1) - 1) a + 1
const Curve& partition_curve() {
    static const Curve c{{{1, 1, 0, 2}, {1, 1, 1, 1}, {-1, 1, 0, 1}, {-1, 0, 0, 1}, {1, 0, 0, 0}}};
    return c;
}

// y a^2 + (x^2(1+y) - x(1+2y) - 2y) a + x(1+2y) + y
const Curve& diagram_curve() {
    static const Curve c{{{1, 0, 1, 2},
                          {1, 2, 0, 1},
                          {1, 2, 1, 1},
                          {-1, 1, 0, 1},
                          {-2, 1, 1, 1},
                          {-2, 0, 1, 1},
                          {1, 1, 0, 0},
                          {2, 1, 1, 0},
                          {1, 0, 1, 0}}};
    return c;
}

// Cubic satisfied by the crossing-free hyperchord series.
const Curve& hyperchord_curve() {
    static const Curve c = [] {
        Curve k;
        auto add = [&](int da, std::initializer_list<std::tuple<long, int, int>> ts) {
            for (auto [c, dx, dy] : ts) k.terms.push_back({mpq_class(c), dx, dy, da});
        };
        add(0, {{-2, 2, 0}, {-1, 1, 0}, {2, 1, 3}, {1, 0, 2}, {1, 2, 4}, {-7, 2, 1}, {-7, 2, 2}, {-1, 2, 3}, {-3, 1, 1}});
        add(1, {{-2, 3, 0}, {-2, 3, 4}, {-8, 3, 1}, {2, 1, 0}, {-3, 0, 2}, {-12, 3, 2}, {-8, 3, 3}, {6, 1, 1}, {-1, 2, 4},
                {1, 2, 0}, {4, 2, 1}, {4, 2, 2}, {-4, 1, 3}});
        add(2, {{1, 2, 3}, {1, 2, 0}, {3, 2, 2}, {-1, 1, 0}, {-3, 1, 1}, {2, 1, 3}, {3, 2, 1}, {3, 0, 2}});
        add(3, {{-1, 0, 2}});
        return k;
    }();
    return c;
}

// Polynomial in (u, C): exponent pair to coefficient.
using BiPoly = std::map<std::pair<int, int>, mpq_class>;

BiPoly bi(std::initializer_list<std::tuple<long, int, int>> ts) {
    BiPoly p;
    for (auto [c, du, dc] : ts) p[{du, dc}] += c;
    return p;
}

BiPoly operator*(const BiPoly& a, const BiPoly& b) {
    BiPoly r;
    for (const auto& [ea, ca] : a)
        for (const auto& [eb, cb] : b) r[{ea.first + eb.first, ea.second + eb.second}] += ca * cb;
    return r;
}

BiPoly operator-(BiPoly a, const BiPoly& b) {
    for (const auto& [e, c] : b) a[e] -= c;
    return a;
}

BiPoly bipow(const BiPoly& b, int e) {
    BiPoly r = bi({{1, 0, 0}});
    for (int i = 0; i < e; ++i) r = r * b;
    return r;
}

// Algebraic equation F(u, C) = 0 of the connected series at y = 1, known
// for q-uniform and q-multiple sizes (q >= 3).
std::optional<Curve> connected_curve(const SizeSet& S) {
    BiPoly F;
    BiPoly u = bi({{1, 1, 0}}), C = bi({{1, 0, 1}}), inner = bi({{1, 0, 2}, {1, 0, 1}, {-1, 1, 0}});
    if (S.is_finite() && S.finite.size() == 1 && S.finite[0] >= 3) {
        int q = S.finite[0];
        F = (C - u) * bipow(u, q - 1) - C * bipow(inner, q - 1);
    } else if (S.finite.empty() && S.bases.size() == 1 && S.bases[0] == S.period && S.period >= 3) {
        int q = S.period;
        BiPoly quintic = bi({{1, 0, 5}, {2, 0, 4}, {-1, 1, 4}, {1, 0, 3}, {-3, 1, 3}, {2, 2, 2}, {-2, 1, 2}, {2, 2, 1}, {-1, 3, 0}});
        F = (C - u) * bipow(u, q) - bipow(inner, q - 2) * quintic;
    } else {
        return std::nullopt;
    }
    Curve k;
    for (const auto& [e, c] : F)
        if (c != 0) k.terms.push_back({c, e.first, 0, e.second});
    return k;
}

// rho(y) along F = F_a = 0 through (x, 1, a): first and second derivative.
template <class T>
std::pair<T, T> curve_derivatives(const Curve& F, const T& x, const T& a) {
    T y = 1;
    T Fx = F.d(1, 0, 0, x, y, a), Fy = F.d(0, 1, 0, x, y, a);
    T Fxx = F.d(2, 0, 0, x, y, a), Fyy = F.d(0, 2, 0, x, y, a), Faa = F.d(0, 0, 2, x, y, a);
    T Fxy = F.d(1, 1, 0, x, y, a), Fxa = F.d(1, 0, 1, x, y, a), Fya = F.d(0, 1, 1, x, y, a);
    T x1 = -Fy / Fx;
    T a1 = -(Fxa * x1 + Fya) / Faa;
    T x2 = -(Fxx * x1 * x1 + Faa * a1 * a1 + Fyy + 2 * Fxa * x1 * a1 + 2 * Fxy * x1 + 2 * Fya * a1) / Fx;
    return {x1, x2};
}

mpq_class r_poly(const mpq_class& x) { return (((256 * x - 768) * x + 736) * x - 336) * x + 5; }
Real r_poly(const Real& x) { return (((256 * x - 768) * x + 736) * x - 336) * x + 5; }
Real r_poly_d(const Real& x) { return ((1024 * x - 2304) * x + 1472) * x - 336; }

// Sigma tau^s, Sigma s tau^s, Sigma s(s-1) tau^s over S.
struct PowerSums {
    Real g0, g1, g2;
};

PowerSums power_sums(const SizeSet& S, const Real& t) {
    PowerSums r{0, 0, 0};
    for (int s : S.finite) {
        Real p = ipow(t, s);
        r.g0 += p;
        r.g1 += s * p;
        r.g2 += static_cast<long>(s) * (s - 1) * p;
    }
    int p = S.period;
    for (int b : S.bases) {
        // G = t^b / (1 - t^p); g1 = t G', g2 = t^2 G''
        Real u = ipow(t, b), u1 = b * ipow(t, b - 1), u2 = static_cast<long>(b) * (b - 1) * ipow(t, b - 2);
        Real v = 1 / (1 - ipow(t, p));
        Real v1 = p * ipow(t, p - 1) * v * v;
        Real v2 = static_cast<long>(p) * (p - 1) * ipow(t, p - 2) * v * v + 2 * static_cast<long>(p) * p * ipow(t, 2 * p - 2) * v * v * v;
        r.g0 += u * v;
        r.g1 += t * (u1 * v + u * v1);
        r.g2 += t * t * (u2 * v + 2 * u1 * v1 + u * v2);
    }
    return r;
}

CorePolynomial hyperchord_one_core(const Family& f) {
    // Two crossing chords: four regions with one arc each.
    CorePolynomial c;
    c.family = f;
    c.k = 1;
    Monomial m;
    m.x[{1, 0}] = 4;
    m.y = 2;
    c.terms[m] = mpq_class(1, 4);
    return c;
}

const CorePolynomial& core_for(const Family& f, int k) {
    if (f.is_hyperchord_like()) {
        if (k != 1 || !f.allows_size(2)) throw std::invalid_argument("hyperchord cores are available for k = 1 only");
        static const CorePolynomial h = hyperchord_one_core(Family::hyperchord());
        static std::map<std::string, CorePolynomial> by;
        static std::mutex mu;
        if (f == Family::hyperchord()) return h;
        std::lock_guard<std::mutex> lock(mu);
        auto it = by.find(f.str());
        if (it == by.end()) it = by.emplace(f.str(), hyperchord_one_core(f)).first;
        return it->second;
    }
    return cached_core_polynomial(f, k);
}

// The four rooted k-cores of maximal potential built from chords only.
CorePolynomial maximal_chord_cores(const Family& f, int k) {
    CorePolynomial c;
    c.family = f;
    c.k = k;
    Monomial m;
    m.x[{1, 0}] = 3 * k;
    m.x[{k, 0}] = 1;
    m.y = 2 * k;
    c.terms[m] = mpq_class(1, k);
    return c;
}

void finish(AsymptoticEstimate& e) {
    e.rho_inverse = 1 / e.rho;
    e.Lambda_per_period = e.Lambda * boost::multiprecision::pow(Real(e.period), to_real(e.alpha));
    e.residuals["rho_times_inverse"] = boost::multiprecision::abs(e.rho * e.rho_inverse - 1);
}

}  // namespace

NumericConfig NumericConfig::from_env() {
    NumericConfig c;
    if (const char* p = std::getenv("CHORDS_PRECISION")) {
        int v = std::stoi(p);
        if (v < 20 || v > 5000) throw std::invalid_argument("CHORDS_PRECISION must lie in [20, 5000]");
        c.digits = static_cast<unsigned>(v);
    }
    if (const char* p = std::getenv("CHORDS_SERIES_ORDER")) {
        int v = std::stoi(p);
        if (v < 50) throw std::invalid_argument("CHORDS_SERIES_ORDER must be at least 50");
        c.series_order = v;
    }
    return c;
}

PrecisionScope::PrecisionScope(unsigned digits) : lock_(precision_mutex()), saved_(Real::default_precision()) {
    Real::default_precision(digits);
}

PrecisionScope::~PrecisionScope() { Real::default_precision(saved_); }

std::string real_str(const Real& r) { return r.str(0, std::ios_base::scientific); }

Real to_real(const mpq_class& q) {
    Real r;
    mpfr_set_q(r.backend().data(), q.get_mpq_t(), MPFR_RNDN);
    return r;
}

Real AsymptoticEstimate::estimate(long n) const {
    using boost::multiprecision::exp;
    using boost::multiprecision::log;
    Real ln = log(Real(n));
    return Lambda * exp(to_real(alpha) * ln - n * log(rho));
}

nlohmann::json AsymptoticEstimate::json() const {
    nlohmann::json r;
    for (const auto& [name, v] : residuals) r[name] = real_str(v);
    return {{"family", family.str()},
            {"k", k},
            {"Lambda", real_str(Lambda)},
            {"Lambda_per_period", real_str(Lambda_per_period)},
            {"alpha", alpha.get_str()},
            {"rho", real_str(rho)},
            {"rho_inverse", real_str(rho_inverse)},
            {"period", period},
            {"residuals", r},
            {"provenance", provenance}};
}

nlohmann::json RestrictedConstants::json() const {
    nlohmann::json r;
    for (const auto& [name, v] : residuals) r[name] = real_str(v);
    return {{"S", S.str()},           {"tau", real_str(tau)},    {"rho", real_str(rho)},
            {"rho_inverse", real_str(1 / rho)}, {"alpha", real_str(alpha)}, {"beta", real_str(beta)},
            {"residuals", r},         {"provenance", provenance}};
}

nlohmann::json HyperchordConstants::json() const {
    nlohmann::json r;
    for (const auto& [name, v] : residuals) r[name] = real_str(v);
    return {{"rho", real_str(rho)},
            {"rho_inverse", real_str(1 / rho)},
            {"h0", real_str(h0)},
            {"h1", real_str(h1)},
            {"interval", {lo.get_str(), hi.get_str()}},
            {"residuals", r},
            {"provenance", "polynomial-root"}};
}

int potential(const RegionProfile& profile) {
    int phi = 0;
    for (const auto& [ij, n] : profile.counts)
        if (ij.first > 1) phi += (2 * ij.first - 3) * n;
    return phi;
}

int potential(const Monomial& monomial) {
    int phi = 0;
    for (const auto& [ij, e] : monomial.x)
        if (ij.first > 1) phi += (2 * ij.first - 3) * e;
    return phi;
}

MaximalCores maximal_cores(const Family& family, int k) {
    MaximalCores out;
    out.phi_max = -1;
    for (auto& core : enumerate_cores(family, k)) {
        int phi = potential(region_profile(core));
        if (phi > out.phi_max) {
            out.phi_max = phi;
            out.cores.clear();
        }
        if (phi == out.phi_max) out.cores.push_back(std::move(core));
    }
    if (out.phi_max < 0) throw std::invalid_argument("no cores for " + family.str() + " with k = " + std::to_string(k));
    return out;
}

SingularExpansion base_singularity(const Family& family) {
    PrecisionScope scope(NumericConfig::from_env().digits);
    SingularExpansion s;
    s.family = family;
    switch (family.tag) {
        case FamilyTag::Matching:
            s.rho = Real(1) / 2;
            s.value = 2;
            s.coeff = 2 * sqrt2();
            s.period = 2;
            s.provenance = "closed-form";
            break;
        case FamilyTag::Partition:
            s.rho = Real(1) / 4;
            s.value = 2;
            s.coeff = 2;
            s.provenance = "closed-form";
            break;
        case FamilyTag::PartitionRestricted: {
            auto c = restricted_partition_constants(family.S);
            s.rho = c.rho;
            s.value = c.alpha;
            s.coeff = c.beta;
            s.period = family.S.gcd();
            s.provenance = c.provenance;
            s.residuals = c.residuals;
            break;
        }
        case FamilyTag::Diagram:
            s.rho = (3 - 2 * sqrt2()) / 2;
            s.value = -1 + 3 * sqrt2() / 2;
            s.coeff = boost::multiprecision::sqrt(-140 + 99 * sqrt2()) / 2;
            s.provenance = "closed-form";
            s.residuals["curve"] = boost::multiprecision::abs(diagram_curve().d(0, 0, 0, s.rho, Real(1), s.value));
            break;
        case FamilyTag::Hyperchord: {
            auto c = hyperchord_constants();
            s.rho = c.rho;
            s.value = c.h0;
            s.coeff = c.h1;
            s.provenance = "polynomial-root";
            s.residuals = c.residuals;
            break;
        }
        case FamilyTag::HyperchordRestricted: {
            auto c = hyperchord_constants(family.S, NumericConfig::from_env().series_order);
            s.rho = c.rho;
            s.value = c.alpha;
            s.coeff = c.beta;
            s.provenance = c.provenance;
            s.residuals = c.residuals;
            break;
        }
    }
    return s;
}

AsymptoticEstimate core_sum_asymptotics(const CorePolynomial& core, const SingularExpansion& base) {
    PrecisionScope scope(NumericConfig::from_env().digits);
    bool peaks = core.family.has_peaks();
    const Real& rho = base.rho;

    // Monomials at y = 1 and their potentials.
    std::map<std::map<std::pair<int, int>, int>, mpq_class> terms;
    int phi_max = -1, top = 0;
    for (const auto& [mono, coef] : core.terms) {
        terms[mono.x] += coef;
        phi_max = std::max(phi_max, potential(mono));
        for (const auto& [ij, e] : mono.x) top = std::max(top, ij.first + ij.second + 1);
    }
    if (terms.empty()) throw std::invalid_argument("empty core polynomial");
    std::vector<Real> head;
    if (peaks) {
        auto a = crossing_free_series(core.family, top, mpq_class(1));
        for (int n = 0; n <= top; ++n) head.push_back(to_real(a.coeff(n).at(0)));
    }

    // Near rho a slot is value - c X (i <= 1) or sigma X^(3 - 2i) (i >= 2),
    // with X = sqrt(1 - x / rho).
    auto value = [&](int i, int j) -> Real {
        if (!peaks) return rho * base.value;
        if (i == 0) return head.at(j);
        Real poly = 0;
        for (int n = 0; n <= 1 + j; ++n) poly += head[n] * ipow(rho, n);
        return (base.value - poly) / ipow(rho, 1 + j);
    };
    auto slope = [&](int j) -> Real { return peaks ? base.coeff / ipow(rho, 1 + j) : rho * base.coeff; };
    auto sigma = [&](int i, int j) -> Real {
        Real r = base.coeff * odd_double_factorial(2 * i - 5) / (factorial(i - 1) * ipow(Real(2), i - 1));
        return peaks ? r / ipow(rho, i + j) : r * ipow(rho, i);
    };

    AsymptoticEstimate e;
    e.family = core.family;
    e.k = core.k;
    e.rho = rho;
    e.period = base.period;
    Real sum = 0;
    int maximal = 0;
    if (phi_max > 0) {
        for (const auto& [x, coef] : terms) {
            Monomial m;
            m.x = x;
            if (potential(m) != phi_max) continue;
            ++maximal;
            Real z = to_real(coef);
            for (const auto& [ij, ex] : x) z *= ipow(ij.first >= 2 ? sigma(ij.first, ij.second) : value(ij.first, ij.second), ex);
            sum += z;
        }
        Real h = Real(phi_max) / 2;
        e.Lambda = base.period * h / boost::multiprecision::tgamma(h + 1) * sum;
        e.alpha = mpq_class(phi_max, 2);
    } else {
        // Every slot is analytic at rho; the singular term comes from x d/dx.
        for (const auto& [x, coef] : terms) {
            ++maximal;
            for (const auto& [ij, ex] : x) {
                if (ij.first != 1) continue;
                Real z = to_real(coef) * ex * slope(ij.second) / 2 * ipow(value(1, ij.second), ex - 1);
                for (const auto& [kl, ey] : x)
                    if (kl != ij) z *= ipow(value(kl.first, kl.second), ey);
                sum += z;
            }
        }
        e.Lambda = base.period * sum / gamma_half(1);
        e.alpha = mpq_class(-1, 2);
    }
    e.provenance = "core-sum over " + std::to_string(maximal) + " maximal core monomials; singularity " + base.provenance;
    e.residuals = base.residuals;
    finish(e);
    return e;
}

AsymptoticEstimate crossing_free_asymptotics(const Family& family) {
    PrecisionScope scope(NumericConfig::from_env().digits);
    SingularExpansion b = base_singularity(family);
    AsymptoticEstimate e;
    e.family = family;
    e.k = 0;
    e.rho = b.rho;
    e.period = b.period;
    e.alpha = mpq_class(-3, 2);
    // [x^n] -c X = c / (2 sqrt(pi)) n^(-3/2) rho^-n
    e.Lambda = b.period * b.coeff / (2 * boost::multiprecision::sqrt(pi_const()));
    e.provenance = b.provenance;
    e.residuals = b.residuals;
    finish(e);
    return e;
}

AsymptoticEstimate closed_form_asymptotics(const Family& family, int k) {
    if (k < 1) throw std::invalid_argument("k = 0 has no core; use crossing_free_asymptotics");
    PrecisionScope scope(NumericConfig::from_env().digits);
    AsymptoticEstimate e;
    e.family = family;
    e.k = k;
    e.alpha = mpq_class(2 * k - 3, 2);
    Real common = odd_double_factorial(2 * k - 3) / (factorial(k) * gamma_half(2 * k - 1));
    switch (family.tag) {
        case FamilyTag::Matching:
            e.rho = Real(1) / 2;
            e.period = 2;
            e.Lambda = sqrt2() * common / ipow(Real(4), k - 1);
            e.provenance = "closed-form";
            break;
        case FamilyTag::Partition:
            // Maximal cores are the four matching cores with tau = 1/2, rho = 1/4.
            e.rho = Real(1) / 4;
            e.Lambda = common / ipow(Real(2), 6 * k - 1);
            e.provenance = "closed-form";
            break;
        case FamilyTag::Diagram: {
            // Four maximal cores x1_0^(3k) x_{k,0} / k; x1_0 evaluates to sqrt2 - 1 at rho.
            SingularExpansion b = base_singularity(family);
            e.rho = b.rho;
            e.Lambda = common * ipow(sqrt2() - 1, k) * b.coeff;
            e.provenance = "closed-form";
            e.residuals = b.residuals;
            break;
        }
        case FamilyTag::Hyperchord: {
            // Only the chord-only maximal cores are used: the k-cores of
            // hyperchords are not enumerated.
            CorePolynomial c = k == 1 ? core_for(family, 1) : maximal_chord_cores(family, k);
            auto r = core_sum_asymptotics(c, base_singularity(family));
            r.provenance = "core-sum over the chord-only maximal cores; singularity polynomial-root";
            return r;
        }
        case FamilyTag::PartitionRestricted:
            return restricted_partition_asymptotics(family.S, k);
        default:
            throw std::invalid_argument("no closed form for " + family.str());
    }
    finish(e);
    return e;
}

RestrictedConstants restricted_partition_constants(const SizeSet& S) {
    if (S == SizeSet::of({1})) throw std::invalid_argument("S = {1} has no crossings and no singularity");
    PrecisionScope scope(NumericConfig::from_env().digits);
    auto f = [&](const Real& t) -> Real {
        PowerSums p = power_sums(S, t);
        return p.g1 - p.g0 - 1;
    };
    // f increases on (0, sup); sup is 1 for infinite S.
    Real lo = 0, hi = 1;
    if (S.is_finite()) {
        while (f(hi) < 0) hi *= 2;
    } else {
        hi = Real(1) / 2;
        while (f(hi) < 0) hi = (hi + 1) / 2;
    }
    for (int it = 0; it < 80; ++it) {
        Real mid = (lo + hi) / 2;
        (f(mid) < 0 ? lo : hi) = mid;
    }
    Real t = (lo + hi) / 2;
    for (int it = 0; it < 8; ++it) {
        PowerSums p = power_sums(S, t);
        t -= (p.g1 - p.g0 - 1) / (p.g2 / t);
    }
    PowerSums p = power_sums(S, t);
    RestrictedConstants c;
    c.S = S;
    c.tau = t;
    c.rho = t / p.g1;
    c.alpha = 1 + p.g0;
    c.beta = boost::multiprecision::sqrt(2 * p.g1 * p.g1 * p.g1 / p.g2);
    c.provenance = S.is_finite() ? "polynomial-root" : "polynomial-root (rational-function sums)";
    c.residuals["equation"] = boost::multiprecision::abs(p.g1 - p.g0 - 1);
    c.residuals["rho"] = boost::multiprecision::abs(c.rho * p.g1 - t);
    c.residuals["alpha"] = boost::multiprecision::abs(c.alpha - t / c.rho);
    return c;
}

AsymptoticEstimate restricted_partition_asymptotics(const SizeSet& S, int k) {
    if (k < 1) throw std::invalid_argument("k must be at least 1");
    Family f = Family::partition(S);
    const CorePolynomial& core = cached_core_polynomial(f, k);
    if (core.terms.empty()) throw std::invalid_argument(f.str() + " has no cores with k = " + std::to_string(k));
    return core_sum_asymptotics(core, base_singularity(f));
}

HyperchordConstants hyperchord_constants() {
    PrecisionScope scope(NumericConfig::from_env().digits);
    HyperchordConstants c;
    c.lo = 0;
    c.hi = mpq_class(1, 10);
    if (sgn(r_poly(c.lo)) <= 0 || sgn(r_poly(c.hi)) >= 0) throw std::logic_error("root of R not bracketed");
    const mpq_class width = mpq_class(1) / mpz_class("10000000000000");
    while (c.hi - c.lo >= width) {
        mpq_class mid = (c.lo + c.hi) / 2;
        (sgn(r_poly(mid)) > 0 ? c.lo : c.hi) = mid;
    }
    Real x = to_real((c.lo + c.hi) / 2);
    for (int it = 0; it < 10; ++it) x -= r_poly(x) / r_poly_d(x);
    c.rho = x;

    // h0: root of P_H at rho closest to a root of P.
    const Curve& P = hyperchord_curve();
    Real y = 1, zero = 0;
    Real c3 = P.d(0, 0, 3, x, y, zero) / 6, c2 = P.d(0, 0, 2, x, y, zero) / 2, c1 = P.d(0, 0, 1, x, y, zero);
    Real disc = boost::multiprecision::sqrt(4 * c2 * c2 - 12 * c3 * c1);
    Real best;
    bool first = true;
    Real plus = (-2 * c2 + disc) / (6 * c3), minus = (-2 * c2 - disc) / (6 * c3);
    for (const Real& h : {plus, minus}) {
        if (first || boost::multiprecision::abs(P.d(0, 0, 0, x, y, h)) < boost::multiprecision::abs(P.d(0, 0, 0, x, y, best)))
            best = h;
        first = false;
    }
    c.h0 = best;
    c.h1 = boost::multiprecision::sqrt(2 * x * P.d(1, 0, 0, x, y, best) / P.d(0, 0, 2, x, y, best));
    c.residuals["R"] = boost::multiprecision::abs(r_poly(x));
    c.residuals["cubic"] = boost::multiprecision::abs(P.d(0, 0, 0, x, y, best));
    c.residuals["interval_width"] = to_real(c.hi - c.lo);
    return c;
}

RestrictedConstants hyperchord_constants(const SizeSet& S, int N) {
    PrecisionScope scope(NumericConfig::from_env().digits);
    Family f = S == SizeSet::all() ? Family::hyperchord() : Family::hyperchord(S);
    TruncatedSeries ch = connected_hyperchord_series(f, N, mpq_class(1));
    std::vector<Real> a(N + 1);
    for (int n = 0; n <= N; ++n) a[n] = to_real(ch.coeff(n).at(0));
    // g(u) = 1 + C(u) - u C'(u) = 1 - sum (n - 1) a_n u^n, decreasing in u.
    auto eval = [&](const Real& u, int d) -> Real {
        Real s = 0;
        for (int n = N; n >= 0; --n) {
            Real w = a[n];
            for (int t = 0; t < d; ++t) w *= n - t;
            s = s * u + w;
        }
        // s = sum a_n n^(d falling) u^n; undo the shift for d > 0
        return d == 0 ? s : s / ipow(u, d);
    };
    auto g = [&](const Real& u) -> Real { return 1 + eval(u, 0) - u * eval(u, 1); };
    Real lo = 0, hi = Real(1) / 1024;
    while (g(hi) > 0) {
        lo = hi;
        hi *= 2;
        if (hi > 1) throw std::runtime_error("no root of the inverse equation below 1 for " + f.str());
    }
    for (int it = 0; it < 100; ++it) {
        Real mid = (lo + hi) / 2;
        (g(mid) > 0 ? lo : hi) = mid;
    }
    Real t = (lo + hi) / 2;
    for (int it = 0; it < 6; ++it) t += g(t) / (t * eval(t, 2));  // g'(u) = -u C''(u)
    Real C = eval(t, 0), C2 = eval(t, 2);
    RestrictedConstants c;
    c.S = S;
    c.provenance = "series-truncation (N = " + std::to_string(N) + ")";
    c.residuals["truncated_inverse"] = boost::multiprecision::abs(g(t));
    c.residuals["truncation"] = (N - 1) * a[N] * ipow(t, N);
    c.residuals["truncated_tau"] = t;
    if (auto F = connected_curve(S)) {
        // Newton on F = 0, F_C (1 + C) + u F_u = 0 from the truncated root.
        Real y = 1;
        for (int it = 0; it < 60; ++it) {
            Real Fu = F->d(1, 0, 0, t, y, C), Fc = F->d(0, 0, 1, t, y, C);
            Real Fuu = F->d(2, 0, 0, t, y, C), Fuc = F->d(1, 0, 1, t, y, C), Fcc = F->d(0, 0, 2, t, y, C);
            Real e1 = F->d(0, 0, 0, t, y, C), e2 = Fc * (1 + C) + t * Fu;
            Real j11 = Fu, j12 = Fc, j21 = Fuc * (1 + C) + Fu + t * Fuu, j22 = Fcc * (1 + C) + Fc + t * Fuc;
            Real det = j11 * j22 - j12 * j21;
            t -= (e1 * j22 - e2 * j12) / det;
            C -= (j11 * e2 - j21 * e1) / det;
        }
        Real Fu = F->d(1, 0, 0, t, y, C), Fc = F->d(0, 0, 1, t, y, C);
        Real Fuu = F->d(2, 0, 0, t, y, C), Fuc = F->d(1, 0, 1, t, y, C), Fcc = F->d(0, 0, 2, t, y, C);
        Real C1 = -Fu / Fc;
        C2 = -(Fuu + 2 * Fuc * C1 + Fcc * C1 * C1) / Fc;
        c.residuals["curve"] = boost::multiprecision::abs(F->d(0, 0, 0, t, y, C));
        c.residuals["inverse"] = boost::multiprecision::abs(1 + C - t * C1);
        c.provenance += ", refined on the algebraic equation";
    } else if (S == SizeSet::all()) {
        // The crossing-free series satisfies a cubic: take its double root.
        HyperchordConstants h = hyperchord_constants();
        t = h.rho * h.h0;
        C = h.h0 - 1;
        c.tau = t;
        c.alpha = h.h0;
        c.rho = h.rho;
        c.beta = h.h1;
        c.residuals["R"] = h.residuals["R"];
        c.residuals["cubic"] = h.residuals["cubic"];
        c.provenance += ", refined on the cubic";
        return c;
    } else {
        c.residuals["inverse"] = c.residuals["truncated_inverse"];
    }
    c.tau = t;
    c.alpha = 1 + C;
    c.rho = t / c.alpha;
    c.beta = c.alpha * boost::multiprecision::sqrt(2 / (c.rho * t * C2));
    return c;
}

BlockLaw block_law_constants(const Family& family) {
    PrecisionScope scope(NumericConfig::from_env().digits);
    BlockLaw b;
    auto fill = [&](const Real& rho, const Real& d1, const Real& d2) {
        b.rho = rho;
        b.rho_d1 = d1;
        b.rho_d2 = d2;
        Real r = d1 / rho;
        b.mu = -r;
        b.sigma2 = -d2 / rho - r + r * r;
    };
    switch (family.tag) {
        case FamilyTag::Partition: {
            mpq_class x(1, 4), a(2);
            auto [d1, d2] = curve_derivatives<mpq_class>(partition_curve(), x, a);
            mpq_class r = d1 / x;
            b.mu_exact = -r;
            b.sigma2_exact = -d2 / x - r + r * r;
            fill(to_real(x), to_real(d1), to_real(d2));
            break;
        }
        case FamilyTag::Diagram: {
            SingularExpansion s = base_singularity(family);
            auto [d1, d2] = curve_derivatives<Real>(diagram_curve(), s.rho, s.value);
            fill(s.rho, d1, d2);
            break;
        }
        case FamilyTag::Hyperchord: {
            auto c = hyperchord_constants();
            auto [d1, d2] = curve_derivatives<Real>(hyperchord_curve(), c.rho, c.h0);
            fill(c.rho, d1, d2);
            break;
        }
        default:
            throw std::invalid_argument("no block law for " + family.str());
    }
    return b;
}

RatioReport empirical_ratio_check(const Family& family, int k, int m_max) {
    PrecisionScope scope(NumericConfig::from_env().digits);
    RatioReport rep;
    if (k == 0)
        rep.estimate = crossing_free_asymptotics(family);
    else if (family.tag == FamilyTag::PartitionRestricted)
        rep.estimate = restricted_partition_asymptotics(family.S, k);
    else
        rep.estimate = closed_form_asymptotics(family, k);
    int p = rep.estimate.period;
    int n_max = p * m_max;
    std::function<mpq_class(long)> coeff;
    TruncatedSeries series;
    if (family.tag == FamilyTag::Matching && k == 1) {
        coeff = [](long n) { return mpq_class(binomial(n, n / 2 - 2)); };
    } else {
        if (k == 0)
            series = crossing_free_series(family, n_max, mpq_class(1));
        else
            series = gf_k_from_core_poly(core_for(family, k), SubstitutionRules::at_y(family, 1), n_max);
        coeff = [&series](long n) { return series.coeff(static_cast<int>(n)).at(0); };
    }
    std::vector<long> ms;
    for (long m = 20; m < m_max; m += 20) ms.push_back(m);
    ms.push_back(m_max);
    rep.improving = true;
    Real prev = -1;
    for (long m : ms) {
        RatioRow row;
        row.m = m;
        row.n = p * m;
        row.ratio = to_real(coeff(row.n)) / rep.estimate.estimate(row.n);
        Real err = boost::multiprecision::abs(row.ratio - 1);
        if (prev >= 0 && err >= prev) rep.improving = false;
        prev = err;
        rep.rows.push_back(row);
    }
    rep.final_error = prev;
    return rep;
}

}  // namespace chords
