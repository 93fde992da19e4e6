#include "chords/series.hpp"

#include <algorithm>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace chords {

// ---------------------------------------------------------------- YPoly

YPoly::YPoly(long v) {
    if (v != 0) c.push_back(mpq_class(v));
}

YPoly::YPoly(const mpq_class& v) {
    if (v != 0) c.push_back(v);
}

YPoly YPoly::y(int power) {
    YPoly p;
    p.c.assign(power + 1, mpq_class(0));
    p.c[power] = 1;
    return p;
}

mpq_class YPoly::at(int d) const { return d >= 0 && d < static_cast<int>(c.size()) ? c[d] : mpq_class(0); }

mpq_class YPoly::eval(const mpq_class& v) const {
    mpq_class r = 0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) r = r * v + *it;
    return r;
}

void YPoly::trim() {
    while (!c.empty() && c.back() == 0) c.pop_back();
}

YPoly& YPoly::operator+=(const YPoly& o) {
    if (o.c.size() > c.size()) c.resize(o.c.size(), mpq_class(0));
    for (size_t d = 0; d < o.c.size(); ++d) c[d] += o.c[d];
    trim();
    return *this;
}

YPoly& YPoly::operator-=(const YPoly& o) {
    if (o.c.size() > c.size()) c.resize(o.c.size(), mpq_class(0));
    for (size_t d = 0; d < o.c.size(); ++d) c[d] -= o.c[d];
    trim();
    return *this;
}

YPoly& YPoly::operator*=(const mpq_class& s) {
    if (s == 0) {
        c.clear();
        return *this;
    }
    for (auto& v : c) v *= s;
    return *this;
}

void YPoly::add_product(const YPoly& a, const YPoly& b) {
    if (a.is_zero() || b.is_zero()) return;
    size_t len = a.c.size() + b.c.size() - 1;
    if (len > c.size()) c.resize(len, mpq_class(0));
    mpq_class t;
    for (size_t i = 0; i < a.c.size(); ++i) {
        if (a.c[i] == 0) continue;
        for (size_t j = 0; j < b.c.size(); ++j) {
            mpq_mul(t.get_mpq_t(), a.c[i].get_mpq_t(), b.c[j].get_mpq_t());
            c[i + j] += t;
        }
    }
    trim();
}

std::string YPoly::str() const {
    if (c.empty()) return "0";
    std::string out;
    for (size_t d = 0; d < c.size(); ++d) {
        if (c[d] == 0) continue;
        if (!out.empty()) out += " + ";
        std::string v = c[d].get_str();
        if (d == 0) {
            out += v;
            continue;
        }
        if (c[d] != 1) out += v + "*";
        out += d == 1 ? "y" : "y^" + std::to_string(d);
    }
    return out;
}

YPoly operator+(YPoly a, const YPoly& b) { return a += b; }
YPoly operator-(YPoly a, const YPoly& b) { return a -= b; }
YPoly operator*(const YPoly& a, const YPoly& b) {
    YPoly r;
    r.add_product(a, b);
    return r;
}
YPoly operator*(YPoly a, const mpq_class& s) { return a *= s; }

mpz_class binomial(long n, long k) {
    if (k < 0 || n < 0 || k > n) return 0;
    mpz_class r;
    mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
    return r;
}

// ------------------------------------------------------- TruncatedSeries

TruncatedSeries TruncatedSeries::constant(const YPoly& v, int n) { return monomial(v, 0, n); }

TruncatedSeries TruncatedSeries::monomial(const YPoly& v, int degree, int n) {
    TruncatedSeries s(n);
    if (degree <= n) s.c[degree] = v;
    return s;
}

const YPoly& TruncatedSeries::coeff(int n) const {
    if (n < 0 || n > order) throw std::out_of_range("coefficient x^" + std::to_string(n) + " beyond series order " + std::to_string(order));
    return c[n];
}

int TruncatedSeries::valuation() const {
    for (int d = 0; d <= order; ++d)
        if (!c[d].is_zero()) return d;
    return order + 1;
}

bool TruncatedSeries::univariate() const {
    return std::all_of(c.begin(), c.end(), [](const YPoly& p) { return p.is_constant(); });
}

TruncatedSeries TruncatedSeries::truncated(int n) const {
    if (n > order) throw std::invalid_argument("cannot raise series order " + std::to_string(order) + " to " + std::to_string(n));
    TruncatedSeries r(n);
    std::copy(c.begin(), c.begin() + n + 1, r.c.begin());
    r.meta = meta;
    return r;
}

TruncatedSeries TruncatedSeries::shifted(int s) const {
    if (s >= 0) {
        TruncatedSeries r(order + s);
        std::copy(c.begin(), c.end(), r.c.begin() + s);
        r.meta = meta;
        return r;
    }
    int d = -s;
    if (d > order) throw std::invalid_argument("shift exceeds series order");
    for (int n = 0; n < d; ++n)
        if (!c[n].is_zero()) throw std::invalid_argument("inexact division by x^" + std::to_string(d));
    TruncatedSeries r(order - d);
    std::copy(c.begin() + d, c.end(), r.c.begin());
    r.meta = meta;
    return r;
}

TruncatedSeries TruncatedSeries::derivative() const {
    if (order == 0) throw std::invalid_argument("derivative of an order-0 series has no known coefficient");
    TruncatedSeries r(order - 1);
    for (int n = 1; n <= order; ++n) r.c[n - 1] = c[n] * mpq_class(n);
    r.meta = meta;
    return r;
}

TruncatedSeries TruncatedSeries::x_derivative() const {
    TruncatedSeries r(order);
    for (int n = 1; n <= order; ++n) r.c[n] = c[n] * mpq_class(n);
    r.meta = meta;
    return r;
}

TruncatedSeries TruncatedSeries::eval_y(const mpq_class& v) const {
    TruncatedSeries r(order);
    for (int n = 0; n <= order; ++n) r.c[n] = YPoly(c[n].eval(v));
    r.meta = meta;
    return r;
}

TruncatedSeries TruncatedSeries::inverse() const {
    if (!c[0].is_constant() || c[0].is_zero()) throw std::invalid_argument("inverse needs a nonzero rational constant term");
    mpq_class inv0 = 1 / c[0].c[0];
    TruncatedSeries r(order);
    r.c[0] = YPoly(inv0);
    for (int n = 1; n <= order; ++n) {
        YPoly acc;
        for (int a = 1; a <= n; ++a) acc.add_product(c[a], r.c[n - a]);
        r.c[n] = acc * (-inv0);
    }
    return r;
}

TruncatedSeries TruncatedSeries::pow(int e) const {
    if (e < 0) return inverse().pow(-e);
    TruncatedSeries r = constant(YPoly(1L), order);
    TruncatedSeries b = *this;
    while (e > 0) {
        if (e & 1) r = r * b;
        e >>= 1;
        if (e) b = b * b;
    }
    return r;
}

TruncatedSeries TruncatedSeries::compose(const TruncatedSeries& b) const {
    int vb = b.valuation();
    if (vb == 0) throw std::invalid_argument("compose needs an inner series with zero constant term");
    long long limit = std::min<long long>(b.order, static_cast<long long>(order + 1) * vb - 1);
    int n = static_cast<int>(limit);
    TruncatedSeries inner = b.truncated(n);
    TruncatedSeries r = constant(YPoly(), n);
    for (int k = std::min(order, n); k >= 0; --k) {
        r = r * inner;
        r = r.truncated(n);
        r.c[0] += c[k];
    }
    r.meta = meta;
    return r;
}

TruncatedSeries operator+(const TruncatedSeries& a, const TruncatedSeries& b) {
    TruncatedSeries r(std::min(a.order, b.order));
    for (int n = 0; n <= r.order; ++n) r.c[n] = a.c[n] + b.c[n];
    return r;
}

TruncatedSeries operator-(const TruncatedSeries& a, const TruncatedSeries& b) {
    TruncatedSeries r(std::min(a.order, b.order));
    for (int n = 0; n <= r.order; ++n) r.c[n] = a.c[n] - b.c[n];
    return r;
}

TruncatedSeries operator*(const TruncatedSeries& a, const TruncatedSeries& b) {
    int va = a.valuation(), vb = b.valuation();
    long long n = std::min<long long>(static_cast<long long>(a.order) + vb, static_cast<long long>(b.order) + va);
    n = std::min<long long>(n, static_cast<long long>(a.order) + b.order + 1);
    TruncatedSeries r(static_cast<int>(n));
    for (int i = va; i <= a.order && i <= n; ++i) {
        if (a.c[i].is_zero()) continue;
        for (int j = vb; j <= b.order && i + j <= n; ++j) r.c[i + j].add_product(a.c[i], b.c[j]);
    }
    return r;
}

TruncatedSeries operator*(const TruncatedSeries& a, const YPoly& s) {
    TruncatedSeries r(a.order);
    for (int n = 0; n <= a.order; ++n) r.c[n] = a.c[n] * s;
    r.meta = a.meta;
    return r;
}

std::string TruncatedSeries::str(int terms) const {
    std::ostringstream os;
    int shown = 0;
    for (int n = 0; n <= order; ++n) {
        if (c[n].is_zero()) continue;
        if (terms >= 0 && shown == terms) break;
        if (shown++) os << " + ";
        bool single = c[n].c.size() == 1 && c[n].c[0] > 0;
        std::string v = c[n].str();
        if (n == 0) {
            os << (single ? v : "(" + v + ")");
            continue;
        }
        if (!(single && c[n].c[0] == 1)) os << (single ? v : "(" + v + ")") << "*";
        os << (n == 1 ? "x" : "x^" + std::to_string(n));
    }
    if (!shown) os << "0";
    os << " + O(x^" << order + 1 << ")";
    return os.str();
}

nlohmann::json TruncatedSeries::json() const {
    nlohmann::json coeffs = nlohmann::json::array();
    bool flat = univariate();
    for (const auto& p : c) {
        if (flat) {
            coeffs.push_back(p.at(0).get_str());
            continue;
        }
        nlohmann::json row = nlohmann::json::array();
        for (const auto& v : p.c) row.push_back(v.get_str());
        coeffs.push_back(row);
    }
    return {{"order", order}, {"meta", meta}, {"coefficients", coeffs}};
}

TruncatedSeries TruncatedSeries::from_json(const nlohmann::json& j) {
    TruncatedSeries s(j.at("order").get<int>());
    s.meta = j.value("meta", "");
    const auto& coeffs = j.at("coefficients");
    if (static_cast<int>(coeffs.size()) != s.order + 1) throw std::invalid_argument("coefficient count does not match order");
    for (int n = 0; n <= s.order; ++n) {
        const auto& e = coeffs[n];
        if (e.is_string()) {
            s.c[n] = YPoly(mpq_class(e.get<std::string>()));
        } else {
            for (const auto& v : e) s.c[n].c.emplace_back(v.get<std::string>());
            for (auto& v : s.c[n].c) v.canonicalize();
            s.c[n].trim();
        }
    }
    return s;
}

// ----------------------------------------------------- crossing-free series

namespace {

// Coefficients of base^e for e = 0..E, filled one degree at a time.
struct PowerTable {
    std::vector<std::vector<YPoly>> t;
    explicit PowerTable(int E, int N) : t(E + 1, std::vector<YPoly>(N + 1)) { t[0][0] = YPoly(1L); }
    // base[0..n] known; fills degree n of every power.
    void extend(const std::vector<YPoly>& base, int n) {
        for (size_t e = 1; e < t.size(); ++e) {
            YPoly acc;
            for (int a = 0; a <= n; ++a) acc.add_product(base[a], t[e - 1][n - a]);
            t[e][n] = std::move(acc);
        }
    }
};

YPoly y_var(const std::optional<mpq_class>& yv) { return yv ? YPoly(*yv) : YPoly::y(); }

TruncatedSeries matching_series(int N) {
    TruncatedSeries s(N);
    s.c[0] = YPoly(1L);
    for (int n = 2; n <= N; ++n)
        for (int a = 0; a <= n - 2; ++a) s.c[n].add_product(s.c[a], s.c[n - 2 - a]);
    return s;
}

TruncatedSeries partition_series(int N, const YPoly& y) {
    TruncatedSeries s(N);
    s.c[0] = YPoly(1L);
    YPoly ym1 = y - YPoly(1L);
    for (int n = 1; n <= N; ++n) {
        YPoly acc;
        for (int a = 0; a <= n - 1; ++a) acc.add_product(s.c[a], s.c[n - 1 - a]);
        acc.add_product(ym1, s.c[n - 1]);
        s.c[n] = std::move(acc);
    }
    return s;
}

TruncatedSeries restricted_partition_series(int N, const SizeSet& S, const YPoly& y) {
    std::vector<int> sizes = S.elements_up_to(N);
    int E = sizes.empty() ? 0 : sizes.back();
    TruncatedSeries s(N);
    s.c[0] = YPoly(1L);
    PowerTable pw(E, N);
    pw.extend(s.c, 0);
    for (int n = 1; n <= N; ++n) {
        YPoly acc;
        for (int q : sizes)
            if (q <= n) acc += pw.t[q][n - q];
        s.c[n] = acc * y;
        pw.extend(s.c, n);
    }
    return s;
}

TruncatedSeries diagram_series(int N, const YPoly& y) {
    // E = D0 - 1: E_1 = 1, E_n = (1+y) E_{n-1} + y sum_{i=2}^{n-1} E_i E_{n+1-i}
    TruncatedSeries s(N);
    s.c[0] = YPoly(1L);
    if (N >= 1) s.c[1] = YPoly(1L);
    YPoly y1 = y + YPoly(1L);
    for (int n = 2; n <= N; ++n) {
        YPoly conv;
        for (int i = 2; i <= n - 1; ++i) conv.add_product(s.c[i], s.c[n + 1 - i]);
        s.c[n] = y1 * s.c[n - 1] + y * conv;
    }
    return s;
}

// Connected crossing-free hyperchord series CH = u + u^2 A with u = x(1 + d1 y):
//   f = 1 + A + 2uA + u^2 A^2,  w = u f,
//   h = y (1 + d2 y) sum_{s in S, s >= 3} w^(s-2),
//   G = d2 y + (1 + d2 y) h / (1 - h),
//   A = G (1 + uA)^2 + w G A.
TruncatedSeries connected_hyperchord(int N, const SizeSet& S, const YPoly& y) {
    bool d1 = S.contains(1), d2 = S.contains(2);
    YPoly u1 = d1 ? y + YPoly(1L) : YPoly(1L);
    YPoly v2 = d2 ? y + YPoly(1L) : YPoly(1L);
    YPoly g0 = d2 ? y : YPoly();
    int M = std::max(N - 2, 0);
    std::vector<int> big;
    for (int s : S.elements_up_to(M + 2))
        if (s >= 3) big.push_back(s - 2);
    int E = big.empty() ? 0 : big.back();

    std::vector<YPoly> A(M + 1), s1(M + 1), sq(M + 1), f(M + 1), w(M + 1), h(M + 1), R(M + 1), G(M + 1), wg(M + 1);
    PowerTable pw(E, M);
    for (int n = 0; n <= M; ++n) {
        s1[n] = n == 0 ? YPoly(1L) : u1 * A[n - 1];
        YPoly acc;
        for (int a = 0; a <= n; ++a) acc.add_product(s1[a], s1[n - a]);
        sq[n] = std::move(acc);
        w[n] = n == 0 ? YPoly() : u1 * f[n - 1];
        pw.extend(w, n);
        YPoly sum;
        for (int e : big) sum += pw.t[e][n];
        h[n] = sum * (y * v2);
        if (n == 0) {
            R[0] = YPoly(1L);
        } else {
            YPoly r;
            for (int a = 1; a <= n; ++a) r.add_product(h[a], R[n - a]);
            R[n] = std::move(r);
        }
        G[n] = n == 0 ? g0 + v2 * (R[0] - YPoly(1L)) : v2 * R[n];
        YPoly t;
        for (int a = 1; a <= n; ++a) t.add_product(w[a], G[n - a]);
        wg[n] = std::move(t);
        YPoly an;
        for (int i = 0; i <= n; ++i) an.add_product(G[i], sq[n - i]);
        for (int m = 1; m <= n; ++m) an.add_product(wg[m], A[n - m]);
        A[n] = std::move(an);
        f[n] = sq[n] + A[n];
    }
    TruncatedSeries ch(N);
    if (N >= 1) ch.c[1] = u1;
    YPoly u2 = u1 * u1;
    for (int n = 2; n <= N; ++n) ch.c[n] = u2 * A[n - 2];
    return ch;
}

// H = 1 + CH(x H).
TruncatedSeries compose_xh(const TruncatedSeries& ch) {
    int N = ch.order;
    TruncatedSeries hs(N);
    hs.c[0] = YPoly(1L);
    PowerTable pw(N, N);
    pw.extend(hs.c, 0);
    for (int n = 1; n <= N; ++n) {
        YPoly acc;
        for (int m = 1; m <= n; ++m) acc.add_product(ch.c[m], pw.t[m][n - m]);
        hs.c[n] = std::move(acc);
        pw.extend(hs.c, n);
    }
    return hs;
}

}  // namespace

TruncatedSeries connected_hyperchord_series(const Family& family, int N, std::optional<mpq_class> y_value) {
    if (!family.is_hyperchord_like()) throw std::invalid_argument("connected_hyperchord_series needs a hyperchord family");
    if (N < 0) throw std::invalid_argument("negative series order");
    TruncatedSeries ch = connected_hyperchord(N, family.S, y_var(y_value));
    ch.meta = "connected crossing-free " + family.str();
    return ch;
}

TruncatedSeries crossing_free_series(const Family& family, int N, std::optional<mpq_class> y_value) {
    if (N < 0) throw std::invalid_argument("negative series order");
    YPoly y = y_var(y_value);
    TruncatedSeries s;
    switch (family.tag) {
        case FamilyTag::Matching: s = matching_series(N); break;
        case FamilyTag::Partition: s = partition_series(N, y); break;
        case FamilyTag::PartitionRestricted: s = restricted_partition_series(N, family.S, y); break;
        case FamilyTag::Diagram: s = diagram_series(N, y); break;
        case FamilyTag::Hyperchord:
        case FamilyTag::HyperchordRestricted: s = compose_xh(connected_hyperchord(N, family.S, y)); break;
    }
    s.meta = "crossing-free " + family.str();
    if (y_value && family.tag != FamilyTag::Matching) s.meta += " at y=" + y_value->get_str();
    return s;
}

TruncatedSeries marked_transform(const TruncatedSeries& a, int i) {
    if (i < 1) throw std::invalid_argument("marked_transform needs i >= 1");
    TruncatedSeries r(a.order + i);
    for (int n = 0; n <= a.order; ++n) r.c[n + i] = a.c[n] * mpq_class(binomial(n + i - 1, i - 1));
    r.meta = "marked(" + std::to_string(i) + ") " + a.meta;
    return r;
}

TruncatedSeries marked_transform_diagram(const TruncatedSeries& a, int i, int j) {
    if (i < 1 || j < 0) throw std::invalid_argument("marked_transform_diagram needs i >= 1 and j >= 0");
    int order = a.order - i - j;
    if (order < i) throw std::invalid_argument("series order " + std::to_string(a.order) + " too small for the (" + std::to_string(i) + "," + std::to_string(j) + ") kernel");
    TruncatedSeries r(order);
    for (int t = i; t <= order; ++t) r.c[t] = a.c[t + i + j] * mpq_class(binomial(t - 1, i - 1));
    r.meta = "marked(" + std::to_string(i) + "," + std::to_string(j) + ") " + a.meta;
    return r;
}

}  // namespace chords
