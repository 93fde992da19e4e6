#include "chords/gf.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <stdexcept>

#include "chords/bucket.hpp"

namespace chords {

SubstitutionRules SubstitutionRules::defaults(const Family& family) {
    SubstitutionRules r;
    r.family = family;
    r.peaks = family.has_peaks();
    r.base = [family](int order) { return crossing_free_series(family, order); };
    return r;
}

SubstitutionRules SubstitutionRules::at_y(const Family& family, const mpq_class& y) {
    SubstitutionRules r = defaults(family);
    r.y_value = y;
    r.base = [family, y](int order) { return crossing_free_series(family, order, y); };
    return r;
}

namespace {

std::string var_name(std::pair<int, int> ij, bool peaks) {
    return peaks ? "x" + std::to_string(ij.first) + "_" + std::to_string(ij.second) : "x" + std::to_string(ij.first);
}

}  // namespace

void SubstitutionRules::check_covers(const CorePolynomial& core) const {
    for (const auto& [mono, coef] : core.terms) {
        for (const auto& [ij, e] : mono.x) {
            bool ok = peaks ? ij.first >= 0 && ij.second >= 0 && ij.first + ij.second >= 1 : ij.first >= 1 && ij.second == 0;
            if (!ok) throw std::invalid_argument("no substitution rule for variable " + var_name(ij, peaks));
        }
        if (mono.y && family.tag == FamilyTag::Matching) throw std::invalid_argument("matching rules carry no y");
    }
    if (!base) throw std::invalid_argument("substitution rules without a base series");
}

int SubstitutionRules::base_order(const CorePolynomial& core, int N) const {
    int need = N;
    for (const auto& [mono, coef] : core.terms) {
        long long w = mono.weight();
        for (const auto& [ij, e] : mono.x) {
            int i = ij.first, j = ij.second;
            if (peaks && i == 0) {
                need = std::max(need, j);
            } else if (peaks) {
                // factor order A - i - j, the other factors add w - i
                need = std::max<long long>(need, N + 2 * i + j - w);
                need = std::max(need, 2 * i + j);
            }
        }
    }
    return need;
}

TruncatedSeries gf_k_from_core_poly(const CorePolynomial& core, const SubstitutionRules& rules, int N) {
    rules.check_covers(core);
    if (N < 0) throw std::invalid_argument("negative series order");
    TruncatedSeries a = rules.base(rules.base_order(core, N));
    std::map<std::pair<int, int>, TruncatedSeries> slot;
    auto slot_of = [&](std::pair<int, int> ij) -> const TruncatedSeries& {
        auto it = slot.find(ij);
        if (it != slot.end()) return it->second;
        TruncatedSeries s;
        if (!rules.peaks)
            s = marked_transform(a, ij.first);
        else if (ij.first == 0)
            s = TruncatedSeries::constant(a.coeff(ij.second), N);
        else
            s = marked_transform_diagram(a, ij.first, ij.second);
        return slot.emplace(ij, std::move(s)).first->second;
    };
    TruncatedSeries sum(N);
    for (const auto& [mono, coef] : core.terms) {
        YPoly ym = YPoly::y(mono.y);
        if (rules.y_value) {
            mpq_class p = 1;
            for (int r = 0; r < mono.y; ++r) p *= *rules.y_value;
            ym = YPoly(p);
        }
        TruncatedSeries t = TruncatedSeries::constant(ym * coef, N);
        for (const auto& [ij, e] : mono.x) {
            const TruncatedSeries& s = slot_of(ij);
            for (int r = 0; r < e; ++r) t = t * s;
        }
        if (t.order < N) throw std::logic_error("substituted term known only through x^" + std::to_string(t.order));
        sum = sum + t.truncated(N);
    }
    TruncatedSeries out = sum.x_derivative();
    bool integral_y = !rules.y_value || rules.y_value->get_den() == 1;
    for (const auto& p : out.c)
        for (const auto& v : p.c)
            if (integral_y && v.get_den() != 1) throw std::logic_error("non-integral coefficient in F_k: " + v.get_str());
    out.meta = core.family.str() + " with " + std::to_string(core.k) + " crossings";
    return out;
}

const CorePolynomial& cached_core_polynomial(const Family& family, int k) {
    static std::mutex mu;
    static std::map<std::pair<std::string, int>, CorePolynomial> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(family.str(), k);
    auto it = cache.find(key);
    if (it == cache.end()) {
        bool trees = family.tag == FamilyTag::Matching && k > core_k_bound(family);
        it = cache.emplace(key, trees ? core_polynomial_via_trees(k) : core_polynomial(family, k)).first;
    }
    return it->second;
}

CorePolynomial truncated_core_polynomial(const Family& family, int k, int N) {
    static std::mutex mu;
    static std::map<std::string, std::map<int, std::vector<ChordSystem>>> cache;
    std::lock_guard<std::mutex> lock(mu);
    int cap = small_core_vertex_bound(family);
    if (N > cap)
        throw ResourceBoundExceeded("core polynomials for " + family.str() + " stop at k = " + std::to_string(core_poly_k_bound(family)) +
                                    "; beyond that the order is limited to " + std::to_string(cap));
    auto it = cache.find(family.str());
    if (it == cache.end()) {
        std::map<int, std::vector<ChordSystem>> by_k;
        for (ChordSystem& c : enumerate_small_cores(family, cap)) by_k[static_cast<int>(crossing_number(c))].push_back(std::move(c));
        it = cache.emplace(family.str(), std::move(by_k)).first;
    }
    std::vector<ChordSystem> cores;
    if (auto c = it->second.find(k); c != it->second.end())
        for (const ChordSystem& s : c->second)
            if (s.n <= N) cores.push_back(s);
    return core_polynomial_from(family, k, cores);
}

TruncatedSeries gf_k(const Family& family, int k, int N) {
    if (k < 0) throw std::invalid_argument("negative crossing count");
    if (k == 0) return crossing_free_series(family, N);
    if (family.is_hyperchord_like() && k > core_poly_k_bound(family))
        throw ResourceBoundExceeded("core polynomials for " + family.str() + " are not enumerated");
    // A core on n vertices contributes from x^n on, so cores up to N vertices
    // suffice; cheaper than the tree construction whenever it applies.
    if (k > core_k_bound(family) && (k > core_poly_k_bound(family) || N <= small_core_vertex_bound(family)))
        return gf_k_from_core_poly(truncated_core_polynomial(family, k, N), SubstitutionRules::defaults(family), N);
    return gf_k_from_core_poly(cached_core_polynomial(family, k), SubstitutionRules::defaults(family), N);
}

std::vector<mpz_class> touchard_riordan(int m) {
    if (m < 0) throw std::invalid_argument("negative chord count");
    int top = m * (m - 1) / 2;
    std::vector<mpz_class> num(top + 1);
    for (int k = -m; k <= m; ++k) {
        long e = static_cast<long>(k) * (k - 1) / 2;
        if (e > top) continue;
        mpz_class b = binomial(2 * m, m + k);
        if (k % 2) num[e] -= b;
        else num[e] += b;
    }
    // (1 - z)^-m = sum binom(m - 1 + d, d) z^d
    std::vector<mpz_class> out(top + 1);
    for (int i = 0; i <= top; ++i)
        for (int d = 0; i + d <= top; ++d) out[i + d] += num[i] * binomial(m - 1 + d, d);
    if (m == 0) out = {1};
    return out;
}

mpz_class total_configurations(const Family& family, int n) {
    if (n < 0) return 0;
    if (family.has_peaks()) {
        mpz_class blocks = 0;
        for (int s = 1; s <= n; ++s)
            if (family.allows_size(s)) blocks += binomial(n, s);
        mpz_class r;
        mpz_ui_pow_ui(r.get_mpz_t(), 2, blocks.get_ui());
        return r;
    }
    // Set partitions with admissible block sizes; the block of vertex 1 has size s.
    std::vector<mpz_class> t(n + 1);
    t[0] = 1;
    for (int v = 1; v <= n; ++v)
        for (int s = 1; s <= v; ++s)
            if (family.allows_size(s)) t[v] += binomial(v - 1, s - 1) * t[v - s];
    return t[n];
}

bool TotalsReport::ok() const {
    return std::all_of(rows.begin(), rows.end(), [](const TotalsRow& r) { return r.match; });
}

TotalsReport verify_totals(const Family& family, int N, int k_max) {
    TotalsReport rep;
    rep.family = family;
    rep.N = N;
    rep.k_max = k_max;
    std::vector<TruncatedSeries> fk;
    for (int k = 0; k <= k_max; ++k) fk.push_back(gf_k(family, k, N).eval_y(1));
    for (int n = 0; n <= N; ++n) {
        TotalsRow row;
        row.n = n;
        for (const auto& s : fk) row.series_sum += s.coeff(n).at(0).get_num();
        row.total = total_configurations(family, n);
        if (family.tag == FamilyTag::Matching) row.max_crossings = n % 2 ? 0 : static_cast<long long>(n / 2) * (n / 2 - 1) / 2;
        if (n <= enumerate_all_bound(family)) {
            Histogram h = bucket_parallel(family, n);
            mpz_class up = 0;
            long long mx = 0;
            for (const auto& [km, count] : h) {
                mx = std::max(mx, km.first);
                if (km.first <= k_max) up += mpz_class(static_cast<unsigned long>(count));
            }
            row.brute_up_to_k = up;
            row.max_crossings = mx;
        }
        row.complete = row.max_crossings && *row.max_crossings <= k_max;
        if (row.brute_up_to_k) row.match = row.series_sum == *row.brute_up_to_k;
        if (row.complete) row.match = row.match && row.series_sum == row.total;
        if (!row.brute_up_to_k && !row.complete) row.match = row.series_sum <= row.total;
        rep.rows.push_back(row);
    }
    return rep;
}

}  // namespace chords
