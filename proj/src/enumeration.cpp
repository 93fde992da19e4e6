#include "chords/enumeration.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <sstream>

namespace chords {

namespace {

struct Goal {
    long long k_lo = 0, k_hi = 0;
    bool connected = false;
    bool core = false;
    int max_blocks = 0;
};

struct UnionFind {
    std::vector<int> p;
    explicit UnionFind(size_t n) : p(n) { std::iota(p.begin(), p.end(), 0); }
    int find(int a) { return p[a] == a ? a : p[a] = find(p[a]); }
    void unite(int a, int b) { p[find(a)] = find(b); }
};

bool crossing_connected(const std::vector<Block>& blocks) {
    if (blocks.empty()) return false;
    UnionFind uf(blocks.size());
    for (size_t a = 0; a < blocks.size(); ++a)
        for (size_t b = a + 1; b < blocks.size(); ++b)
            if (block_crossings(blocks[a], blocks[b]) > 0) uf.unite(static_cast<int>(a), static_cast<int>(b));
    for (size_t a = 1; a < blocks.size(); ++a)
        if (uf.find(static_cast<int>(a)) != uf.find(0)) return false;
    return true;
}

// Chord configurations built vertex by vertex: at v choose the chords (v, w)
// with w > v. A new chord crosses exactly the earlier chords (a, b) with
// a < v < b < w, so counts only grow and branches above k_hi are cut.
struct ChordSearch {
    int n;
    bool single;  // perfect matching: exactly one chord per vertex
    Goal goal;
    Family family;
    std::vector<ChordSystem>* out;

    std::vector<std::pair<int, int>> chords;
    std::vector<long long> hits;
    std::vector<int> deg;
    long long k = 0;

    void run() {
        deg.assign(n + 2, 0);
        vertex(1);
    }

    long long add(int v, int w) {
        long long inc = 0;
        for (size_t c = 0; c < chords.size(); ++c) {
            auto [a, b] = chords[c];
            if (a < v && v < b && b < w) {
                ++inc;
                ++hits[c];
            }
        }
        chords.push_back({v, w});
        hits.push_back(inc);
        ++deg[v];
        ++deg[w];
        k += inc;
        return inc;
    }

    void remove(int v, int w) {
        chords.pop_back();
        long long inc = hits.back();
        hits.pop_back();
        for (size_t c = 0; c < chords.size(); ++c) {
            auto [a, b] = chords[c];
            if (a < v && v < b && b < w) --hits[c];
        }
        --deg[v];
        --deg[w];
        k -= inc;
    }

    // Checks made once every chord touching 1..v is fixed.
    bool viable_after(int v) const {
        if (goal.core || goal.connected)
            for (size_t c = 0; c < chords.size(); ++c)
                if (hits[c] == 0 && chords[c].second <= v + 1) return false;
        if (goal.connected && v < n) {
            bool spans = false;
            for (auto [a, b] : chords)
                if (a <= v && v < b) spans = true;
            if (!spans) return false;
        }
        return true;
    }

    void leaf() {
        if (k < goal.k_lo) return;
        for (int v = 1; v <= n; ++v)
            if (deg[v] == 0) return;
        std::vector<Block> blocks;
        for (auto [a, b] : chords) blocks.push_back({a, b});
        if (goal.connected && !crossing_connected(blocks)) return;
        out->push_back(ChordSystem::make(family, n, std::move(blocks)));
    }

    void vertex(int v) {
        if (v > n) {
            leaf();
            return;
        }
        if (single) {
            if (deg[v]) {
                if (viable_after(v)) vertex(v + 1);
                return;
            }
            for (int w = v + 1; w <= n; ++w) {
                if (deg[w]) continue;
                add(v, w);
                if (k <= goal.k_hi && viable_after(v)) vertex(v + 1);
                remove(v, w);
            }
            return;
        }
        partners(v, v + 1);
    }

    // Diagram branch: decide whether (v, w) is present for w = from..n.
    void partners(int v, int from) {
        if (from > n) {
            if (deg[v] > 0 && viable_after(v)) vertex(v + 1);
            return;
        }
        partners(v, from + 1);
        if (static_cast<int>(chords.size()) >= goal.max_blocks) return;
        add(v, from);
        if (k <= goal.k_hi) partners(v, from + 1);
        remove(v, from);
    }
};

// Partitions as restricted growth strings with incremental crossings.
struct PartitionSearch {
    int n;
    Goal goal;
    Family family;
    int max_size;
    std::vector<ChordSystem>* out;
    std::vector<Block> blocks;
    long long k = 0;

    long long gain(size_t target, int) const {
        long long g = 0;
        for (int u : blocks[target])
            for (size_t o = 0; o < blocks.size(); ++o) {
                if (o == target) continue;
                long long below = 0, above = 0;
                for (int w : blocks[o]) (w < u ? below : above) += 1;
                g += below * above;
            }
        return g;
    }

    void leaf() {
        if (k < goal.k_lo) return;
        for (const Block& b : blocks)
            if (!family.allows_size(static_cast<int>(b.size())) || b.size() < 2) return;
        if (goal.core) {
            for (size_t a = 0; a < blocks.size(); ++a) {
                bool hit = false;
                for (size_t b = 0; b < blocks.size() && !hit; ++b)
                    if (a != b && block_crossings(blocks[a], blocks[b]) > 0) hit = true;
                if (!hit) return;
            }
        }
        if (goal.connected && !crossing_connected(blocks)) return;
        out->push_back(ChordSystem::make(family, n, blocks));
    }

    void vertex(int v) {
        if (v > n) {
            leaf();
            return;
        }
        // Blocks below size 2 that can no longer grow are hopeless.
        int remaining = n - v + 1;
        int small = 0;
        for (const Block& b : blocks) small += b.size() < 2;
        if (small > remaining) return;
        for (size_t i = 0; i < blocks.size(); ++i) {
            if (static_cast<int>(blocks[i].size()) >= max_size) continue;
            long long g = gain(i, v);
            if (k + g > goal.k_hi) continue;
            blocks[i].push_back(v);
            k += g;
            vertex(v + 1);
            k -= g;
            blocks[i].pop_back();
        }
        if (static_cast<int>(blocks.size()) < goal.max_blocks) {
            blocks.push_back({v});
            vertex(v + 1);
            blocks.pop_back();
        }
    }
};

std::vector<ChordSystem> search(const Family& f, int n, const Goal& goal) {
    std::vector<ChordSystem> out;
    if (f.tag == FamilyTag::Matching || f.tag == FamilyTag::Diagram) {
        if (f.tag == FamilyTag::Matching && n % 2) return out;
        ChordSearch s{n, f.tag == FamilyTag::Matching, goal, f, &out, {}, {}, {}, 0};
        s.run();
    } else if (f.is_partition_like()) {
        int max_size = f.S.is_finite() ? std::min(f.S.max(), n) : n;
        PartitionSearch s{n, goal, f, max_size, &out, {}, 0};
        s.vertex(1);
    } else {
        throw std::invalid_argument("enumeration does not support " + f.str());
    }
    return out;
}

bool by_k_m(const ChordSystem& a, const ChordSystem& b) {
    auto ka = crossing_number(a), kb = crossing_number(b);
    if (ka != kb) return ka < kb;
    if (a.blocks.size() != b.blocks.size()) return a.blocks.size() < b.blocks.size();
    return a < b;
}

}  // namespace

std::uint64_t ConnectedTable::cell(int k, int size, bool vertices) const {
    const auto& t = vertices ? by_vertices : by_blocks;
    auto it = t.find({k, size});
    return it == t.end() ? 0 : it->second;
}

std::uint64_t ConnectedTable::total(int k) const {
    std::uint64_t s = 0;
    for (auto& [key, c] : by_blocks)
        if (key.first == k) s += c;
    return s;
}

std::string ConnectedTable::csv(bool vertices) const {
    std::string out = "k,size,count\n";
    for (auto& [key, c] : vertices ? by_vertices : by_blocks)
        out += std::to_string(key.first) + "," + std::to_string(key.second) + "," + std::to_string(c) + "\n";
    return out;
}

nlohmann::json ConnectedTable::json() const {
    nlohmann::json j;
    j["family"] = family.str();
    j["k_max"] = k_max;
    auto cells = [](const std::map<std::pair<int, int>, std::uint64_t>& t) {
        nlohmann::json a = nlohmann::json::array();
        for (auto& [key, c] : t) a.push_back({{"k", key.first}, {"size", key.second}, {"count", c}});
        return a;
    };
    j["by_blocks"] = cells(by_blocks);
    j["by_vertices"] = cells(by_vertices);
    nlohmann::json totals = nlohmann::json::object();
    for (int k = 1; k <= k_max; ++k) totals[std::to_string(k)] = total(k);
    j["totals"] = totals;
    return j;
}

std::vector<ChordSystem> enumerate_connected(const Family& f, int k_max) {
    if (!(f.tag == FamilyTag::Matching || f.tag == FamilyTag::Diagram || f.is_partition_like()))
        throw std::invalid_argument("connected enumeration does not support " + f.str());
    if (k_max < 1) throw std::invalid_argument("k_max must be at least 1");
    // A connected configuration with k crossings has at most k+1 blocks.
    int nmax;
    if (f.is_partition_like()) {
        int smin = f.S.min_excluding_one();
        if (smin == 0) return {};
        nmax = core_vertex_bound(f, k_max);
    } else {
        nmax = 2 * (k_max + 1);
    }
    Goal goal{1, k_max, true, true, k_max + 1};
    std::vector<std::vector<ChordSystem>> per(nmax + 1);
    #pragma omp parallel for schedule(dynamic)
    for (int n = nmax; n >= 4; --n) per[n] = search(f, n, goal);
    std::vector<ChordSystem> all;
    for (auto& v : per) all.insert(all.end(), v.begin(), v.end());
    std::sort(all.begin(), all.end(), by_k_m);
    return all;
}

ConnectedTable connected_table(const Family& f, int k_max) {
    ConnectedTable t;
    t.family = f;
    t.k_max = k_max;
    for (const ChordSystem& s : enumerate_connected(f, k_max)) {
        int k = static_cast<int>(crossing_number(s));
        ++t.by_blocks[{k, static_cast<int>(s.blocks.size())}];
        ++t.by_vertices[{k, s.n}];
    }
    return t;
}

int core_k_bound(const Family& f) {
    switch (f.tag) {
        case FamilyTag::Matching: return 5;
        case FamilyTag::Diagram: return 3;
        case FamilyTag::Partition: return 3;
        case FamilyTag::PartitionRestricted: return f.S.min_excluding_one() >= 3 ? 8 : 3;
        default: return 0;
    }
}

int core_poly_k_bound(const Family& f) { return f.tag == FamilyTag::Matching ? 7 : core_k_bound(f); }

int core_vertex_bound(const Family& f, int k) {
    if (f.tag == FamilyTag::Matching || f.tag == FamilyTag::Diagram) return 4 * k;
    int smin = f.S.min_excluding_one();
    if (smin == 0) return 0;
    // Blocks of sizes s, t that cross do so at least (s-1)(t-1) times.
    return 2 * k * smin / ((smin - 1) * (smin - 1));
}

std::vector<ChordSystem> enumerate_cores(const Family& f, int k) {
    if (!(f.tag == FamilyTag::Matching || f.tag == FamilyTag::Diagram || f.is_partition_like()))
        throw std::invalid_argument("core enumeration does not support " + f.str());
    if (k < 1) throw std::invalid_argument("k must be at least 1");
    if (k > core_k_bound(f))
        throw ResourceBoundExceeded("core enumeration for " + f.str() + " supports k <= " + std::to_string(core_k_bound(f)));
    int nmax = core_vertex_bound(f, k);
    Goal goal{k, k, false, true, 2 * k};
    std::vector<std::vector<ChordSystem>> per(nmax + 1);
    #pragma omp parallel for schedule(dynamic)
    for (int n = nmax; n >= 4; --n) per[n] = search(f, n, goal);
    std::vector<ChordSystem> all;
    for (auto& v : per) all.insert(all.end(), v.begin(), v.end());
    return all;
}

int small_core_vertex_bound(const Family& f) {
    switch (f.tag) {
        case FamilyTag::Matching: return 16;
        case FamilyTag::Partition:
        case FamilyTag::PartitionRestricted: return 12;
        case FamilyTag::Diagram: return 8;
        default: return 0;
    }
}

std::vector<ChordSystem> enumerate_small_cores(const Family& f, int max_vertices) {
    if (!(f.tag == FamilyTag::Matching || f.tag == FamilyTag::Diagram || f.is_partition_like()))
        throw std::invalid_argument("core enumeration does not support " + f.str());
    if (max_vertices > small_core_vertex_bound(f))
        throw ResourceBoundExceeded("cores of " + f.str() + " are listed up to " + std::to_string(small_core_vertex_bound(f)) + " vertices");
    std::vector<std::vector<ChordSystem>> per(std::max(max_vertices, 0) + 1);
    #pragma omp parallel for schedule(dynamic)
    for (int n = max_vertices; n >= 4; --n)
        per[n] = search(f, n, Goal{1, std::numeric_limits<long long>::max() / 4, false, true, n * (n - 1) / 2});
    std::vector<ChordSystem> all;
    for (auto& v : per) all.insert(all.end(), v.begin(), v.end());
    return all;
}

long long Monomial::weight() const {
    long long w = 0;
    for (auto& [ij, e] : x) w += static_cast<long long>(ij.first) * e;
    return w;
}

bool Monomial::operator<(const Monomial& o) const {
    auto wa = weight(), wb = o.weight();
    if (wa != wb) return wa < wb;
    if (y != o.y) return y < o.y;
    return std::lexicographical_compare(x.begin(), x.end(), o.x.begin(), o.x.end());
}

Monomial monomial_of(const ChordSystem& core, bool with_y) {
    RegionProfile p = region_profile(core);
    Monomial m;
    for (auto& [ij, c] : p.counts)
        if (c) m.x[ij] = c;
    if (with_y) m.y = p.m;
    return m;
}

CorePolynomial core_polynomial_from(const Family& f, int k, const std::vector<ChordSystem>& cores) {
    CorePolynomial poly;
    poly.family = f;
    poly.k = k;
    bool with_y = f.tag != FamilyTag::Matching;
    for (const ChordSystem& c : cores) poly.terms[monomial_of(c, with_y)] += mpq_class(1, c.n);
    for (auto& [m, c] : poly.terms) c.canonicalize();
    return poly;
}

CorePolynomial core_polynomial(const Family& f, int k) { return core_polynomial_from(f, k, enumerate_cores(f, k)); }

namespace {

std::string var_name(const Family& f, std::pair<int, int> ij) {
    if (f.has_peaks()) return "x" + std::to_string(ij.first) + "_" + std::to_string(ij.second);
    return "x" + std::to_string(ij.first);
}

}  // namespace

std::string CorePolynomial::str() const {
    std::string out;
    for (auto& [m, c] : terms) {
        std::string t;
        if (c != 1) t = c.get_str();
        for (auto& [ij, e] : m.x) {
            if (!t.empty()) t += "*";
            t += var_name(family, ij);
            if (e != 1) t += "^" + std::to_string(e);
        }
        if (m.y) {
            if (!t.empty()) t += "*";
            t += "y";
            if (m.y != 1) t += "^" + std::to_string(m.y);
        }
        if (t.empty()) t = "1";
        out += (out.empty() ? "" : " + ") + t;
    }
    return out.empty() ? "0" : out;
}

CorePolynomial CorePolynomial::parse(const Family& f, int k, const std::string& text) {
    CorePolynomial poly;
    poly.family = f;
    poly.k = k;
    std::string clean;
    for (char ch : text)
        if (!isspace(static_cast<unsigned char>(ch))) clean += ch;
    if (clean.empty() || clean == "0") return poly;
    std::stringstream terms(clean);
    std::string term;
    while (std::getline(terms, term, '+')) {
        if (term.empty()) throw std::invalid_argument("empty term in polynomial");
        Monomial m;
        mpq_class coef = 1;
        std::stringstream factors(term);
        std::string fac;
        while (std::getline(factors, fac, '*')) {
            if (fac.empty()) throw std::invalid_argument("empty factor in '" + term + "'");
            if (isdigit(static_cast<unsigned char>(fac[0]))) {
                mpq_class q(fac);
                q.canonicalize();
                coef *= q;
                continue;
            }
            int e = 1;
            auto caret = fac.find('^');
            std::string name = fac.substr(0, caret);
            if (caret != std::string::npos) e = std::stoi(fac.substr(caret + 1));
            if (name == "y") {
                m.y += e;
            } else if (name.size() > 1 && name[0] == 'x') {
                auto us = name.find('_');
                int i = std::stoi(name.substr(1, us == std::string::npos ? std::string::npos : us - 1));
                int j = us == std::string::npos ? 0 : std::stoi(name.substr(us + 1));
                m.x[{i, j}] += e;
            } else {
                throw std::invalid_argument("unknown variable '" + name + "'");
            }
        }
        poly.terms[m] += coef;
    }
    return poly;
}

mpq_class CorePolynomial::rooted_count() const {
    mpq_class s = 0;
    for (auto& [m, c] : terms) s += c * static_cast<long>(m.weight());
    return s;
}

namespace {

// Sparse polynomial in x_1..x_a and t_2..t_{b+1}, truncated by tree weight.
using TreeKey = std::vector<int>;  // x exponents then t exponents
using TreeMap = std::map<TreeKey, mpz_class>;

struct TreeAlgebra {
    int p;
    int nx() const { return p + 1; }
    int weight(const TreeKey& key) const {
        int w = 0;
        for (int j = 0; j < p; ++j) w += (j + 1) * key[nx() + j];
        return w;
    }
    TreeMap mul(const TreeMap& a, const TreeMap& b) const {
        TreeMap r;
        for (auto& [ka, ca] : a)
            for (auto& [kb, cb] : b) {
                TreeKey k(ka.size());
                for (size_t i = 0; i < k.size(); ++i) k[i] = ka[i] + kb[i];
                if (weight(k) > p) continue;
                r[k] += ca * cb;
            }
        return r;
    }
    TreeMap var(int idx) const {
        TreeKey k(nx() + p, 0);
        ++k[idx];
        return {{k, 1}};
    }
    TreeMap one() const { return {{TreeKey(nx() + p, 0), 1}}; }
};

void add_into(TreeMap& a, const TreeMap& b) {
    for (auto& [k, c] : b) a[k] += c;
}

}  // namespace

TreePolynomial tree_poly(int p) {
    if (p < 1) throw std::invalid_argument("tree_poly needs p >= 1");
    TreeAlgebra alg{p};
    TreeMap T;
    for (int iter = 0; iter < p; ++iter) {
        // inner = sum_i x_i T^{i-1}
        TreeMap inner, power = alg.one();
        for (int i = 1; i <= p + 1; ++i) {
            add_into(inner, alg.mul(alg.var(i - 1), power));
            power = alg.mul(power, T);
            if (power.empty()) break;
        }
        TreeMap next;
        TreeMap ip = inner;  // inner^(2j-1), starting at j = 2 (cube)
        TreeMap sq = alg.mul(inner, inner);
        ip = alg.mul(ip, sq);
        for (int j = 2; j <= p + 1; ++j) {
            add_into(next, alg.mul(alg.var(alg.nx() + j - 2), ip));
            ip = alg.mul(ip, sq);
        }
        T = std::move(next);
    }
    TreePolynomial out;
    out.p = p;
    for (auto& [k, c] : T) {
        if (c == 0) continue;
        std::vector<int> nv(k.begin(), k.begin() + alg.nx()), pv(k.begin() + alg.nx(), k.end());
        while (!nv.empty() && nv.back() == 0) nv.pop_back();
        while (!pv.empty() && pv.back() == 0) pv.pop_back();
        out.terms[{nv, pv}] += c;
    }
    return out;
}

std::string TreePolynomial::str() const {
    std::string out;
    for (auto& [key, c] : terms) {
        std::string t = c == 1 ? "" : c.get_str();
        for (size_t i = 0; i < key.first.size(); ++i)
            if (key.first[i]) {
                t += (t.empty() ? "" : "*") + std::string("x") + std::to_string(i + 1);
                if (key.first[i] != 1) t += "^" + std::to_string(key.first[i]);
            }
        for (size_t j = 0; j < key.second.size(); ++j)
            if (key.second[j]) {
                t += (t.empty() ? "" : "*") + std::string("t") + std::to_string(j + 2);
                if (key.second[j] != 1) t += "^" + std::to_string(key.second[j]);
            }
        out += (out.empty() ? "" : " + ") + t;
    }
    return out;
}

CorePolynomial core_polynomial_via_trees(int k) {
    if (k < 1) throw std::invalid_argument("k must be at least 1");
    if (k > core_poly_k_bound(Family::matching())) throw ResourceBoundExceeded("core_polynomial_via_trees: k too large");
    ConnectedTable cm = connected_table(Family::matching(), k);
    // CM_j(z) truncated at z^k, for connected matchings with j chords.
    auto cmz = [&](int j) {
        std::vector<mpq_class> z(k + 1, 0);
        for (int kk = 1; kk <= k; ++kk) z[kk] = static_cast<unsigned long>(cm.cell(kk, j));
        return z;
    };
    auto zmul = [&](const std::vector<mpq_class>& a, const std::vector<mpq_class>& b) {
        std::vector<mpq_class> r(k + 1, 0);
        for (int i = 0; i <= k; ++i)
            if (a[i] != 0)
                for (int j = 0; i + j <= k; ++j) r[i + j] += a[i] * b[j];
        return r;
    };
    using XPoly = std::map<std::vector<int>, std::vector<mpq_class>>;  // x exponents -> z coefficients
    auto xmul = [&](const XPoly& a, const XPoly& b) {
        XPoly r;
        for (auto& [ka, za] : a)
            for (auto& [kb, zb] : b) {
                std::vector<int> key(std::max(ka.size(), kb.size()), 0);
                for (size_t i = 0; i < ka.size(); ++i) key[i] += ka[i];
                for (size_t i = 0; i < kb.size(); ++i) key[i] += kb[i];
                auto prod = zmul(za, zb);
                auto& slot = r[key];
                if (slot.empty()) slot.assign(k + 1, 0);
                for (int d = 0; d <= k; ++d) slot[d] += prod[d];
            }
        return r;
    };
    TreePolynomial T = tree_poly(k);
    XPoly U;
    for (auto& [key, c] : T.terms) {
        std::vector<mpq_class> z(k + 1, 0);
        z[0] = mpq_class(c);
        for (size_t j = 0; j < key.second.size(); ++j)
            for (int e = 0; e < key.second[j]; ++e) z = zmul(z, cmz(static_cast<int>(j) + 2));
        auto& slot = U[key.first];
        if (slot.empty()) slot.assign(k + 1, 0);
        for (int d = 0; d <= k; ++d) slot[d] += z[d];
    }
    XPoly total, power = {{std::vector<int>{}, std::vector<mpq_class>(k + 1, 0)}};
    power.begin()->second[0] = 1;
    for (int i = 1; i <= k + 1; ++i) {
        power = xmul(power, U);
        std::vector<int> xi(i, 0);
        xi[i - 1] = 1;
        XPoly xiU = xmul({{xi, [&] {
                              std::vector<mpq_class> one(k + 1, 0);
                              one[0] = 1;
                              return one;
                          }()}},
                         power);
        for (auto& [key, z] : xiU) {
            auto& slot = total[key];
            if (slot.empty()) slot.assign(k + 1, 0);
            for (int d = 0; d <= k; ++d) slot[d] += z[d];
        }
    }
    CorePolynomial poly;
    poly.family = Family::matching();
    poly.k = k;
    for (auto& [key, z] : total) {
        if (z[k] == 0) continue;
        Monomial m;
        for (size_t i = 0; i < key.size(); ++i)
            if (key[i]) m.x[{static_cast<int>(i) + 1, 0}] = key[i];
        mpq_class c = z[k] / static_cast<long>(m.weight());
        c.canonicalize();
        poly.terms[m] = c;
    }
    return poly;
}

}  // namespace chords
