#include "chords/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <stdexcept>

#include "chords/enumeration.hpp"
#include "chords/gf.hpp"

namespace chords {

namespace {

using boost::multiprecision::abs;
using boost::multiprecision::sqrt;

Real tolerance() { return boost::multiprecision::pow(Real(10), -static_cast<int>(Real::default_precision()) + 2); }

// Taylor coefficients at theta: f(theta + t) = sum c_n t^n.
using Jet = std::vector<Real>;

Jet jet_mul(const Jet& a, const Jet& b, size_t len) {
    Jet r(len, Real(0));
    for (size_t i = 0; i < std::min(len, a.size()); ++i)
        for (size_t j = 0; i + j < len && j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return r;
}

Jet jet_power(const Jet& a, int e, size_t len) {
    Jet r(len, Real(0));
    r[0] = 1;
    for (int i = 0; i < e; ++i) r = jet_mul(r, a, len);
    return r;
}

Jet jet_x(const Real& theta, size_t len) {
    Jet x(len, Real(0));
    x[0] = theta;
    if (len > 1) x[1] = 1;
    return x;
}

// M0 = 1 + x^2 M0^2 solved order by order around theta.
Jet m0_jet(const Real& theta, size_t len) {
    Jet m(len, Real(0));
    m[0] = matching_m0(theta);
    Jet q = jet_power(jet_x(theta, 3), 2, 3);
    Real lead = 1 - 2 * q[0] * m[0];
    auto sq = [&](size_t n) -> Real {  // [t^n] M^2 from known terms
        Real s = 0;
        for (size_t a = 0; a <= n; ++a) s += m[a] * m[n - a];
        return s;
    };
    for (size_t n = 1; n < len; ++n) {
        Real rest = 0;
        for (size_t a = 1; a < n; ++a) rest += m[a] * m[n - a];
        Real s = q[0] * rest + q[1] * sq(n - 1);
        if (n >= 2) s += q[2] * sq(n - 2);
        m[n] = s / lead;
    }
    return m;
}

Real binom_real(int n, int k) {
    Real r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

// B_{i-1} = D^{i-1}(x^{i-1} M0) / (i-1)! around theta.
Jet marked_jet(const Real& theta, int i, size_t len) {
    Jet f = jet_mul(jet_power(jet_x(theta, len + i), i - 1, len + i), m0_jet(theta, len + i), len + i);
    Jet g(len, Real(0));
    for (size_t n = 0; n < len; ++n) g[n] = f[n + i - 1] * binom_real(static_cast<int>(n) + i - 1, i - 1);
    return g;
}

// x^i B_{i-1}: the substitution for x_i.
Jet slot_jet(const Real& theta, int i, size_t len) {
    return jet_mul(jet_power(jet_x(theta, len), i, len), marked_jet(theta, i, len), len);
}

// x d/dx of G, as a jet of length len from a jet of length len + 1.
Jet x_derivative(const Jet& g, const Real& theta, size_t len) {
    Jet d(len, Real(0));
    for (size_t n = 0; n < len; ++n) d[n] = g[n + 1] * static_cast<long>(n + 1);
    return jet_mul(jet_x(theta, len), d, len);
}

Jet monomial_jet(const std::map<std::pair<int, int>, int>& x, const Real& theta, size_t len) {
    Jet r(len, Real(0));
    r[0] = 1;
    for (const auto& [ij, e] : x) r = jet_mul(r, jet_power(slot_jet(theta, ij.first, len), e, len), len);
    return r;
}

void check_matching_theta(double theta) {
    if (!(theta > 0 && theta < 0.5)) throw std::invalid_argument("theta must lie in (0, 1/2) for matchings");
}

const std::vector<ChordSystem>& matching_cores(int k) {
    static std::mutex mu;
    static std::map<int, std::vector<ChordSystem>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(k);
    if (it == cache.end()) it = cache.emplace(k, enumerate_cores(Family::matching(), k)).first;
    return it->second;
}

}  // namespace

Real sampler_singularity(const Family& family, bool connected) {
    switch (family.tag) {
        case FamilyTag::Matching: return Real(1) / 2;
        case FamilyTag::Diagram: return connected ? sqrt(Real(3)) / 18 : Real(3) / 2 - sqrt(Real(2));
        default: throw std::invalid_argument("no sampler for " + family.str());
    }
}

double SamplerConfig::singularity() const { return sampler_singularity(family, connected).convert_to<double>(); }

void SamplerConfig::validate() const {
    if (family.tag != FamilyTag::Matching && family.tag != FamilyTag::Diagram)
        throw std::invalid_argument("samplers exist for matchings and diagrams only");
    if (connected && family.tag != FamilyTag::Diagram) throw std::invalid_argument("connected sampling is for diagrams");
    if (!(theta > 0 && theta < singularity()))
        throw std::invalid_argument("theta must lie in (0, " + std::to_string(singularity()) + ") for " + family.str());
    if (k < 0) throw std::invalid_argument("negative crossing count");
    if (k > 0 && family.tag != FamilyTag::Matching) throw std::invalid_argument("k-crossing sampling is for matchings");
    if (k > 0 && connected) throw std::invalid_argument("connected sampling has no crossings");
    if (max_steps <= 0) throw std::invalid_argument("max_steps must be positive");
}

Real matching_m0(const Real& theta) {
    Real t2 = theta * theta;
    return (1 - sqrt(1 - 4 * t2)) / (2 * t2);
}

Real connected_diagram_value(const Real& x) {
    if (!(x > 0 && x < sampler_singularity(Family::diagram(), true)))
        throw std::invalid_argument("connected diagram value needs 0 < x < sqrt3/18");
    // Iteration from c = x climbs to the combinatorial root of
    // c^3 + c^2 - 3xc + 2x^2 = 0; Newton then polishes it.
    Real c = x;
    for (int it = 0; it < 400; ++it) c = x * (1 + c * c / (x - (c - x + c * c)));
    for (int it = 0; it < 200; ++it) {
        Real f = c * c * c + c * c - 3 * x * c + 2 * x * x;
        Real fc = 3 * c * c + 2 * c - 3 * x;
        Real step = f / fc;
        c -= step;
        if (abs(step) < abs(c) * tolerance()) break;
    }
    return c;
}

Real diagram_value(const Real& theta) {
    if (!(theta > 0 && theta < sampler_singularity(Family::diagram(), false)))
        throw std::invalid_argument("diagram value needs 0 < theta < 3/2 - sqrt2");
    // D = 1 + CD(theta D).
    Real d = 1;
    for (int it = 0; it < 200; ++it) d = 1 + connected_diagram_value(theta * d);
    for (int it = 0; it < 200; ++it) {
        Real x = theta * d;
        Real c = connected_diagram_value(x);
        Real cx = (3 * c - 4 * x) / (3 * c * c + 2 * c - 3 * x);
        Real h = 1 + c - d;
        Real step = h / (theta * cx - 1);
        d -= step;
        if (abs(step) < abs(d) * tolerance()) break;
    }
    return d;
}

std::vector<CoreProbability> core_distribution(int k, double theta) {
    if (k < 1) throw std::invalid_argument("core_distribution needs k >= 1");
    if (k > core_k_bound(Family::matching()))
        throw ResourceBoundExceeded("matching cores are enumerated up to k = " + std::to_string(core_k_bound(Family::matching())));
    check_matching_theta(theta);
    PrecisionScope scope(NumericConfig::from_env().digits);
    Real t = theta;
    std::vector<CoreProbability> out;
    Real total = 0;
    std::map<std::map<std::pair<int, int>, int>, Real> memo;
    for (const ChordSystem& core : matching_cores(k)) {
        RegionProfile p = region_profile(core);
        auto it = memo.find(p.counts);
        if (it == memo.end()) {
            Jet g = monomial_jet(p.counts, t, 2);
            it = memo.emplace(p.counts, x_derivative(g, t, 1)[0]).first;
        }
        Real w = it->second / core.n;
        total += w;
        out.push_back({core, w, Real(0)});
    }
    for (auto& c : out) c.probability = c.weight / total;
    return out;
}

SizeMoments size_moments(int k, double theta) {
    if (k < 0) throw std::invalid_argument("negative crossing count");
    if (k > core_poly_k_bound(Family::matching()))
        throw ResourceBoundExceeded("matching core polynomials stop at k = " + std::to_string(core_poly_k_bound(Family::matching())));
    check_matching_theta(theta);
    PrecisionScope scope(NumericConfig::from_env().digits);
    Real t = theta;
    Jet m(3, Real(0));
    if (k == 0) {
        m = m0_jet(t, 3);
    } else {
        Jet g(4, Real(0));
        for (const auto& [mono, coef] : cached_core_polynomial(Family::matching(), k).terms) {
            Jet term = monomial_jet(mono.x, t, 4);
            Real c = to_real(coef);
            for (size_t n = 0; n < 4; ++n) g[n] += c * term[n];
        }
        m = x_derivative(g, t, 3);
    }
    SizeMoments s;
    s.M = m[0];
    s.M1 = m[1];
    s.M2 = 2 * m[2];
    Real e = t * s.M1 / s.M;
    s.mean = e;
    s.variance = t * t * s.M2 / s.M + e - e * e;
    s.variance_table = (t * t * (s.M2 * s.M - t * s.M1 * s.M1) + t * s.M1) / s.M;
    return s;
}

Sampler::Sampler(SamplerConfig cfg) : cfg_(std::move(cfg)), rng_(cfg_.seed) {
    cfg_.validate();
    PrecisionScope scope(NumericConfig::from_env().digits);
    Real t = cfg_.theta;
    if (cfg_.family.tag == FamilyTag::Diagram) {
        if (cfg_.connected) {
            cd_theta_ = cfg_.theta;
        } else {
            Real d = diagram_value(t);
            d_ = d.convert_to<double>();
            cd_theta_ = (t * d).convert_to<double>();
        }
        c_ = connected_diagram_value(Real(cd_theta_)).convert_to<double>();
        return;
    }
    if (cfg_.k == 0) return;
    std::map<int, Region> region_of;
    auto region = [&](int i) {
        auto it = region_of.find(i);
        if (it != region_of.end()) return it->second;
        Jet g = marked_jet(t, i, 2);
        Region r{i, g[0].convert_to<double>(), (t * g[1]).convert_to<double>()};
        return region_of.emplace(i, r).first->second;
    };
    for (const CoreProbability& cp : core_distribution(cfg_.k, cfg_.theta)) {
        CoreEntry e;
        e.core = cp.core;
        e.arc_region = arc_regions(cp.core);
        int nr = *std::max_element(e.arc_region.begin(), e.arc_region.end()) + 1;
        std::vector<int> arcs(nr, 0);
        for (int r : e.arc_region) ++arcs[r];
        for (int r = 0; r < nr; ++r) e.regions.push_back(region(arcs[r]));
        double all = 1;
        for (const Region& r : e.regions) all *= r.value;
        e.point_weights.push_back(cp.core.n * all);
        for (const Region& r : e.regions) e.point_weights.push_back(r.pointed * all / r.value);
        core_weights_.push_back(cp.probability.convert_to<double>());
        cores_.push_back(std::move(e));
    }
}

void Sampler::charge(long n) {
    steps_ += n;
    if (steps_ > cfg_.max_steps) throw ResourceBoundExceeded("sampler exceeded max_steps = " + std::to_string(cfg_.max_steps));
}

double Sampler::uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(rng_); }

std::vector<bool> Sampler::matching_m0_branching() {
    // M0 -> empty with probability 1/M0, else (vertex, M0, vertex, M0).
    double p = 1 / (matching_m0(Real(cfg_.theta)).convert_to<double>());
    std::vector<bool> word;  // true opens a chord
    enum Task { Gen, Close };
    std::vector<Task> stack{Gen};
    while (!stack.empty()) {
        Task task = stack.back();
        stack.pop_back();
        if (task == Close) {
            word.push_back(false);
            continue;
        }
        if (uniform() < p) continue;
        charge(2);
        word.push_back(true);
        stack.push_back(Gen);    // after the chord
        stack.push_back(Close);  // second endpoint
        stack.push_back(Gen);    // under the chord
    }
    return word;
}

std::vector<bool> Sampler::uniform_dyck(int m) {
    // Cycle lemma: the rotation of m ups and m + 1 downs starting at the first
    // prefix minimum is a Dyck path followed by one down step.
    std::vector<int> steps(2 * m + 1, -1);
    std::fill(steps.begin(), steps.begin() + m, 1);
    std::shuffle(steps.begin(), steps.end(), rng_);
    int sum = 0, best = 0, start = 0;
    for (int j = 0; j < static_cast<int>(steps.size()); ++j) {
        sum += steps[j];
        if (sum < best) {
            best = sum;
            start = j + 1;
        }
    }
    std::vector<bool> word;
    for (int l = 0; l < 2 * m; ++l) word.push_back(steps[(start + l) % steps.size()] == 1);
    return word;
}

int Sampler::marked_size(const Region& r, bool tilted) {
    // Weights binom(2m + i - 1, i - 1) Cat(m) theta^(2m), times 2m if tilted.
    const int i = r.arcs;
    const long double th2 = static_cast<long double>(cfg_.theta) * cfg_.theta;
    const long double total = tilted ? r.pointed : r.value;
    const long double target = uniform() * total;
    long double term = 1, acc = 0;
    for (long m = 0;; ++m) {
        long double w = tilted ? term * 2 * m : term;
        acc += w;
        if (acc >= target && w > 0) return static_cast<int>(m);
        // Rounding can leave acc a hair below target once the tail is negligible.
        if (m > 2 && w < total * 1e-30L && acc > total * (1 - 1e-15L)) return static_cast<int>(m);
        charge();
        term *= th2 * 2 * (2 * m + 1) / (m + 2) * (2 * m + i + 1) * (2 * m + i) / ((2 * m + 2) * (2 * m + 1));
    }
}

ChordSystem Sampler::crossing_free() {
    steps_ = 0;
    if (cfg_.family.tag == FamilyTag::Matching) {
        std::vector<bool> word = matching_m0_branching();
        std::vector<Block> blocks;
        std::vector<int> open;
        for (size_t v = 0; v < word.size(); ++v) {
            if (word[v]) {
                open.push_back(static_cast<int>(v) + 1);
            } else {
                blocks.push_back({open.back(), static_cast<int>(v) + 1});
                open.pop_back();
            }
        }
        return ChordSystem::make(Family::matching(), static_cast<int>(word.size()), std::move(blocks));
    }
    std::vector<std::pair<int, int>> chords;
    int next_id = 0;
    std::vector<int> seq = cfg_.connected ? connected_diagram(chords, next_id, -1, 0) : diagram(chords, next_id, 0);
    std::vector<int> label(next_id, 0);
    for (size_t p = 0; p < seq.size(); ++p) label[seq[p]] = static_cast<int>(p) + 1;
    std::vector<Block> blocks;
    for (auto [a, b] : chords) blocks.push_back({label[a], label[b]});
    return ChordSystem::make(Family::diagram(), static_cast<int>(seq.size()), std::move(blocks));
}

std::vector<int> Sampler::connected_diagram(std::vector<std::pair<int, int>>& chords, int& next_id, int first, int depth) {
    // CD = x + CD^2 sum_r ((CD - x + CD^2) / x)^r: a single vertex, or a first
    // vertex v with principal chords to w_1 < ... < w_{r+1}. The piece ending at
    // w_1 and the piece starting at w_{r+1} are connected; each piece between
    // w_t and w_{t+1} is one connected diagram on both or two connected ones.
    if (depth > 20000) throw ResourceBoundExceeded("connected diagram sampler nesting exceeded 20000");
    const double x = cd_theta_, c = c_;
    int v = first >= 0 ? first : next_id++;
    if (first < 0) charge();
    if (uniform() < x / c) return {v};
    const double q = (c - x + c * c) / x;
    int r = 0;
    while (uniform() < q) {
        ++r;
        charge();
    }
    std::vector<int> seq{v};
    std::vector<int> piece = connected_diagram(chords, next_id, -1, depth + 1);
    seq.insert(seq.end(), piece.begin(), piece.end());
    int w = piece.back();
    chords.push_back({v, w});
    const double one = (c - x) / (c - x + c * c);
    for (int t = 0; t < r; ++t) {
        if (uniform() < one) {
            do {
                charge();
                piece = connected_diagram(chords, next_id, w, depth + 1);
            } while (piece.size() < 2);
            seq.insert(seq.end(), piece.begin() + 1, piece.end());
        } else {
            piece = connected_diagram(chords, next_id, w, depth + 1);
            seq.insert(seq.end(), piece.begin() + 1, piece.end());
            piece = connected_diagram(chords, next_id, -1, depth + 1);
            seq.insert(seq.end(), piece.begin(), piece.end());
        }
        w = seq.back();
        chords.push_back({v, w});
    }
    piece = connected_diagram(chords, next_id, w, depth + 1);
    seq.insert(seq.end(), piece.begin() + 1, piece.end());
    return seq;
}

std::vector<int> Sampler::diagram(std::vector<std::pair<int, int>>& chords, int& next_id, int depth) {
    // D = 1 + CD(x D): the component of vertex 1, each vertex followed by an
    // independent crossing-free diagram.
    if (depth > 20000) throw ResourceBoundExceeded("diagram sampler nesting exceeded 20000");
    if (uniform() < 1 / d_) return {};
    std::vector<int> comp = connected_diagram(chords, next_id, -1, depth + 1);
    std::vector<int> seq;
    for (int v : comp) {
        seq.push_back(v);
        std::vector<int> gap = diagram(chords, next_id, depth + 1);
        seq.insert(seq.end(), gap.begin(), gap.end());
    }
    return seq;
}

ChordSystem Sampler::with_k_crossings() {
    if (cfg_.k < 1) throw std::invalid_argument("with_k_crossings needs k >= 1");
    steps_ = 0;
    const CoreEntry& e = cores_[std::discrete_distribution<size_t>(core_weights_.begin(), core_weights_.end())(rng_)];
    size_t point = std::discrete_distribution<size_t>(e.point_weights.begin(), e.point_weights.end())(rng_);
    const int nr = static_cast<int>(e.regions.size());

    // Fill of region r: a crossing-free matching whose vertex sequence is cut
    // into one chunk per arc by i - 1 uniformly placed bars.
    struct Fill {
        std::vector<int> partner;
        std::vector<int> chunk;
        std::vector<int> global;
    };
    std::vector<Fill> fills(nr);
    for (int r = 0; r < nr; ++r) {
        const Region& reg = e.regions[r];
        int m = marked_size(reg, point == static_cast<size_t>(r) + 1);
        std::vector<bool> word = uniform_dyck(m);
        Fill& f = fills[r];
        f.partner.assign(2 * m, -1);
        std::vector<int> open;
        for (int p = 0; p < 2 * m; ++p) {
            if (word[p]) {
                open.push_back(p);
            } else {
                f.partner[p] = open.back();
                f.partner[open.back()] = p;
                open.pop_back();
            }
        }
        int slots = 2 * m + reg.arcs - 1;
        std::vector<int> idx(slots);
        std::iota(idx.begin(), idx.end(), 0);
        for (int b = 0; b < reg.arcs - 1; ++b) std::swap(idx[b], idx[b + std::uniform_int_distribution<int>(0, slots - 1 - b)(rng_)]);
        std::vector<bool> bar(slots, false);
        for (int b = 0; b < reg.arcs - 1; ++b) bar[idx[b]] = true;
        int chunk = 0;
        for (int s = 0; s < slots; ++s) {
            if (bar[s]) ++chunk;
            else f.chunk.push_back(chunk);
        }
        f.global.assign(2 * m, -1);
    }

    const ChordSystem& core = e.core;
    std::vector<int> core_global(core.n + 1);
    std::vector<int> seen(nr, 0);
    std::vector<size_t> cursor(nr, 0);
    int pos = 0;
    for (int v = 1; v <= core.n; ++v) {
        core_global[v] = pos++;
        int r = e.arc_region[v - 1];
        int chunk = seen[r]++;
        Fill& f = fills[r];
        while (cursor[r] < f.chunk.size() && f.chunk[cursor[r]] == chunk) f.global[cursor[r]++] = pos++;
    }
    const int n = pos;

    int pointed;
    if (point == 0) {
        pointed = core_global[1 + std::uniform_int_distribution<int>(0, core.n - 1)(rng_)];
    } else {
        const Fill& f = fills[point - 1];
        pointed = f.global[std::uniform_int_distribution<size_t>(0, f.global.size() - 1)(rng_)];
    }
    auto label = [&](int g) { return (g - pointed + n) % n + 1; };
    std::vector<Block> blocks;
    for (const Block& b : core.blocks) blocks.push_back({label(core_global[b[0]]), label(core_global[b[1]])});
    for (const Fill& f : fills)
        for (size_t p = 0; p < f.partner.size(); ++p)
            if (static_cast<int>(p) < f.partner[p]) blocks.push_back({label(f.global[p]), label(f.global[f.partner[p]])});
    return ChordSystem::make(Family::matching(), n, std::move(blocks));
}

ChordSystem Sampler::next() { return cfg_.k > 0 ? with_k_crossings() : crossing_free(); }

ChordSystem sample_crossing_free(const SamplerConfig& cfg) {
    if (cfg.k != 0) throw std::invalid_argument("sample_crossing_free needs k = 0");
    return Sampler(cfg).crossing_free();
}

ChordSystem sample_with_k_crossings(const SamplerConfig& cfg) {
    if (cfg.family.tag != FamilyTag::Matching || cfg.k < 1) throw std::invalid_argument("sample_with_k_crossings needs a matching family and k >= 1");
    return Sampler(cfg).with_k_crossings();
}

BatchStats batch_stats(const std::vector<ChordSystem>& samples) {
    BatchStats s;
    s.count = static_cast<long>(samples.size());
    if (samples.empty()) return s;
    long double sum = 0, sq = 0;
    for (const ChordSystem& c : samples) {
        sum += c.n;
        sq += static_cast<long double>(c.n) * c.n;
    }
    s.mean = static_cast<double>(sum / s.count);
    s.variance = s.count > 1 ? static_cast<double>((sq - sum * sum / s.count) / (s.count - 1)) : 0.0;
    return s;
}

}  // namespace chords
