#include "chords/chord_system.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

namespace chords {

namespace {

long long binom_ll(int n, int k) {
    long long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

void validate(const ChordSystem& s) {
    const Family& f = s.family;
    if (s.n < 0) throw std::invalid_argument("negative vertex count");
    std::vector<int> used(s.n + 1, 0);
    for (const Block& b : s.blocks) {
        if (b.empty()) throw std::invalid_argument("empty block");
        if (std::adjacent_find(b.begin(), b.end()) != b.end()) throw std::invalid_argument("repeated vertex in block");
        if (b.front() < 1 || b.back() > s.n) throw std::invalid_argument("vertex out of range");
        if (!f.allows_size(static_cast<int>(b.size())))
            throw std::invalid_argument("block size " + std::to_string(b.size()) + " not allowed for " + f.str());
        for (int v : b) ++used[v];
    }
    if (std::adjacent_find(s.blocks.begin(), s.blocks.end()) != s.blocks.end())
        throw std::invalid_argument("duplicate block");
    if (f.covering())
        for (int v = 1; v <= s.n; ++v)
            if (used[v] != 1) throw std::invalid_argument("blocks must partition the vertex set");
}

std::string tag_text(const Family& f) {
    std::string t = f.name();
    if (f.tag == FamilyTag::PartitionRestricted || f.tag == FamilyTag::HyperchordRestricted) t += "(" + f.S.str() + ")";
    return t;
}

Family tag_family(const std::string& tag) {
    auto open = tag.find('(');
    if (open == std::string::npos) return Family::parse(tag);
    if (tag.back() != ')') throw std::invalid_argument("bad family tag: " + tag);
    return Family::parse(tag.substr(0, open), tag.substr(open + 1, tag.size() - open - 2));
}

std::string trim(const std::string& s) {
    auto a = s.find_first_not_of(" \t");
    auto b = s.find_last_not_of(" \t");
    return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

}  // namespace

ChordSystem ChordSystem::make(Family family, int n, std::vector<Block> blocks) {
    ChordSystem s;
    s.family = std::move(family);
    s.n = n;
    for (Block& b : blocks) std::sort(b.begin(), b.end());
    std::sort(blocks.begin(), blocks.end());
    s.blocks = std::move(blocks);
    validate(s);
    return s;
}

std::string ChordSystem::str() const {
    std::string out = "family=" + tag_text(family) + "; n=" + std::to_string(n) + "; blocks=[";
    for (size_t i = 0; i < blocks.size(); ++i) {
        out += i ? ",{" : "{";
        for (size_t j = 0; j < blocks[i].size(); ++j) out += (j ? "," : "") + std::to_string(blocks[i][j]);
        out += "}";
    }
    return out + "]";
}

ChordSystem ChordSystem::parse(const std::string& text) {
    std::string tag;
    int n = -1;
    std::vector<Block> blocks;
    bool have_blocks = false;
    size_t pos = 0;
    while (pos < text.size()) {
        // Fields are separated by ';' outside braces and brackets.
        size_t end = pos;
        int depth = 0;
        while (end < text.size() && !(text[end] == ';' && depth == 0)) {
            if (text[end] == '[' || text[end] == '{' || text[end] == '(') ++depth;
            if (text[end] == ']' || text[end] == '}' || text[end] == ')') --depth;
            ++end;
        }
        std::string field = trim(text.substr(pos, end - pos));
        pos = end + 1;
        if (field.empty()) continue;
        auto eq = field.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("bad field: " + field);
        std::string key = trim(field.substr(0, eq)), val = trim(field.substr(eq + 1));
        if (key == "family") {
            tag = val;
        } else if (key == "n") {
            n = std::stoi(val);
        } else if (key == "blocks") {
            have_blocks = true;
            if (val.size() < 2 || val.front() != '[' || val.back() != ']') throw std::invalid_argument("bad blocks: " + val);
            std::string body = val.substr(1, val.size() - 2);
            size_t p = 0;
            while ((p = body.find('{', p)) != std::string::npos) {
                size_t q = body.find('}', p);
                if (q == std::string::npos) throw std::invalid_argument("unterminated block");
                Block b;
                std::stringstream ss(body.substr(p + 1, q - p - 1));
                std::string item;
                while (std::getline(ss, item, ','))
                    if (!trim(item).empty()) b.push_back(std::stoi(item));
                blocks.push_back(std::move(b));
                p = q + 1;
            }
        } else {
            throw std::invalid_argument("unknown field: " + key);
        }
    }
    if (tag.empty() || n < 0 || !have_blocks) throw std::invalid_argument("missing family, n or blocks");
    return make(tag_family(tag), n, std::move(blocks));
}

nlohmann::json to_json(const ChordSystem& sys) {
    return {{"family", tag_text(sys.family)}, {"n", sys.n}, {"blocks", sys.blocks}};
}

ChordSystem chord_system_from_json(const nlohmann::json& j) {
    return ChordSystem::make(tag_family(j.at("family").get<std::string>()), j.at("n").get<int>(),
                             j.at("blocks").get<std::vector<Block>>());
}

int RegionProfile::count(int i, int j) const {
    auto it = counts.find({i, j});
    return it == counts.end() ? 0 : it->second;
}

int RegionProfile::arcs(int i) const {
    int s = 0;
    for (auto& [key, c] : counts)
        if (key.first == i) s += c;
    return s;
}

long long RegionProfile::weighted_arcs() const {
    long long s = 0;
    for (auto& [key, c] : counts) s += static_cast<long long>(key.first) * c;
    return s;
}

long long block_crossings(const Block& u, const Block& v) {
    long long total = 0;
    for (size_t a = 0; a < u.size(); ++a)
        for (size_t b = a + 1; b < u.size(); ++b) {
            long long in = 0, out = 0;
            for (int w : v) {
                if (w == u[a] || w == u[b]) continue;
                if (w > u[a] && w < u[b]) ++in; else ++out;
            }
            total += in * out;
        }
    return total;
}

long long crossing_number(const ChordSystem& sys) {
    long long total = 0;
    for (size_t a = 0; a < sys.blocks.size(); ++a)
        for (size_t b = a + 1; b < sys.blocks.size(); ++b) total += block_crossings(sys.blocks[a], sys.blocks[b]);
    return total;
}

namespace {

std::vector<bool> crossing_blocks(const ChordSystem& sys) {
    std::vector<bool> hit(sys.blocks.size(), false);
    for (size_t a = 0; a < sys.blocks.size(); ++a)
        for (size_t b = a + 1; b < sys.blocks.size(); ++b)
            if (block_crossings(sys.blocks[a], sys.blocks[b]) > 0) hit[a] = hit[b] = true;
    return hit;
}

}  // namespace

bool is_core(const ChordSystem& sys) {
    auto hit = crossing_blocks(sys);
    return std::all_of(hit.begin(), hit.end(), [](bool h) { return h; });
}

ChordSystem core_of(const ChordSystem& sys) {
    auto hit = crossing_blocks(sys);
    std::vector<int> label(sys.n + 1, 0);
    for (size_t a = 0; a < sys.blocks.size(); ++a)
        if (hit[a])
            for (int v : sys.blocks[a]) label[v] = 1;
    // Relabeling in increasing order keeps the root on the arc before vertex 1.
    int next = 0;
    for (int v = 1; v <= sys.n; ++v)
        if (label[v]) label[v] = ++next;
    std::vector<Block> blocks;
    for (size_t a = 0; a < sys.blocks.size(); ++a) {
        if (!hit[a]) continue;
        Block b;
        for (int v : sys.blocks[a]) b.push_back(label[v]);
        blocks.push_back(std::move(b));
    }
    return ChordSystem::make(sys.family, next, std::move(blocks));
}

RegionProfile region_profile(const ChordSystem& core) {
    if (!is_core(core)) throw std::invalid_argument("region_profile expects a core: every block must cross");
    const int n = core.n;
    RegionProfile prof;
    prof.n = n;
    prof.m = static_cast<int>(core.blocks.size());
    prof.k = crossing_number(core);
    if (n == 0) return prof;

    // Faces of the complement are convex, so a point's face is fixed by which
    // cap of every block it lies in. Arc t joins vertex t and t+1.
    std::vector<const Block*> bl;
    for (const Block& b : core.blocks)
        if (b.size() >= 2) bl.push_back(&b);
    auto gap = [&](const Block& b, int t) {
        int c = static_cast<int>(std::upper_bound(b.begin(), b.end(), t) - b.begin());
        return c % static_cast<int>(b.size());
    };
    std::map<std::vector<int>, std::pair<int, int>> faces;
    for (int t = 1; t <= n; ++t) {
        std::vector<int> sig;
        for (const Block* b : bl) sig.push_back(gap(*b, t));
        ++faces[sig].first;
    }
    // Peaks: angular sectors at v between consecutive incident blocks.
    for (int v = 1; v <= n; ++v) {
        std::vector<std::pair<int, int>> spans;
        for (const Block* b : bl) {
            if (!std::binary_search(b->begin(), b->end(), v)) continue;
            int lo = n, hi = 0;
            for (int w : *b) {
                if (w == v) continue;
                int off = (w - v + n) % n;
                lo = std::min(lo, off);
                hi = std::max(hi, off);
            }
            spans.push_back({lo, hi});
        }
        if (spans.size() < 2) continue;
        std::sort(spans.begin(), spans.end());
        std::vector<int> ends;  // end offset of each merged span but the last
        int cur = spans[0].second;
        for (size_t s = 1; s < spans.size(); ++s) {
            if (spans[s].first <= cur) {
                cur = std::max(cur, spans[s].second);
            } else {
                ends.push_back(cur);
                cur = spans[s].second;
            }
        }
        for (int a : ends) {
            int arc = (v - 1 + a) % n + 1;
            std::vector<int> sig;
            for (const Block* b : bl) {
                bool has_v = std::binary_search(b->begin(), b->end(), v);
                sig.push_back(gap(*b, has_v ? arc : v));
            }
            ++faces[sig].second;
        }
    }
    for (auto& [sig, ij] : faces) ++prof.counts[ij];
    return prof;
}

std::vector<int> arc_regions(const ChordSystem& core) {
    if (!is_core(core)) throw std::invalid_argument("arc_regions expects a core: every block must cross");
    std::map<std::vector<int>, int> ids;
    std::vector<int> out;
    for (int t = 1; t <= core.n; ++t) {
        std::vector<int> sig;
        for (const Block& b : core.blocks) {
            if (b.size() < 2) continue;
            int c = static_cast<int>(std::upper_bound(b.begin(), b.end(), t) - b.begin());
            sig.push_back(c % static_cast<int>(b.size()));
        }
        auto it = ids.emplace(sig, static_cast<int>(ids.size())).first;
        out.push_back(it->second);
    }
    return out;
}

ChordSystem rotate(const ChordSystem& sys, int shift) {
    if (sys.n == 0) return sys;
    int r = ((shift % sys.n) + sys.n) % sys.n;
    std::vector<Block> blocks;
    for (const Block& b : sys.blocks) {
        Block nb;
        for (int v : b) nb.push_back((v - 1 + r) % sys.n + 1);
        blocks.push_back(std::move(nb));
    }
    return ChordSystem::make(sys.family, sys.n, std::move(blocks));
}

ChordSystem canonical_rotation(const ChordSystem& sys) {
    ChordSystem best = sys;
    for (int r = 1; r < sys.n; ++r) {
        ChordSystem c = rotate(sys, r);
        if (c.blocks < best.blocks) best = std::move(c);
    }
    return best;
}

int enumerate_all_bound(const Family& f) {
    switch (f.tag) {
        case FamilyTag::Matching: return 14;
        case FamilyTag::Partition:
        case FamilyTag::PartitionRestricted: return 12;
        case FamilyTag::Diagram: return 8;
        default: break;
    }
    // Hyperchords: subsets of at most 2^21 admissible blocks.
    int n = 1;
    while (true) {
        long long blocks = 0;
        for (int s = 1; s <= n + 1; ++s)
            if (f.allows_size(s)) blocks += binom_ll(n + 1, s);
        if (blocks > 21) return n;
        ++n;
    }
}

namespace {

void gen_matchings(const Family& f, int n, std::vector<int>& mate, std::vector<Block>& cur,
                   const std::function<void(const ChordSystem&)>& emit) {
    int a = 1;
    while (a <= n && mate[a]) ++a;
    if (a > n) {
        ChordSystem s;
        s.family = f;
        s.n = n;
        s.blocks = cur;
        std::sort(s.blocks.begin(), s.blocks.end());
        emit(s);
        return;
    }
    for (int b = a + 1; b <= n; ++b) {
        if (mate[b]) continue;
        mate[a] = b;
        mate[b] = a;
        cur.push_back({a, b});
        gen_matchings(f, n, mate, cur, emit);
        cur.pop_back();
        mate[a] = mate[b] = 0;
    }
}

void gen_partitions(const Family& f, int n, int v, std::vector<Block>& cur,
                    const std::function<void(const ChordSystem&)>& emit) {
    if (v > n) {
        for (const Block& b : cur)
            if (!f.allows_size(static_cast<int>(b.size()))) return;
        ChordSystem s;
        s.family = f;
        s.n = n;
        s.blocks = cur;
        std::sort(s.blocks.begin(), s.blocks.end());
        emit(s);
        return;
    }
    for (size_t i = 0; i < cur.size(); ++i) {
        cur[i].push_back(v);
        gen_partitions(f, n, v + 1, cur, emit);
        cur[i].pop_back();
    }
    cur.push_back({v});
    gen_partitions(f, n, v + 1, cur, emit);
    cur.pop_back();
}

}  // namespace

void enumerate_all(const Family& f, int n, const std::function<void(const ChordSystem&)>& emit) {
    if (n < 0) throw std::invalid_argument("negative vertex count");
    if (n > enumerate_all_bound(f))
        throw ResourceBoundExceeded("enumerate_all(" + f.str() + ") supports n <= " + std::to_string(enumerate_all_bound(f)));
    if (f.tag == FamilyTag::Matching) {
        if (n % 2) return;
        std::vector<int> mate(n + 1, 0);
        std::vector<Block> cur;
        gen_matchings(f, n, mate, cur, emit);
        return;
    }
    if (f.is_partition_like()) {
        std::vector<Block> cur;
        gen_partitions(f, n, 1, cur, emit);
        return;
    }
    // Diagrams and hyperchords: every set of distinct admissible blocks.
    std::vector<Block> cand;
    for (unsigned mask = 1; mask < (1u << n); ++mask) {
        Block b;
        for (int v = 0; v < n; ++v)
            if (mask >> v & 1) b.push_back(v + 1);
        if (f.allows_size(static_cast<int>(b.size()))) cand.push_back(std::move(b));
    }
    std::sort(cand.begin(), cand.end());
    if (cand.size() > 30) throw ResourceBoundExceeded("too many candidate blocks");
    const std::uint64_t total = std::uint64_t{1} << cand.size();
    ChordSystem s;
    s.family = f;
    s.n = n;
    for (std::uint64_t sub = 0; sub < total; ++sub) {
        s.blocks.clear();
        for (size_t i = 0; i < cand.size(); ++i)
            if (sub >> i & 1) s.blocks.push_back(cand[i]);
        emit(s);
    }
}

}  // namespace chords
