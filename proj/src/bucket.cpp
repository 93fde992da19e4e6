#include "chords/bucket.hpp"

#include <omp.h>

#include <algorithm>
#include <bit>
#include <vector>

namespace chords {

Histogram bucket_reference(const Family& f, int n, bool no_isolated) {
    Histogram h;
    enumerate_all(f, n, [&](const ChordSystem& s) {
        if (no_isolated) {
            std::vector<char> seen(n + 1, 0);
            for (const Block& b : s.blocks)
                for (int v : b) seen[v] = 1;
            if (std::count(seen.begin() + 1, seen.end(), 1) != n) return;
        }
        ++h[{crossing_number(s), static_cast<int>(s.blocks.size())}];
    });
    return h;
}

namespace {

// Flat (k, m) counter owned by one thread.
struct Grid {
    int kmax, mmax;
    std::vector<std::uint64_t> c;
    Grid(int k, int m) : kmax(k), mmax(m), c(static_cast<size_t>(k + 1) * (m + 1), 0) {}
    void add(long long k, int m) { ++c[static_cast<size_t>(k) * (mmax + 1) + m]; }
    void merge_into(Histogram& h) const {
        for (int k = 0; k <= kmax; ++k)
            for (int m = 0; m <= mmax; ++m)
                if (auto v = c[static_cast<size_t>(k) * (mmax + 1) + m]) h[{k, m}] += v;
    }
};

// Matchings: pair the smallest free vertex a with b; the new chord crosses
// every earlier chord whose right end lies in (a, b).
struct MatchingWalk {
    int n;
    std::vector<char> used;
    Grid* grid;
    void run(int placed, long long k) {
        int a = 1;
        while (a <= n && used[a]) ++a;
        if (a > n) {
            grid->add(k, placed);
            return;
        }
        used[a] = 1;
        int inside = 0;
        for (int b = a + 1; b <= n; ++b) {
            if (used[b]) {
                ++inside;
                continue;
            }
            used[b] = 1;
            run(placed + 1, k + inside);
            used[b] = 0;
        }
        used[a] = 0;
    }
};

Histogram matchings(int n) {
    Histogram h;
    if (n % 2) return h;
    const int m = n / 2;
    const int kmax = m * (m - 1) / 2;
    if (n == 0) {
        h[{0, 0}] = 1;
        return h;
    }
    // Task = partner of vertex 1 and partner of the next free vertex.
    std::vector<std::pair<int, int>> tasks;
    for (int b = 2; b <= n; ++b) {
        if (n == 2) {
            tasks.push_back({b, 0});
            continue;
        }
        int a2 = b == 2 ? 3 : 2;
        for (int c = a2 + 1; c <= n; ++c)
            if (c != b) tasks.push_back({b, c});
    }
    #pragma omp parallel
    {
        Grid grid(kmax, m);
        MatchingWalk w{n, std::vector<char>(n + 1, 0), &grid};
        #pragma omp for schedule(dynamic)
        for (size_t t = 0; t < tasks.size(); ++t) {
            auto [b, c] = tasks[t];
            std::fill(w.used.begin(), w.used.end(), 0);
            w.used[1] = w.used[b] = 1;
            if (c == 0) {
                w.run(1, 0);
                continue;
            }
            int a2 = b == 2 ? 3 : 2;
            long long k = (a2 < b && b < c) ? 1 : 0;
            w.used[a2] = w.used[c] = 1;
            w.run(2, k);
        }
        #pragma omp critical
        grid.merge_into(h);
    }
    return h;
}

// Partitions as restricted growth strings; adding v to block B adds, for
// each u in B and each other block V, (#V below u) * (#V above u) crossings.
struct PartitionWalk {
    int n;
    const Family* fam;
    int max_size;
    std::vector<std::vector<int>> blocks;
    Grid* grid;
    long long gain(size_t target) const {
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
    void run(int v, long long k) {
        if (v > n) {
            for (auto& b : blocks)
                if (!fam->allows_size(static_cast<int>(b.size()))) return;
            grid->add(k, static_cast<int>(blocks.size()));
            return;
        }
        for (size_t i = 0; i < blocks.size(); ++i) {
            if (static_cast<int>(blocks[i].size()) >= max_size) continue;
            long long g = gain(i);
            blocks[i].push_back(v);
            run(v + 1, k + g);
            blocks[i].pop_back();
        }
        blocks.push_back({v});
        run(v + 1, k);
        blocks.pop_back();
    }
};

Histogram partitions(const Family& f, int n) {
    Histogram h;
    if (n == 0) {
        h[{0, 0}] = 1;
        return h;
    }
    const int max_size = f.S.is_finite() ? f.S.max() : n;
    // Each 4-subset of vertices carries at most one crossing pair.
    const int kmax = n * (n - 1) * (n - 2) * (n - 3) / 24;
    // Tasks: restricted growth prefixes of the first few vertices.
    const int depth = std::min(n, 5);
    std::vector<std::vector<int>> prefixes{{0}};
    for (int v = 1; v < depth; ++v) {
        std::vector<std::vector<int>> next;
        for (auto& p : prefixes) {
            int top = *std::max_element(p.begin(), p.end());
            for (int b = 0; b <= top + 1; ++b) {
                auto q = p;
                q.push_back(b);
                next.push_back(std::move(q));
            }
        }
        prefixes = std::move(next);
    }
    #pragma omp parallel
    {
        Grid grid(kmax, n);
        #pragma omp for schedule(dynamic)
        for (size_t t = 0; t < prefixes.size(); ++t) {
            PartitionWalk w{n, &f, max_size, {}, &grid};
            long long k = 0;
            bool ok = true;
            for (int v = 1; v <= depth && ok; ++v) {
                size_t b = static_cast<size_t>(prefixes[t][v - 1]);
                if (b == w.blocks.size()) {
                    w.blocks.push_back({v});
                } else if (static_cast<int>(w.blocks[b].size()) >= max_size) {
                    ok = false;
                } else {
                    k += w.gain(b);
                    w.blocks[b].push_back(v);
                }
            }
            if (ok) w.run(depth + 1, k);
        }
        #pragma omp critical
        grid.merge_into(h);
    }
    return h;
}

Histogram diagrams(int n, bool no_isolated) {
    std::vector<std::pair<int, int>> ch;
    for (int a = 1; a <= n; ++a)
        for (int b = a + 1; b <= n; ++b) ch.push_back({a, b});
    const int C = static_cast<int>(ch.size());
    std::vector<std::uint32_t> cross(C, 0);
    for (int i = 0; i < C; ++i)
        for (int j = 0; j < C; ++j) {
            auto [a, b] = ch[i];
            auto [c, d] = ch[j];
            if ((a < c && c < b && b < d) || (c < a && a < d && d < b)) cross[i] |= 1u << j;
        }
    const int kmax = n * (n - 1) * (n - 2) * (n - 3) / 24;
    const int high = std::min(C, 8);
    const int low = C - high;
    Histogram h;
    #pragma omp parallel
    {
        Grid grid(kmax, C);
        #pragma omp for schedule(dynamic)
        for (int top = 0; top < (1 << high); ++top) {
            std::uint32_t mask = static_cast<std::uint32_t>(top) << low;
            long long k = 0;
            std::vector<int> deg(n + 1, 0);
            for (int i = 0; i < C; ++i)
                if (mask >> i & 1) {
                    k += std::popcount(mask & cross[i] & ((1u << i) - 1));
                    ++deg[ch[i].first];
                    ++deg[ch[i].second];
                }
            int bare = static_cast<int>(std::count(deg.begin() + 1, deg.end(), 0));
            int m = std::popcount(mask);
            auto emit = [&] {
                if (!no_isolated || bare == 0) grid.add(k, m);
            };
            emit();
            const std::uint64_t steps = std::uint64_t{1} << low;
            for (std::uint64_t s = 1; s < steps; ++s) {
                int i = std::countr_zero(s);
                std::uint32_t bit = 1u << i;
                auto [a, b] = ch[i];
                if (mask & bit) {
                    mask ^= bit;
                    k -= std::popcount(mask & cross[i]);
                    --m;
                    bare += (--deg[a] == 0) + (--deg[b] == 0);
                } else {
                    k += std::popcount(mask & cross[i]);
                    mask |= bit;
                    ++m;
                    bare -= (deg[a]++ == 0) + (deg[b]++ == 0);
                }
                emit();
            }
        }
        #pragma omp critical
        grid.merge_into(h);
    }
    return h;
}

}  // namespace

Histogram bucket_parallel(const Family& f, int n, bool no_isolated) {
    if (n < 0) throw std::invalid_argument("negative vertex count");
    if (n > enumerate_all_bound(f))
        throw ResourceBoundExceeded("bucketing " + f.str() + " supports n <= " + std::to_string(enumerate_all_bound(f)));
    if (f.tag == FamilyTag::Matching) return matchings(n);
    if (f.is_partition_like()) return partitions(f, n);
    if (f.tag == FamilyTag::Diagram) return diagrams(n, no_isolated);
    return bucket_reference(f, n, no_isolated);
}

}  // namespace chords
