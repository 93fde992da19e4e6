#pragma once
#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "chords/family.hpp"

namespace chords {

// Raised when an exhaustive computation would exceed its documented bound.
struct ResourceBoundExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using Block = std::vector<int>;

// Rooted configuration: vertices 1..n counterclockwise from the root mark.
struct ChordSystem {
    int n = 0;
    std::vector<Block> blocks;  // each sorted, list sorted
    Family family;

    // Normalizes block order and validates against the family rules.
    static ChordSystem make(Family family, int n, std::vector<Block> blocks);
    // Text form: family=<tag>; n=<int>; blocks=[{a,b},...]
    static ChordSystem parse(const std::string& text);
    std::string str() const;

    bool operator==(const ChordSystem& o) const { return n == o.n && blocks == o.blocks; }
    auto operator<=>(const ChordSystem& o) const {
        if (n != o.n) return n <=> o.n;
        return blocks <=> o.blocks;
    }
};

nlohmann::json to_json(const ChordSystem& sys);
ChordSystem chord_system_from_json(const nlohmann::json& j);

// Region counts n_{i,j}: i boundary arcs, j peaks.
struct RegionProfile {
    std::map<std::pair<int, int>, int> counts;
    int n = 0;
    int m = 0;
    long long k = 0;

    int count(int i, int j = 0) const;
    // Sum over j of n_{i,j}.
    int arcs(int i) const;
    long long weighted_arcs() const;
    bool operator==(const RegionProfile&) const = default;
};

// Crossings between two blocks, counted over pairs of intra-block chords.
long long block_crossings(const Block& u, const Block& v);
long long crossing_number(const ChordSystem& sys);
// Blocks that take part in at least one crossing, relabeled 1..n(core).
ChordSystem core_of(const ChordSystem& sys);
bool is_core(const ChordSystem& sys);
// Throws std::invalid_argument when some block is crossing-free.
RegionProfile region_profile(const ChordSystem& core);
// Region id (0-based, by first arc) of each boundary arc; entry t - 1 is the
// arc from vertex t to vertex t + 1 (the last one wraps to vertex 1).
std::vector<int> arc_regions(const ChordSystem& core);

ChordSystem rotate(const ChordSystem& sys, int shift);
ChordSystem canonical_rotation(const ChordSystem& sys);

// Largest n accepted by enumerate_all for the family.
int enumerate_all_bound(const Family& family);
// Every labeled configuration on exactly n vertices, each once.
void enumerate_all(const Family& family, int n, const std::function<void(const ChordSystem&)>& emit);

}  // namespace chords
