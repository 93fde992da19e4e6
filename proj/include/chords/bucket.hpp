#pragma once
#include <cstdint>
#include <map>
#include <utility>

#include "chords/chord_system.hpp"

namespace chords {

// Number of configurations on n vertices keyed by (crossings, blocks).
using Histogram = std::map<std::pair<long long, int>, std::uint64_t>;

// Serial reference: streams enumerate_all and calls crossing_number.
// no_isolated keeps only configurations touching every vertex.
Histogram bucket_reference(const Family& family, int n, bool no_isolated = false);

// OpenMP kernels with incremental crossing updates; same result as the
// reference. Diagrams use a Gray-code walk over chord subsets.
Histogram bucket_parallel(const Family& family, int n, bool no_isolated = false);

}  // namespace chords
