#pragma once
#include <cstdint>
#include <random>
#include <vector>

#include "chords/asymptotics.hpp"
#include "chords/chord_system.hpp"

namespace chords {

struct SamplerConfig {
    double theta = 0.25;
    int k = 0;
    Family family = Family::matching();
    std::uint64_t seed = 1;
    // Budget on generated atoms plus rejected draws for one sample.
    long max_steps = 10'000'000;
    // Diagram only: draw connected crossing-free diagrams.
    bool connected = false;

    // Throws std::invalid_argument unless 0 < theta < singularity().
    void validate() const;
    double singularity() const;
};

// 1/2 for matchings, 3/2 - sqrt2 for diagrams, sqrt3/18 for connected diagrams.
Real sampler_singularity(const Family& family, bool connected);

// Crossing-free generating functions at theta.
Real matching_m0(const Real& theta);
Real connected_diagram_value(const Real& theta);
Real diagram_value(const Real& theta);

struct CoreProbability {
    ChordSystem core;
    Real weight;  // M_K(theta)
    Real probability;
};
// p_K = M_K(theta) / M_k(theta) over every rooted matching k-core.
std::vector<CoreProbability> core_distribution(int k, double theta);

struct SizeMoments {
    Real mean;
    Real variance;        // theta^2 M''/M + theta M'/M - (theta M'/M)^2
    Real variance_table;  // (theta^2 (M'' M - theta M'^2) + theta M') / M
    Real M, M1, M2;       // M_k and its first two derivatives at theta
};
SizeMoments size_moments(int k, double theta);

// Owns the RNG and the tables computed from theta; single-threaded.
class Sampler {
public:
    explicit Sampler(SamplerConfig cfg);
    const SamplerConfig& config() const { return cfg_; }
    ChordSystem crossing_free();
    ChordSystem with_k_crossings();
    // Dispatches on cfg.k.
    ChordSystem next();

private:
    struct Region {
        int arcs = 0;
        double value = 0;    // B_{i-1}(theta)
        double pointed = 0;  // theta B'_{i-1}(theta)
    };
    struct CoreEntry {
        ChordSystem core;
        std::vector<int> arc_region;
        std::vector<Region> regions;
        std::vector<double> point_weights;  // core vertex, then each region
    };

    SamplerConfig cfg_;
    std::mt19937_64 rng_;
    long steps_ = 0;
    double c_ = 0;   // CD at the connected parameter
    double d_ = 0;   // D at theta
    double cd_theta_ = 0;
    std::vector<CoreEntry> cores_;
    std::vector<double> core_weights_;

    void charge(long n = 1);
    double uniform();
    std::vector<bool> matching_m0_branching();
    std::vector<bool> uniform_dyck(int m);
    int marked_size(const Region& r, bool tilted);
    std::vector<int> connected_diagram(std::vector<std::pair<int, int>>& chords, int& next_id, int first, int depth);
    std::vector<int> diagram(std::vector<std::pair<int, int>>& chords, int& next_id, int depth);
};

ChordSystem sample_crossing_free(const SamplerConfig& cfg);
ChordSystem sample_with_k_crossings(const SamplerConfig& cfg);

struct BatchStats {
    long count = 0;
    double mean = 0;
    double variance = 0;
};
BatchStats batch_stats(const std::vector<ChordSystem>& samples);

}  // namespace chords
