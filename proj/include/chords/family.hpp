#pragma once
#include <string>
#include <vector>

namespace chords {

// Ultimately periodic set of positive integers: an explicit finite part
// plus, for every base b, the progression b, b+p, b+2p, ...
struct SizeSet {
    std::vector<int> finite;
    std::vector<int> bases;
    int period = 0;

    static SizeSet of(std::vector<int> values);
    static SizeSet multiples(int q);
    static SizeSet all();
    // Accepts "{3}", "{2,3}", "3N*", "N*" and "{1,2}+{4,7}/5".
    static SizeSet parse(const std::string& text);

    bool contains(int s) const;
    bool is_finite() const { return bases.empty(); }
    int min() const;
    int max() const;  // finite sets only
    int gcd() const;
    // Smallest element other than 1, or 0 when none exists.
    int min_excluding_one() const;
    std::vector<int> elements_up_to(int bound) const;
    std::string str() const;
    bool operator==(const SizeSet&) const = default;
};

enum class FamilyTag { Matching, Partition, PartitionRestricted, Diagram, Hyperchord, HyperchordRestricted };

struct Family {
    FamilyTag tag = FamilyTag::Matching;
    SizeSet S;

    static Family matching() { return {FamilyTag::Matching, SizeSet::of({2})}; }
    static Family partition() { return {FamilyTag::Partition, SizeSet::all()}; }
    static Family partition(SizeSet s) { return {FamilyTag::PartitionRestricted, std::move(s)}; }
    static Family diagram() { return {FamilyTag::Diagram, SizeSet::of({2})}; }
    static Family hyperchord() { return {FamilyTag::Hyperchord, SizeSet::all()}; }
    static Family hyperchord(SizeSet s) { return {FamilyTag::HyperchordRestricted, std::move(s)}; }
    // name is one of matching, partition, diagram, hyperchord; a nonempty
    // size set selects the restricted variant.
    static Family parse(const std::string& name, const std::string& sizes = "");

    bool is_partition_like() const { return tag == FamilyTag::Partition || tag == FamilyTag::PartitionRestricted; }
    bool is_hyperchord_like() const { return tag == FamilyTag::Hyperchord || tag == FamilyTag::HyperchordRestricted; }
    // Blocks pairwise disjoint and covering every vertex.
    bool covering() const { return tag == FamilyTag::Matching || is_partition_like(); }
    bool has_peaks() const { return tag == FamilyTag::Diagram || is_hyperchord_like(); }
    bool allows_size(int s) const { return s >= 1 && S.contains(s); }
    std::string name() const;
    std::string str() const;
    bool operator==(const Family&) const = default;
};

}  // namespace chords
