#include <doctest.h>

#include <set>

#include "chords/enumeration.hpp"

using namespace chords;

namespace {

CorePolynomial P(const Family& f, int k, const std::string& s) { return CorePolynomial::parse(f, k, s); }

std::vector<ChordSystem> cores_by_filter(const Family& f, int n, long long k) {
    std::vector<ChordSystem> out;
    enumerate_all(f, n, [&](const ChordSystem& s) {
        if (!s.blocks.empty() && is_core(s) && crossing_number(s) == k) {
            // Cores touch every vertex.
            std::vector<char> seen(n + 1, 0);
            for (auto& b : s.blocks)
                for (int v : b) seen[v] = 1;
            for (int v = 1; v <= n; ++v)
                if (!seen[v]) return;
            out.push_back(s);
        }
    });
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

TEST_CASE("matching core polynomials") {
    auto f = Family::matching();
    CHECK(core_polynomial(f, 1).str() == "1/4*x1^4");
    CHECK(core_polynomial(f, 2).str() == "1/2*x1^6 + 1/2*x1^6*x2");
    CHECK(core_polynomial(f, 3) == P(f, 3, "1/6*x1^6 + 3/2*x1^8 + 3*x1^8*x2 + 3/2*x1^8*x2^2 + 1/3*x1^9*x3"));
    CHECK(enumerate_cores(f, 1).size() == 1);
    CHECK(enumerate_cores(f, 2).size() == 7);
    for (int k = 1; k <= 4; ++k) {
        auto kp = core_polynomial(f, k);
        CHECK(kp.rooted_count() == mpq_class(static_cast<long>(enumerate_cores(f, k).size())));
        for (auto& [m, c] : kp.terms) {
            CHECK(c > 0);
            mpq_class scaled = c * static_cast<long>(m.weight());
            CHECK(scaled.get_den() == 1);
        }
    }
}

TEST_CASE("partition and diagram core polynomials") {
    auto p = Family::partition();
    CHECK(core_polynomial(p, 1) == P(p, 1, "1/4*x1^4*y^2"));
    CHECK(core_polynomial(p, 2) == P(p, 2, "1/2*x1^6*y^3 + 1/2*x1^6*x2*y^4 + x1^5*y^2"));
    // The x1^7*x2*y^4 class has five unrooted shapes (a 1-core beside each of
    // the five arcs of the triangle-chord 2-core); exhaustive search over
    // partitions of [9] confirms 45 rooted cores, so its coefficient is 5.
    CHECK(core_polynomial(p, 3) == P(p, 3,
                                     "1/6*x1^6*y^3 + 3/2*x1^8*y^4 + 3*x1^8*x2*y^5 + 3/2*x1^8*x2^2*y^6 + 1/3*x1^9*x3*y^6"
                                     " + 5*x1^7*x2*y^4 + x1^6*y^2 + 2*x1^7*y^3"));
    auto d = Family::diagram();
    auto kd2 = P(d, 2, "1/2*x1_0^6*x2_0*y^4 + x1_0^6*x1_1*y^4 + 1/2*x0_2*x1_0^6*y^4 + 1/2*x1_0^6*y^3 + x0_1*x1_0^5*y^3");
    CHECK(core_polynomial(d, 2) == kd2);
    CHECK(CorePolynomial::parse(d, 2, kd2.str()) == kd2);
    CHECK(core_polynomial(d, 1) == P(d, 1, "1/4*x1_0^4*y^2"));
}

TEST_CASE("cores agree with filtering all configurations") {
    for (int k = 1; k <= 4; ++k) {
        auto cores = enumerate_cores(Family::matching(), k);
        for (int n = 2; n <= 10; n += 2) {
            std::vector<ChordSystem> sub;
            for (auto& c : cores)
                if (c.n == n) sub.push_back(c);
            std::sort(sub.begin(), sub.end());
            CHECK(sub == cores_by_filter(Family::matching(), n, k));
        }
    }
    for (auto fam : {Family::partition(), Family::diagram(), Family::partition(SizeSet::of({3}))})
        for (int k = 1; k <= 3; ++k) {
            auto cores = enumerate_cores(fam, k);
            for (int n = 2; n <= (fam.tag == FamilyTag::Diagram ? 7 : fam.tag == FamilyTag::Partition ? 10 : 9); ++n) {
                std::vector<ChordSystem> sub;
                for (auto& c : cores)
                    if (c.n == n) sub.push_back(c);
                std::sort(sub.begin(), sub.end());
                CHECK(sub == cores_by_filter(fam, n, k));
            }
        }
}

TEST_CASE("partition cores beyond matchings include the 5-vertex 2-core") {
    bool found = false;
    for (auto& c : enumerate_cores(Family::partition(), 2))
        if (c.n == 5) {
            found = true;
            CHECK(c.blocks.size() == 2);
        }
    CHECK(found);
}

TEST_CASE("connected matchings") {
    auto t = connected_table(Family::matching(), 4);
    CHECK(t.cell(1, 2) == 1);
    CHECK(t.cell(2, 3) == 3);
    CHECK(t.cell(4, 4) == 10);
    CHECK(t.cell(4, 5) == 55);
    CHECK(t.total(1) == 1);
    CHECK(t.total(4) == 65);
    CHECK(t.csv().find("4,4,10\n") != std::string::npos);
    for (auto& s : enumerate_connected(Family::matching(), 4)) {
        auto k = crossing_number(s);
        auto p = region_profile(s);
        CHECK(p.count(1) == s.n);
        CHECK(s.n <= 2 * (k + 1));
        CHECK(static_cast<long long>(s.blocks.size()) - 1 <= k);
    }
    CHECK(enumerate_connected(Family::matching(), 1).size() == 1);
}

TEST_CASE("connected diagrams") {
    auto t = connected_table(Family::diagram(), 3);
    CHECK(t.cell(2, 5, true) == 5);
    CHECK(t.cell(3, 6, true) == 31);
    CHECK(t.total(2) == 8);
    CHECK(t.total(3) == 83);
    CHECK_THROWS_AS(enumerate_connected(Family::hyperchord(), 2), std::invalid_argument);
}

TEST_CASE("connected enumeration matches brute force") {
    for (auto fam : {Family::matching(), Family::diagram(), Family::partition()}) {
        std::map<std::pair<int, int>, int> brute;
        for (int n = 1; n <= (fam.tag == FamilyTag::Diagram ? 6 : 7); ++n)
            enumerate_all(fam, n, [&](const ChordSystem& s) {
                auto k = crossing_number(s);
                if (k < 1 || k > 3) return;
                std::vector<char> seen(n + 1, 0);
                for (auto& b : s.blocks)
                    for (int v : b) seen[v] = 1;
                for (int v = 1; v <= n; ++v)
                    if (!seen[v]) return;
                for (auto& b : s.blocks)
                    if (b.size() < 2) return;
                // crossing graph connected
                std::vector<int> comp(s.blocks.size());
                for (size_t i = 0; i < comp.size(); ++i) comp[i] = static_cast<int>(i);
                bool changed = true;
                while (changed) {
                    changed = false;
                    for (size_t a = 0; a < comp.size(); ++a)
                        for (size_t b = 0; b < comp.size(); ++b)
                            if (block_crossings(s.blocks[a], s.blocks[b]) > 0 && comp[a] != comp[b]) {
                                comp[a] = comp[b] = std::min(comp[a], comp[b]);
                                changed = true;
                            }
                }
                for (int c : comp)
                    if (c != 0) return;
                ++brute[{static_cast<int>(k), n}];
            });
        auto t = connected_table(fam, 3);
        for (auto& [key, c] : brute) CHECK(t.cell(key.first, key.second, true) == static_cast<std::uint64_t>(c));
    }
}

TEST_CASE("tree polynomials") {
    CHECK(tree_poly(1).str() == "x1^3*t2");
    auto t2 = tree_poly(2);
    CHECK(t2.terms.size() == 3);
    CHECK(t2.terms.at({{3}, {1}}) == 1);
    CHECK(t2.terms.at({{5, 1}, {2}}) == 3);
    CHECK(t2.terms.at({{5}, {0, 1}}) == 1);
    auto t3 = tree_poly(3);
    CHECK(t3.terms.size() == 7);
    CHECK(t3.terms.at({{7, 2}, {3}}) == 12);
    CHECK(t3.terms.at({{8, 0, 1}, {3}}) == 3);
    CHECK(t3.terms.at({{7, 1}, {1, 1}}) == 8);
    CHECK(t3.terms.at({{7}, {0, 0, 1}}) == 1);
    for (int p = 1; p <= 4; ++p)
        for (auto& [key, c] : tree_poly(p).terms) {
            int internal = 0, leaves = 0, lhs_int = 1, lhs_leaves = 1;
            for (size_t i = 0; i < key.first.size(); ++i) {
                lhs_int += static_cast<int>(i) * key.first[i];
                lhs_leaves += static_cast<int>(i + 1) * key.first[i];
            }
            for (size_t j = 0; j < key.second.size(); ++j) {
                internal += key.second[j];
                leaves += 2 * static_cast<int>(j + 2) * key.second[j];
            }
            CHECK(lhs_int == internal);
            CHECK(lhs_leaves == leaves);
        }
}

TEST_CASE("core polynomials via trees") {
    CHECK(core_polynomial_via_trees(1).str() == "1/4*x1^4");
    CHECK(core_polynomial_via_trees(2).str() == "1/2*x1^6 + 1/2*x1^6*x2");
    for (int k = 1; k <= 5; ++k) CHECK(core_polynomial_via_trees(k) == core_polynomial(Family::matching(), k));
    CHECK_THROWS_AS(core_polynomial_via_trees(8), ResourceBoundExceeded);
}

TEST_CASE("maximal matching cores satisfy the potential bound") {
    for (int k = 2; k <= 4; ++k) {
        int maximizers = 0;
        for (auto& c : enumerate_cores(Family::matching(), k)) {
            auto p = region_profile(c);
            int phi = 0;
            for (auto& [ij, cnt] : p.counts)
                if (ij.first > 1) phi += (2 * ij.first - 3) * cnt;
            CHECK(phi <= 2 * k - 3);
            bool shape = p.count(1) == 3 * k && p.count(k) == 1;
            CHECK((phi == 2 * k - 3) == shape);
            maximizers += phi == 2 * k - 3;
        }
        CHECK(maximizers == 4);
    }
}
