#include <doctest.h>

#include <algorithm>

#include "chords/bucket.hpp"
#include "chords/gf.hpp"

using namespace chords;

namespace {

long at(const TruncatedSeries& s, int n) { return s.coeff(n).at(0).get_num().get_si(); }

YPoly ypoly(std::initializer_list<std::pair<int, long>> terms) {
    YPoly p;
    for (auto [d, c] : terms) p += YPoly::y(d) * mpq_class(c);
    return p;
}

// Brute-force [x^n] F_k as a polynomial in y; matching series carry no y.
YPoly brute(const Histogram& h, long long k, bool with_y = true) {
    YPoly p;
    for (auto& [km, count] : h)
        if (km.first == k) p += YPoly::y(with_y ? km.second : 0) * mpq_class(static_cast<unsigned long>(count));
    return p;
}

}  // namespace

TEST_CASE("matching series with k crossings") {
    auto m1 = gf_k(Family::matching(), 1, 20);
    std::vector<long> want1 = {1, 6, 28, 120, 495, 2002};
    for (int i = 0; i < 6; ++i) CHECK(at(m1, 4 + 2 * i) == want1[i]);
    for (int m = 2; m <= 10; ++m) CHECK(m1.coeff(2 * m) == YPoly(mpq_class(binomial(2 * m, m - 2))));
    auto m2 = gf_k(Family::matching(), 2, 16);
    std::vector<long> want2 = {3, 28, 180, 990, 5005};
    for (int i = 0; i < 5; ++i) CHECK(at(m2, 6 + 2 * i) == want2[i]);
    auto m3 = gf_k(Family::matching(), 3, 16);
    std::vector<long> want3 = {1, 20, 195, 1430, 9009};
    for (int i = 0; i < 5; ++i) CHECK(at(m3, 6 + 2 * i) == want3[i]);
    CHECK(at(m3, 4) == 0);
    for (int n = 1; n <= 16; n += 2) CHECK(at(m3, n) == 0);

    auto from = gf_k_from_core_poly(cached_core_polynomial(Family::matching(), 1), SubstitutionRules::defaults(Family::matching()), 20);
    CHECK(from == m1);
}

TEST_CASE("M1 closed form to m = 20") {
    auto m1 = gf_k(Family::matching(), 1, 40);
    for (int m = 2; m <= 20; ++m) CHECK(m1.coeff(2 * m) == YPoly(mpq_class(binomial(2 * m, m - 2))));
}

TEST_CASE("Touchard-Riordan") {
    CHECK(touchard_riordan(0) == std::vector<mpz_class>{1});
    CHECK(touchard_riordan(2) == std::vector<mpz_class>{2, 1});
    CHECK(touchard_riordan(3) == std::vector<mpz_class>{5, 6, 3, 1});
    std::vector<TruncatedSeries> fk;
    for (int k = 0; k <= 5; ++k) fk.push_back(gf_k(Family::matching(), k, 16));
    for (int m = 0; m <= 8; ++m) {
        auto tr = touchard_riordan(m);
        mpz_class sum = 0;
        for (auto& v : tr) sum += v;
        CHECK(sum == total_configurations(Family::matching(), 2 * m));
        for (int k = 0; k <= 5 && k < static_cast<int>(tr.size()); ++k) CHECK(mpz_class(at(fk[k], 2 * m)) == tr[k]);
        if (m <= 7) {
            Histogram h = bucket_parallel(Family::matching(), 2 * m);
            for (auto& [km, count] : h) CHECK(tr.at(km.first) == mpz_class(static_cast<unsigned long>(count)));
        }
    }
}

TEST_CASE("partition series with k crossings") {
    auto p1 = gf_k(Family::partition(), 1, 11);
    CHECK(p1.coeff(4) == ypoly({{2, 1}}));
    CHECK(p1.coeff(5) == ypoly({{3, 5}}));
    CHECK(p1.coeff(6) == ypoly({{3, 6}, {4, 15}}));
    CHECK(p1.coeff(11) == ypoly({{3, 11}, {4, 330}, {5, 2475}, {6, 6600}, {7, 6930}, {8, 2772}, {9, 330}}));
    auto u = p1.eval_y(1);
    for (int n = 4; n <= 11; ++n) CHECK(u.coeff(n) == YPoly(mpq_class(binomial(2 * n - 5, n - 4))));
    auto p2 = gf_k(Family::partition(), 2, 11);
    CHECK(p2.coeff(5) == ypoly({{2, 5}}));
    CHECK(p2.coeff(11) == ypoly({{3, 55}, {4, 1408}, {5, 8965}, {6, 19965}, {7, 16170}, {8, 3696}}));
    auto p3 = gf_k(Family::partition(), 3, 11);
    CHECK(p3.coeff(6) == ypoly({{2, 6}, {3, 1}}));
    // Exhaustive counts (the 4-block cell at n = 9 is 612).
    CHECK(p3.coeff(9) == ypoly({{3, 54}, {4, 612}, {5, 1188}, {6, 84}}));
    CHECK(p3.coeff(11) == ypoly({{3, 66}, {4, 1485}, {5, 9152}, {6, 19965}, {7, 10692}, {8, 462}}));
}

TEST_CASE("diagram series with k crossings") {
    auto d2 = gf_k(Family::diagram(), 2, 8);
    CHECK(d2.coeff(5) == ypoly({{3, 5}, {4, 25}, {5, 50}, {6, 50}, {7, 25}, {8, 5}}));
    CHECK(d2.coeff(5).eval(1) == 160);
    std::vector<long> x6 = {33, 231, 696, 1173, 1200, 753, 276};
    std::vector<long> x7 = {126, 1176, 4900, 11984, 19012, 20384, 14896};
    std::vector<long> x8 = {364, 4368, 23856, 78384, 172476, 267552, 299712};
    for (int d = 3; d <= 9; ++d) {
        CHECK(d2.coeff(6).at(d) == x6[d - 3]);
        CHECK(d2.coeff(7).at(d) == x7[d - 3]);
        CHECK(d2.coeff(8).at(d) == x8[d - 3]);
    }
    // Split of [x^8 y^5] over the five 2-core shapes.
    const auto& kd2 = cached_core_polynomial(Family::diagram(), 2);
    std::vector<long> parts;
    for (const auto& [mono, coef] : kd2.terms) {
        CorePolynomial one{kd2.family, 2, {{mono, coef}}};
        parts.push_back(gf_k_from_core_poly(one, SubstitutionRules::defaults(Family::diagram()), 8).coeff(8).at(5).get_num().get_si());
    }
    std::sort(parts.begin(), parts.end());
    CHECK(parts == std::vector<long>{48, 624, 948, 3996, 18240});
}

TEST_CASE("brute-force equivalence") {
    struct Case {
        Family f;
        int nmax;
    };
    for (const auto& c : {Case{Family::matching(), 12}, Case{Family::partition(), 10}, Case{Family::diagram(), 8},
                          Case{Family::partition(SizeSet::of({3})), 12}, Case{Family::partition(SizeSet::parse("{2,3}")), 10}}) {
        CAPTURE(c.f.str());
        int kmax = std::min(core_k_bound(c.f), 5);
        std::vector<TruncatedSeries> fk;
        for (int k = 0; k <= kmax; ++k) fk.push_back(gf_k(c.f, k, c.nmax));
        for (int n = 0; n <= c.nmax; ++n) {
            Histogram h = bucket_parallel(c.f, n);
            for (int k = 0; k <= kmax; ++k) {
                CAPTURE(n);
                CAPTURE(k);
                CHECK(fk[k].coeff(n) == brute(h, k, c.f.tag != FamilyTag::Matching));
            }
        }
    }
}

TEST_CASE("diagrams without isolated vertices") {
    // 1/(1+x) F_k(x/(1+x)) counts diagrams in which every vertex is used.
    int N = 8;
    TruncatedSeries onep(N);
    onep.c[0] = YPoly(1L);
    onep.c[1] = YPoly(1L);
    TruncatedSeries inner = onep.inverse().shifted(1).truncated(N);
    for (int k = 0; k <= 2; ++k) {
        auto f = gf_k(Family::diagram(), k, N);
        auto g = f.compose(inner) * onep.inverse();
        for (int n = 1; n <= N; ++n) {
            CAPTURE(k);
            CAPTURE(n);
            CHECK(g.coeff(n) == brute(bucket_parallel(Family::diagram(), n, true), k));
        }
    }
}

TEST_CASE("substitution rules") {
    auto km1 = cached_core_polynomial(Family::matching(), 1);
    auto rules = SubstitutionRules::defaults(Family::matching());
    CorePolynomial bad = km1;
    Monomial m;
    m.x[{1, 1}] = 4;
    bad.terms[m] = 1;
    CHECK_THROWS_AS(gf_k_from_core_poly(bad, rules, 8), std::invalid_argument);
    CHECK_THROWS_AS(gf_k(Family::matching(), 9, 18), ResourceBoundExceeded);
    CHECK_THROWS_AS(gf_k(Family::hyperchord(), 1, 4), ResourceBoundExceeded);
    CHECK(gf_k(Family::diagram(), 0, 6) == crossing_free_series(Family::diagram(), 6));
}

TEST_CASE("truncated core polynomials past the bound") {
    // Matchings: every k at m <= 8 against the closed form.
    for (int k = 8; k <= 28; ++k) {
        auto s = gf_k(Family::matching(), k, 16);
        for (int m = 0; m <= 8; ++m) {
            auto tr = touchard_riordan(m);
            CHECK(s.coeff(2 * m).at(0) == (k < static_cast<int>(tr.size()) ? tr[k] : mpz_class(0)));
        }
    }
    // Below the bound the truncation keeps exactly the light terms.
    auto full = cached_core_polynomial(Family::matching(), 4);
    auto cut = truncated_core_polynomial(Family::matching(), 4, 12);
    for (const auto& [mono, c] : full.terms)
        if (mono.weight() <= 12) CHECK(cut.terms.at(mono) == c);
    for (const auto& [mono, c] : cut.terms) CHECK(mono.weight() <= 12);
    // Past the vertex cap the tree construction takes over.
    auto m6 = gf_k(Family::matching(), 6, 18);
    for (int m = 0; m <= 9; ++m) {
        auto tr = touchard_riordan(m);
        CHECK(m6.coeff(2 * m).at(0) == (6 < static_cast<int>(tr.size()) ? tr[6] : mpz_class(0)));
    }
    // Partitions: every k through n = 10 against brute force.
    std::vector<TruncatedSeries> pk;
    for (int k = 0; k <= 20; ++k) pk.push_back(gf_k(Family::partition(), k, 10));
    for (int n = 0; n <= 10; ++n) {
        Histogram h = bucket_parallel(Family::partition(), n);
        for (int k = 4; k <= 20; ++k) CHECK(pk[k].coeff(n) == brute(h, k));
    }
}

TEST_CASE("totals") {
    auto rep = verify_totals(Family::matching(), 6, 3);
    CHECK(rep.ok());
    CHECK(rep.rows[6].series_sum == 15);
    CHECK(rep.rows[6].complete);
    CHECK(rep.rows[4].series_sum == 3);
    auto rp = verify_totals(Family::partition(), 4, 1);
    CHECK(rp.ok());
    CHECK(rp.rows[4].series_sum == 15);
    CHECK(rp.rows[4].complete);
    auto big = verify_totals(Family::matching(), 12, 5);
    CHECK(big.ok());
    CHECK(!big.rows[12].complete);
    CHECK(total_configurations(Family::partition(), 6) == 203);
    CHECK(total_configurations(Family::diagram(), 4) == 64);
    CHECK(total_configurations(Family::partition(SizeSet::of({3})), 6) == 10);
}
