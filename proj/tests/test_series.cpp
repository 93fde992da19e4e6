#include <doctest.h>

#include <random>

#include "chords/bucket.hpp"
#include "chords/series.hpp"

using namespace chords;

namespace {

// Bivariate polynomial from (coefficient, x degree, y degree) triples.
TruncatedSeries poly(std::initializer_list<std::tuple<long, int, int>> terms, int N) {
    TruncatedSeries s(N);
    for (auto [c, dx, dy] : terms)
        if (dx <= N) s.c[dx] += YPoly::y(dy) * mpq_class(c);
    return s;
}

bool vanishes(const TruncatedSeries& s, int N) {
    for (int n = 0; n <= N; ++n)
        if (!s.coeff(n).is_zero()) return false;
    return true;
}

// Crossing-free configurations on n vertices by block count.
YPoly brute_crossing_free(const Family& f, int n) {
    YPoly p;
    for (auto& [km, count] : bucket_reference(f, n))
        if (km.first == 0) p += YPoly::y(km.second) * mpq_class(static_cast<unsigned long>(count));
    return p;
}

std::vector<long> ints(const TruncatedSeries& s) {
    std::vector<long> v;
    for (int n = 0; n <= s.order; ++n) v.push_back(s.coeff(n).at(0).get_num().get_si());
    return v;
}

}  // namespace

TEST_CASE("ypoly arithmetic") {
    YPoly a = YPoly(1L) + YPoly::y();
    YPoly b = a * a;
    CHECK(b.str() == "1 + 2*y + y^2");
    CHECK((b - b).is_zero());
    CHECK(b.eval(2) == 9);
    CHECK((YPoly::y(3) * mpq_class(1, 2)).str() == "1/2*y^3");
}

TEST_CASE("matching series is Catalan") {
    auto m = crossing_free_series(Family::matching(), 8);
    CHECK(ints(m) == std::vector<long>{1, 0, 1, 0, 2, 0, 5, 0, 14});
    m = crossing_free_series(Family::matching(), 30);
    CHECK(vanishes(m - (poly({{1, 0, 0}}, 30) + (m * m).shifted(2)), 30));
}

TEST_CASE("diagram series") {
    auto d1 = crossing_free_series(Family::diagram(), 4, mpq_class(1));
    CHECK(ints(d1) == std::vector<long>{1, 1, 2, 8, 48});
    auto d = crossing_free_series(Family::diagram(), 7);
    for (int n = 0; n <= 7; ++n) CHECK(d.coeff(n) == brute_crossing_free(Family::diagram(), n));
    CHECK(d.coeff(3).str() == "1 + 3*y + 3*y^2 + y^3");

    // y D^2 + (x^2(1+y) - x(1+2y) - 2y) D + x(1+2y) + y = 0
    int N = 25;
    d = crossing_free_series(Family::diagram(), N);
    auto q = poly({{1, 2, 0}, {1, 2, 1}, {-1, 1, 0}, {-2, 1, 1}, {-2, 0, 1}}, N);
    auto r = poly({{1, 1, 0}, {2, 1, 1}, {1, 0, 1}}, N);
    CHECK(vanishes(d * d * YPoly::y() + q * d + r, N));
}

TEST_CASE("partition series") {
    auto p = crossing_free_series(Family::partition(), 8);
    CHECK(p.coeff(4).eval(1) == 14);
    for (int n = 0; n <= 8; ++n) CHECK(p.coeff(n) == brute_crossing_free(Family::partition(), n));
    int N = 25;
    p = crossing_free_series(Family::partition(), N);
    auto one = poly({{1, 0, 0}}, N);
    auto ym1 = poly({{1, 0, 1}, {-1, 0, 0}}, N);
    CHECK(vanishes(p - one - (p * p + ym1 * p).shifted(1).truncated(N), N));
    // Narayana numbers at x^5
    CHECK(p.coeff(5).str() == "y + 10*y^2 + 20*y^3 + 10*y^4 + y^5");
}

TEST_CASE("restricted partition series") {
    for (const char* s : {"{3}", "2N*", "{2,3}", "{1,3}+{5}/2"}) {
        Family f = Family::partition(SizeSet::parse(s));
        CAPTURE(s);
        auto p = crossing_free_series(f, 9);
        for (int n = 0; n <= 9; ++n) CHECK(p.coeff(n) == brute_crossing_free(f, n));
        int N = 24;
        p = crossing_free_series(f, N);
        auto rhs = poly({{1, 0, 0}}, N);
        for (int q : f.S.elements_up_to(N)) rhs = rhs + (p.pow(q) * YPoly::y()).shifted(q).truncated(N);
        CHECK(vanishes(p - rhs, N));
    }
    // S = N* gives back the unrestricted series; S = {2} gives matchings.
    CHECK(crossing_free_series(Family::partition(SizeSet::all()), 12).c == crossing_free_series(Family::partition(), 12).c);
    CHECK(crossing_free_series(Family::partition(SizeSet::of({2})), 12, mpq_class(1)).c ==
          crossing_free_series(Family::matching(), 12).c);
}

TEST_CASE("hyperchord series") {
    auto h = crossing_free_series(Family::hyperchord(), 4);
    for (int n = 0; n <= 4; ++n) CHECK(h.coeff(n) == brute_crossing_free(Family::hyperchord(), n));
    CHECK(h.coeff(2).str() == "1 + 3*y + 3*y^2 + y^3");

    for (const char* s : {"{3}", "{2,3}", "{1,2}", "{1,3}", "3N*"}) {
        Family f = Family::hyperchord(SizeSet::parse(s));
        CAPTURE(s);
        auto hs = crossing_free_series(f, 6);
        int nmax = std::min(6, enumerate_all_bound(f));
        for (int n = 0; n <= nmax; ++n) CHECK(hs.coeff(n) == brute_crossing_free(f, n));
    }
    // The diagram family is the S = {2} case.
    CHECK(crossing_free_series(Family::hyperchord(SizeSet::of({2})), 10).c == crossing_free_series(Family::diagram(), 10).c);
}

TEST_CASE("hyperchord cubic") {
    int N = 18;
    auto h = crossing_free_series(Family::hyperchord(), N);
    auto p0 = poly({{-2, 2, 0}, {-1, 1, 0}, {2, 1, 3}, {1, 0, 2}, {1, 2, 4}, {-7, 2, 1}, {-7, 2, 2}, {-1, 2, 3}, {-3, 1, 1}}, N);
    auto p1 = poly({{-2, 3, 0}, {-2, 3, 4}, {-8, 3, 1}, {2, 1, 0}, {-3, 0, 2}, {-12, 3, 2}, {-8, 3, 3}, {6, 1, 1}, {-1, 2, 4},
                    {1, 2, 0}, {4, 2, 1}, {4, 2, 2}, {-4, 1, 3}},
                   N);
    auto p2 = poly({{1, 2, 3}, {1, 2, 0}, {3, 2, 2}, {-1, 1, 0}, {-3, 1, 1}, {2, 1, 3}, {3, 2, 1}, {3, 0, 2}}, N);
    auto p3 = poly({{-1, 0, 2}}, N);
    CHECK(vanishes(p3 * h * h * h + p2 * h * h + p1 * h + p0, N));
}

TEST_CASE("q-uniform and q-multiple hyperchord equations") {
    int N = 16;
    for (int q = 3; q <= 5; ++q) {
        CAPTURE(q);
        Family f = Family::hyperchord(SizeSet::of({q}));
        auto c = connected_hyperchord_series(f, N);
        auto x = poly({{1, 1, 0}}, N);
        auto y = poly({{1, 0, 1}}, N);
        auto lhs = (c - x) * x.pow(q - 1) - y * c * (c * c + c - x).pow(q - 1);
        CHECK(vanishes(lhs, N));
        auto h = crossing_free_series(f, N);
        auto one = poly({{1, 0, 0}}, N);
        CHECK(vanishes((h - one - x * h) * x.pow(q - 1) - y * (h - one) * (h - one - x).pow(q - 1), N));
    }
    for (int q = 3; q <= 4; ++q) {
        CAPTURE(q);
        Family f = Family::hyperchord(SizeSet::multiples(q));
        auto c = connected_hyperchord_series(f, N);
        auto x = poly({{1, 1, 0}}, N);
        auto pq = c.pow(5) + poly({{-1, 1, 0}, {2, 0, 0}}, N) * c.pow(4) + poly({{1, 1, 1}, {-4, 1, 0}, {1, 0, 0}}, N) * c.pow(3) +
                  poly({{2, 2, 0}, {1, 1, 1}, {-3, 1, 0}}, N) * c * c + poly({{-2, 2, 1}, {4, 2, 0}}, N) * c + poly({{-2, 3, 0}, {1, 3, 1}}, N);
        auto lhs = (c - x) * x.pow(q) - (c * c + c - x).pow(q - 2) * pq;
        // The quintic form is exact for the univariate series only.
        CHECK(vanishes(lhs.eval_y(1), N));
        CHECK(!vanishes(lhs, N));
    }
}

TEST_CASE("series algebra") {
    auto a = crossing_free_series(Family::partition(), 12);
    auto b = crossing_free_series(Family::diagram(), 12);
    auto c = crossing_free_series(Family::matching(), 12);
    CHECK((a * b) * c == a * (b * c));
    CHECK((a * b).derivative() == a.derivative() * b + a * b.derivative());
    CHECK((a * a.inverse()) == TruncatedSeries::constant(YPoly(1L), 12));
    CHECK(a.pow(3) == a * a * a);
    // order bookkeeping
    CHECK(a.derivative().order == 11);
    CHECK((a.shifted(3) * b).order == 15);
    CHECK_THROWS(a.shifted(-1));
    CHECK_THROWS(a.coeff(13));
    // x/(1+x) composed into 1/(1-x) gives 1 + x + ... = 1/(1-x/(1+x)) = 1 + x
    auto geo = TruncatedSeries(10);
    for (auto& v : geo.c) v = YPoly(1L);
    auto inner = poly({{1, 1, 0}}, 10) * poly({{1, 0, 0}, {1, 1, 0}}, 10).inverse();
    auto comp = geo.compose(inner);
    CHECK(comp == poly({{1, 0, 0}, {1, 1, 0}}, 10));
    auto j = a.json();
    CHECK(TruncatedSeries::from_json(j) == a);
    auto u = c.json();
    CHECK(u["coefficients"][8] == "14");
    CHECK(TruncatedSeries::from_json(u) == c);
}

TEST_CASE("marked transforms") {
    auto m = crossing_free_series(Family::matching(), 30);
    auto t1 = marked_transform(m, 1);
    CHECK(t1 == m.shifted(1));
    CHECK(marked_transform(m, 2).coeff(4) == YPoly(3L));
    auto one = TruncatedSeries::constant(YPoly(1L), 5);
    auto t3 = marked_transform(one, 3);
    CHECK(t3.valuation() == 3);
    CHECK(t3.coeff(3) == YPoly(1L));

    std::mt19937 rng(7);
    for (int trial = 0; trial < 40; ++trial) {
        int i = 1 + rng() % 5, n = rng() % 31;
        CHECK(marked_transform(m, i).coeff(n + i) == m.coeff(n) * mpq_class(binomial(n + i - 1, i - 1)));
    }
    // The kernel as written: x^i/(i-1)! D^(i-1)(x^(i-1) A).
    for (int i = 1; i <= 4; ++i) {
        auto k = m.shifted(i - 1);
        for (int d = 1; d < i; ++d) k = k.derivative();
        mpz_class fact = 1;
        for (int d = 2; d < i; ++d) fact *= d;
        auto lhs = k.shifted(i) * YPoly(mpq_class(1) / mpq_class(fact));
        auto rhs = marked_transform(m, i);
        int top = std::min(lhs.order, rhs.order);
        CHECK(lhs.truncated(top) == rhs.truncated(top));
    }

    auto d = crossing_free_series(Family::diagram(), 12, mpq_class(1));
    auto k10 = marked_transform_diagram(d, 1, 0);
    for (int r = 1; r <= k10.order; ++r) CHECK(k10.coeff(r) == d.coeff(r + 1));
    auto k11 = marked_transform_diagram(d, 1, 1);
    CHECK(k11.valuation() == 1);
    CHECK(k11.coeff(1) == d.coeff(3));
    auto k20 = marked_transform_diagram(d, 2, 0);
    CHECK(k20.valuation() == 2);
    for (int r = 2; r <= k20.order; ++r) CHECK(k20.coeff(r) == d.coeff(r + 2) * mpq_class(r - 1));
    CHECK_THROWS(marked_transform_diagram(d, 6, 1));
}
