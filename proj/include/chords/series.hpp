#pragma once
#include <gmpxx.h>

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "chords/family.hpp"

namespace chords {

// Dense polynomial in y with rational coefficients, trailing zeros trimmed.
struct YPoly {
    std::vector<mpq_class> c;

    YPoly() = default;
    YPoly(long v);
    YPoly(const mpq_class& v);
    static YPoly y(int power = 1);

    bool is_zero() const { return c.empty(); }
    int degree() const { return static_cast<int>(c.size()) - 1; }
    bool is_constant() const { return c.size() <= 1; }
    mpq_class at(int d) const;
    mpq_class eval(const mpq_class& v) const;
    void trim();

    YPoly& operator+=(const YPoly& o);
    YPoly& operator-=(const YPoly& o);
    YPoly& operator*=(const mpq_class& s);
    void add_product(const YPoly& a, const YPoly& b);  // this += a * b

    // Ascending in y, e.g. "5*y^3 + 25*y^4"; "0" for zero.
    std::string str() const;
    bool operator==(const YPoly& o) const { return c == o.c; }
};

YPoly operator+(YPoly a, const YPoly& b);
YPoly operator-(YPoly a, const YPoly& b);
YPoly operator*(const YPoly& a, const YPoly& b);
YPoly operator*(YPoly a, const mpq_class& s);

// Power series in x known exactly through x^order.
struct TruncatedSeries {
    int order = 0;
    std::vector<YPoly> c;  // size order + 1
    std::string meta;

    TruncatedSeries() : c(1) {}
    explicit TruncatedSeries(int n) : order(n), c(n + 1) {}
    static TruncatedSeries constant(const YPoly& v, int n);
    static TruncatedSeries monomial(const YPoly& v, int degree, int n);

    const YPoly& coeff(int n) const;  // throws past the order
    // Smallest degree with a nonzero coefficient, order + 1 if none.
    int valuation() const;
    bool univariate() const;

    TruncatedSeries truncated(int n) const;
    // Multiply by x^s; negative s divides and requires the low terms to vanish.
    TruncatedSeries shifted(int s) const;
    TruncatedSeries derivative() const;    // order drops by one
    TruncatedSeries x_derivative() const;  // x d/dx, same order
    TruncatedSeries eval_y(const mpq_class& v) const;
    TruncatedSeries inverse() const;  // constant term must be a nonzero rational
    TruncatedSeries pow(int e) const;
    // this(B(x)) for B with zero constant term.
    TruncatedSeries compose(const TruncatedSeries& b) const;

    std::string str(int terms = -1) const;
    nlohmann::json json() const;
    static TruncatedSeries from_json(const nlohmann::json& j);
    bool operator==(const TruncatedSeries& o) const { return order == o.order && c == o.c; }
};

// Products track the known order from the factors' valuations.
TruncatedSeries operator+(const TruncatedSeries& a, const TruncatedSeries& b);
TruncatedSeries operator-(const TruncatedSeries& a, const TruncatedSeries& b);
TruncatedSeries operator*(const TruncatedSeries& a, const TruncatedSeries& b);
TruncatedSeries operator*(const TruncatedSeries& a, const YPoly& s);

// Crossing-free generating function F_0(x, y) through x^N, y marking blocks.
// With y_value the series is specialized to y = y_value while it is built.
TruncatedSeries crossing_free_series(const Family& family, int N, std::optional<mpq_class> y_value = {});
// Connected crossing-free hyperchord diagrams CH_0 (hyperchord families).
TruncatedSeries connected_hyperchord_series(const Family& family, int N, std::optional<mpq_class> y_value = {});

// [x^(n+i)] = binom(n+i-1, i-1) [x^n] A.
TruncatedSeries marked_transform(const TruncatedSeries& a, int i);
// x^i/(i-1)! D^(i-1) ((A - A_{<=i+j}) / x^(i+j+1)): [x^r] = binom(r-1, i-1) [x^(r+i+j)] A.
TruncatedSeries marked_transform_diagram(const TruncatedSeries& a, int i, int j);

mpz_class binomial(long n, long k);

}  // namespace chords
