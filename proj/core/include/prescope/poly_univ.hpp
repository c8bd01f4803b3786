#pragma once
#include <prescope/rational.hpp>

#include <compare>
#include <string>
#include <vector>

namespace prescope {

// Dense univariate polynomial over Z. c[i] is the coefficient of x^i;
// no trailing zeros, empty vector means 0.
struct PolyZ {
    std::vector<Int> c;

    PolyZ() = default;
    explicit PolyZ(const Int& v) {
        if (v != 0) c.push_back(v);
    }
    explicit PolyZ(long v) : PolyZ(Int(v)) {}
    static PolyZ monomial(const Int& coeff, int deg);
    static PolyZ var() { return monomial(Int(1), 1); }

    bool is_zero() const { return c.empty(); }
    bool is_one() const { return c.size() == 1 && c[0] == 1; }
    int degree() const { return static_cast<int>(c.size()) - 1; }  // -1 for 0
    const Int& lc() const { return c.back(); }
    void trim() {
        while (!c.empty() && c.back() == 0) c.pop_back();
    }

    bool operator==(const PolyZ& o) const { return c == o.c; }
};

PolyZ operator+(const PolyZ& a, const PolyZ& b);
PolyZ operator-(const PolyZ& a, const PolyZ& b);
PolyZ operator-(const PolyZ& a);
PolyZ operator*(const PolyZ& a, const PolyZ& b);
PolyZ mul_scalar(const PolyZ& a, const Int& s);

Int content(const PolyZ& a);          // gcd of coefficients, >= 0 (0 for 0)
PolyZ primitive_part(const PolyZ& a);  // a / content, sign kept
PolyZ divexact(const PolyZ& a, const PolyZ& b);   // asserts exactness
bool divides(const PolyZ& b, const PolyZ& a);     // b | a ?
PolyZ poly_gcd(PolyZ a, PolyZ b);  // primitive, positive leading coefficient
PolyZ derivative(const PolyZ& a);
PolyZ taylor_shift(const PolyZ& a, const Int& j);  // x -> x + j
PolyZ poly_pow(const PolyZ& a, unsigned e);
Rat eval(const PolyZ& a, const Rat& x);
Int eval(const PolyZ& a, const Int& x);
std::string to_string(const PolyZ& a, const std::string& var);

// Element of Q(n). Canonical: gcd(num, den) = 1 over Q[n],
// gcd(content(num), content(den)) = 1, den has positive leading coefficient.
// Zero is 0/1.
struct RatN {
    PolyZ num;
    PolyZ den{Int(1)};

    RatN() = default;
    RatN(const PolyZ& n, const PolyZ& d) : num(n), den(d) { normalize(); }
    explicit RatN(const PolyZ& n) : num(n) {}
    explicit RatN(const Rat& q);
    explicit RatN(long v) : RatN(Rat(v)) {}
    static RatN var() { return RatN(PolyZ::var()); }

    void normalize();
    bool is_zero() const { return num.is_zero(); }
    bool is_one() const { return num.is_one() && den.is_one(); }
    bool is_constant() const { return num.degree() <= 0 && den.degree() <= 0; }
    Rat to_rat() const;  // requires is_constant()

    bool operator==(const RatN& o) const { return num == o.num && den == o.den; }
};

RatN operator+(const RatN& a, const RatN& b);
RatN operator-(const RatN& a, const RatN& b);
RatN operator-(const RatN& a);
RatN operator*(const RatN& a, const RatN& b);
RatN operator/(const RatN& a, const RatN& b);
RatN inverse(const RatN& a);
RatN shift_n(const RatN& a, long j);  // n -> n + j
RatN pow(const RatN& a, long e);
std::optional<Rat> eval(const RatN& a, const Rat& x);
std::string to_string(const RatN& a, const std::string& var = "n");
// constant coefficient of the polynomial part of a
Rat polypart_constant(const RatN& a);

}  // namespace prescope
