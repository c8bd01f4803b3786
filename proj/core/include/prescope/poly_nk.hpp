#pragma once
#include <prescope/poly_univ.hpp>

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace prescope {

struct NonLinearDenominator : std::domain_error {
    explicit NonLinearDenominator(const std::string& m) : std::domain_error(m) {}
};

// Monomial n^dn * k^dk with graded-lex order, n > k.
struct Mono {
    int dn = 0;
    int dk = 0;
    friend bool operator==(const Mono&, const Mono&) = default;
};
struct GrlexLess {
    bool operator()(const Mono& a, const Mono& b) const {
        int ta = a.dn + a.dk, tb = b.dn + b.dk;
        if (ta != tb) return ta < tb;
        return a.dn < b.dn;
    }
};

// Sparse polynomial in Q[n,k]; no zero coefficients stored.
struct PolyNK {
    std::map<Mono, Rat, GrlexLess> t;

    PolyNK() = default;
    explicit PolyNK(const Rat& q) {
        if (q != 0) t[{0, 0}] = q;
    }
    explicit PolyNK(long v) : PolyNK(Rat(v)) {}
    static PolyNK var_n() { return monomial(Rat(1), 1, 0); }
    static PolyNK var_k() { return monomial(Rat(1), 0, 1); }
    static PolyNK monomial(const Rat& c, int dn, int dk);
    static PolyNK from_n(const PolyZ& p);      // polynomial in n
    static PolyNK from_k(const PolyZ& p);      // polynomial in k
    static PolyNK from_ratn_num(const RatN& r);  // r.num as poly in n

    bool is_zero() const { return t.empty(); }
    bool is_one() const;
    bool is_constant() const { return t.empty() || (t.size() == 1 && t.begin()->first == Mono{0, 0}); }
    int deg_n() const;
    int deg_k() const;
    const Rat& lc_grlex() const { return t.rbegin()->second; }  // requires nonzero
    Rat coeff(int dn, int dk) const;
    bool k_free() const { return deg_k() <= 0; }
    bool n_free() const { return deg_n() <= 0; }
    PolyZ to_univ_n() const;  // requires k_free
    PolyZ to_univ_k() const;  // requires n_free; rational contents must be integral

    bool operator==(const PolyNK& o) const { return t == o.t; }
    bool operator<(const PolyNK& o) const;  // arbitrary total order for map keys
};

PolyNK operator+(const PolyNK& a, const PolyNK& b);
PolyNK operator-(const PolyNK& a, const PolyNK& b);
PolyNK operator-(const PolyNK& a);
PolyNK operator*(const PolyNK& a, const PolyNK& b);
PolyNK mul_scalar(const PolyNK& a, const Rat& s);
PolyNK pow(const PolyNK& a, unsigned e);

Rat content_q(const PolyNK& a);                // rational content (sign of grlex lc)
PolyNK primitive_part_q(const PolyNK& a);      // integer coeffs, content 1, positive grlex lc
PolyNK derivative_k(const PolyNK& a);
enum class Var { n, k };
PolyNK shift(const PolyNK& p, Var v, long j);
Rat eval(const PolyNK& a, const Rat& n, const Rat& k);
RatN eval_k(const PolyNK& a, const RatN& k);   // substitute k -> rational function of n
std::string to_string(const PolyNK& a);

// canonical gcd: primitive with positive leading coefficient under grlex
PolyNK poly_gcd(const PolyNK& a, const PolyNK& b);
// gcd in Q[n] of the k-coefficients (primitive integer polynomial, positive lc)
PolyZ content_k(const PolyNK& p);
PolyNK divexact(const PolyNK& a, const PolyNK& b);
bool divides(const PolyNK& b, const PolyNK& a);

// { j in Z : gcd_k(a, shift(b,k,j)) is nontrivial }, a,b viewed in k over Q(n)
std::set<long> dispersion_set(const PolyNK& a, const PolyNK& b);

// j with q = shift(p, k, j), if any
std::optional<long> shift_equivalence(const PolyNK& p, const PolyNK& q);

// Rational function in Q(n,k). Canonical: num,den integer polynomials,
// gcd(num,den)=1, gcd(content num, content den)=1, den positive grlex lc.
struct RatNK {
    PolyNK num;
    PolyNK den{Rat(1)};

    RatNK() = default;
    RatNK(const PolyNK& n, const PolyNK& d) : num(n), den(d) { normalize(); }
    explicit RatNK(const PolyNK& n) : num(primitive_part_q(n)), den(Rat(1)) {
        num = n;
        den = PolyNK(Rat(1));
        normalize();
    }
    explicit RatNK(const Rat& q);
    explicit RatNK(long v) : RatNK(Rat(v)) {}
    explicit RatNK(const RatN& r);

    void normalize();
    bool is_zero() const { return num.is_zero(); }
    bool is_one() const { return num.is_one() && den.is_one(); }
    bool k_free() const { return num.k_free() && den.k_free(); }
    RatN to_ratn() const;  // requires k_free

    bool operator==(const RatNK& o) const { return num == o.num && den == o.den; }
};

RatNK operator+(const RatNK& a, const RatNK& b);
RatNK operator-(const RatNK& a, const RatNK& b);
RatNK operator-(const RatNK& a);
RatNK operator*(const RatNK& a, const RatNK& b);
RatNK operator/(const RatNK& a, const RatNK& b);
RatNK inverse(const RatNK& a);
RatNK shift(const RatNK& f, Var v, long j);
RatNK pow(const RatNK& a, long e);
std::optional<Rat> eval(const RatNK& a, const Rat& n, const Rat& k);
RatN eval_k(const RatNK& a, const RatN& k);  // substitute k -> element of Q(n)
std::string to_string(const RatNK& a);

// partial fractions over k-linear denominators
struct LinearPole {
    RatN root;    // pole location beta, k = beta
    int order;    // multiplicity
    RatN coeff;   // coefficient of 1/(k-beta)^order
};
struct PartialFractions {
    std::vector<LinearPole> poles;
    RatNK poly_part;  // polynomial in k (den k-free)
};
PartialFractions partial_fractions_linear(const RatNK& f);

struct NotARoot : std::domain_error {
    explicit NotARoot(const std::string& m) : std::domain_error(m) {}
};
struct NotSquarefree : std::domain_error {
    explicit NotSquarefree(const std::string& m) : std::domain_error(m) {}
};

// P(beta)/Q'(beta) for Q squarefree in k with Q(beta)=0
RatN lagrange_residue(const PolyNK& P, const PolyNK& Q, const RatN& beta);

// k-linear factor extraction: f = c * prod (k - root_i)^e_i * nonlinear_rest
struct LinearFactorSplit {
    std::vector<std::pair<RatN, int>> roots;  // (root, multiplicity)
    PolyNK rest;                              // k-free or genuinely nonlinear part
    bool fully_linear;                        // rest is k-free
};
LinearFactorSplit linear_factors_k(const PolyNK& p);

}  // namespace prescope
