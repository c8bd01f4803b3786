#pragma once
#include <prescope/poly_nk.hpp>

namespace prescope {

// Dense polynomial in k over Q(n): c[i] is the coefficient of k^i.
// Internal workhorse for reductions; no trailing zeros.
struct UPolyK {
    std::vector<RatN> c;

    UPolyK() = default;
    explicit UPolyK(const RatN& v) {
        if (!v.is_zero()) c.push_back(v);
    }
    explicit UPolyK(long v) : UPolyK(RatN(v)) {}
    static UPolyK var_k();

    bool is_zero() const { return c.empty(); }
    bool is_one() const { return c.size() == 1 && c[0].is_one(); }
    int degree() const { return static_cast<int>(c.size()) - 1; }
    const RatN& lc() const { return c.back(); }
    void trim() {
        while (!c.empty() && c.back().is_zero()) c.pop_back();
    }
    bool operator==(const UPolyK& o) const { return c == o.c; }
};

UPolyK operator+(const UPolyK& a, const UPolyK& b);
UPolyK operator-(const UPolyK& a, const UPolyK& b);
UPolyK operator-(const UPolyK& a);
UPolyK operator*(const UPolyK& a, const UPolyK& b);
UPolyK mul_scalar(const UPolyK& a, const RatN& s);
UPolyK monic(const UPolyK& a);
std::pair<UPolyK, UPolyK> divmod(const UPolyK& a, const UPolyK& b);
UPolyK kgcd(UPolyK a, UPolyK b);  // monic gcd over Q(n)
// extended euclid: g = s*a + t*b, g monic gcd
void kgcd_ext(const UPolyK& a, const UPolyK& b, UPolyK& g, UPolyK& s, UPolyK& t);
UPolyK derivative(const UPolyK& a);
UPolyK shift_k(const UPolyK& a, long j);   // k -> k + j
UPolyK shift_n(const UPolyK& a, long j);   // n -> n + j in every coefficient
RatN eval_k(const UPolyK& a, const RatN& x);
UPolyK pow(const UPolyK& a, unsigned e);
UPolyK squarefree_part(const UPolyK& a);

PolyNK to_polynk(const UPolyK& a, RatN* denominator_out);  // clears denominators
UPolyK to_upoly(const PolyNK& p);
UPolyK to_upoly(const RatNK& f);  // requires den k-free; divides through

std::string to_string(const UPolyK& a);

}  // namespace prescope
