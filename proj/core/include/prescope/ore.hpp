#pragma once
#include <prescope/poly_nk.hpp>

#include <span>
#include <string>
#include <vector>

namespace prescope {

struct DivisionByZeroOperator : std::domain_error {
    DivisionByZeroOperator() : std::domain_error("division by zero operator") {}
};

// Operator in Q(n)<Sn> with Sn * a(n) = a(n+1) * Sn.
// Canonical form clears denominators to Z[n], removes integer content and
// makes the leading coefficient of the lead term positive.
struct OreOp {
    std::vector<RatN> c;  // c[i] is the coefficient of Sn^i

    OreOp() = default;
    explicit OreOp(const RatN& r) {
        if (!r.is_zero()) c.push_back(r);
    }
    explicit OreOp(long v) : OreOp(RatN(v)) {}
    static OreOp identity() { return OreOp(1); }
    static OreOp sn(int power = 1);
    static OreOp from_coeffs(std::vector<RatN> coeffs);

    bool is_zero() const { return c.empty(); }
    int order() const { return static_cast<int>(c.size()) - 1; }  // -1 for 0
    const RatN& lc() const { return c.back(); }
    void trim() {
        while (!c.empty() && c.back().is_zero()) c.pop_back();
    }

    OreOp canonical() const;
    bool operator==(const OreOp& o) const { return canonical().c == o.canonical().c; }
};

OreOp operator+(const OreOp& a, const OreOp& b);
OreOp operator-(const OreOp& a, const OreOp& b);
OreOp operator-(const OreOp& a);
OreOp op_mul(const OreOp& a, const OreOp& b);
OreOp mul_scalar(const OreOp& a, const RatN& s);

// A = Q*B + R with ord(R) < ord(B)
std::pair<OreOp, OreOp> op_rdivmod(const OreOp& a, const OreOp& b);
bool right_divides(const OreOp& b, const OreOp& a);

OreOp op_lclm(std::span<const OreOp> ops);
inline OreOp op_lclm(const OreOp& a, const OreOp& b) {
    OreOp arr[2] = {a, b};
    return op_lclm(std::span<const OreOp>(arr, 2));
}

// L(H)/H for a term with shift quotient g = Sn(H)/H
RatNK op_apply_quotient(const OreOp& a, const RatNK& g_n);

std::string to_string(const OreOp& a);

}  // namespace prescope
