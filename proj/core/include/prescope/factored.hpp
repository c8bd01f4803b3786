#pragma once
#include <prescope/poly_nk.hpp>

#include <map>

namespace prescope {

// Rational function kept as coeff * prod factor^exponent. Factors are
// canonical (primitive, positive grlex leading coefficient); exponents
// may be negative. Shift quotients of terms are built and moved around
// in this form so denominators stay factored.
struct FactoredNK {
    Rat coeff{1};
    std::map<PolyNK, long> f;

    FactoredNK() = default;
    explicit FactoredNK(const Rat& c) : coeff(c) {}

    bool is_zero() const { return coeff == 0; }
    bool is_one() const { return coeff == 1 && f.empty(); }

    FactoredNK& mul_factor(const PolyNK& p, long e);
    FactoredNK& mul(const FactoredNK& o);
    FactoredNK inv() const;
    FactoredNK powed(long e) const;
    FactoredNK shifted(Var v, long j) const;
    RatNK expand() const;
    // split composite factors into squarefree, k-linear-aware pieces
    FactoredNK refined() const;
};

FactoredNK operator*(const FactoredNK& a, const FactoredNK& b);
FactoredNK operator/(const FactoredNK& a, const FactoredNK& b);
FactoredNK factored_from(const RatNK& r);

}  // namespace prescope
