#include <prescope/upoly_k.hpp>

#include <cassert>

namespace prescope {

UPolyK UPolyK::var_k() {
    UPolyK p;
    p.c = {RatN(0), RatN(1)};
    return p;
}

UPolyK operator+(const UPolyK& a, const UPolyK& b) {
    UPolyK r;
    r.c.resize(std::max(a.c.size(), b.c.size()));
    for (size_t i = 0; i < a.c.size(); ++i) r.c[i] = a.c[i];
    for (size_t i = 0; i < b.c.size(); ++i) r.c[i] = r.c[i] + b.c[i];
    r.trim();
    return r;
}

UPolyK operator-(const UPolyK& a, const UPolyK& b) {
    UPolyK r;
    r.c.resize(std::max(a.c.size(), b.c.size()));
    for (size_t i = 0; i < a.c.size(); ++i) r.c[i] = a.c[i];
    for (size_t i = 0; i < b.c.size(); ++i) r.c[i] = r.c[i] - b.c[i];
    r.trim();
    return r;
}

UPolyK operator-(const UPolyK& a) {
    UPolyK r = a;
    for (auto& x : r.c) x = -x;
    return r;
}

UPolyK operator*(const UPolyK& a, const UPolyK& b) {
    if (a.is_zero() || b.is_zero()) return UPolyK();
    UPolyK r;
    r.c.assign(a.c.size() + b.c.size() - 1, RatN());
    for (size_t i = 0; i < a.c.size(); ++i) {
        if (a.c[i].is_zero()) continue;
        for (size_t j = 0; j < b.c.size(); ++j) {
            if (b.c[j].is_zero()) continue;
            r.c[i + j] = r.c[i + j] + a.c[i] * b.c[j];
        }
    }
    r.trim();
    return r;
}

UPolyK mul_scalar(const UPolyK& a, const RatN& s) {
    if (s.is_zero()) return UPolyK();
    UPolyK r = a;
    for (auto& x : r.c) x = x * s;
    return r;
}

UPolyK monic(const UPolyK& a) {
    if (a.is_zero() || a.lc().is_one()) return a;
    return mul_scalar(a, inverse(a.lc()));
}

std::pair<UPolyK, UPolyK> divmod(const UPolyK& a, const UPolyK& b) {
    assert(!b.is_zero());
    UPolyK q, r = a;
    if (a.degree() >= b.degree()) q.c.assign(a.degree() - b.degree() + 1, RatN());
    RatN binv = inverse(b.lc());
    while (!r.is_zero() && r.degree() >= b.degree()) {
        int d = r.degree() - b.degree();
        RatN t = r.lc() * binv;
        q.c[d] = t;
        for (int i = 0; i <= b.degree(); ++i) r.c[i + d] = r.c[i + d] - t * b.c[i];
        r.trim();
    }
    q.trim();
    return {q, r};
}

UPolyK kgcd(UPolyK a, UPolyK b) {
    while (!b.is_zero()) {
        auto [q, r] = divmod(a, b);
        (void)q;
        a = std::move(b);
        b = std::move(r);
    }
    return monic(a);
}

void kgcd_ext(const UPolyK& a, const UPolyK& b, UPolyK& g, UPolyK& s, UPolyK& t) {
    UPolyK r0 = a, r1 = b;
    UPolyK s0(1), s1, t0, t1(1);
    while (!r1.is_zero()) {
        auto [q, r2] = divmod(r0, r1);
        UPolyK s2 = s0 - q * s1;
        UPolyK t2 = t0 - q * t1;
        r0 = std::move(r1); r1 = std::move(r2);
        s0 = std::move(s1); s1 = std::move(s2);
        t0 = std::move(t1); t1 = std::move(t2);
    }
    if (!r0.is_zero() && !r0.lc().is_one()) {
        RatN inv = inverse(r0.lc());
        r0 = mul_scalar(r0, inv);
        s0 = mul_scalar(s0, inv);
        t0 = mul_scalar(t0, inv);
    }
    g = r0; s = s0; t = t0;
}

UPolyK derivative(const UPolyK& a) {
    UPolyK r;
    if (a.degree() <= 0) return r;
    r.c.resize(a.degree());
    for (int i = 1; i <= a.degree(); ++i) r.c[i - 1] = a.c[i] * RatN(static_cast<long>(i));
    r.trim();
    return r;
}

UPolyK shift_k(const UPolyK& a, long j) {
    if (j == 0 || a.is_zero()) return a;
    // Horner from the top: p(k+j)
    UPolyK r(a.c.back());
    for (int i = a.degree() - 1; i >= 0; --i) {
        // r = r*(k+j) + a_i
        UPolyK nr;
        nr.c.assign(r.c.size() + 1, RatN());
        RatN J{Rat(j)};
        for (size_t m = 0; m < r.c.size(); ++m) {
            nr.c[m + 1] = nr.c[m + 1] + r.c[m];
            nr.c[m] = nr.c[m] + r.c[m] * J;
        }
        nr.c[0] = nr.c[0] + a.c[i];
        nr.trim();
        r = std::move(nr);
    }
    return r;
}

UPolyK shift_n(const UPolyK& a, long j) {
    if (j == 0) return a;
    UPolyK r = a;
    for (auto& x : r.c) x = prescope::shift_n(x, j);
    return r;
}

RatN eval_k(const UPolyK& a, const RatN& x) {
    RatN r;
    for (int i = a.degree(); i >= 0; --i) r = r * x + a.c[i];
    return r;
}

UPolyK pow(const UPolyK& a, unsigned e) {
    UPolyK r(1);
    UPolyK base = a;
    while (e) {
        if (e & 1) r = r * base;
        base = base * base;
        e >>= 1;
    }
    return r;
}

UPolyK squarefree_part(const UPolyK& a) {
    if (a.degree() <= 0) return UPolyK(1);
    UPolyK g = kgcd(a, derivative(a));
    if (g.degree() <= 0) return monic(a);
    return monic(divmod(a, g).first);
}

PolyNK to_polynk(const UPolyK& a, RatN* denominator_out) {
    // common denominator of all coefficients
    RatN den(1);
    PolyZ dlcm(Int(1));
    for (const auto& x : a.c) {
        if (x.is_zero()) continue;
        PolyZ g = poly_gcd(dlcm, x.den);
        dlcm = divexact(dlcm * x.den, g);
    }
    PolyNK r;
    for (int i = 0; i <= a.degree(); ++i) {
        if (a.c[i].is_zero()) continue;
        PolyZ coeff = a.c[i].num * divexact(dlcm, a.c[i].den);
        for (int d = 0; d <= coeff.degree(); ++d) {
            if (coeff.c[d] == 0) continue;
            r.t[{d, i}] = Rat(coeff.c[d]);
        }
    }
    if (denominator_out) *denominator_out = RatN(dlcm);
    return r;
}

UPolyK to_upoly(const PolyNK& p) {
    UPolyK r;
    if (p.is_zero()) return r;
    r.c.assign(p.deg_k() + 1, RatN());
    // gather coefficients of k^i as polynomials in n (rational coefficients ok)
    for (const auto& [m, q] : p.t) {
        PolyZ mono = PolyZ::monomial(Int(q.get_num()), m.dn);
        RatN add(mono, PolyZ(Int(q.get_den())));
        r.c[m.dk] = r.c[m.dk] + add;
    }
    r.trim();
    return r;
}

UPolyK to_upoly(const RatNK& f) {
    if (!f.den.k_free()) throw std::domain_error("to_upoly: denominator not k-free");
    UPolyK num = to_upoly(f.num);
    RatN d = inverse(RatN(f.den.to_univ_n()));
    return mul_scalar(num, d);
}

std::string to_string(const UPolyK& a) {
    if (a.is_zero()) return "0";
    std::string s;
    for (int i = a.degree(); i >= 0; --i) {
        if (a.c[i].is_zero()) continue;
        if (!s.empty()) s += " + ";
        s += "(" + to_string(a.c[i]) + ")";
        if (i > 0) {
            s += "*k";
            if (i > 1) s += "^" + std::to_string(i);
        }
    }
    return s;
}

}  // namespace prescope
