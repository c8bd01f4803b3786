#include <prescope/poly_univ.hpp>

#include <cassert>
#include <sstream>

namespace prescope {

PolyZ PolyZ::monomial(const Int& coeff, int deg) {
    PolyZ p;
    if (coeff == 0) return p;
    p.c.assign(deg + 1, Int(0));
    p.c[deg] = coeff;
    return p;
}

PolyZ operator+(const PolyZ& a, const PolyZ& b) {
    PolyZ r;
    r.c.resize(std::max(a.c.size(), b.c.size()), Int(0));
    for (size_t i = 0; i < a.c.size(); ++i) r.c[i] = a.c[i];
    for (size_t i = 0; i < b.c.size(); ++i) r.c[i] += b.c[i];
    r.trim();
    return r;
}

PolyZ operator-(const PolyZ& a, const PolyZ& b) {
    PolyZ r;
    r.c.resize(std::max(a.c.size(), b.c.size()), Int(0));
    for (size_t i = 0; i < a.c.size(); ++i) r.c[i] = a.c[i];
    for (size_t i = 0; i < b.c.size(); ++i) r.c[i] -= b.c[i];
    r.trim();
    return r;
}

PolyZ operator-(const PolyZ& a) {
    PolyZ r = a;
    for (auto& x : r.c) x = -x;
    return r;
}

PolyZ operator*(const PolyZ& a, const PolyZ& b) {
    if (a.is_zero() || b.is_zero()) return PolyZ();
    PolyZ r;
    r.c.assign(a.c.size() + b.c.size() - 1, Int(0));
    for (size_t i = 0; i < a.c.size(); ++i) {
        if (a.c[i] == 0) continue;
        for (size_t j = 0; j < b.c.size(); ++j) {
            if (b.c[j] == 0) continue;
            r.c[i + j] += a.c[i] * b.c[j];
        }
    }
    return r;
}

PolyZ mul_scalar(const PolyZ& a, const Int& s) {
    if (s == 0) return PolyZ();
    PolyZ r = a;
    for (auto& x : r.c) x *= s;
    return r;
}

Int content(const PolyZ& a) {
    Int g = 0;
    for (const auto& x : a.c) {
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.get_mpz_t());
        if (g == 1) break;
    }
    return g;
}

PolyZ primitive_part(const PolyZ& a) {
    if (a.is_zero()) return a;
    Int g = content(a);
    PolyZ r = a;
    for (auto& x : r.c) x /= g;
    return r;
}

PolyZ divexact(const PolyZ& a, const PolyZ& b) {
    assert(!b.is_zero());
    if (a.is_zero()) return PolyZ();
    assert(a.degree() >= b.degree());
    PolyZ q, r = a;
    q.c.assign(a.degree() - b.degree() + 1, Int(0));
    for (int d = a.degree() - b.degree(); r.degree() >= b.degree(); ) {
        d = r.degree() - b.degree();
        Int t;
        mpz_divexact(t.get_mpz_t(), r.lc().get_mpz_t(), b.lc().get_mpz_t());
        q.c[d] = t;
        for (int i = 0; i <= b.degree(); ++i) r.c[i + d] -= t * b.c[i];
        r.trim();
        if (r.is_zero()) break;
    }
    assert(r.is_zero());
    q.trim();
    return q;
}

bool divides(const PolyZ& b, const PolyZ& a) {
    if (a.is_zero()) return true;
    if (b.is_zero()) return false;
    if (a.degree() < b.degree()) return false;
    PolyZ r = a;
    // exact division over Q, checking each quotient step stays exact over Z
    // after clearing: use rational pseudo-check via gmp exact division test.
    PolyZ q;
    q.c.assign(a.degree() - b.degree() + 1, Int(0));
    while (!r.is_zero() && r.degree() >= b.degree()) {
        Int t, rem;
        mpz_tdiv_qr(t.get_mpz_t(), rem.get_mpz_t(), r.lc().get_mpz_t(),
                    b.lc().get_mpz_t());
        if (rem != 0) return false;
        int d = r.degree() - b.degree();
        for (int i = 0; i <= b.degree(); ++i) r.c[i + d] -= t * b.c[i];
        r.trim();
    }
    return r.is_zero();
}

// Pseudo-remainder: lc(b)^(deg a - deg b + 1) * a = q*b + r
static PolyZ pseudo_rem(PolyZ a, const PolyZ& b) {
    int e = a.degree() - b.degree() + 1;
    while (!a.is_zero() && a.degree() >= b.degree()) {
        int d = a.degree() - b.degree();
        Int la = a.lc();
        for (auto& x : a.c) x *= b.lc();
        for (int i = 0; i <= b.degree(); ++i) a.c[i + d] -= la * b.c[i];
        a.trim();
        --e;
    }
    if (e > 0) {
        Int f = int_pow(b.lc(), e);
        for (auto& x : a.c) x *= f;
    }
    return a;
}

// Heuristic gcd: evaluate at a large point, take integer gcd, reconstruct
// digits in balanced representation, verify by division.
static bool gcd_heuristic(const PolyZ& a, const PolyZ& b, PolyZ& out) {
    Int ma = 0, mb = 0;
    for (const auto& x : a.c) { Int t = abs(x); if (t > ma) ma = t; }
    for (const auto& x : b.c) { Int t = abs(x); if (t > mb) mb = t; }
    Int xi = 2 * (ma < mb ? ma : mb) + 2;
    if (xi < 6) xi = 6;
    for (int attempt = 0; attempt < 4; ++attempt) {
        Int va = eval(a, xi), vb = eval(b, xi);
        if (va == 0 || vb == 0) { xi = xi * 2 + 1; continue; }
        Int g;
        mpz_gcd(g.get_mpz_t(), va.get_mpz_t(), vb.get_mpz_t());
        // reconstruct candidate from balanced base-xi digits of g
        PolyZ cand;
        Int rem = g, half = xi / 2;
        while (rem != 0) {
            Int digit;
            mpz_fdiv_r(digit.get_mpz_t(), rem.get_mpz_t(), xi.get_mpz_t());
            if (digit > half) digit -= xi;
            cand.c.push_back(digit);
            rem = (rem - digit) / xi;
        }
        cand.trim();
        if (cand.is_zero()) { xi = xi * 2 + 1; continue; }
        cand = primitive_part(cand);
        if (divides(cand, a) && divides(cand, b)) {
            if (cand.lc() < 0) cand = -cand;
            out = cand;
            return true;
        }
        xi = xi * 2 + 1;
    }
    return false;
}

PolyZ poly_gcd(PolyZ a, PolyZ b) {
    if (a.is_zero()) {
        PolyZ r = primitive_part(b);
        if (!r.is_zero() && r.lc() < 0) r = -r;
        return r;
    }
    if (b.is_zero()) return poly_gcd(b, a);
    Int ca = content(a), cb = content(b), cg;
    mpz_gcd(cg.get_mpz_t(), ca.get_mpz_t(), cb.get_mpz_t());
    a = primitive_part(a);
    b = primitive_part(b);
    PolyZ g;
    if (a.degree() == 0 || b.degree() == 0) {
        g = PolyZ(Int(1));
    } else if (!gcd_heuristic(a, b, g)) {
        // primitive PRS fallback
        PolyZ f = a, s = b;
        if (f.degree() < s.degree()) std::swap(f, s);
        while (!s.is_zero()) {
            PolyZ r = pseudo_rem(f, s);
            f = s;
            s = primitive_part(r);
        }
        g = f;
        if (g.lc() < 0) g = -g;
    }
    return mul_scalar(g, cg);
}

PolyZ derivative(const PolyZ& a) {
    PolyZ r;
    if (a.degree() <= 0) return r;
    r.c.resize(a.degree());
    for (int i = 1; i <= a.degree(); ++i) r.c[i - 1] = a.c[i] * i;
    r.trim();
    return r;
}

PolyZ taylor_shift(const PolyZ& a, const Int& j) {
    if (j == 0 || a.is_zero()) return a;
    // Horner: p(x+j) built from the top coefficient down
    PolyZ r(a.c.back());
    PolyZ xj;
    xj.c = {j, Int(1)};
    for (int i = a.degree() - 1; i >= 0; --i) {
        r = r * xj;
        if (a.c[i] != 0) r = r + PolyZ(a.c[i]);
    }
    return r;
}

PolyZ poly_pow(const PolyZ& a, unsigned e) {
    PolyZ r(Int(1));
    PolyZ base = a;
    while (e) {
        if (e & 1) r = r * base;
        base = base * base;
        e >>= 1;
    }
    return r;
}

Rat eval(const PolyZ& a, const Rat& x) {
    Rat r(0);
    for (int i = a.degree(); i >= 0; --i) r = r * x + Rat(a.c[i]);
    return r;
}

Int eval(const PolyZ& a, const Int& x) {
    Int r(0);
    for (int i = a.degree(); i >= 0; --i) r = r * x + a.c[i];
    return r;
}

std::string to_string(const PolyZ& a, const std::string& var) {
    if (a.is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (int i = a.degree(); i >= 0; --i) {
        const Int& ci = a.c[i];
        if (ci == 0) continue;
        Int mag = abs(ci);
        if (first) {
            if (ci < 0) os << "-";
            first = false;
        } else {
            os << (ci < 0 ? "-" : "+");
        }
        if (i == 0 || mag != 1) {
            os << mag.get_str();
            if (i > 0) os << "*";
        }
        if (i > 0) {
            os << var;
            if (i > 1) os << "^" << i;
        }
    }
    return os.str();
}

RatN::RatN(const Rat& q) {
    num = PolyZ(Int(q.get_num()));
    den = PolyZ(Int(q.get_den()));
}

void RatN::normalize() {
    if (den.is_zero()) throw std::domain_error("RatN: zero denominator");
    if (num.is_zero()) {
        den = PolyZ(Int(1));
        return;
    }
    PolyZ g = poly_gcd(num, den);
    if (!g.is_one()) {
        num = divexact(num, g);
        den = divexact(den, g);
    }
    Int cn = content(num), cd = content(den), cg;
    mpz_gcd(cg.get_mpz_t(), cn.get_mpz_t(), cd.get_mpz_t());
    if (cg > 1) {
        for (auto& x : num.c) x /= cg;
        for (auto& x : den.c) x /= cg;
    }
    if (den.lc() < 0) {
        num = -num;
        den = -den;
    }
}

Rat RatN::to_rat() const {
    assert(is_constant());
    if (num.is_zero()) return Rat(0);
    Rat q(num.c[0], den.c[0]);
    q.canonicalize();
    return q;
}

RatN operator+(const RatN& a, const RatN& b) {
    return RatN(a.num * b.den + b.num * a.den, a.den * b.den);
}

RatN operator-(const RatN& a, const RatN& b) {
    return RatN(a.num * b.den - b.num * a.den, a.den * b.den);
}

RatN operator-(const RatN& a) {
    RatN r = a;
    r.num = -r.num;
    return r;
}

RatN operator*(const RatN& a, const RatN& b) {
    if (a.is_zero() || b.is_zero()) return RatN();
    return RatN(a.num * b.num, a.den * b.den);
}

RatN operator/(const RatN& a, const RatN& b) {
    if (b.is_zero()) throw std::domain_error("RatN division by zero");
    if (a.is_zero()) return RatN();
    return RatN(a.num * b.den, a.den * b.num);
}

RatN inverse(const RatN& a) {
    if (a.is_zero()) throw std::domain_error("RatN inverse of zero");
    return RatN(a.den, a.num);
}

RatN shift_n(const RatN& a, long j) {
    RatN r;
    r.num = taylor_shift(a.num, Int(j));
    r.den = taylor_shift(a.den, Int(j));
    return r;  // shift preserves canonical form up to den sign
}

RatN pow(const RatN& a, long e) {
    if (e == 0) return RatN(1);
    RatN base = e < 0 ? inverse(a) : a;
    unsigned m = static_cast<unsigned>(e < 0 ? -e : e);
    RatN r;
    r.num = poly_pow(base.num, m);
    r.den = poly_pow(base.den, m);
    return r;
}

std::optional<Rat> eval(const RatN& a, const Rat& x) {
    Rat d = eval(a.den, x);
    if (d == 0) return std::nullopt;
    return eval(a.num, x) / d;
}

Rat polypart_constant(const RatN& a) {
    if (a.is_zero() || a.num.degree() < a.den.degree()) return Rat(0);
    std::vector<Rat> num(a.num.degree() + 1), den(a.den.degree() + 1);
    for (int i = 0; i <= a.num.degree(); ++i) num[i] = Rat(a.num.c[i]);
    for (int i = 0; i <= a.den.degree(); ++i) den[i] = Rat(a.den.c[i]);
    std::vector<Rat> q(num.size() - den.size() + 1, Rat(0));
    while (num.size() >= den.size()) {
        size_t d = num.size() - den.size();
        Rat t = num.back() / den.back();
        q[d] = t;
        for (size_t i = 0; i < den.size(); ++i) num[i + d] -= t * den[i];
        while (!num.empty() && num.back() == 0) num.pop_back();
        if (num.empty()) break;
    }
    return q.empty() ? Rat(0) : q[0];
}

std::string to_string(const RatN& a, const std::string& var) {
    if (a.den.is_one()) return to_string(a.num, var);
    std::string ns = to_string(a.num, var);
    std::string ds = to_string(a.den, var);
    std::string r;
    if (a.num.degree() > 0) r = "(" + ns + ")";
    else r = ns;
    r += "/";
    if (a.den.degree() > 0 || a.den.c[0] < 0) r += "(" + ds + ")";
    else r += ds;
    return r;
}

}  // namespace prescope
