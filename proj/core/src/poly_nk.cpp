#include <prescope/poly_nk.hpp>
#include <prescope/upoly_k.hpp>

#include <algorithm>
#include <cassert>
#include <sstream>

namespace prescope {

PolyNK PolyNK::monomial(const Rat& c, int dn, int dk) {
    PolyNK p;
    if (c != 0) p.t[{dn, dk}] = c;
    return p;
}

PolyNK PolyNK::from_n(const PolyZ& p) {
    PolyNK r;
    for (int i = 0; i <= p.degree(); ++i)
        if (p.c[i] != 0) r.t[{i, 0}] = Rat(p.c[i]);
    return r;
}

PolyNK PolyNK::from_k(const PolyZ& p) {
    PolyNK r;
    for (int i = 0; i <= p.degree(); ++i)
        if (p.c[i] != 0) r.t[{0, i}] = Rat(p.c[i]);
    return r;
}

PolyNK PolyNK::from_ratn_num(const RatN& r) { return from_n(r.num); }

bool PolyNK::is_one() const {
    return t.size() == 1 && t.begin()->first == Mono{0, 0} && t.begin()->second == 1;
}

int PolyNK::deg_n() const {
    if (t.empty()) return -1;
    int d = 0;
    for (const auto& [m, c] : t) d = std::max(d, m.dn);
    return d;
}

int PolyNK::deg_k() const {
    if (t.empty()) return -1;
    int d = 0;
    for (const auto& [m, c] : t) d = std::max(d, m.dk);
    return d;
}

Rat PolyNK::coeff(int dn, int dk) const {
    auto it = t.find({dn, dk});
    return it == t.end() ? Rat(0) : it->second;
}

PolyZ PolyNK::to_univ_n() const {
    assert(k_free());
    PolyZ r;
    r.c.assign(std::max(deg_n() + 1, 0), Int(0));
    for (const auto& [m, c] : t) {
        assert(is_integer(c));
        r.c[m.dn] = Int(c.get_num());
    }
    r.trim();
    return r;
}

PolyZ PolyNK::to_univ_k() const {
    assert(n_free());
    PolyZ r;
    r.c.assign(std::max(deg_k() + 1, 0), Int(0));
    for (const auto& [m, c] : t) {
        assert(is_integer(c));
        r.c[m.dk] = Int(c.get_num());
    }
    r.trim();
    return r;
}

bool PolyNK::operator<(const PolyNK& o) const {
    auto it = t.begin(), jt = o.t.begin();
    GrlexLess less;
    for (; it != t.end() && jt != o.t.end(); ++it, ++jt) {
        if (less(it->first, jt->first)) return true;
        if (less(jt->first, it->first)) return false;
        if (it->second != jt->second) return it->second < jt->second;
    }
    return it == t.end() && jt != o.t.end();
}

PolyNK operator+(const PolyNK& a, const PolyNK& b) {
    PolyNK r = a;
    for (const auto& [m, c] : b.t) {
        auto it = r.t.find(m);
        if (it == r.t.end()) {
            r.t[m] = c;
        } else {
            it->second += c;
            if (it->second == 0) r.t.erase(it);
        }
    }
    return r;
}

PolyNK operator-(const PolyNK& a, const PolyNK& b) {
    PolyNK r = a;
    for (const auto& [m, c] : b.t) {
        auto it = r.t.find(m);
        if (it == r.t.end()) {
            r.t[m] = -c;
        } else {
            it->second -= c;
            if (it->second == 0) r.t.erase(it);
        }
    }
    return r;
}

PolyNK operator-(const PolyNK& a) {
    PolyNK r = a;
    for (auto& [m, c] : r.t) c = -c;
    return r;
}

PolyNK operator*(const PolyNK& a, const PolyNK& b) {
    PolyNK r;
    for (const auto& [ma, ca] : a.t) {
        for (const auto& [mb, cb] : b.t) {
            Mono m{ma.dn + mb.dn, ma.dk + mb.dk};
            Rat prod = ca * cb;
            auto it = r.t.find(m);
            if (it == r.t.end()) {
                r.t[m] = prod;
            } else {
                it->second += prod;
                if (it->second == 0) r.t.erase(it);
            }
        }
    }
    return r;
}

PolyNK mul_scalar(const PolyNK& a, const Rat& s) {
    if (s == 0) return PolyNK();
    PolyNK r = a;
    for (auto& [m, c] : r.t) c *= s;
    return r;
}

PolyNK pow(const PolyNK& a, unsigned e) {
    PolyNK r(Rat(1));
    PolyNK base = a;
    while (e) {
        if (e & 1) r = r * base;
        base = base * base;
        e >>= 1;
    }
    return r;
}

Rat content_q(const PolyNK& a) {
    if (a.is_zero()) return Rat(0);
    Int gn = 0, ld = 1;
    for (const auto& [m, c] : a.t) {
        mpz_gcd(gn.get_mpz_t(), gn.get_mpz_t(), c.get_num().get_mpz_t());
        mpz_lcm(ld.get_mpz_t(), ld.get_mpz_t(), c.get_den().get_mpz_t());
    }
    Rat content(gn, ld);
    content.canonicalize();
    if (a.lc_grlex() < 0) content = -content;
    return content;
}

PolyNK primitive_part_q(const PolyNK& a) {
    if (a.is_zero()) return a;
    Rat c = content_q(a);
    return mul_scalar(a, Rat(1) / c);
}

PolyNK derivative_k(const PolyNK& a) {
    PolyNK r;
    for (const auto& [m, c] : a.t) {
        if (m.dk == 0) continue;
        r.t[{m.dn, m.dk - 1}] = c * m.dk;
    }
    return r;
}

PolyNK shift(const PolyNK& p, Var v, long j) {
    if (j == 0) return p;
    PolyNK r;
    Rat J(j);
    for (const auto& [m, c] : p.t) {
        int d = (v == Var::n) ? m.dn : m.dk;
        Rat binom(1), jp(1);
        for (int i = d; i >= 0; --i) {
            Rat add = c * binom * jp;
            Mono mm = (v == Var::n) ? Mono{i, m.dk} : Mono{m.dn, i};
            auto it = r.t.find(mm);
            if (it == r.t.end()) {
                if (add != 0) r.t[mm] = add;
            } else {
                it->second += add;
                if (it->second == 0) r.t.erase(it);
            }
            if (i > 0) {
                binom *= Rat(i, d - i + 1);
                binom.canonicalize();
                jp *= J;
            }
        }
    }
    return r;
}

Rat eval(const PolyNK& a, const Rat& n, const Rat& k) {
    Rat r(0);
    for (const auto& [m, c] : a.t) r += c * rat_pow(n, m.dn) * rat_pow(k, m.dk);
    return r;
}

RatN eval_k(const PolyNK& a, const RatN& k) {
    UPolyK u = to_upoly(a);
    return eval_k(u, k);
}

std::string to_string(const PolyNK& a) {
    if (a.is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto it = a.t.rbegin(); it != a.t.rend(); ++it) {
        const Mono& m = it->first;
        const Rat& c = it->second;
        Rat mag = abs(c);
        if (first) {
            if (c < 0) os << "-";
            first = false;
        } else {
            os << (c < 0 ? "-" : "+");
        }
        bool has_var = m.dn > 0 || m.dk > 0;
        if (!has_var || mag != 1) {
            os << mag.get_str();
            if (has_var) os << "*";
        }
        if (m.dn > 0) {
            os << "n";
            if (m.dn > 1) os << "^" << m.dn;
            if (m.dk > 0) os << "*";
        }
        if (m.dk > 0) {
            os << "k";
            if (m.dk > 1) os << "^" << m.dk;
        }
    }
    return os.str();
}

// ---- gcd machinery ----

// content of p with respect to k: gcd in Q[n] of the k-coefficients
// (up to rational factors), as a primitive integer polynomial, positive lc
PolyZ content_k(const PolyNK& p) {
    UPolyK u = to_upoly(p);
    PolyZ g;
    for (const auto& c : u.c) {
        if (c.is_zero()) continue;
        g = poly_gcd(g, c.num);
        if (g.degree() == 0) break;
    }
    return g;
}

// dense view in k with integer polynomial coefficients
using UPolyZn = std::vector<PolyZ>;

static UPolyZn to_zz_k(const PolyNK& p) {
    UPolyZn r(std::max(p.deg_k() + 1, 0));
    for (const auto& [m, c] : p.t) {
        assert(is_integer(c));
        PolyZ& dst = r[m.dk];
        if (dst.c.size() <= static_cast<size_t>(m.dn)) dst.c.resize(m.dn + 1, Int(0));
        dst.c[m.dn] = Int(c.get_num());
    }
    for (auto& c : r) c.trim();
    while (!r.empty() && r.back().is_zero()) r.pop_back();
    return r;
}

static PolyNK from_zz_k(const UPolyZn& p) {
    PolyNK r;
    for (size_t i = 0; i < p.size(); ++i)
        for (int d = 0; d <= p[i].degree(); ++d)
            if (p[i].c[d] != 0) r.t[{d, static_cast<int>(i)}] = Rat(p[i].c[d]);
    return r;
}

// exact division test over Z[n][k] for primitive divisor candidates
static bool divides_zz(const UPolyZn& c, UPolyZn rem) {
    if (c.empty()) return false;
    while (!rem.empty()) {
        if (rem.size() < c.size()) return false;
        PolyZ q;
        if (!divides(c.back(), rem.back())) return false;
        q = divexact(rem.back(), c.back());
        size_t off = rem.size() - c.size();
        for (size_t i = 0; i < c.size(); ++i) rem[off + i] = rem[off + i] - q * c[i];
        while (!rem.empty() && rem.back().is_zero()) rem.pop_back();
        if (rem.size() > off + c.size() - 1) return false;  // no progress
    }
    return true;
}

// pseudo-remainder in k over Z[n]
static UPolyZn pseudo_rem_k(UPolyZn a, const UPolyZn& b) {
    int e = static_cast<int>(a.size()) - static_cast<int>(b.size()) + 1;
    while (!a.empty() && a.size() >= b.size()) {
        PolyZ la = a.back();
        size_t off = a.size() - b.size();
        for (auto& x : a) x = x * b.back();
        for (size_t i = 0; i < b.size(); ++i) a[off + i] = a[off + i] - la * b[i];
        while (!a.empty() && a.back().is_zero()) a.pop_back();
        --e;
    }
    if (e > 0 && !a.empty()) {
        PolyZ f(Int(1));
        for (int i = 0; i < e; ++i) f = f * b.back();
        for (auto& x : a) x = x * f;
    }
    return a;
}

static PolyZ content_zz(const UPolyZn& a) {
    PolyZ g;
    for (const auto& c : a) {
        g = poly_gcd(g, c);
        if (g.degree() == 0 && !g.is_zero()) break;
    }
    return g;
}

static UPolyZn primitive_zz(UPolyZn a) {
    PolyZ c = content_zz(a);
    if (c.is_zero() || c.is_one()) return a;
    for (auto& x : a) x = divexact(x, c);
    return a;
}

// gcd of primitive integer bivariate polynomials (both k-degree >= 1 or so)
// by specializing n, interpolating, and verifying; primitive PRS fallback.
static PolyNK gcd_primitive_parts(const PolyNK& A, const PolyNK& B) {
    UPolyZn az = to_zz_k(A), bz = to_zz_k(B);
    PolyZ gamma = poly_gcd(az.back(), bz.back());
    int dn_bound = std::max(A.deg_n(), B.deg_n()) + gamma.degree() + 2;
    struct Pt {
        Rat x;
        std::vector<Rat> g;  // monic gcd coefficients at x
    };
    std::vector<Pt> pts;
    int dmin = std::min(A.deg_k(), B.deg_k()) + 1;
    long n0 = 0;
    int misses = 0;
    while (static_cast<int>(pts.size()) < dn_bound + 1 && misses < 4 * dn_bound + 64) {
        Rat x(n0++);
        Rat la = eval(az.back(), x), lb = eval(bz.back(), x);
        if (la == 0 || lb == 0) {
            ++misses;
            continue;
        }
        std::vector<Rat> sa(az.size()), sb(bz.size());
        for (size_t i = 0; i < az.size(); ++i) sa[i] = eval(az[i], x);
        for (size_t i = 0; i < bz.size(); ++i) sb[i] = eval(bz[i], x);
        // univariate gcd over Q via integer polynomials
        PolyZ pa, pb;
        pa.c.assign(sa.size(), Int(0));
        pb.c.assign(sb.size(), Int(0));
        Int lca(1), lcb(1);
        for (const auto& q : sa) mpz_lcm(lca.get_mpz_t(), lca.get_mpz_t(), q.get_den().get_mpz_t());
        for (const auto& q : sb) mpz_lcm(lcb.get_mpz_t(), lcb.get_mpz_t(), q.get_den().get_mpz_t());
        for (size_t i = 0; i < sa.size(); ++i) pa.c[i] = Int(Rat(sa[i] * Rat(lca)).get_num());
        for (size_t i = 0; i < sb.size(); ++i) pb.c[i] = Int(Rat(sb[i] * Rat(lcb)).get_num());
        pa.trim();
        pb.trim();
        PolyZ g = poly_gcd(pa, pb);
        if (g.degree() == 0) return PolyNK(Rat(1));  // coprime primitive parts
        if (g.degree() > dmin) {
            ++misses;
            continue;  // unlucky point
        }
        if (g.degree() < dmin) {
            dmin = g.degree();
            pts.clear();
        }
        // scale monic gcd by gamma(x)
        Rat scale = eval(gamma, x) / Rat(g.lc());
        std::vector<Rat> coeffs(g.degree() + 1);
        for (int i = 0; i <= g.degree(); ++i) coeffs[i] = Rat(g.c[i]) * scale;
        pts.push_back({x, std::move(coeffs)});
    }
    if (static_cast<int>(pts.size()) == dn_bound + 1) {
        // coefficient-wise Newton interpolation
        size_t m = pts.size();
        PolyNK cand;
        for (int ki = 0; ki <= dmin; ++ki) {
            std::vector<Rat> xs(m), ys(m);
            for (size_t i = 0; i < m; ++i) {
                xs[i] = pts[i].x;
                ys[i] = ki < static_cast<int>(pts[i].g.size()) ? pts[i].g[ki] : Rat(0);
            }
            std::vector<Rat> dd = ys;
            for (size_t lev = 1; lev < m; ++lev)
                for (size_t i = m - 1; i >= lev; --i)
                    dd[i] = (dd[i] - dd[i - 1]) / (xs[i] - xs[i - lev]);
            std::vector<Rat> poly{dd[m - 1]};
            for (size_t i = m - 1; i-- > 0;) {
                std::vector<Rat> np(poly.size() + 1, Rat(0));
                for (size_t j = 0; j < poly.size(); ++j) {
                    np[j + 1] += poly[j];
                    np[j] -= poly[j] * xs[i];
                }
                np[0] += dd[i];
                poly = std::move(np);
            }
            for (size_t d = 0; d < poly.size(); ++d)
                if (poly[d] != 0) cand.t[{static_cast<int>(d), ki}] = poly[d];
        }
        if (!cand.is_zero()) {
            cand = primitive_part_q(cand);
            PolyZ ck = content_k(cand);
            if (ck.degree() > 0) cand = divexact(cand, PolyNK::from_n(ck));
            UPolyZn cz = to_zz_k(cand);
            if (static_cast<int>(cz.size()) - 1 == dmin && divides_zz(cz, az) &&
                divides_zz(cz, bz))
                return cand;
        }
    }
    // primitive PRS fallback
    UPolyZn f = az, s = bz;
    if (f.size() < s.size()) std::swap(f, s);
    while (!s.empty() && s.size() > 1) {
        UPolyZn r = pseudo_rem_k(f, s);
        f = std::move(s);
        s = primitive_zz(std::move(r));
    }
    if (!s.empty()) return PolyNK(Rat(1));  // nonzero k-free remainder
    PolyNK g = from_zz_k(f);
    g = primitive_part_q(g);
    PolyZ gk = content_k(g);
    if (gk.degree() > 0) g = primitive_part_q(divexact(g, PolyNK::from_n(gk)));
    return g;
}

PolyNK poly_gcd(const PolyNK& a, const PolyNK& b) {
    if (a.is_zero()) return b.is_zero() ? PolyNK() : primitive_part_q(b);
    if (b.is_zero()) return primitive_part_q(a);
    PolyNK A = primitive_part_q(a), B = primitive_part_q(b);
    if (A.k_free() && B.k_free())
        return PolyNK::from_n(poly_gcd(A.to_univ_n(), B.to_univ_n()));
    PolyZ ca = content_k(A), cb = content_k(B);
    PolyZ cg = poly_gcd(ca, cb);
    PolyNK gp(Rat(1));
    if (!A.k_free() && !B.k_free()) {
        if (ca.degree() > 0) A = divexact(A, PolyNK::from_n(ca));
        if (cb.degree() > 0) B = divexact(B, PolyNK::from_n(cb));
        gp = gcd_primitive_parts(A, B);
    }
    PolyNK r = gp * PolyNK::from_n(cg);
    return primitive_part_q(r);
}

PolyNK divexact(const PolyNK& a, const PolyNK& b) {
    assert(!b.is_zero());
    if (a.is_zero()) return PolyNK();
    UPolyK ua = to_upoly(a), ub = to_upoly(b);
    auto [q, r] = divmod(ua, ub);
    assert(r.is_zero());
    PolyNK out;
    for (int i = 0; i <= q.degree(); ++i) {
        const RatN& c = q.c[i];
        if (c.is_zero()) continue;
        assert(c.den.degree() == 0);
        Rat dc(1, c.den.c[0]);
        dc.canonicalize();
        for (int d = 0; d <= c.num.degree(); ++d) {
            if (c.num.c[d] == 0) continue;
            Rat val = Rat(c.num.c[d]) * dc;
            if (val != 0) out.t[{d, i}] = val;
        }
    }
    return out;
}

bool divides(const PolyNK& b, const PolyNK& a) {
    if (a.is_zero()) return true;
    if (b.is_zero()) return false;
    UPolyK ua = to_upoly(a), ub = to_upoly(b);
    if (ua.degree() < ub.degree()) return false;
    auto [q, r] = divmod(ua, ub);
    if (!r.is_zero()) return false;
    for (const auto& c : q.c)
        if (c.den.degree() > 0) return false;
    return true;
}

// ---- dispersion via resultants ----

static Rat resultant_q(std::vector<Rat> A, std::vector<Rat> B) {
    auto deg = [](const std::vector<Rat>& p) { return static_cast<int>(p.size()) - 1; };
    auto trim = [](std::vector<Rat>& p) {
        while (!p.empty() && p.back() == 0) p.pop_back();
    };
    trim(A);
    trim(B);
    if (A.empty() || B.empty()) return Rat(0);
    Rat res(1);
    while (true) {
        int da = deg(A), db = deg(B);
        if (db == 0) {
            res *= rat_pow(B[0], da);
            break;
        }
        if (da < db) {
            std::swap(A, B);
            if ((deg(A) * deg(B)) % 2 == 1) res = -res;
            continue;
        }
        std::vector<Rat> R = A;
        while (static_cast<int>(R.size()) - 1 >= db) {
            int d = static_cast<int>(R.size()) - 1 - db;
            Rat t = R.back() / B[db];
            for (int i = 0; i <= db; ++i) R[i + d] -= t * B[i];
            trim(R);
            if (R.empty()) break;
        }
        if (R.empty()) return Rat(0);
        int dr = deg(R);
        res *= rat_pow(B[db], da - dr);
        if ((da * db) % 2 == 1) res = -res;
        A = std::move(B);
        B = std::move(R);
    }
    return res;
}

static std::vector<Rat> specialize_n(const PolyNK& p, const Rat& n0) {
    std::vector<Rat> r(std::max(p.deg_k() + 1, 0), Rat(0));
    for (const auto& [m, c] : p.t) r[m.dk] += c * rat_pow(n0, m.dn);
    while (!r.empty() && r.back() == 0) r.pop_back();
    return r;
}

static std::vector<Rat> newton_interpolate(const std::vector<Rat>& xs,
                                           const std::vector<Rat>& ys) {
    size_t m = xs.size();
    std::vector<Rat> dd = ys;
    for (size_t lev = 1; lev < m; ++lev)
        for (size_t i = m - 1; i >= lev; --i)
            dd[i] = (dd[i] - dd[i - 1]) / (xs[i] - xs[i - lev]);
    std::vector<Rat> poly{dd[m - 1]};
    for (size_t i = m - 1; i-- > 0;) {
        std::vector<Rat> np(poly.size() + 1, Rat(0));
        for (size_t j = 0; j < poly.size(); ++j) {
            np[j + 1] += poly[j];
            np[j] -= poly[j] * xs[i];
        }
        np[0] += dd[i];
        poly = std::move(np);
    }
    while (!poly.empty() && poly.back() == 0) poly.pop_back();
    return poly;
}

// Res_k(a, b) as Q-coefficient vector in n, by evaluation/interpolation
static std::vector<Rat> resultant_k(const PolyNK& a, const PolyNK& b) {
    int dka = a.deg_k(), dkb = b.deg_k();
    assert(dka >= 1 && dkb >= 1);
    int bound = dka * std::max(b.deg_n(), 0) + dkb * std::max(a.deg_n(), 0) + 1;
    std::vector<Rat> xs, ys;
    for (long n0 = 0; static_cast<int>(xs.size()) < bound; ++n0) {
        auto sa = specialize_n(a, Rat(n0));
        auto sb = specialize_n(b, Rat(n0));
        if (static_cast<int>(sa.size()) - 1 != dka || static_cast<int>(sb.size()) - 1 != dkb)
            continue;
        xs.push_back(Rat(n0));
        ys.push_back(resultant_q(sa, sb));
    }
    return newton_interpolate(xs, ys);
}

static std::vector<Int> divisors_capped(Int v, size_t cap = 100000) {
    v = abs(v);
    std::vector<std::pair<Int, int>> fac;
    Int rem = v;
    for (long pr = 2; rem > 1; pr += (pr == 2 ? 1 : 2)) {
        if (pr > 100000) break;
        if (rem % pr == 0) {
            int e = 0;
            while (rem % pr == 0) {
                rem /= pr;
                ++e;
            }
            fac.emplace_back(Int(pr), e);
        }
        if (Int(pr) * Int(pr) > rem) break;
    }
    if (rem > 1) fac.emplace_back(rem, 1);
    std::vector<Int> divs{Int(1)};
    for (const auto& [p, e] : fac) {
        size_t sz = divs.size();
        Int pe(1);
        for (int i = 1; i <= e; ++i) {
            pe *= p;
            for (size_t s = 0; s < sz; ++s) {
                divs.push_back(divs[s] * pe);
                if (divs.size() > cap) return divs;
            }
        }
    }
    return divs;
}

static std::set<long> integer_roots(PolyZ g) {
    std::set<long> roots;
    if (g.is_zero()) return roots;
    size_t z = 0;
    while (z < g.c.size() && g.c[z] == 0) ++z;
    if (z > 0) {
        roots.insert(0);
        g.c.erase(g.c.begin(), g.c.begin() + z);
    }
    if (g.degree() < 1) return roots;
    g = primitive_part(g);
    Int maxc = 0;
    for (const auto& x : g.c) {
        Int t = abs(x);
        if (t > maxc) maxc = t;
    }
    Int bound = maxc / abs(g.lc()) + 1;
    std::set<Int> cands;
    for (const auto& d : divisors_capped(g.c[0])) cands.insert(d);
    for (long s = 1; s <= 256; ++s) cands.insert(Int(s));
    for (const auto& d : cands) {
        if (d > bound || !d.fits_slong_p()) continue;
        long dl = d.get_si();
        if (eval(g, Int(dl)) == 0) roots.insert(dl);
        if (eval(g, Int(-dl)) == 0) roots.insert(-dl);
    }
    return roots;
}

std::set<long> dispersion_set(const PolyNK& a, const PolyNK& b) {
    std::set<long> out;
    if (a.is_zero() || b.is_zero()) return out;
    UPolyK ua = to_upoly(a), ub = to_upoly(b);
    if (ua.degree() < 1 || ub.degree() < 1) return out;
    UPolyK sa = squarefree_part(ua), sb = squarefree_part(ub);
    RatN dena, denb;
    PolyNK A = primitive_part_q(to_polynk(sa, &dena));
    PolyNK B = primitive_part_q(to_polynk(sb, &denb));
    int dh = A.deg_k() * B.deg_k();
    std::vector<std::vector<Rat>> cols;
    std::vector<Rat> hs;
    for (long h0 = 0; static_cast<int>(hs.size()) < dh + 1; ++h0) {
        PolyNK Bs = shift(B, Var::k, h0);
        cols.push_back(resultant_k(A, Bs));
        hs.push_back(Rat(h0));
    }
    size_t maxn = 0;
    for (const auto& cvec : cols) maxn = std::max(maxn, cvec.size());
    PolyZ gh;
    for (size_t i = 0; i < maxn; ++i) {
        std::vector<Rat> ys;
        for (const auto& cvec : cols) ys.push_back(i < cvec.size() ? cvec[i] : Rat(0));
        std::vector<Rat> poly = newton_interpolate(hs, ys);
        if (poly.empty()) continue;
        Int lcm(1);
        for (const auto& q : poly)
            mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), q.get_den().get_mpz_t());
        PolyZ slice;
        slice.c.resize(poly.size());
        for (size_t x = 0; x < poly.size(); ++x) slice.c[x] = Int(Rat(poly[x] * Rat(lcm)).get_num());
        slice.trim();
        gh = poly_gcd(gh, slice);
        if (!gh.is_zero() && gh.degree() == 0) break;
    }
    for (long j : integer_roots(gh)) {
        if (kgcd(sa, shift_k(sb, j)).degree() >= 1) out.insert(j);
    }
    return out;
}

std::optional<long> shift_equivalence(const PolyNK& p, const PolyNK& q) {
    if (p.is_zero() || q.is_zero())
        return p == q ? std::optional<long>(0) : std::nullopt;
    if (p.deg_k() != q.deg_k() || p.deg_n() != q.deg_n()) return std::nullopt;
    int d = p.deg_k();
    if (d == 0) return p == q ? std::optional<long>(0) : std::nullopt;
    UPolyK up = to_upoly(p), uq = to_upoly(q);
    if (!(up.lc() == uq.lc())) return std::nullopt;
    // mean root mu = -c_{d-1}/(d c_d); q = p(k+j) has mu_q = mu_p - j
    RatN cp = up.c[d - 1], cq = uq.c[d - 1];
    RatN diff = (cq - cp) / (RatN(static_cast<long>(d)) * up.lc());
    if (!diff.is_constant()) return std::nullopt;
    Rat jr = diff.to_rat();
    if (!is_integer(jr) || !jr.get_num().fits_slong_p()) return std::nullopt;
    long j = jr.get_num().get_si();
    if (shift(p, Var::k, j) == q) return j;
    return std::nullopt;
}

// ---- RatNK ----

RatNK::RatNK(const Rat& q) {
    num = PolyNK(q);
    den = PolyNK(Rat(1));
    normalize();
}

RatNK::RatNK(const RatN& r) {
    num = PolyNK::from_n(r.num);
    den = PolyNK::from_n(r.den);
    normalize();
}

void RatNK::normalize() {
    if (den.is_zero()) throw std::domain_error("RatNK: zero denominator");
    if (num.is_zero()) {
        den = PolyNK(Rat(1));
        return;
    }
    Rat cn = content_q(num), cd = content_q(den);
    PolyNK np = mul_scalar(num, Rat(1) / cn);
    PolyNK dp = mul_scalar(den, Rat(1) / cd);
    PolyNK g = poly_gcd(np, dp);
    if (!g.is_one()) {
        np = divexact(np, g);
        dp = divexact(dp, g);
    }
    Rat scale = cn / cd;
    num = mul_scalar(np, Rat(scale.get_num()));
    den = mul_scalar(dp, Rat(scale.get_den()));
}

RatN RatNK::to_ratn() const {
    assert(k_free());
    return RatN(num.to_univ_n(), den.to_univ_n());
}

RatNK operator+(const RatNK& a, const RatNK& b) {
    return RatNK(a.num * b.den + b.num * a.den, a.den * b.den);
}

RatNK operator-(const RatNK& a, const RatNK& b) {
    return RatNK(a.num * b.den - b.num * a.den, a.den * b.den);
}

RatNK operator-(const RatNK& a) {
    RatNK r = a;
    r.num = -r.num;
    return r;
}

RatNK operator*(const RatNK& a, const RatNK& b) {
    if (a.is_zero() || b.is_zero()) return RatNK();
    return RatNK(a.num * b.num, a.den * b.den);
}

RatNK operator/(const RatNK& a, const RatNK& b) {
    if (b.is_zero()) throw std::domain_error("RatNK division by zero");
    if (a.is_zero()) return RatNK();
    return RatNK(a.num * b.den, a.den * b.num);
}

RatNK inverse(const RatNK& a) {
    if (a.is_zero()) throw std::domain_error("RatNK inverse of zero");
    return RatNK(a.den, a.num);
}

RatNK shift(const RatNK& f, Var v, long j) {
    if (j == 0) return f;
    RatNK r;
    r.num = shift(f.num, v, j);
    r.den = shift(f.den, v, j);
    if (!r.den.is_zero() && r.den.lc_grlex() < 0) {
        r.num = -r.num;
        r.den = -r.den;
    }
    return r;
}

RatNK pow(const RatNK& a, long e) {
    if (e == 0) return RatNK(1);
    RatNK base = e < 0 ? inverse(a) : a;
    unsigned m = static_cast<unsigned>(e < 0 ? -e : e);
    RatNK r;
    r.num = pow(base.num, m);
    r.den = pow(base.den, m);
    return r;
}

std::optional<Rat> eval(const RatNK& a, const Rat& n, const Rat& k) {
    Rat d = eval(a.den, n, k);
    if (d == 0) return std::nullopt;
    return eval(a.num, n, k) / d;
}

RatN eval_k(const RatNK& a, const RatN& k) {
    RatN d = eval_k(a.den, k);
    if (d.is_zero()) throw std::domain_error("eval_k: denominator vanishes");
    return eval_k(a.num, k) / d;
}

std::string to_string(const RatNK& a) {
    if (a.den.is_one()) return to_string(a.num);
    std::string ns = to_string(a.num);
    std::string ds = to_string(a.den);
    std::string r;
    if (a.num.t.size() > 1) r = "(" + ns + ")";
    else r = ns;
    r += "/";
    if (a.den.t.size() > 1 || a.den.deg_n() > 0 || a.den.deg_k() > 0) r += "(" + ds + ")";
    else r += ds;
    return r;
}

// ---- linear factor extraction ----

static std::vector<Rat> rational_roots_q(const std::vector<Rat>& p) {
    std::vector<Rat> roots;
    if (p.empty()) return roots;
    Int lcm(1);
    for (const auto& q : p) mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), q.get_den().get_mpz_t());
    PolyZ g;
    g.c.resize(p.size());
    for (size_t i = 0; i < p.size(); ++i) g.c[i] = Int(Rat(p[i] * Rat(lcm)).get_num());
    g.trim();
    if (g.is_zero()) return roots;
    size_t z = 0;
    while (z < g.c.size() && g.c[z] == 0) ++z;
    if (z > 0) {
        roots.push_back(Rat(0));
        g.c.erase(g.c.begin(), g.c.begin() + z);
    }
    if (g.degree() < 1) return roots;
    g = primitive_part(g);
    auto tdivs = divisors_capped(g.c[0], 20000);
    auto ldivs = divisors_capped(g.lc(), 2000);
    for (const auto& pnum : tdivs) {
        for (const auto& qden : ldivs) {
            for (int sign = -1; sign <= 1; sign += 2) {
                Rat cand(sign > 0 ? pnum : -pnum, qden);
                cand.canonicalize();
                Rat v(0);
                for (int i = g.degree(); i >= 0; --i) v = v * cand + Rat(g.c[i]);
                if (v == 0) roots.push_back(cand);
            }
        }
    }
    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
    return roots;
}

// extract k-linear factors of a squarefree (in k) polynomial over Q(n);
// recovers roots whose n-degree is at most 2
static std::vector<RatN> linear_roots_squarefree(UPolyK& F) {
    std::vector<RatN> out;
    auto try_root = [&](const RatN& rho) {
        UPolyK lin;
        lin.c = {-rho, RatN(1)};
        auto [q, rem] = divmod(F, lin);
        if (!rem.is_zero()) return false;
        out.push_back(rho);
        F = q;
        return true;
    };
    bool progress = true;
    while (progress && F.degree() >= 1) {
        progress = false;
        if (F.degree() == 1) {
            out.push_back(-F.c[0] / F.c[1]);
            F = UPolyK(1);
            break;
        }
        std::vector<long> pts;
        for (long n0 = 2; static_cast<int>(pts.size()) < 3 && n0 < 500; ++n0) {
            auto v = eval(F.lc(), Rat(n0));
            if (!v || *v == 0) continue;
            pts.push_back(n0);
        }
        if (pts.size() < 3) break;
        auto specialize = [&](long n0) {
            std::vector<Rat> p(F.degree() + 1, Rat(0));
            for (int i = 0; i <= F.degree(); ++i) {
                auto v = eval(F.c[i], Rat(n0));
                p[i] = v ? *v : Rat(0);
            }
            return p;
        };
        auto r0 = rational_roots_q(specialize(pts[0]));
        auto r1 = rational_roots_q(specialize(pts[1]));
        auto r2 = rational_roots_q(specialize(pts[2]));
        Rat x0(pts[0]), x1(pts[1]), x2(pts[2]);
        auto ratn_from = [](const std::vector<Rat>& coeffs) {
            Int lc(1);
            for (const auto& c : coeffs)
                mpz_lcm(lc.get_mpz_t(), lc.get_mpz_t(), c.get_den().get_mpz_t());
            PolyZ num;
            num.c.resize(coeffs.size());
            for (size_t i = 0; i < coeffs.size(); ++i)
                num.c[i] = Int(Rat(coeffs[i] * Rat(lc)).get_num());
            num.trim();
            return RatN(num, PolyZ(lc));
        };
        for (const auto& a : r0) {
            if (progress) break;
            RatN c0(a);
            if (eval_k(F, c0).is_zero() && try_root(c0)) {
                progress = true;
                break;
            }
            for (const auto& b : r1) {
                if (progress) break;
                Rat slope = (b - a) / (x1 - x0);
                RatN lin = ratn_from({a - slope * x0, slope});
                if (eval_k(F, lin).is_zero() && try_root(lin)) {
                    progress = true;
                    break;
                }
                for (const auto& cc : r2) {
                    Rat q2 = a / ((x0 - x1) * (x0 - x2)) + b / ((x1 - x0) * (x1 - x2)) +
                             cc / ((x2 - x0) * (x2 - x1));
                    if (q2 == 0) continue;
                    Rat q1 = -(a * (x1 + x2) / ((x0 - x1) * (x0 - x2)) +
                               b * (x0 + x2) / ((x1 - x0) * (x1 - x2)) +
                               cc * (x0 + x1) / ((x2 - x0) * (x2 - x1)));
                    Rat q0 = a * x1 * x2 / ((x0 - x1) * (x0 - x2)) +
                             b * x0 * x2 / ((x1 - x0) * (x1 - x2)) +
                             cc * x0 * x1 / ((x2 - x0) * (x2 - x1));
                    RatN quad = ratn_from({q0, q1, q2});
                    if (eval_k(F, quad).is_zero() && try_root(quad)) {
                        progress = true;
                        break;
                    }
                }
            }
        }
    }
    return out;
}

LinearFactorSplit linear_factors_k(const PolyNK& p) {
    LinearFactorSplit out;
    out.fully_linear = true;
    if (p.is_zero() || p.k_free()) {
        out.rest = p;
        return out;
    }
    UPolyK f = monic(to_upoly(p));
    UPolyK rest_acc(1);
    // Musser squarefree decomposition over Q(n)
    UPolyK g = kgcd(f, derivative(f));
    UPolyK c = divmod(f, g).first;  // product of distinct factors
    UPolyK w = g;
    int mult = 1;
    while (c.degree() >= 1) {
        UPolyK y = kgcd(c, w);
        UPolyK fac = divmod(c, y).first;  // squarefree part at this multiplicity
        if (fac.degree() >= 1) {
            auto roots = linear_roots_squarefree(fac);
            for (const auto& rho : roots) out.roots.push_back({rho, mult});
            if (fac.degree() >= 1) {
                out.fully_linear = false;
                rest_acc = rest_acc * pow(fac, static_cast<unsigned>(mult));
            }
        }
        c = std::move(y);
        if (w.degree() >= 1) w = divmod(w, c).first;
        ++mult;
    }
    RatN den;
    out.rest = to_polynk(rest_acc, &den);
    return out;
}

PartialFractions partial_fractions_linear(const RatNK& f) {
    PartialFractions out;
    out.poly_part = RatNK(0);
    auto split = linear_factors_k(f.den);
    if (!split.fully_linear)
        throw NonLinearDenominator("denominator has an irreducible factor of k-degree >= 2: " +
                                   to_string(f.den));
    UPolyK num = to_upoly(f.num);
    UPolyK den = to_upoly(f.den);
    auto [quot, rem] = divmod(num, den);
    (void)rem;
    if (!quot.is_zero()) {
        RatN d;
        PolyNK qp = to_polynk(quot, &d);
        out.poly_part = RatNK(qp, PolyNK::from_n(d.num));
    }
    std::vector<std::pair<RatN, int>> groups;
    for (const auto& [rho, m] : split.roots) {
        bool found = false;
        for (auto& [r2, m2] : groups)
            if (r2 == rho) {
                m2 += m;
                found = true;
                break;
            }
        if (!found) groups.emplace_back(rho, m);
    }
    for (const auto& [rho, m] : groups) {
        UPolyK others(1);
        for (const auto& [r2, m2] : groups) {
            if (r2 == rho) continue;
            UPolyK lin2;
            lin2.c = {-r2, RatN(1)};
            others = others * pow(lin2, static_cast<unsigned>(m2));
        }
        // g := f*(k-rho)^m = num/(lc*others); c_{m-i} = g^(i)(rho)/i!
        UPolyK A = mul_scalar(num, inverse(den.lc()));
        UPolyK B = others;
        Rat fact(1);
        for (int i = 0; i < m; ++i) {
            if (i > 0) {
                UPolyK A2 = derivative(A) * B - A * derivative(B);
                B = B * B;
                A = std::move(A2);
                fact *= i;
            }
            RatN val = eval_k(A, rho) / eval_k(B, rho) * RatN(Rat(1) / fact);
            if (!val.is_zero()) out.poles.push_back({rho, m - i, val});
        }
    }
    return out;
}

RatN lagrange_residue(const PolyNK& P, const PolyNK& Q, const RatN& beta) {
    UPolyK uq = to_upoly(Q);
    if (kgcd(uq, derivative(uq)).degree() >= 1)
        throw NotSquarefree("Q is not squarefree in k");
    if (!eval_k(Q, beta).is_zero()) throw NotARoot("Q(beta) != 0");
    RatN dq = eval_k(derivative_k(Q), beta);
    if (dq.is_zero()) throw NotSquarefree("Q'(beta) = 0");
    return eval_k(P, beta) / dq;
}

}  // namespace prescope
