#include <prescope/lindep.hpp>
#include <prescope/ore.hpp>

#include <cassert>

namespace prescope {

std::optional<std::vector<RatN>> DependenceFinder::add(std::vector<RatN> v) {
    std::vector<RatN> combo(count_ + 1);
    combo[count_] = RatN(1);
    ++count_;
    for (const auto& row : rows_) {
        if (row.pivot >= v.size()) continue;
        RatN x = v[row.pivot];
        if (x.is_zero()) continue;
        for (size_t i = 0; i < v.size(); ++i)
            if (!row.v[i].is_zero()) v[i] = v[i] - x * row.v[i];
        for (size_t i = 0; i < row.combo.size(); ++i)
            if (!row.combo[i].is_zero()) combo[i] = combo[i] - x * row.combo[i];
        v[row.pivot] = RatN(0);
    }
    size_t pivot = v.size();
    for (size_t i = 0; i < v.size(); ++i)
        if (!v[i].is_zero()) {
            pivot = i;
            break;
        }
    if (pivot == v.size()) return combo;  // dependent
    RatN inv = inverse(v[pivot]);
    for (auto& x : v) x = x * inv;
    for (auto& x : combo) x = x * inv;
    rows_.push_back({std::move(v), std::move(combo), pivot});
    return std::nullopt;
}

OreOp OreOp::sn(int power) {
    OreOp r;
    r.c.assign(power + 1, RatN(0));
    r.c[power] = RatN(1);
    return r;
}

OreOp OreOp::from_coeffs(std::vector<RatN> coeffs) {
    OreOp r;
    r.c = std::move(coeffs);
    r.trim();
    return r;
}

OreOp OreOp::canonical() const {
    OreOp r = *this;
    r.trim();
    if (r.is_zero()) return r;
    // common denominator
    PolyZ dlcm(Int(1));
    for (const auto& x : r.c) {
        if (x.is_zero()) continue;
        PolyZ g = poly_gcd(dlcm, x.den);
        dlcm = divexact(dlcm * x.den, g);
    }
    std::vector<PolyZ> cleared(r.c.size());
    for (size_t i = 0; i < r.c.size(); ++i) {
        if (r.c[i].is_zero()) continue;
        cleared[i] = r.c[i].num * divexact(dlcm, r.c[i].den);
    }
    // polynomial content across all coefficients
    PolyZ pg;
    for (const auto& p : cleared) pg = poly_gcd(pg, p);
    Int ic = 0;  // poly_gcd output is primitive; integer content handled via contents
    for (const auto& p : cleared) {
        mpz_gcd(ic.get_mpz_t(), ic.get_mpz_t(), content(p).get_mpz_t());
        if (ic == 1) break;
    }
    bool flip = cleared.back().lc() < 0;
    for (size_t i = 0; i < cleared.size(); ++i) {
        if (cleared[i].is_zero()) {
            r.c[i] = RatN(0);
            continue;
        }
        PolyZ p = cleared[i];
        if (pg.degree() > 0) p = divexact(p, pg);
        if (ic > 1)
            for (auto& x : p.c) x /= ic;
        if (flip) p = -p;
        r.c[i] = RatN(p);
    }
    return r;
}

OreOp operator+(const OreOp& a, const OreOp& b) {
    OreOp r;
    r.c.resize(std::max(a.c.size(), b.c.size()));
    for (size_t i = 0; i < a.c.size(); ++i) r.c[i] = a.c[i];
    for (size_t i = 0; i < b.c.size(); ++i) r.c[i] = r.c[i] + b.c[i];
    r.trim();
    return r;
}

OreOp operator-(const OreOp& a, const OreOp& b) {
    OreOp r;
    r.c.resize(std::max(a.c.size(), b.c.size()));
    for (size_t i = 0; i < a.c.size(); ++i) r.c[i] = a.c[i];
    for (size_t i = 0; i < b.c.size(); ++i) r.c[i] = r.c[i] - b.c[i];
    r.trim();
    return r;
}

OreOp operator-(const OreOp& a) {
    OreOp r = a;
    for (auto& x : r.c) x = -x;
    return r;
}

OreOp op_mul(const OreOp& a, const OreOp& b) {
    if (a.is_zero() || b.is_zero()) return OreOp();
    OreOp r;
    r.c.assign(a.c.size() + b.c.size() - 1, RatN(0));
    for (size_t i = 0; i < a.c.size(); ++i) {
        if (a.c[i].is_zero()) continue;
        for (size_t j = 0; j < b.c.size(); ++j) {
            if (b.c[j].is_zero()) continue;
            r.c[i + j] = r.c[i + j] + a.c[i] * shift_n(b.c[j], static_cast<long>(i));
        }
    }
    r.trim();
    return r;
}

OreOp mul_scalar(const OreOp& a, const RatN& s) {
    if (s.is_zero()) return OreOp();
    OreOp r = a;
    for (auto& x : r.c) x = x * s;
    return r;
}

std::pair<OreOp, OreOp> op_rdivmod(const OreOp& a, const OreOp& b) {
    if (b.is_zero()) throw DivisionByZeroOperator();
    OreOp q, r = a;
    if (a.order() >= b.order()) q.c.assign(a.order() - b.order() + 1, RatN(0));
    while (!r.is_zero() && r.order() >= b.order()) {
        int t = r.order() - b.order();
        RatN qt = r.lc() / shift_n(b.lc(), t);
        q.c[t] = qt;
        for (int j = 0; j <= b.order(); ++j)
            r.c[t + j] = r.c[t + j] - qt * shift_n(b.c[j], t);
        r.trim();
    }
    q.trim();
    return {q, r};
}

bool right_divides(const OreOp& b, const OreOp& a) {
    if (b.is_zero()) return a.is_zero();
    return op_rdivmod(a, b).second.is_zero();
}

OreOp op_lclm(std::span<const OreOp> ops) {
    assert(!ops.empty());
    for (const auto& o : ops) assert(!o.is_zero());
    size_t dim = 0;
    std::vector<size_t> offset;
    for (const auto& o : ops) {
        offset.push_back(dim);
        dim += static_cast<size_t>(o.order());
    }
    if (dim == 0) return OreOp::identity();
    // remainders of Sn^d modulo each operator, advanced one power at a time
    std::vector<std::vector<RatN>> rem(ops.size());
    for (size_t i = 0; i < ops.size(); ++i) {
        rem[i].assign(static_cast<size_t>(ops[i].order()), RatN(0));
        if (!rem[i].empty()) rem[i][0] = RatN(1);
    }
    DependenceFinder finder;
    for (int d = 0;; ++d) {
        std::vector<RatN> v(dim);
        for (size_t i = 0; i < ops.size(); ++i)
            for (size_t j = 0; j < rem[i].size(); ++j) v[offset[i] + j] = rem[i][j];
        auto dep = finder.add(std::move(v));
        if (dep) {
            OreOp L = OreOp::from_coeffs(std::move(*dep));
            return L.canonical();
        }
        // advance: rem_i <- (Sn * rem_i) mod ops[i]
        for (size_t i = 0; i < ops.size(); ++i) {
            size_t m = rem[i].size();
            std::vector<RatN> next(m);
            for (size_t j = 0; j < m; ++j) {
                if (rem[i][j].is_zero()) continue;
                RatN sh = shift_n(rem[i][j], 1);
                if (j + 1 < m) {
                    next[j + 1] = next[j + 1] + sh;
                } else {
                    // Sn^m = -(1/a_m) * sum a_j Sn^j  (mod ops[i])
                    RatN factor = sh / ops[i].c[m];
                    for (size_t x = 0; x < m; ++x)
                        next[x] = next[x] - factor * ops[i].c[x];
                }
            }
            rem[i] = std::move(next);
        }
    }
}

RatNK op_apply_quotient(const OreOp& a, const RatNK& g_n) {
    RatNK result;
    RatNK u(1);  // Sn^d(H)/H
    for (int d = 0; d <= a.order(); ++d) {
        if (d > 0) u = u * shift(g_n, Var::n, d - 1);
        if (!a.c[d].is_zero()) result = result + RatNK(a.c[d]) * u;
    }
    return result;
}

std::string to_string(const OreOp& a) {
    if (a.is_zero()) return "0";
    std::string s;
    for (int i = a.order(); i >= 0; --i) {
        if (a.c[i].is_zero()) continue;
        const RatN& co = a.c[i];
        bool simple = co.den.is_one() &&
                      [&] {
                          int nz = 0;
                          for (const auto& x : co.num.c)
                              if (x != 0) ++nz;
                          return nz == 1;
                      }();
        std::string cs = to_string(co, "n");
        bool neg = false;
        if (simple && cs.size() && cs[0] == '-') {
            neg = true;
            cs = cs.substr(1);
        }
        if (s.empty()) {
            if (neg) s += "-";
        } else {
            s += neg ? " - " : " + ";
        }
        if (i == 0) {
            s += simple ? cs : "(" + cs + ")";
        } else {
            if (co.is_one()) {
                // bare Sn
            } else if (simple && cs == "1") {
                // bare Sn (negated one)
            } else {
                s += simple ? cs : "(" + cs + ")";
                s += "*";
            }
            s += "Sn";
            if (i > 1) s += "^" + std::to_string(i);
        }
    }
    return s;
}

}  // namespace prescope
