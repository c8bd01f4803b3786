#include <prescope/ap_reduction.hpp>

#include <algorithm>
#include <cassert>

namespace prescope {

namespace {

using Cluster = std::pair<UPolyK, int>;  // monic squarefree base, multiplicity

// mean-root invariant: mu(C) = -c_{d-1}/(d*c_d); shifting C by j lowers mu by j
RatN mean_root(const UPolyK& c) {
    int d = c.degree();
    if (d < 1) return RatN(0);
    RatN sub = d >= 1 ? c.c[d - 1] : RatN(0);
    return -sub / (RatN(static_cast<long>(d)) * c.lc());
}

// all j with gcd(C, shift_k(F, j)) nontrivial
std::set<long> cluster_dispersion(const UPolyK& c, const UPolyK& f) {
    if (c.degree() == 1 && f.degree() == 1) {
        // monic linear: k + c0 vs k + f0 + j
        RatN diff = c.c[0] / c.c[1] - f.c[0] / f.c[1];
        if (!diff.is_constant()) return {};
        Rat d = diff.to_rat();
        if (!is_integer(d) || !d.get_num().fits_slong_p()) return {};
        return {d.get_num().get_si()};
    }
    RatN d1, d2;
    PolyNK a = primitive_part_q(to_polynk(c, &d1));
    PolyNK b = primitive_part_q(to_polynk(f, &d2));
    return dispersion_set(a, b);
}

void yun_clusters(const UPolyK& base, int mult, std::vector<Cluster>& out) {
    UPolyK f = monic(base);
    if (f.degree() < 1) return;
    UPolyK g = kgcd(f, derivative(f));
    UPolyK c = divmod(f, g).first;
    UPolyK w = g;
    int i = 1;
    while (c.degree() >= 1) {
        UPolyK y = kgcd(c, w);
        UPolyK fac = divmod(c, y).first;
        if (fac.degree() >= 1) out.emplace_back(monic(fac), i * mult);
        c = std::move(y);
        if (w.degree() >= 1) w = divmod(w, c).first;
        ++i;
    }
}

// merge same bases, split non-coprime pairs
void normalize_clusters(std::vector<Cluster>& cl, UPolyK& num) {
    // make monic (bases from our constructions already are), merge equals
    bool changed = true;
    while (changed) {
        changed = false;
        for (size_t i = 0; i < cl.size() && !changed; ++i) {
            if (cl[i].first.degree() < 1 || cl[i].second == 0) {
                cl.erase(cl.begin() + i);
                changed = true;
                break;
            }
            for (size_t j = i + 1; j < cl.size() && !changed; ++j) {
                if (cl[i].first == cl[j].first) {
                    cl[i].second += cl[j].second;
                    cl.erase(cl.begin() + j);
                    changed = true;
                    break;
                }
                UPolyK g = kgcd(cl[i].first, cl[j].first);
                if (g.degree() >= 1) {
                    UPolyK a = divmod(cl[i].first, g).first;
                    UPolyK b = divmod(cl[j].first, g).first;
                    int mi = cl[i].second, mj = cl[j].second;
                    cl.erase(cl.begin() + j);
                    cl.erase(cl.begin() + i);
                    if (a.degree() >= 1) cl.emplace_back(a, mi);
                    if (b.degree() >= 1) cl.emplace_back(b, mj);
                    cl.emplace_back(g, mi + mj);
                    changed = true;
                }
            }
        }
    }
    (void)num;
}

struct Piece {
    UPolyK num;
    std::vector<Cluster> den;
};

struct ReduceState {
    const KernelSubmodule* km;
    bool want_cert;
    std::vector<Piece> stack;
    UPolyK pool;
    struct Part {
        UPolyK base;  // monic squarefree
        int mult;
        UPolyK numer;
    };
    std::vector<Part> parts;
    std::vector<RatNK> cert;
    RatN cu, cv;  // k-free cofactors: u = cu * prod u_clusters, v likewise
    long steps = 0;
};

RatNK sum_balanced(std::vector<RatNK> xs) {
    while (xs.size() > 1) {
        std::vector<RatNK> nxt;
        for (size_t i = 0; i + 1 < xs.size(); i += 2) nxt.push_back(xs[i] + xs[i + 1]);
        if (xs.size() % 2) nxt.push_back(xs.back());
        xs = std::move(nxt);
    }
    return xs.empty() ? RatNK() : xs[0];
}

RatNK piece_value(const UPolyK& num, const std::vector<Cluster>& den) {
    RatN dnum;
    PolyNK n = to_polynk(num, &dnum);
    RatNK val(n, PolyNK::from_n(dnum.num));
    val = val * RatNK(RatN(dnum.den));
    for (const auto& [c, m] : den) {
        RatN dc;
        PolyNK cp = to_polynk(c, &dc);
        RatNK base(cp, PolyNK::from_n(dc.num));
        base = base * RatNK(RatN(dc.den));
        val = val / pow(base, m);
    }
    return val;
}

void push_piece(ReduceState& st, UPolyK num, std::vector<Cluster> den);

// cancel common factors between num and the clusters
void simplify_piece(UPolyK& num, std::vector<Cluster>& den) {
    std::vector<Cluster> out;
    std::vector<Cluster> work = std::move(den);
    while (!work.empty()) {
        auto [c, m] = work.back();
        work.pop_back();
        if (c.degree() < 1 || m == 0) continue;
        UPolyK g = kgcd(num, c);
        if (g.degree() < 1) {
            out.emplace_back(std::move(c), m);
            continue;
        }
        if (g.degree() == c.degree()) {
            num = divmod(num, c).first;
            if (m > 1) work.emplace_back(std::move(c), m - 1);
        } else {
            UPolyK rest = divmod(c, g).first;
            work.emplace_back(std::move(g), m);
            if (rest.degree() >= 1) work.emplace_back(std::move(rest), m);
        }
    }
    den = std::move(out);
}

void park_piece(ReduceState& st, const UPolyK& e, const UPolyK& c, int m) {
    // find an existing part with the same base
    for (auto& part : st.parts) {
        if (part.base == c) {
            if (part.mult < m) {
                part.numer = part.numer * pow(c, static_cast<unsigned>(m - part.mult));
                part.mult = m;
            }
            UPolyK add = e;
            if (part.mult > m) add = add * pow(c, static_cast<unsigned>(part.mult - m));
            part.numer = part.numer + add;
            return;
        }
    }
    st.parts.push_back({c, m, e});
}

void process_piece(ReduceState& st, Piece piece);

void push_piece(ReduceState& st, UPolyK num, std::vector<Cluster> den) {
    num.trim();
    if (num.is_zero()) return;
    normalize_clusters(den, num);
    simplify_piece(num, den);
    if (num.is_zero()) return;
    st.stack.push_back({std::move(num), std::move(den)});
}

void apply_down(ReduceState& st, const UPolyK& e, const UPolyK& c, int m) {
    // h*H0 = Delta_k(h*H0)... : replace h = e/c^m by S_k(h)*u/v, certificate -= h
    if (st.want_cert) st.cert.push_back(-piece_value(e, {{c, m}}));
    UPolyK num = shift_k(e, 1) * st.km->u_poly;
    num = mul_scalar(num, inverse(st.cv));
    std::vector<Cluster> den = st.km->v_clusters;
    den.emplace_back(shift_k(c, 1), m);
    push_piece(st, std::move(num), std::move(den));
}

void apply_up(ReduceState& st, const UPolyK& e, const UPolyK& c, int m) {
    // replace h = e/c^m by w = S_k^{-1}(h*v/u), certificate += w
    UPolyK num = shift_k(e, -1) * shift_k(st.km->v_poly, -1);
    num = mul_scalar(num, inverse(st.cu));
    std::vector<Cluster> den;
    den.emplace_back(shift_k(c, -1), m);
    for (const auto& [f, mm] : st.km->u_clusters) den.emplace_back(shift_k(f, -1), mm);
    if (st.want_cert) st.cert.push_back(piece_value(num, den));
    push_piece(st, std::move(num), std::move(den));
}

void process_piece(ReduceState& st, Piece piece) {
    if (++st.steps > 1000000)
        throw std::runtime_error("modified AP reduction did not terminate");
    UPolyK& e = piece.num;
    if (e.is_zero()) return;
    if (piece.den.empty()) {
        st.pool = st.pool + e * st.km->v_poly;
        return;
    }
    if (piece.den.size() > 1) {
        // split off the first cluster by Bezout
        UPolyK A = pow(piece.den[0].first, static_cast<unsigned>(piece.den[0].second));
        UPolyK B(1);
        for (size_t i = 1; i < piece.den.size(); ++i)
            B = B * pow(piece.den[i].first, static_cast<unsigned>(piece.den[i].second));
        UPolyK g, s, t;
        kgcd_ext(A, B, g, s, t);
        assert(g.degree() == 0);
        // e/(A B) = e*t/A + e*s/B
        std::vector<Cluster> restden(piece.den.begin() + 1, piece.den.end());
        push_piece(st, e * t, {piece.den[0]});
        push_piece(st, e * s, std::move(restden));
        return;
    }
    UPolyK c = piece.den[0].first;
    int m = piece.den[0].second;
    // split off polynomial part
    UPolyK cm = pow(c, static_cast<unsigned>(m));
    if (e.degree() >= cm.degree()) {
        auto [q, rem] = divmod(e, cm);
        if (!q.is_zero()) st.pool = st.pool + q * st.km->v_poly;
        e = std::move(rem);
        if (e.is_zero()) return;
    }
    // exact v-part goes to the pool
    {
        auto [q, rem] = divmod(st.km->v_poly, cm);
        if (rem.is_zero()) {
            st.pool = st.pool + e * q;
            return;
        }
    }
    // self-splitting: base must not contain shift-equivalent subfactors
    {
        std::set<long> selfjs = cluster_dispersion(c, c);
        selfjs.erase(0);
        if (!selfjs.empty()) {
            long j = *selfjs.begin();
            UPolyK g = kgcd(c, shift_k(c, j));
            UPolyK rest = divmod(c, g).first;
            push_piece(st, std::move(e), {{g, m}, {rest, m}});
            return;
        }
    }
    // classify against u and v
    std::set<long> u_heights, v_heights;
    for (const auto& [f, mm] : st.km->u_clusters) {
        (void)mm;
        for (long j : cluster_dispersion(c, f)) {
            UPolyK g = kgcd(c, shift_k(f, j));
            if (g.degree() < c.degree()) {
                UPolyK rest = divmod(c, g).first;
                push_piece(st, std::move(e), {{g, m}, {rest, m}});
                return;
            }
            u_heights.insert(j);
        }
    }
    for (const auto& [f, mm] : st.km->v_clusters) {
        (void)mm;
        for (long j : cluster_dispersion(c, f)) {
            UPolyK g = kgcd(c, shift_k(f, j));
            if (g.degree() < c.degree()) {
                UPolyK rest = divmod(c, g).first;
                push_piece(st, std::move(e), {{g, m}, {rest, m}});
                return;
            }
            v_heights.insert(j);
        }
    }
    assert(u_heights.empty() || v_heights.empty());  // kernel is shift-reduced
    if (!u_heights.empty()) {
        // residual zone: strictly below every u copy, parked one below the lowest
        long lowest = *u_heights.begin();
        if (lowest == 1) {
            park_piece(st, e, c, m);
        } else if (lowest < 1) {
            apply_down(st, e, c, m);  // heights increase by 1
        } else {
            apply_up(st, e, c, m);  // heights decrease by 1
        }
        return;
    }
    if (!v_heights.empty()) {
        long highest = *v_heights.rbegin();
        if (highest == -1) {
            park_piece(st, e, c, m);
        } else if (highest > -1) {
            apply_up(st, e, c, m);
        } else {
            apply_down(st, e, c, m);
        }
        return;
    }
    // free orbit: park at the canonical position of its Z-orbit
    RatN mu = mean_root(c);
    Rat c0 = polypart_constant(mu);
    Int delta = rat_floor(c0);
    if (delta == 0) {
        park_piece(st, e, c, m);
    } else if (delta > 0) {
        apply_down(st, e, c, m);
    } else {
        apply_up(st, e, c, m);
    }
}

}  // namespace

// ---- rational normal form ----

RationalNormalForm rational_normal_form(const RatNK& g_k) {
    return rational_normal_form(factored_from(g_k));
}

RationalNormalForm rational_normal_form(const FactoredNK& g_k) {
    if (g_k.is_zero()) throw std::domain_error("rational_normal_form: zero input");
    FactoredNK kern = g_k.refined();
    FactoredNK shell(Rat(1));
    bool changed = true;
    while (changed) {
        changed = false;
        for (auto itA = kern.f.begin(); itA != kern.f.end() && !changed; ++itA) {
            if (itA->second <= 0 || itA->first.deg_k() < 1) continue;
            for (auto itB = kern.f.begin(); itB != kern.f.end() && !changed; ++itB) {
                if (itB->second >= 0 || itB->first.deg_k() < 1) continue;
                const PolyNK& A = itA->first;
                const PolyNK& B = itB->first;
                std::set<long> js = dispersion_set(A, B);
                if (js.empty()) continue;
                long j = *js.begin();
                PolyNK g = poly_gcd(A, shift(B, Var::k, j));
                if (!(g == A)) {
                    // split A = g * (A/g)
                    long e = itA->second;
                    PolyNK rest = divexact(A, g);
                    kern.f.erase(itA);
                    kern.mul_factor(g, e);
                    kern.mul_factor(rest, e);
                    changed = true;
                    break;
                }
                PolyNK Bpart = shift(g, Var::k, -j);
                if (!(Bpart == B)) {
                    long e = itB->second;
                    PolyNK rest = divexact(B, Bpart);
                    kern.f.erase(itB);
                    kern.mul_factor(Bpart, e);
                    kern.mul_factor(rest, e);
                    changed = true;
                    break;
                }
                // A in numerator, B = shift(A, k, -j) in denominator
                long t = std::min(itA->second, -itB->second);
                if (j == 0) {
                    itA->second -= t;
                    itB->second += t;
                } else if (j < 0) {
                    // B(k) = A(k+(-j)) with -j >= 1: shell gains prod_{m=0}^{-j-1} S_k^m(A)^{-t}
                    for (long mm = 0; mm < -j; ++mm)
                        shell.mul_factor(shift(A, Var::k, mm), -t);
                    itA->second -= t;
                    itB->second += t;
                } else {
                    // B(k) = A(k-j), j >= 1: shell gains prod_{m=1}^{j} S_k^{-m}(A)^{t}
                    for (long mm = 1; mm <= j; ++mm)
                        shell.mul_factor(shift(A, Var::k, -mm), t);
                    itA->second -= t;
                    itB->second += t;
                }
                if (itA->second == 0 || itB->second == 0) {
                    if (itA->second == 0) kern.f.erase(itA);
                    auto it2 = kern.f.find(B);
                    if (it2 != kern.f.end() && it2->second == 0) kern.f.erase(it2);
                }
                changed = true;
            }
        }
    }
    RationalNormalForm rnf;
    rnf.kernel_f = kern;
    rnf.shell_f = shell;
    rnf.kernel = kern.expand();
    rnf.shell = shell.expand();
    // verify f = S_k(S)/S * K
    RatNK lhs = g_k.expand();
    RatNK rhs = shift(rnf.shell, Var::k, 1) / rnf.shell * rnf.kernel;
    if (!(lhs == rhs)) throw std::logic_error("rational normal form identity failed");
    return rnf;
}

bool strongly_prime(const PolyNK& p, const RatNK& K) {
    for (long j : dispersion_set(p, K.num))
        if (j <= 0) return false;
    for (long j : dispersion_set(p, K.den))
        if (j >= 0) return false;
    return true;
}

// ---- complement of im(phi_K) ----

PhiEchelon::PhiEchelon(UPolyK u, UPolyK v) : u_(std::move(u)), v_(std::move(v)) {
    int du = u_.degree(), dv = v_.degree();
    int D = std::max(du, dv);
    bool tie = du == dv && u_.lc() == v_.lc();
    long jstar = -1;
    if (tie) {
        RatN usub = du >= 1 ? u_.c[du - 1] : RatN(0);
        RatN vsub = dv >= 1 ? v_.c[dv - 1] : RatN(0);
        RatN js = (vsub - usub) / u_.lc();
        if (js.is_constant()) {
            Rat v0 = js.to_rat();
            if (is_integer(v0) && v0 >= 0 && v0.get_num().fits_slong_p())
                jstar = v0.get_num().get_si();
        }
    }
    if (!tie) {
        for (int d = 0; d < D; ++d) complement_.push_back(d);
        return;
    }
    if (jstar < 0) {
        for (int d = 0; d + 1 < D; ++d) complement_.push_back(d);
        return;
    }
    // eager processing up to jstar+1 decides the complement
    for (long j = 0; j <= jstar + 1; ++j) insert_next();
    std::set<int> pivotdegs;
    for (const auto& [d, pe] : pivots_) pivotdegs.insert(d);
    for (int d = 0; d <= D + static_cast<int>(jstar); ++d)
        if (!pivotdegs.count(d)) complement_.push_back(d);
}

void PhiEchelon::insert_next() {
    int j = next_j_++;
    // phi(k^j) = u*(k+1)^j - v*k^j
    UPolyK kj;
    kj.c.assign(j + 1, RatN(0));
    kj.c[j] = RatN(1);
    UPolyK elem = u_ * shift_k(kj, 1) - v_ * kj;
    UPolyK pre = kj;
    // reduce against existing pivots
    while (!elem.is_zero()) {
        auto it = pivots_.find(elem.degree());
        if (it == pivots_.end()) break;
        RatN cfac = elem.lc();
        elem = elem - mul_scalar(it->second.first, cfac);
        pre = pre - mul_scalar(it->second.second, cfac);
    }
    if (elem.is_zero()) return;
    RatN inv = inverse(elem.lc());
    pivots_[elem.degree()] = {mul_scalar(elem, inv), mul_scalar(pre, inv)};
}

std::map<int, RatN> PhiEchelon::reduce(UPolyK q, UPolyK* w_out) {
    std::map<int, RatN> coords;
    UPolyK w;
    std::set<int> comp(complement_.begin(), complement_.end());
    while (!q.is_zero()) {
        int d = q.degree();
        if (comp.count(d)) {
            coords[d] = q.lc();
            q.c.pop_back();
            q.trim();
            continue;
        }
        auto it = pivots_.find(d);
        int guard = 0;
        while (it == pivots_.end()) {
            insert_next();
            it = pivots_.find(d);
            if (++guard > d + 64)
                throw std::logic_error("phi echelon failed to produce a pivot");
        }
        RatN cfac = q.lc();
        q = q - mul_scalar(it->second.first, cfac);
        w = w + mul_scalar(it->second.second, cfac);
    }
    if (w_out) *w_out = std::move(w);
    return coords;
}

std::vector<PolyNK> complement_basis(const RatNK& K) {
    PhiEchelon ech(to_upoly(K.num), to_upoly(K.den));
    std::vector<PolyNK> out;
    for (int e : ech.complement()) out.push_back(PolyNK::monomial(Rat(1), 0, e));
    return out;
}

// ---- kernel submodule ----

KernelSubmodulePtr build_kernel_submodule(const RationalNormalForm& rnf) {
    auto km = std::make_shared<KernelSubmodule>();
    km->rnf = rnf;
    km->u = rnf.kernel.num;
    km->v = rnf.kernel.den;
    km->u_poly = to_upoly(km->u);
    km->v_poly = to_upoly(km->v);
    yun_clusters(km->u_poly, 1, km->u_clusters);
    yun_clusters(km->v_poly, 1, km->v_clusters);
    km->echelon = PhiEchelon(km->u_poly, km->v_poly);
    km->wk_exponents = km->echelon.complement();
    return km;
}

KernelSubmodulePtr build_kernel_submodule(const RatNK& g_k) {
    return build_kernel_submodule(rational_normal_form(g_k));
}

KernelSubmodulePtr build_kernel_submodule(const FactoredNK& g_k) {
    return build_kernel_submodule(rational_normal_form(g_k));
}

// ---- the reduction ----

bool ResidualForm::p_zero() const {
    for (const auto& c : p_coords)
        if (!c.is_zero()) return false;
    return true;
}

bool is_hyper_summable(const ResidualForm& rf) { return rf.a_zero() && rf.p_zero(); }

RatNK residual_fraction(const ResidualForm& rf) {
    RatNK sum;
    for (const auto& part : rf.parts) {
        RatN d;
        PolyNK numnk = to_polynk(part.numer, &d);
        RatNK val(numnk, PolyNK::from_n(d.num));
        val = val * RatNK(RatN(d.den));
        val = val / RatNK(pow(part.parked, static_cast<unsigned>(part.mult)));
        sum = sum + val;
    }
    return sum;
}

// sort parts, drop empty ones, derive the public a, b, p fields
void finalize_residual(ResidualForm& rf) {
    std::vector<OrbitPart> kept;
    for (auto& part : rf.parts) {
        part.numer.trim();
        if (!part.numer.is_zero()) kept.push_back(std::move(part));
    }
    rf.parts = std::move(kept);
    std::sort(rf.parts.begin(), rf.parts.end(),
              [](const OrbitPart& x, const OrbitPart& y) { return x.parked < y.parked; });
    RatNK frac = residual_fraction(rf);
    if (frac.is_zero()) {
        rf.parts.clear();
        rf.a = RatNK();
        rf.b = PolyNK(Rat(1));
    } else {
        PolyZ ck = content_k(frac.den);
        PolyNK b = frac.den;
        if (ck.degree() > 0) b = divexact(b, PolyNK::from_n(ck));
        b = primitive_part_q(b);
        rf.b = b;
        rf.a = frac * RatNK(b);
    }
    UPolyK pk;
    for (size_t i = 0; i < rf.km->wk_exponents.size(); ++i) {
        int d = rf.km->wk_exponents[i];
        if (rf.p_coords[i].is_zero()) continue;
        if (pk.degree() < d) pk.c.resize(d + 1);
        pk.c[d] = rf.p_coords[i];
    }
    pk.trim();
    RatN dd;
    PolyNK pnk = to_polynk(pk, &dd);
    rf.p = RatNK(pnk, PolyNK::from_n(dd.num)) * RatNK(RatN(dd.den));
}

ResidualForm combine_residuals(const std::vector<std::pair<RatN, const ResidualForm*>>& terms) {
    assert(!terms.empty());
    ResidualForm rf;
    rf.km = terms.front().second->km;
    rf.p_coords.assign(rf.km->wk_exponents.size(), RatN(0));
    RatNK cert;
    for (const auto& [coef, term] : terms) {
        assert(term->km == rf.km);
        if (coef.is_zero()) continue;
        for (size_t i = 0; i < term->p_coords.size(); ++i)
            rf.p_coords[i] = rf.p_coords[i] + coef * term->p_coords[i];
        for (const auto& part : term->parts) {
            bool merged = false;
            for (auto& mine : rf.parts) {
                if (mine.parked == part.parked) {
                    UPolyK base = to_upoly(part.parked);
                    int common = std::max(mine.mult, part.mult);
                    if (mine.mult < common) {
                        mine.numer =
                            mine.numer * pow(base, static_cast<unsigned>(common - mine.mult));
                        mine.mult = common;
                    }
                    UPolyK add = mul_scalar(part.numer, coef);
                    if (part.mult < common)
                        add = add * pow(base, static_cast<unsigned>(common - part.mult));
                    mine.numer = mine.numer + add;
                    merged = true;
                    break;
                }
            }
            if (!merged) {
                OrbitPart op;
                op.parked = part.parked;
                op.mult = part.mult;
                op.numer = mul_scalar(part.numer, coef);
                rf.parts.push_back(std::move(op));
            }
        }
        if (!term->r.is_zero()) cert = cert + RatNK(coef) * term->r;
    }
    rf.r = cert;  // few addends here, plain summation is fine
    finalize_residual(rf);
    return rf;
}

static ResidualForm reduce_impl(FactoredNK h, const KernelSubmodulePtr& km, bool want_cert) {
    ReduceState st;
    st.km = km.get();
    st.want_cert = want_cert;
    // k-free cofactors of u and v relative to their cluster products
    UPolyK uprod(1), vprod(1);
    for (const auto& [c, m] : km->u_clusters) uprod = uprod * pow(c, static_cast<unsigned>(m));
    for (const auto& [c, m] : km->v_clusters) vprod = vprod * pow(c, static_cast<unsigned>(m));
    {
        auto [qu, ru] = divmod(km->u_poly, uprod);
        auto [qv, rv] = divmod(km->v_poly, vprod);
        assert(ru.is_zero() && rv.is_zero() && qu.degree() == 0 && qv.degree() == 0);
        st.cu = qu.c[0];
        st.cv = qv.c[0];
    }
    // initial piece from the factored input
    h = h.refined();
    UPolyK num{RatN(Rat(h.coeff))};
    std::vector<Cluster> den;
    for (const auto& [p, e] : h.f) {
        if (e > 0) {
            num = num * pow(to_upoly(p), static_cast<unsigned>(e));
        } else {
            UPolyK base = to_upoly(p);
            if (base.degree() < 1) {
                num = mul_scalar(num, pow(inverse(base.c[0]), -e));
                continue;
            }
            RatN lc = base.lc();
            if (!lc.is_one()) {
                base = monic(base);
                num = mul_scalar(num, pow(inverse(lc), -e));
            }
            yun_clusters(base, -static_cast<int>(e), den);
        }
    }
    push_piece(st, std::move(num), std::move(den));
    while (!st.stack.empty()) {
        Piece piece = std::move(st.stack.back());
        st.stack.pop_back();
        process_piece(st, std::move(piece));
    }
    // reduce the pool through the phi echelon
    ResidualForm rf;
    rf.km = km;
    PhiEchelon ech = km->echelon;  // local copy, extended as needed
    UPolyK w;
    std::map<int, RatN> coords = ech.reduce(st.pool, &w);
    rf.p_coords.assign(km->wk_exponents.size(), RatN(0));
    for (size_t i = 0; i < km->wk_exponents.size(); ++i) {
        auto it = coords.find(km->wk_exponents[i]);
        if (it != coords.end()) rf.p_coords[i] = it->second;
    }
    // structured parts over primitive integer bases
    for (auto& part : st.parts) {
        part.numer.trim();
        if (part.numer.is_zero()) continue;
        RatN dbase;
        PolyNK basenk = primitive_part_q(to_polynk(part.base, &dbase));
        // basenk = lambda * base with lambda in Q(n): numer/base^m = numer*lambda^m/basenk^m
        UPolyK basenk_up = to_upoly(basenk);
        auto [ql, rl] = divmod(basenk_up, part.base);
        assert(rl.is_zero() && ql.degree() == 0);
        RatN lambda = ql.c[0];
        OrbitPart op;
        op.parked = basenk;
        op.mult = part.mult;
        op.numer = mul_scalar(part.numer, pow(lambda, part.mult));
        rf.parts.push_back(std::move(op));
    }
    finalize_residual(rf);
    // certificate
    if (want_cert) {
        // phi part: pool = phi(w) + p, so q/v*H0 = Delta_k(w*H0) + p/v*H0
        RatN dw;
        PolyNK wnk = to_polynk(w, &dw);
        RatNK wr = RatNK(wnk, PolyNK::from_n(dw.num)) * RatNK(RatN(dw.den));
        st.cert.push_back(std::move(wr));
        rf.r = sum_balanced(std::move(st.cert));
    }
    return rf;
}

ResidualForm modified_ap_reduce(const FactoredNK& h_rel, const KernelSubmodulePtr& km,
                                bool want_certificate) {
    return reduce_impl(h_rel, km, want_certificate);
}

ResidualForm modified_ap_reduce(const RatNK& h_rel, const KernelSubmodulePtr& km,
                                bool want_certificate) {
    return reduce_impl(factored_from(h_rel), km, want_certificate);
}

}  // namespace prescope
