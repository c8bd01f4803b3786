#include <prescope/rational_summation.hpp>

#include <algorithm>
#include <cassert>

namespace prescope {

namespace {

KernelSubmodulePtr trivial_kernel() {
    static const KernelSubmodulePtr km = build_kernel_submodule(RatNK(1));
    return km;
}

RatN orbit_normalize(const RatN& root) {
    Rat c0 = polypart_constant(root);
    Int fl = rat_floor(c0);
    if (fl == 0) return root;
    return root - RatN(Rat(fl));
}

}  // namespace

AbramovDecomp abramov_reduce(const RatNK& f) {
    ResidualForm rf = modified_ap_reduce(f, trivial_kernel(), true);
    AbramovDecomp out;
    out.g = rf.r;
    out.r = residual_fraction(rf);
    assert(rf.p_zero());
    return out;
}

std::vector<OrbitResidue> discrete_residues(const RatNK& f) {
    PartialFractions pf = partial_fractions_linear(f);  // NonLinearDenominator on failure
    struct Key {
        RatN rep;
        int mult;
    };
    std::vector<std::pair<Key, RatN>> acc;
    for (const auto& pole : pf.poles) {
        RatN rep = orbit_normalize(pole.root);
        bool done = false;
        for (auto& [key, sum] : acc) {
            if (key.mult == pole.order && key.rep == rep) {
                sum = sum + pole.coeff;
                done = true;
                break;
            }
        }
        if (!done) acc.push_back({{rep, pole.order}, pole.coeff});
    }
    std::vector<OrbitResidue> out;
    for (auto& [key, sum] : acc)
        if (!sum.is_zero()) out.push_back({key.rep, key.mult, sum});
    std::sort(out.begin(), out.end(), [](const OrbitResidue& a, const OrbitResidue& b) {
        if (a.multiplicity != b.multiplicity) return a.multiplicity < b.multiplicity;
        return to_string(a.orbit_rep) < to_string(b.orbit_rep);
    });
    return out;
}

bool is_summable(const RatNK& f) { return abramov_reduce(f).r.is_zero(); }

bool nicole_certify(const PolyNK& P, const std::vector<RatN>& betas) {
    for (size_t i = 0; i < betas.size(); ++i) {
        for (size_t j = i + 1; j < betas.size(); ++j) {
            RatN diff = betas[i] - betas[j];
            if (diff.is_zero()) throw BadOrbit("repeated pole");
            if (!diff.is_constant() || !is_integer(diff.to_rat()))
                throw BadOrbit("poles differ by a non-integer: " + to_string(diff));
        }
    }
    if (betas.size() < 2) return false;
    return P.deg_k() <= static_cast<int>(betas.size()) - 2;
}

bool vanishing_sum_check(const HyperTerm& t, const PolyNK& P, const PolyNK& Q, const Int& n0) {
    if (!t.has_eval()) throw MismatchedTerm("term has no evaluator");
    // window from the roots of Q: support points are the negated roots
    auto split = linear_factors_k(Q);
    if (!split.fully_linear || split.rest.deg_k() > 0)
        throw BadOrbit("Q does not factor into k-linear factors");
    std::vector<long> support;
    for (const auto& [root, mult] : split.roots) {
        if (mult != 1) throw BadOrbit("Q is not squarefree");
        if (!root.is_constant()) throw BadOrbit("Q has a non-constant root");
        Rat r0 = root.to_rat();
        if (!is_integer(r0) || !r0.get_num().fits_slong_p())
            throw BadOrbit("Q has a non-integer root");
        support.push_back(-r0.get_num().get_si());
    }
    std::sort(support.begin(), support.end());
    for (size_t i = 1; i < support.size(); ++i)
        if (support[i] != support[i - 1] + 1)
            throw BadOrbit("support window is not a consecutive integer range");
    if (support.size() < 2) throw BadOrbit("window too small");
    long lo = support.front(), hi = support.back();

    // alpha(k) = P(-k)/Q'(-k) on the window; for consecutive windows
    // Q'(-k)/Q'(-k-1) = -(hi-k)/(k+1-lo) in closed form.
    PolyNK K = PolyNK::var_k();
    PolyNK Pneg;  // P with k -> -k
    for (const auto& [m, c] : P.t)
        Pneg.t[{m.dn, m.dk}] = (m.dk % 2 == 0) ? c : -c;
    RatNK ratio_p(shift(Pneg, Var::k, 1), Pneg);  // P(-k-1)/P(-k)
    RatNK ratio_q(-(PolyNK(Rat(hi)) - K), K + PolyNK(Rat(1 - lo)));
    RatNK alpha_quot = ratio_p * ratio_q;

    // specialize the term's k-quotient at n = n0
    auto specialize = [&](const PolyNK& p) {
        PolyNK r;
        for (const auto& [m, c] : p.t) {
            Rat v = c * rat_pow(Rat(n0), m.dn);
            Mono mm{0, m.dk};
            auto it = r.t.find(mm);
            if (it == r.t.end()) {
                if (v != 0) r.t[mm] = v;
            } else {
                it->second += v;
                if (it->second == 0) r.t.erase(it);
            }
        }
        return r;
    };
    RatNK gk_n0(specialize(t.gk.num), specialize(t.gk.den));
    if (!(gk_n0 == alpha_quot))
        throw MismatchedTerm("shift quotient of the term does not match the residue profile");

    // one anchor value: alpha(k0) = P(-k0)/Q'(-k0) with
    // Q'(-k0) = (-1)^{k0-lo} (k0-lo)! (hi-k0)!
    bool anchored = false;
    for (long k0 = lo; k0 <= hi && !anchored; ++k0) {
        auto tv = eval_int(t, n0, Int(k0));
        if (!tv) continue;
        Rat pv = eval(P, Rat(n0), Rat(-k0));
        Rat qd(1);
        for (long i = 2; i <= k0 - lo; ++i) qd *= i;
        Rat f2(1);
        for (long i = 2; i <= hi - k0; ++i) f2 *= i;
        qd *= f2;
        if ((k0 - lo) % 2 == 1) qd = -qd;
        Rat alpha = pv / qd;
        if (alpha == 0 && *tv == 0) continue;
        if (alpha != *tv)
            throw MismatchedTerm("anchor value mismatch at k=" + std::to_string(k0));
        anchored = true;
    }
    if (!anchored) throw MismatchedTerm("no nonzero anchor point found on the window");

    std::vector<RatN> betas;
    for (long i = lo; i <= hi; ++i) betas.push_back(RatN(Rat(i)));
    PolyNK Pspec = specialize(P);
    return nicole_certify(Pspec, betas);
}

}  // namespace prescope
