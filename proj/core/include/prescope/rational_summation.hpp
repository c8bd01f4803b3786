#pragma once
#include <prescope/ap_reduction.hpp>
#include <prescope/term.hpp>

#include <vector>

namespace prescope {

struct BadOrbit : std::domain_error {
    explicit BadOrbit(const std::string& m) : std::domain_error(m) {}
};
struct MismatchedTerm : std::domain_error {
    explicit MismatchedTerm(const std::string& m) : std::domain_error(m) {}
};

// one Z-orbit contribution: the sum of partial-fraction coefficients
// across the orbit at a fixed multiplicity
struct OrbitResidue {
    RatN orbit_rep;  // root normalized so its constant term lies in [0,1)
    int multiplicity;
    RatN residue;    // nonzero when reported
};

struct AbramovDecomp {
    RatNK g;  // f = Delta_k(g) + r
    RatNK r;  // denominator shift-free in k, proper
};

AbramovDecomp abramov_reduce(const RatNK& f);
std::vector<OrbitResidue> discrete_residues(const RatNK& f);
bool is_summable(const RatNK& f);

// Nicole: P/((y+b_1)...(y+b_m)) with the b_i in one Z-orbit is summable
// iff reported true; certified by the degree bound deg(P) <= m-2.
bool nicole_certify(const PolyNK& P, const std::vector<RatN>& betas);

// Certifies sum_k t(n0,k) = 0 over the window given by Q's roots:
// matches the Lagrange residue profile of P/Q against t at n=n0 via the
// shift-quotient identity plus one anchor value, then applies Nicole.
bool vanishing_sum_check(const HyperTerm& t, const PolyNK& P, const PolyNK& Q, const Int& n0);

}  // namespace prescope
