#pragma once
#include <prescope/factored.hpp>
#include <prescope/term.hpp>
#include <prescope/upoly_k.hpp>

#include <map>
#include <memory>
#include <vector>

namespace prescope {

// f = S_k(S)/S * K with K shift-reduced in k
struct RationalNormalForm {
    RatNK kernel;
    RatNK shell;
    FactoredNK kernel_f, shell_f;
};

RationalNormalForm rational_normal_form(const RatNK& g_k);
RationalNormalForm rational_normal_form(const FactoredNK& g_k);

// true iff gcd(p, S_k^{-i}(num K)) = gcd(p, S_k^{i}(den K)) = 1 for all i >= 0
bool strongly_prime(const PolyNK& p, const RatNK& K);

// Echelonized image of phi_K(q) = u*S_k(q) - v*q acting on Q(n)[k];
// pivots carry preimages so reductions produce certificates.
class PhiEchelon {
  public:
    PhiEchelon() = default;
    PhiEchelon(UPolyK u, UPolyK v);

    const std::vector<int>& complement() const { return complement_; }
    // q = phi(w) + sum coeff_e k^e over complement exponents; returns coords, sets w
    std::map<int, RatN> reduce(UPolyK q, UPolyK* w_out);

  private:
    void insert_next();
    UPolyK u_, v_;
    int next_j_ = 0;
    std::map<int, std::pair<UPolyK, UPolyK>> pivots_;  // degree -> (element, preimage)
    std::vector<int> complement_;
};

struct KernelSubmodule {
    RationalNormalForm rnf;
    PolyNK u, v;                      // kernel = u/v in canonical integer form
    UPolyK u_poly, v_poly;            // same, dense over Q(n)
    std::vector<std::pair<UPolyK, int>> u_clusters, v_clusters;  // squarefree coprime
    std::vector<int> wk_exponents;    // monomial exponents spanning W_K
    PhiEchelon echelon;               // prebuilt; reduce() works on a copy

    std::vector<PolyNK> wk_basis() const {
        std::vector<PolyNK> b;
        for (int e : wk_exponents) b.push_back(PolyNK::monomial(Rat(1), 0, e));
        return b;
    }
};

using KernelSubmodulePtr = std::shared_ptr<const KernelSubmodule>;

KernelSubmodulePtr build_kernel_submodule(const RatNK& g_k);
KernelSubmodulePtr build_kernel_submodule(const FactoredNK& g_k);
KernelSubmodulePtr build_kernel_submodule(const RationalNormalForm& rnf);

// spec-level operation: monomial basis of the standard complement W_K
std::vector<PolyNK> complement_basis(const RatNK& K);

// one shift-free orbit block of the a/b part: numer / parked^mult
struct OrbitPart {
    PolyNK parked;  // canonical primitive factor, squarefree
    int mult;
    UPolyK numer;   // deg < deg(parked^mult), coprime to parked
};

struct ResidualForm {
    RatNK r;  // certificate: input*H0 = Delta_k(r*H0) + (a/b + p/v)*H0
    RatNK a;
    PolyNK b;
    RatNK p;
    std::vector<OrbitPart> parts;   // structured a/b
    std::vector<RatN> p_coords;     // coordinates on the W_K monomial basis
    KernelSubmodulePtr km;

    bool a_zero() const { return parts.empty(); }
    bool p_zero() const;
};

ResidualForm modified_ap_reduce(const RatNK& h_rel, const KernelSubmodulePtr& km,
                                bool want_certificate = true);
ResidualForm modified_ap_reduce(const FactoredNK& h_rel, const KernelSubmodulePtr& km,
                                bool want_certificate = true);

bool is_hyper_summable(const ResidualForm& rf);

// a/b recombined as a single rational function
RatNK residual_fraction(const ResidualForm& rf);

// Q(n)-linear combination of residual forms over the same kernel submodule
ResidualForm combine_residuals(const std::vector<std::pair<RatN, const ResidualForm*>>& terms);
void finalize_residual(ResidualForm& rf);

}  // namespace prescope
