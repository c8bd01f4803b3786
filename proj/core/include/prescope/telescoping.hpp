#pragma once
#include <prescope/ap_reduction.hpp>
#include <prescope/ore.hpp>
#include <prescope/rational_summation.hpp>
#include <prescope/term.hpp>

#include <deque>
#include <optional>
#include <string>
#include <vector>

namespace prescope {

struct NotIntegerLinear : std::runtime_error {
    PolyNK offending;
    explicit NotIntegerLinear(PolyNK p)
        : std::runtime_error("factor is not integer-linear: " + to_string(p)),
          offending(std::move(p)) {}
};
struct NoTelescoper : std::runtime_error {
    NoTelescoper() : std::runtime_error("no telescoper exists (denominator not integer-linear)") {}
};
struct NoOperatorFound : std::runtime_error {
    NoOperatorFound()
        : std::runtime_error("no annihilator below the telescoper order was found") {}
};
struct PreconditionViolated : std::runtime_error {
    explicit PreconditionViolated(const std::string& m) : std::runtime_error(m) {}
};

// one group of the integer-linear factorization of b:
// prod_j shift(P(m*n + ell*k + j), k, mu)^lambda
struct IntegerLinearFactor {
    long m = 0;
    long ell = 1;
    std::vector<Rat> P;  // univariate polynomial in z, canonical shift position
    struct Offset {
        long j;       // residue 0 <= j < ell
        long mu;      // extra S_k shift
        int lambda;   // multiplicity
    };
    std::vector<Offset> shift_offsets;
};

std::vector<IntegerLinearFactor> integer_linear_decompose(const PolyNK& b);
bool telescoper_exists(const ResidualForm& rf);

// Caches the modified AP reductions of S_n^d(H)/H0 for one term.
class ShiftReducer {
  public:
    explicit ShiftReducer(const HyperTerm& H, bool want_certificates = false);

    const ResidualForm& reduced(int d);
    const KernelSubmodulePtr& km() const { return km_; }
    const RationalNormalForm& rnf() const { return km_->rnf; }
    const HyperTerm& term() const { return H_; }
    FactoredNK gn_h0() const;  // S_n-quotient of H0 = H/S

  private:
    HyperTerm H_;
    KernelSubmodulePtr km_;
    bool want_cert_;
    std::vector<FactoredNK> multipliers_;  // S_n^d(H)/H0
    std::deque<ResidualForm> cache_;       // deque: stable references under growth
};

struct TelescoperResult {
    OreOp L;
    RatNK certificate;  // accumulated Delta_k part (raw, only when requested)
};

TelescoperResult minimal_telescoper(const HyperTerm& H, bool want_certificate = false,
                                    int order_cap = 24);

// minimal telescoper of R(H), computed on the reductions of S_n^d(R(H))
OreOp minimal_telescoper_of_image(ShiftReducer& sr, const OreOp& R, int order_cap = 24);

struct PrescoperResult {
    OreOp R;
    RatNK residual_p;  // R(H) = (residual_p / v) H0 modulo Delta_k
};

PrescoperResult minimal_prescoper(const HyperTerm& H);
PrescoperResult minimal_prescoper(ShiftReducer& sr);

// direct method for H = q/(m*n + ell*k + alpha)^lambda * H0, with
// S_k(H0)/H0 already shift-reduced
PrescoperResult direct_prescoper(const HyperTerm& H0, const PolyNK& q, long m, long ell,
                                 const Rat& alpha, int lambda);

std::vector<OreOp> exponent_separation(const OreOp& R, long ell);

// summation range with integer-linear bounds a*n + b or infinities
struct RangeBound {
    bool infinite = false;
    int sign = 1;  // for infinite bounds: -1 or +1
    long a = 0;
    Int b{0};
    std::optional<Int> at(const Int& n0) const {
        if (infinite) return std::nullopt;
        return Int(a) * n0 + b;
    }
};
struct SummationRange {
    RangeBound lo, hi;
};
SummationRange parse_range(const std::string& text);
std::string to_string(const SummationRange& r);

struct ZeroSumCertificate {
    int basis_degree_bound = 0;  // degrees attempted
    long n_min = 0;
    struct Witness {
        int exponent;                 // basis monomial k^exponent
        bool certified;
        std::vector<long> checked_n;  // exact vanishing verified at these n
        std::string P_text, Q_text;   // Nicole pair at the smallest checked n
        std::string note;
    };
    std::vector<Witness> witnesses;
    int certified_degree = -1;  // max certified exponent, -1 when none
    bool closure_ok = false;
    std::vector<std::pair<int, RatNK>> closure_images;  // exponent -> p of S_n-image
};

ZeroSumCertificate zero_sum_certify(
    const HyperTerm& H, const KernelSubmodulePtr& km, const SummationRange& range,
    const std::vector<std::pair<PolyNK, PolyNK>>& candidates = {});

OreOp minimal_annihilator(const HyperTerm& H, const SummationRange& range,
                          const ZeroSumCertificate& zcert);

// exact finite sum of the term at integer n over the (specialized) range;
// infinite bounds are resolved by scanning the term's support
std::optional<Rat> sum_term(const HyperTerm& H, const Int& n0, const SummationRange& range);

}  // namespace prescope
