#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <prescope/ap_reduction.hpp>
#include <prescope/term.hpp>

#include <random>

using namespace prescope;

namespace {

PolyNK N = PolyNK::var_n();
PolyNK K = PolyNK::var_k();
PolyNK C(long v) { return PolyNK(v); }
PolyNK lin(long ck, long cn, long c0) {
    return mul_scalar(K, Rat(ck)) + mul_scalar(N, Rat(cn)) + C(c0);
}

// h*H0 = Delta_k(r*H0) + (a/b + p/v)*H0, checked as an identity in Q(n,k)
bool residual_identity(const RatNK& h, const ResidualForm& rf) {
    const RatNK& Kq = rf.km->rnf.kernel;
    RatNK delta_part = shift(rf.r, Var::k, 1) * Kq - rf.r;
    RatNK frac = residual_fraction(rf);
    RatNK pv = rf.p / RatNK(rf.km->v);
    return h == delta_part + frac + pv;
}

std::mt19937 rng(5150);

}  // namespace

TEST_CASE("rational normal form") {
    // shift-reduced input is its own kernel
    HyperTerm h0 = compile_term("binomial(5*n,3*k)^2 / binomial(n,k)");
    auto rnf = rational_normal_form(h0.gk_f);
    CHECK(rnf.kernel == h0.gk);
    CHECK(rnf.shell == RatNK(1));

    // gk = (k+1)/k has kernel 1 and shell k
    auto r2 = rational_normal_form(RatNK(K + C(1), K));
    CHECK(r2.kernel == RatNK(1));
    CHECK(shift(r2.shell, Var::k, 1) / r2.shell == RatNK(K + C(1), K));

    auto r3 = rational_normal_form(RatNK(1));
    CHECK(r3.kernel == RatNK(1));
    CHECK(r3.shell == RatNK(1));

    // a non-reduced quotient: gk of H = binomial(2n,k)*k! = (2n-k)/(k+1) * (k+1) style
    RatNK gk = RatNK(lin(1, 0, 1)) * RatNK(lin(-1, 2, 0), lin(1, 0, 1));
    auto r4 = rational_normal_form(gk);
    CHECK(shift(r4.shell, Var::k, 1) / r4.shell * r4.kernel == gk);
    CHECK(dispersion_set(r4.kernel.num, r4.kernel.den).empty());
}

TEST_CASE("strongly_prime") {
    HyperTerm h0 = compile_term("binomial(5*n,3*k)^2 / binomial(n,k)");
    RatNK Kq = rational_normal_form(h0.gk_f).kernel;
    CHECK(strongly_prime(lin(1, 2, 0), Kq));  // 2n+k

    // K of the first zero-sum example: (k-2n)^3/((k+1)(k-3n)^2); p = k+1 hits v at i=0
    RatNK K1(pow(lin(1, -2, 0), 3), lin(1, 0, 1) * pow(lin(1, -3, 0), 2));
    CHECK(!strongly_prime(lin(1, 0, 1), K1));
    CHECK(strongly_prime(C(1), K1));
    // u-side: gcd with S_k^{-i}(u) must also be trivial
    CHECK(!strongly_prime(lin(1, -2, -4), K1));  // k-2n-4 = S_k^{-4}(k-2n)
    CHECK(strongly_prime(lin(1, -2, 4), K1));    // k-2n+4 sits strictly below u
}

TEST_CASE("complement basis: paper examples give {1, k^3}") {
    RatNK K1(pow(lin(1, -2, 0), 3), lin(1, 0, 1) * pow(lin(1, -3, 0), 2));
    auto b1 = complement_basis(K1);
    REQUIRE(b1.size() == 2);
    CHECK(b1[0] == C(1));
    CHECK(b1[1] == PolyNK::monomial(Rat(1), 0, 3));

    HyperTerm h = compile_term("(-1)^k * binomial(n,k) * binomial(3*k,n)");
    auto b2 = complement_basis(rational_normal_form(h.gk_f).kernel);
    REQUIRE(b2.size() == 2);
    CHECK(b2[0] == C(1));
    CHECK(b2[1] == PolyNK::monomial(Rat(1), 0, 3));
}

TEST_CASE("complement basis: binomial(n,2k)^2 gives {1,k,k^2}") {
    HyperTerm h = compile_term("binomial(n,2*k)^2");
    RatNK Kq = rational_normal_form(h.gk_f).kernel;
    // v is exactly 4(2k+1)^2(k+1)^2
    CHECK(Kq.den == mul_scalar(pow(lin(2, 0, 1), 2) * pow(lin(1, 0, 1), 2), Rat(4)));
    auto b = complement_basis(Kq);
    REQUIRE(b.size() == 3);
    CHECK(b[0] == C(1));
    CHECK(b[1] == K);
    CHECK(b[2] == K * K);
}

TEST_CASE("complement basis: kernel 1 is empty") {
    CHECK(complement_basis(RatNK(1)).empty());
}

TEST_CASE("reduce: paper residual of H0 = (-1)^k binomial(n,k) binomial(3k,n)") {
    HyperTerm h0 = compile_term("(-1)^k * binomial(n,k) * binomial(3*k,n)");
    auto km = build_kernel_submodule(h0.gk_f);
    REQUIRE(km->wk_exponents == std::vector<int>({0, 3}));
    // H0 = 1 * H0
    ResidualForm rf = modified_ap_reduce(RatNK(1), km);
    CHECK(rf.a_zero());
    CHECK(!rf.p_zero());
    // p = (81k^3 n - n^4 + 108k^3 + 4n^3 - 12n^2 + 12n + 18)/(3n+4)
    PolyNK pnum = mul_scalar(pow(K, 3) * N, Rat(81)) - pow(N, 4) + mul_scalar(pow(K, 3), Rat(108)) +
                  mul_scalar(pow(N, 3), Rat(4)) - mul_scalar(pow(N, 2), Rat(12)) +
                  mul_scalar(N, Rat(12)) + C(18);
    RatNK expect(pnum, mul_scalar(N, Rat(3)) + C(4));
    // compare as elements p/v (canonical sign of v may differ from the print)
    PolyNK v_print = lin(3, -1, 1) * lin(3, -1, 2) * lin(3, -1, 3);
    CHECK(rf.p / RatNK(km->v) == expect / RatNK(v_print));
    CHECK(residual_identity(RatNK(1), rf));

    // S_n(H0) reduces to (-243k^3 n + n^4 - 324k^3 - 9n^3 + 41n^2 - 42n - 54)/((3n+4) v)
    ResidualForm rf2 = modified_ap_reduce(h0.gn_f, km);
    CHECK(rf2.a_zero());
    PolyNK p2 = mul_scalar(pow(K, 3) * N, Rat(-243)) + pow(N, 4) - mul_scalar(pow(K, 3), Rat(324)) -
                mul_scalar(pow(N, 3), Rat(9)) + mul_scalar(pow(N, 2), Rat(41)) -
                mul_scalar(N, Rat(42)) - C(54);
    CHECK(rf2.p / RatNK(km->v) ==
          RatNK(p2, mul_scalar(N, Rat(3)) + C(4)) / RatNK(lin(3, -1, 1) * lin(3, -1, 2) * lin(3, -1, 3)));
    CHECK(residual_identity(h0.gn, rf2));
}

TEST_CASE("reduce: paper residual of (Sn - 1)H for the 3n+1 example") {
    HyperTerm h = compile_term("(-1)^k * binomial(3*n+1,k) * binomial(3*n-k,n)^3");
    // H0 = (k-3n-1) H
    FactoredNK shell;
    shell.coeff = Rat(1);
    shell.mul_factor(lin(1, -3, -1), -1);  // H = H0/(k-3n-1)
    auto km = build_kernel_submodule(h.gk_f * factored_from(
        shift(RatNK(lin(1, -3, -1)), Var::k, 1) / RatNK(lin(1, -3, -1))));
    // kernel should be (k-2n)^3/((k+1)(k-3n)^2)
    CHECK(km->rnf.kernel ==
          RatNK(pow(lin(1, -2, 0), 3), lin(1, 0, 1) * pow(lin(1, -3, 0), 2)));
    REQUIRE(km->wk_exponents == std::vector<int>({0, 3}));

    // reduce S_n(H) - H relative to H0: h1 = gn(H)/(k-3n-1), h0 = 1/(k-3n-1)
    FactoredNK h0_rel = shell;
    FactoredNK h1_rel = h.gn_f * shell;
    ResidualForm r0 = modified_ap_reduce(h0_rel, km);
    ResidualForm r1 = modified_ap_reduce(h1_rel, km);
    ResidualForm diff = combine_residuals({{RatN(1), &r1}, {RatN(-1), &r0}});
    CHECK(diff.a_zero());
    // p = (37n^7+96n^6+81n^5+22n^4)/(8(n+1)^3(9n^2+10n+3))
    PolyNK pn = mul_scalar(pow(N, 7), Rat(37)) + mul_scalar(pow(N, 6), Rat(96)) +
                mul_scalar(pow(N, 5), Rat(81)) + mul_scalar(pow(N, 4), Rat(22));
    PolyNK pd = mul_scalar(pow(N + C(1), 3) * (mul_scalar(N * N, Rat(9)) + mul_scalar(N, Rat(10)) + C(3)),
                           Rat(8));
    CHECK(diff.p == RatNK(pn, pd));
    CHECK(diff.p_coords.size() == 2);
    CHECK(diff.p_coords[1].is_zero());  // pure constant basis element
}

TEST_CASE("reduce: images of phi_K are summable") {
    HyperTerm h0 = compile_term("(-1)^k * binomial(n,k) * binomial(3*k,n)");
    auto km = build_kernel_submodule(h0.gk_f);
    std::uniform_int_distribution<long> coef(-3, 3);
    for (int t = 0; t < 10; ++t) {
        PolyNK q;
        for (int d = 0; d <= 4; ++d) q = q + PolyNK::monomial(Rat(coef(rng)), 0, d) +
                                         PolyNK::monomial(Rat(coef(rng)), 1, d);
        if (q.is_zero()) continue;
        // phi(q) = u S_k(q) - v q; reduce phi(q)/v
        RatNK phi = (RatNK(km->u) * RatNK(shift(q, Var::k, 1)) - RatNK(km->v) * RatNK(q)) /
                    RatNK(km->v);
        ResidualForm rf = modified_ap_reduce(phi, km);
        CHECK(rf.a_zero());
        CHECK(rf.p_zero());
        CHECK(is_hyper_summable(rf));
        CHECK(residual_identity(phi, rf));
    }
}

TEST_CASE("reduce: identity and linearity on random inputs") {
    HyperTerm h0 = compile_term("binomial(2*n+1,k)^2");
    auto km = build_kernel_submodule(h0.gk_f);
    std::uniform_int_distribution<long> coef(-3, 3), pick(0, 2);
    auto random_h = [&] {
        FactoredNK f(Rat(1));
        // random small numerator and factored denominator
        PolyNK numr = C(1 + (coef(rng) & 1)) + mul_scalar(K, Rat(coef(rng))) +
                      mul_scalar(N, Rat(coef(rng)));
        f.mul_factor(numr, 1);
        for (int i = 0; i < 2; ++i) {
            long c1 = coef(rng), c0 = coef(rng);
            f.mul_factor(lin(1, c1, c0), -static_cast<long>(pick(rng)));
        }
        return f;
    };
    for (int t = 0; t < 12; ++t) {
        FactoredNK f1 = random_h(), f2 = random_h();
        if (f1.is_zero() || f2.is_zero()) continue;
        ResidualForm r1 = modified_ap_reduce(f1, km);
        ResidualForm r2 = modified_ap_reduce(f2, km);
        CHECK(residual_identity(f1.expand(), r1));
        CHECK(residual_identity(f2.expand(), r2));
        // linearity: residual of the sum equals the combined residuals
        RatNK s = f1.expand() + f2.expand();
        ResidualForm rs = modified_ap_reduce(s, km);
        ResidualForm rc = combine_residuals({{RatN(1), &r1}, {RatN(1), &r2}});
        CHECK(residual_fraction(rs) == residual_fraction(rc));
        CHECK(rs.p == rc.p);
    }
}

TEST_CASE("reduce: Delta_k of random terms is summable") {
    HyperTerm h0 = compile_term("(-1)^k * binomial(n,k) * binomial(3*k,n)");
    auto km = build_kernel_submodule(h0.gk_f);
    const RatNK& Kq = km->rnf.kernel;
    std::uniform_int_distribution<long> coef(-3, 3);
    for (int t = 0; t < 10; ++t) {
        // w random rational function; h = S_k(w) K - w  (so h H0 = Delta_k(w H0))
        PolyNK wn = C(coef(rng)) + mul_scalar(K, Rat(coef(rng))) + mul_scalar(N * K, Rat(coef(rng)));
        PolyNK wd = lin(1, coef(rng), coef(rng));
        if (wn.is_zero() || wd.is_zero()) continue;
        RatNK w(wn, wd);
        RatNK h = shift(w, Var::k, 1) * Kq - w;
        if (h.is_zero()) continue;
        ResidualForm rf = modified_ap_reduce(h, km);
        CHECK(is_hyper_summable(rf));
        CHECK(residual_identity(h, rf));
    }
}
