#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <prescope/telescoping.hpp>

using namespace prescope;

namespace {

PolyNK N = PolyNK::var_n();
PolyNK K = PolyNK::var_k();
PolyNK C(long v) { return PolyNK(v); }
PolyNK lin(long ck, long cn, long c0) {
    return mul_scalar(K, Rat(ck)) + mul_scalar(N, Rat(cn)) + C(c0);
}

PolyZ pz(std::vector<long> cs) {
    PolyZ p;
    for (long c : cs) p.c.push_back(Int(c));
    p.trim();
    return p;
}

// apply the operator to exact sums of H over the range and check annihilation
void check_annihilates_sum(const OreOp& L, const HyperTerm& H, const SummationRange& range,
                           long n_from, long n_to) {
    for (long n0 = n_from; n0 <= n_to; ++n0) {
        Rat acc(0);
        for (int d = 0; d <= L.order(); ++d) {
            auto cd = eval(L.c[d], Rat(n0));
            REQUIRE(cd.has_value());
            auto s = sum_term(H, Int(n0 + d), range);
            REQUIRE(s.has_value());
            acc += *cd * *s;
        }
        CHECK(acc == 0);
    }
}

}  // namespace

TEST_CASE("integer_linear_decompose") {
    auto g1 = integer_linear_decompose(lin(1, 2, 0) * lin(1, 2, 3));
    REQUIRE(g1.size() == 1);
    CHECK(g1[0].m == 2);
    CHECK(g1[0].ell == 1);
    REQUIRE(g1[0].shift_offsets.size() == 2);
    CHECK(g1[0].shift_offsets[0].mu + g1[0].shift_offsets[1].mu == 3);

    CHECK_THROWS_AS(integer_linear_decompose(N * N + K), NotIntegerLinear);

    auto g2 = integer_linear_decompose(lin(3, -1, 1));
    REQUIRE(g2.size() == 1);
    CHECK(g2[0].m == -1);
    CHECK(g2[0].ell == 3);

    // two groups
    auto g3 = integer_linear_decompose(lin(1, 2, 0) * lin(2, 1, 1));
    CHECK(g3.size() == 2);

    // reconstruction invariant: members rebuild the factor group
    PolyNK b = lin(1, 2, 0) * lin(1, 2, 3) * lin(1, 2, 3);
    auto gs = integer_linear_decompose(b);
    REQUIRE(gs.size() == 1);
    PolyNK recon(Rat(1));
    for (const auto& off : gs[0].shift_offsets) {
        PolyNK z = PolyNK::monomial(Rat(gs[0].m), 1, 0) + PolyNK::monomial(Rat(gs[0].ell), 0, 1) +
                   PolyNK(Rat(off.j));
        PolyNK q;
        PolyNK zp(Rat(1));
        for (size_t i = 0; i < gs[0].P.size(); ++i) {
            if (gs[0].P[i] != 0) q = q + mul_scalar(zp, gs[0].P[i]);
            if (i + 1 < gs[0].P.size()) zp = zp * z;
        }
        q = shift(q, Var::k, off.mu);
        recon = recon * pow(q, static_cast<unsigned>(off.lambda));
    }
    CHECK(primitive_part_q(recon) == primitive_part_q(b));
}

TEST_CASE("telescoper_exists") {
    HyperTerm h = compile_term("(-1)^k * binomial(2*n+1,k)^2");
    ShiftReducer sr(h);
    CHECK(telescoper_exists(sr.reduced(0)));

    // artificial non-integer-linear obstruction
    auto km1 = build_kernel_submodule(RatNK(1));
    ResidualForm rf = modified_ap_reduce(RatNK(C(1), K * K + N), km1, false);
    CHECK(!telescoper_exists(rf));
    CHECK(telescoper_exists(modified_ap_reduce(RatNK(C(1), C(1)), km1, false)));
}

TEST_CASE("minimal telescoper: (-1)^k binomial(2n+1,k)^2") {
    HyperTerm h = compile_term("(-1)^k * binomial(2*n+1,k)^2");
    OreOp L = minimal_telescoper(h).L;
    OreOp expect = OreOp::from_coeffs({RatN(pz({8, 8})), RatN(pz({3, 2}))});
    CHECK(L == expect);
    CHECK(to_string(L) == "(2*n+3)*Sn + (8*n+8)");
}

TEST_CASE("minimal telescoper: (-1)^k binomial(n,k) binomial(3k,n)") {
    HyperTerm h = compile_term("(-1)^k * binomial(n,k) * binomial(3*k,n)");
    OreOp L = minimal_telescoper(h).L;
    // Sn^2 + 3(5n+7)/(2(2n+3)) Sn + 9(n+1)/(2(2n+3)), cleared
    OreOp expect =
        OreOp::from_coeffs({RatN(pz({9, 9})), RatN(pz({21, 15})), RatN(pz({6, 4}))});
    CHECK(L == expect);
    // the recurrence annihilates the exact sums over 0..n
    SummationRange r = parse_range("0..n");
    check_annihilates_sum(L, h, r, 3, 10);
}

TEST_CASE("minimal telescoper: summable term gives L = 1") {
    // Delta_k(binomial(n,k)) = (n-2k-1)/(k+1) binomial(n,k)
    HyperTerm h = compile_term("(n-2*k-1) * binomial(n,k) / (k+1)");
    OreOp L = minimal_telescoper(h).L;
    CHECK(L == OreOp::identity());
}

TEST_CASE("telescoper residual is exactly zero") {
    for (const char* s : {"(-1)^k * binomial(2*n+1,k)^2", "(-1)^k * binomial(n,k) * binomial(3*k,n)"}) {
        HyperTerm h = compile_term(s);
        ShiftReducer sr(h);
        OreOp L = minimal_telescoper(h).L;
        std::vector<std::pair<RatN, const ResidualForm*>> terms;
        for (int d = 0; d <= L.order(); ++d) terms.emplace_back(L.c[d], &sr.reduced(d));
        ResidualForm comb = combine_residuals(terms);
        CHECK(comb.a_zero());
        CHECK(comb.p_zero());
    }
}

TEST_CASE("minimal prescoper: first zero-sum example gives Sn - 1") {
    HyperTerm h = compile_term("(-1)^k * binomial(3*n+1,k) * binomial(3*n-k,n)^3");
    PrescoperResult pr = minimal_prescoper(h);
    CHECK(pr.R == OreOp::sn() - OreOp::identity());
    // residual: (37n^7+96n^6+81n^5+22n^4)/(8(n+1)^3(9n^2+10n+3)) * H0/v
    ShiftReducer sr(h);
    PolyNK pn = mul_scalar(pow(N, 7), Rat(37)) + mul_scalar(pow(N, 6), Rat(96)) +
                mul_scalar(pow(N, 5), Rat(81)) + mul_scalar(pow(N, 4), Rat(22));
    PolyNK pd = mul_scalar(
        pow(N + C(1), 3) * (mul_scalar(N * N, Rat(9)) + mul_scalar(N, Rat(10)) + C(3)), Rat(8));
    PolyNK v_print = lin(1, 0, 1) * pow(lin(1, -3, 0), 2);
    CHECK(pr.residual_p / RatNK(sr.km()->v) == RatNK(pn, pd) / RatNK(v_print));
}

TEST_CASE("minimal prescoper: term already in N gives R = 1") {
    HyperTerm h = compile_term("(-1)^k * binomial(n,k) * binomial(3*k,n)");
    PrescoperResult pr = minimal_prescoper(h);
    CHECK(pr.R == OreOp::identity());
}

TEST_CASE("prescoper right-divides the telescoper") {
    for (const char* s :
         {"(-1)^k * binomial(3*n+1,k) * binomial(3*n-k,n)^3",
          "(-1)^k * binomial(2*n+1,k)^2", "(-1)^k * binomial(n,k) * binomial(3*k,n)"}) {
        HyperTerm h = compile_term(s);
        OreOp L = minimal_telescoper(h).L;
        OreOp R = minimal_prescoper(h).R;
        CHECK(right_divides(R, L));
    }
}

TEST_CASE("direct prescoper: Huang example") {
    HyperTerm h0 = compile_term("binomial(5*n,3*k)^2 / binomial(n,k)");
    PrescoperResult pr = direct_prescoper(h0, C(1), 2, 1, Rat(0), 1);
    // r = 3(3n+1)(3n+2) prod_{i=1}^{5}(5n+i)^2 prod_{i=0}^{5}(6n+i)^2
    //     / (2n(2n+1) prod_{i=1}^{11}(11n+i)^2)
    PolyZ num = pz({0});
    num = pz({1});
    num = mul_scalar(num, Int(3));
    num = num * pz({1, 3}) * pz({2, 3});
    for (long i = 1; i <= 5; ++i) num = num * pz({i, 5}) * pz({i, 5});
    for (long i = 0; i <= 5; ++i) num = num * pz({i, 6}) * pz({i, 6});
    PolyZ den = pz({0, 2});  // 2n
    den = den * pz({1, 2});
    for (long i = 1; i <= 11; ++i) den = den * pz({i, 11}) * pz({i, 11});
    RatN r_paper(num, den);
    OreOp expect = OreOp::sn() - OreOp(r_paper);
    CHECK(pr.R == expect);
}

TEST_CASE("direct prescoper agrees with the dependence method") {
    // Huang term
    HyperTerm h = compile_term("binomial(5*n,3*k)^2 / (binomial(n,k) * (2*n+k))");
    PrescoperResult dep = minimal_prescoper(h);
    HyperTerm h0 = compile_term("binomial(5*n,3*k)^2 / binomial(n,k)");
    PrescoperResult dir = direct_prescoper(h0, C(1), 2, 1, Rat(0), 1);
    CHECK(dep.R == dir.R);

    // rational case: H = 1/(n+2k), H0 = 1 -> R = Sn^2 - r'
    HyperTerm one = compile_term("1");
    PrescoperResult d2 = direct_prescoper(one, C(1), 1, 2, Rat(0), 1);
    CHECK(d2.R.order() == 2);
    HyperTerm hr = compile_term("1/(n+2*k)");
    PrescoperResult m2 = minimal_prescoper(hr);
    CHECK(d2.R == m2.R);
}

TEST_CASE("direct prescoper precondition violations") {
    HyperTerm h0 = compile_term("binomial(5*n,3*k)^2 / binomial(n,k)");
    // q sharing a factor with the linear form
    CHECK_THROWS_AS(direct_prescoper(h0, lin(1, 2, 0) * lin(0, 0, 1) + C(0), 2, 1, Rat(0), 2),
                    PreconditionViolated);
    // deg_k(q) too large
    CHECK_THROWS_AS(direct_prescoper(h0, K, 2, 1, Rat(0), 1), PreconditionViolated);
}

TEST_CASE("exponent separation") {
    OreOp R = OreOp::from_coeffs({RatN(1), RatN(1), RatN(1)});  // Sn^2 + Sn + 1
    auto parts = exponent_separation(R, 2);
    REQUIRE(parts.size() == 2);
    CHECK(parts[0] == OreOp::from_coeffs({RatN(1), RatN(0), RatN(1)}));
    CHECK(parts[1] == OreOp::from_coeffs({RatN(0), RatN(1)}));
    CHECK(parts[0] + parts[1] == R);

    auto whole = exponent_separation(R, 1);
    REQUIRE(whole.size() == 1);
    CHECK(whole[0] == R);

    // minimal prescoper of a special form with ell = 2 lives in Q(n)<Sn^2>
    HyperTerm hr = compile_term("1/(n+2*k)");
    OreOp R2 = minimal_prescoper(hr).R;
    auto sep = exponent_separation(R2, 2);
    CHECK(!sep[0].is_zero());
    CHECK(sep[1].is_zero());
}

TEST_CASE("parse_range") {
    SummationRange r1 = parse_range("0..n");
    CHECK(!r1.lo.infinite);
    CHECK(*r1.lo.at(Int(5)) == 0);
    CHECK(*r1.hi.at(Int(5)) == 5);
    SummationRange r2 = parse_range("-inf..inf");
    CHECK(r2.lo.infinite);
    CHECK(r2.hi.infinite);
    SummationRange r3 = parse_range("0..3*n+1");
    CHECK(*r3.hi.at(Int(2)) == 7);
    CHECK_THROWS_AS(parse_range("0..k"), SyntaxError);
}

TEST_CASE("zero-sum certification and annihilator: first example") {
    HyperTerm h = compile_term("(-1)^k * binomial(3*n+1,k) * binomial(3*n-k,n)^3");
    ShiftReducer sr(h);
    SummationRange range = parse_range("0..3*n");
    ZeroSumCertificate cert = zero_sum_certify(h, sr.km(), range);
    REQUIRE(cert.witnesses.size() == 2);
    CHECK(cert.witnesses[0].exponent == 0);
    CHECK(cert.witnesses[0].certified);
    CHECK(cert.witnesses[1].exponent == 3);
    CHECK(!cert.witnesses[1].certified);
    CHECK(cert.certified_degree == 0);
    CHECK(cert.closure_ok);

    OreOp T = minimal_annihilator(h, range, cert);
    CHECK(T == OreOp::sn() - OreOp::identity());
    // the sums are identically 1, annihilated by Sn - 1
    for (long n0 = 2; n0 <= 10; ++n0) CHECK(sum_term(h, Int(n0), range) == Rat(1));
}

TEST_CASE("zero-sum certification and annihilator: second example") {
    HyperTerm h = compile_term("(-1)^k * binomial(n,k) * binomial(3*k,n)");
    ShiftReducer sr(h);
    SummationRange range = parse_range("0..n");
    ZeroSumCertificate cert = zero_sum_certify(h, sr.km(), range);
    CHECK(cert.certified_degree == 0);
    CHECK(cert.closure_ok);
    // closure coefficient from the paper:
    // S_n(H0/v) = (-9n^3-21n^2+36n+84)/(2(n+2)(2n+5)(3n+4)) H0/v
    bool found = false;
    PolyNK cn = mul_scalar(pow(N, 3), Rat(-9)) + mul_scalar(N * N, Rat(-21)) +
                mul_scalar(N, Rat(36)) + C(84);
    PolyNK cd = mul_scalar((N + C(2)) * (mul_scalar(N, Rat(2)) + C(5)) *
                               (mul_scalar(N, Rat(3)) + C(4)),
                           Rat(2));
    PolyNK v_print = lin(3, -1, 1) * lin(3, -1, 2) * lin(3, -1, 3);
    for (const auto& [e, img] : cert.closure_images) {
        if (e != 0) continue;
        // img/v == paper coefficient * (1/v_print) requires S_n(v)... compare as
        // S_n(H0/v) = img/v * H0: both sides relative to their own v convention
        CHECK(img / RatNK(sr.km()->v) == RatNK(cn, cd) / RatNK(v_print));
        found = true;
    }
    CHECK(found);

    OreOp T = minimal_annihilator(h, range, cert);
    CHECK(T == OreOp::sn() + OreOp(3));
    // sums are (-3)^n
    for (long n0 = 3; n0 <= 10; ++n0) {
        Rat expect = rat_pow(Rat(-3), n0);
        CHECK(sum_term(h, Int(n0), range) == expect);
    }
}

TEST_CASE("zero-sum: anti-symmetric example yields no improvement") {
    HyperTerm h = compile_term("(-1)^k * binomial(2*n+1,k)^2");
    ShiftReducer sr(h);
    SummationRange range = parse_range("0..2*n+1");
    ZeroSumCertificate cert = zero_sum_certify(h, sr.km(), range);
    CHECK_THROWS_AS(minimal_annihilator(h, range, cert), NoOperatorFound);
}

TEST_CASE("binomial(n,k) sums are not zero-sum certified") {
    HyperTerm h = compile_term("binomial(n,k)");
    ShiftReducer sr(h);
    SummationRange range = parse_range("0..n");
    ZeroSumCertificate cert = zero_sum_certify(h, sr.km(), range);
    for (const auto& w : cert.witnesses)
        if (w.exponent == 0) CHECK(!w.certified);
}
