#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <prescope/rational_summation.hpp>

#include <random>

using namespace prescope;

namespace {

PolyNK N = PolyNK::var_n();
PolyNK K = PolyNK::var_k();
PolyNK C(long v) { return PolyNK(v); }
PolyNK lin(long ck, long cn, long c0) {
    return mul_scalar(K, Rat(ck)) + mul_scalar(N, Rat(cn)) + C(c0);
}

bool abramov_identity(const RatNK& f) {
    AbramovDecomp d = abramov_reduce(f);
    return f == (shift(d.g, Var::k, 1) - d.g) + d.r;
}

std::mt19937 rng(31137);

RatNK random_linear_pole_fn() {
    std::uniform_int_distribution<long> coef(-5, 5);
    std::uniform_int_distribution<int> nf(1, 3), me(1, 2);
    PolyNK den = C(1);
    int f = nf(rng);
    for (int i = 0; i < f; ++i) {
        PolyNK fac = lin(1, coef(rng), coef(rng));
        for (int e = me(rng); e > 0; --e) den = den * fac;
    }
    PolyNK num = C(coef(rng)) + mul_scalar(K, Rat(coef(rng))) + mul_scalar(N, Rat(coef(rng)));
    if (num.is_zero()) num = C(1);
    return RatNK(num, den);
}

}  // namespace

TEST_CASE("abramov_reduce basics") {
    // telescoping fraction: fully summable with g = -1/k
    AbramovDecomp d1 = abramov_reduce(RatNK(C(1), K * (K + C(1))));
    CHECK(d1.r.is_zero());
    CHECK(d1.g == RatNK(C(-1), K));

    // 1/k is its own obstruction
    AbramovDecomp d2 = abramov_reduce(RatNK(C(1), K));
    CHECK(d2.g.is_zero());
    CHECK(d2.r == RatNK(C(1), K));

    // orbit merge: 1/(k-3n) + 1/(k-3n+5) -> r = 2/(k-3n)
    RatNK f = RatNK(C(1), lin(1, -3, 0)) + RatNK(C(1), lin(1, -3, 5));
    AbramovDecomp d3 = abramov_reduce(f);
    CHECK(d3.r == RatNK(C(2), lin(1, -3, 0)));
    CHECK(abramov_identity(f));
}

TEST_CASE("abramov identity on random inputs") {
    for (int t = 0; t < 100; ++t) CHECK(abramov_identity(random_linear_pole_fn()));
}

TEST_CASE("discrete residues") {
    CHECK(discrete_residues(RatNK(C(1), K * (K + C(1)))).empty());

    auto rs = discrete_residues(RatNK(C(1), K) + RatNK(C(2), K + C(7)));
    REQUIRE(rs.size() == 1);
    CHECK(rs[0].orbit_rep == RatN(0));
    CHECK(rs[0].multiplicity == 1);
    CHECK(rs[0].residue == RatN(3));

    CHECK_THROWS_AS(discrete_residues(RatNK(C(1), K * K + C(1))), NonLinearDenominator);

    // Euler example at n=4, j=2: f = 4!(-k)^2/(k(k+1)...(k+4)), all residues vanish
    PolyNK P = mul_scalar(K * K, Rat(24));
    PolyNK Q = C(1);
    for (long i = 0; i <= 4; ++i) Q = Q * (K + C(i));
    CHECK(discrete_residues(RatNK(P, Q)).empty());
}

TEST_CASE("summability iff all residues vanish") {
    int linear_cases = 0;
    for (int t = 0; t < 100; ++t) {
        RatNK f = random_linear_pole_fn();
        bool s = is_summable(f);
        bool rz = discrete_residues(f).empty();
        CHECK(s == rz);
        ++linear_cases;
    }
    CHECK(linear_cases == 100);
}

TEST_CASE("nicole summability instance") {
    // P(k)=k over k(k+1)(k+2)(k+3) is summable
    PolyNK Q = K * (K + C(1)) * (K + C(2)) * (K + C(3));
    CHECK(is_summable(RatNK(K, Q)));
}

TEST_CASE("nicole_certify") {
    CHECK(nicole_certify(mul_scalar(N, Rat(2)) + C(1), {RatN(0), RatN(1), RatN(2)}));
    CHECK(!nicole_certify(K * K, {RatN(0), RatN(1), RatN(2)}));
    CHECK_THROWS_AS(nicole_certify(C(1), {RatN(0), RatN::var()}), BadOrbit);

    // vanishing-sum example at n=5: P = -2^5 prod_{i=1}^{4}(2(y+i)+1), betas 0..5
    PolyNK P = C(-32);
    for (long i = 1; i <= 4; ++i) P = P * (mul_scalar(K, Rat(2)) + C(2 * i + 1));
    std::vector<RatN> betas;
    for (long i = 0; i <= 5; ++i) betas.push_back(RatN(Rat(i)));
    CHECK(P.deg_k() == 4);
    CHECK(nicole_certify(P, betas));
}

TEST_CASE("oracle: antidifference telescopes finite sums") {
    for (int t = 0; t < 20; ++t) {
        RatNK f = random_linear_pole_fn();
        AbramovDecomp d = abramov_reduce(f);
        if (!d.r.is_zero()) continue;
        // fix n, pick a window beyond all poles
        Rat n0(17);
        long B = 120;
        Rat sum(0);
        bool ok = true;
        for (long k = B + 1; k <= B + 50 && ok; ++k) {
            auto v = eval(f, n0, Rat(k));
            if (!v) ok = false;
            else sum += *v;
        }
        if (!ok) continue;
        auto glo = eval(d.g, n0, Rat(B + 1));
        auto ghi = eval(d.g, n0, Rat(B + 51));
        if (!glo || !ghi) continue;
        CHECK(sum == *ghi - *glo);
    }
}

TEST_CASE("vanishing_sum_check: Euler identity") {
    for (long n0 = 2; n0 <= 8; ++n0) {
        for (long j = 0; j < n0; ++j) {
            std::string expr = "(-1)^k * binomial(n,k)";
            if (j > 0) expr += " * k^" + std::to_string(j);
            HyperTerm t = compile_term(expr);
            // P = n0! (-k)^j, Q = k(k+1)...(k+n0)
            Rat fact(1);
            for (long i = 2; i <= n0; ++i) fact *= i;
            PolyNK P = mul_scalar(pow(-K, static_cast<unsigned>(j)), fact);
            PolyNK Q = C(1);
            for (long i = 0; i <= n0; ++i) Q = Q * (K + C(i));
            CHECK(vanishing_sum_check(t, P, Q, Int(n0)));
            // cross-check by exact summation
            Rat sum(0);
            for (long k = 0; k <= n0; ++k) sum += *eval_int(t, Int(n0), Int(k));
            CHECK(sum == 0);
        }
    }
}

TEST_CASE("vanishing_sum_check: central binomial identity") {
    for (long n0 = 1; n0 <= 8; ++n0) {
        HyperTerm t = compile_term("binomial(2*k,k) * binomial(2*n-2*k,n-k) / (2*k-1)");
        PolyNK P = C(-1);
        Rat p2(1);
        for (long i = 0; i < n0; ++i) p2 *= 2;
        P = mul_scalar(P, p2);
        for (long i = 1; i <= n0 - 1; ++i) P = P * (mul_scalar(K, Rat(2)) + C(2 * i + 1));
        PolyNK Q = C(1);
        for (long i = 0; i <= n0; ++i) Q = Q * (K + C(i));
        CHECK(vanishing_sum_check(t, P, Q, Int(n0)));
        Rat sum(0);
        for (long k = 0; k <= n0; ++k) sum += *eval_int(t, Int(n0), Int(k));
        CHECK(sum == 0);
    }
}

TEST_CASE("vanishing_sum_check: perturbed numerator is rejected") {
    long n0 = 5, j = 2;
    HyperTerm t = compile_term("(-1)^k * binomial(n,k) * k^2");
    Rat fact(1);
    for (long i = 2; i <= n0; ++i) fact *= i;
    PolyNK P = mul_scalar(pow(-K, static_cast<unsigned>(j)), fact) + pow(K, 5);
    PolyNK Q = C(1);
    for (long i = 0; i <= n0; ++i) Q = Q * (K + C(i));
    CHECK_THROWS_AS(vanishing_sum_check(t, P, Q, Int(n0)), MismatchedTerm);
}
