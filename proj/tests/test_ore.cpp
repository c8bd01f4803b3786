#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <prescope/ore.hpp>

#include <random>

using namespace prescope;

namespace {

std::mt19937 rng(987123);

RatN rand_ratn(int maxdeg = 3) {
    std::uniform_int_distribution<long> coef(-4, 4);
    std::uniform_int_distribution<int> deg(0, maxdeg);
    PolyZ p;
    int d = deg(rng);
    p.c.resize(d + 1);
    for (int i = 0; i <= d; ++i) p.c[i] = Int(coef(rng));
    p.trim();
    if (p.is_zero()) p = PolyZ(Int(1));
    return RatN(p);
}

OreOp rand_op(int maxord = 3) {
    std::uniform_int_distribution<int> od(0, maxord);
    int d = od(rng);
    std::vector<RatN> c(d + 1);
    for (int i = 0; i <= d; ++i) c[i] = rand_ratn(2);
    if (c[d].is_zero()) c[d] = RatN(1);
    return OreOp::from_coeffs(std::move(c));
}

const RatN n_var = RatN::var();

}  // namespace

TEST_CASE("op_mul commutation rule") {
    // Sn * n = (n+1) Sn
    OreOp sn = OreOp::sn();
    OreOp n_op(n_var);
    OreOp prod = op_mul(sn, n_op);
    REQUIRE(prod.order() == 1);
    CHECK(prod.c[0].is_zero());
    CHECK(prod.c[1] == shift_n(n_var, 1));

    // (Sn - 1)(Sn + 3) = Sn^2 + 2 Sn - 3
    OreOp a = sn - OreOp::identity();
    OreOp b = sn + OreOp(3);
    OreOp expect = OreOp::from_coeffs({RatN(-3), RatN(2), RatN(1)});
    CHECK(op_mul(a, b) == expect);

    // A * 1 = A
    OreOp r = rand_op();
    CHECK(op_mul(r, OreOp::identity()) == r);
}

TEST_CASE("op_mul associativity and distributivity") {
    for (int trial = 0; trial < 30; ++trial) {
        OreOp a = rand_op(), b = rand_op(), c = rand_op();
        CHECK(op_mul(op_mul(a, b), c) == op_mul(a, op_mul(b, c)));
        CHECK(op_mul(a, b + c) == op_mul(a, b) + op_mul(a, c));
        CHECK(op_mul(a + b, c) == op_mul(a, c) + op_mul(b, c));
    }
}

TEST_CASE("op_rdivmod") {
    OreOp sn = OreOp::sn();
    OreOp a = OreOp::from_coeffs({RatN(-3), RatN(2), RatN(1)});  // Sn^2+2Sn-3
    OreOp b = sn + OreOp(3);
    auto [q, r] = op_rdivmod(a, b);
    CHECK(q == sn - OreOp::identity());
    CHECK(r.is_zero());

    auto [q2, r2] = op_rdivmod(a, a);
    CHECK(q2 == OreOp::identity());
    CHECK(r2.is_zero());

    auto [q3, r3] = op_rdivmod(sn + OreOp(3), sn - OreOp::identity());
    CHECK(q3 == OreOp::identity());
    CHECK(r3 == OreOp(4));

    CHECK_THROWS_AS(op_rdivmod(a, OreOp()), DivisionByZeroOperator);
}

TEST_CASE("op_rdivmod recombination") {
    for (int trial = 0; trial < 30; ++trial) {
        OreOp a = rand_op(4), b = rand_op(3);
        if (b.is_zero()) continue;
        auto [q, r] = op_rdivmod(a, b);
        CHECK(op_mul(q, b) + r == a);
        if (!r.is_zero()) CHECK(r.order() < b.order());
    }
}

TEST_CASE("op_lclm") {
    OreOp sn = OreOp::sn();
    OreOp a = sn - OreOp::identity();
    OreOp b = sn + OreOp(3);

    OreOp l1 = op_lclm(a, a);
    CHECK(l1 == a);

    OreOp l2 = op_lclm(a, b);
    CHECK(l2.order() == 2);
    CHECK(right_divides(a, l2));
    CHECK(right_divides(b, l2));

    // identical first-order inputs: lclm is the input itself
    OreOp c = sn - OreOp(n_var);
    CHECK(op_lclm(c, c) == c);
}

TEST_CASE("op_lclm right-divisibility on random pairs") {
    for (int trial = 0; trial < 50; ++trial) {
        OreOp a = rand_op(2), b = rand_op(2);
        if (a.is_zero() || b.is_zero()) continue;
        OreOp l = op_lclm(a, b);
        CHECK(right_divides(a, l));
        CHECK(right_divides(b, l));
        CHECK(l.order() <= a.order() + b.order());
    }
}

TEST_CASE("canonical form") {
    // clearing denominators and content: 4/3 + 2 Sn -> 2 + 3 Sn
    OreOp weird = OreOp::from_coeffs({RatN(Rat(8, 6)), RatN(Rat(2))});
    OreOp canon = weird.canonical();
    CHECK(canon.c[0] == RatN(2));
    CHECK(canon.c[1] == RatN(3));
    CHECK(canon.canonical() == canon);

    // canonical form of S_n + 8(n+1)/(2n+3) is (2n+3)Sn + (8n+8)
    PolyZ n1;  // 8n+8
    n1.c = {Int(8), Int(8)};
    PolyZ d1;  // 2n+3
    d1.c = {Int(3), Int(2)};
    OreOp tel = OreOp::sn() + OreOp(RatN(n1, d1));
    OreOp tc = tel.canonical();
    CHECK(tc.c[0] == RatN(n1));
    CHECK(tc.c[1] == RatN(d1));
    CHECK(to_string(tc) == "(2*n+3)*Sn + (8*n+8)");
}

TEST_CASE("op_apply_quotient") {
    RatNK g(PolyNK(Rat(2)));  // shift quotient of 2^n
    CHECK(op_apply_quotient(OreOp::identity(), g) == RatNK(1));
    CHECK(op_apply_quotient(OreOp::sn(), g) == g);
    OreOp d = OreOp::sn() - OreOp::identity();
    CHECK(op_apply_quotient(d, g) == RatNK(1));  // (Sn-1) 2^n = 2^n

    // (Sn - 1) applied to H with g = (n+1)/n  (H = n): result (Sn-1)(n)/n = 1/n
    RatNK gn(PolyNK::var_n() + PolyNK(Rat(1)), PolyNK::var_n());
    RatNK res = op_apply_quotient(d, gn);
    CHECK(res == RatNK(PolyNK(Rat(1)), PolyNK::var_n()));
}
