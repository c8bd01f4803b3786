#include <prescope/term.hpp>
#include <prescope/upoly_k.hpp>

#include <cassert>
#include <cctype>
#include <sstream>

namespace prescope {

// ---- FactoredNK ----

FactoredNK& FactoredNK::mul_factor(const PolyNK& p, long e) {
    if (coeff == 0 || e == 0) return *this;
    if (p.is_zero()) {
        coeff = 0;
        f.clear();
        return *this;
    }
    Rat c = content_q(p);
    coeff *= rat_pow(c, e);
    if (c != 1) {
        PolyNK pp = mul_scalar(p, Rat(1) / c);
        if (!pp.is_one()) f[pp] += e;
        if (!pp.is_one() && f[pp] == 0) f.erase(pp);
    } else if (!p.is_one()) {
        f[p] += e;
        if (f[p] == 0) f.erase(p);
    }
    return *this;
}

FactoredNK& FactoredNK::mul(const FactoredNK& o) {
    if (is_zero()) return *this;
    if (o.is_zero()) {
        coeff = 0;
        f.clear();
        return *this;
    }
    coeff *= o.coeff;
    for (const auto& [p, e] : o.f) {
        f[p] += e;
        if (f[p] == 0) f.erase(p);
    }
    return *this;
}

FactoredNK FactoredNK::inv() const {
    FactoredNK r;
    if (is_zero()) throw std::domain_error("FactoredNK: inverse of zero");
    r.coeff = Rat(coeff.get_den(), coeff.get_num());
    r.coeff.canonicalize();
    for (const auto& [p, e] : f) r.f[p] = -e;
    return r;
}

FactoredNK FactoredNK::powed(long e) const {
    if (e == 0) return FactoredNK(Rat(1));
    FactoredNK base = e < 0 ? inv() : *this;
    long m = e < 0 ? -e : e;
    FactoredNK r;
    r.coeff = rat_pow(base.coeff, m);
    for (const auto& [p, ex] : base.f) r.f[p] = ex * m;
    return r;
}

FactoredNK FactoredNK::shifted(Var v, long j) const {
    if (j == 0) return *this;
    FactoredNK r;
    r.coeff = coeff;
    for (const auto& [p, e] : f) r.f[shift(p, v, j)] += e;
    return r;
}

RatNK FactoredNK::expand() const {
    if (is_zero()) return RatNK();
    PolyNK num{Rat(coeff.get_num())};
    PolyNK den{Rat(coeff.get_den())};
    for (const auto& [p, e] : f) {
        if (e > 0)
            num = num * pow(p, static_cast<unsigned>(e));
        else
            den = den * pow(p, static_cast<unsigned>(-e));
    }
    return RatNK(num, den);
}

FactoredNK FactoredNK::refined() const {
    FactoredNK r(coeff);
    for (const auto& [p, e] : f) {
        if (p.deg_k() <= 0) {
            r.mul_factor(p, e);
            continue;
        }
        auto split = linear_factors_k(p);
        std::vector<std::pair<PolyNK, long>> parts;
        for (const auto& [rho, m] : split.roots) {
            PolyNK lin = PolyNK::from_n(rho.den) * PolyNK::var_k() - PolyNK::from_n(rho.num);
            parts.emplace_back(primitive_part_q(lin), m);
        }
        if (split.rest.deg_k() >= 1) {
            PolyNK rest = primitive_part_q(split.rest);
            PolyZ ck = content_k(rest);
            if (ck.degree() > 0) rest = primitive_part_q(divexact(rest, PolyNK::from_n(ck)));
            parts.emplace_back(rest, 1);
        }
        PolyNK prod(Rat(1));
        for (const auto& [q, m] : parts) prod = prod * pow(q, static_cast<unsigned>(m));
        PolyNK cofactor = divexact(p, prod);  // k-free by construction
        r.mul_factor(cofactor, e);
        for (const auto& [q, m] : parts) r.mul_factor(q, m * e);
    }
    return r;
}

FactoredNK operator*(const FactoredNK& a, const FactoredNK& b) {
    FactoredNK r = a;
    r.mul(b);
    return r;
}

FactoredNK operator/(const FactoredNK& a, const FactoredNK& b) {
    FactoredNK r = a;
    r.mul(b.inv());
    return r;
}

FactoredNK factored_from(const RatNK& r) {
    FactoredNK out;
    if (r.is_zero()) {
        out.coeff = 0;
        return out;
    }
    out.mul_factor(r.num, 1);
    out.mul_factor(r.den, -1);
    return out;
}

// ---- parser ----

namespace {

struct Parser {
    const std::string& s;
    size_t pos = 0;

    explicit Parser(const std::string& text) : s(text) {}

    void skip_ws() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool peek(char c) {
        skip_ws();
        return pos < s.size() && s[pos] == c;
    }
    bool accept(char c) {
        if (peek(c)) {
            ++pos;
            return true;
        }
        return false;
    }
    void expect(char c) {
        if (!accept(c)) throw SyntaxError(std::string("expected '") + c + "'", pos);
    }

    ExprPtr make(TermExpr::Kind k, ExprPtr a = nullptr, ExprPtr b = nullptr, Rat lit = Rat(0)) {
        auto e = std::make_shared<TermExpr>();
        e->kind = k;
        e->a = std::move(a);
        e->b = std::move(b);
        e->lit = std::move(lit);
        return e;
    }

    ExprPtr parse_expr() {
        ExprPtr e = parse_product();
        while (true) {
            if (accept('+'))
                e = make(TermExpr::Kind::Add, e, parse_product());
            else if (accept('-'))
                e = make(TermExpr::Kind::Sub, e, parse_product());
            else
                return e;
        }
    }

    ExprPtr parse_product() {
        ExprPtr e = parse_unary();
        while (true) {
            if (accept('*'))
                e = make(TermExpr::Kind::Mul, e, parse_unary());
            else if (accept('/'))
                e = make(TermExpr::Kind::Div, e, parse_unary());
            else
                return e;
        }
    }

    ExprPtr parse_unary() {
        if (accept('-')) return make(TermExpr::Kind::Neg, parse_unary());
        return parse_power();
    }

    ExprPtr parse_power() {
        ExprPtr base = parse_atom();
        if (accept('^')) {
            // exponent binds tighter than unary minus: parse a power or atom,
            // allowing a leading sign on integer literals
            ExprPtr e;
            skip_ws();
            if (pos < s.size() && s[pos] == '-') {
                ++pos;
                e = make(TermExpr::Kind::Neg, parse_power_operand());
            } else {
                e = parse_power_operand();
            }
            return validate_pow(base, e);
        }
        return base;
    }

    ExprPtr parse_power_operand() { return parse_power(); }

    ExprPtr validate_pow(ExprPtr base, ExprPtr expo) {
        auto c = as_rational_constant(expo);
        if (c) {
            if (!is_integer(*c)) throw SyntaxError("exponent must be an integer", pos);
            return make(TermExpr::Kind::Pow, base, expo);
        }
        // non-constant exponent: base must be a rational constant, exponent integer-linear
        auto lf = as_integer_linear(expo);
        if (!lf)
            throw NonIntegerLinearArgument("exponent is not an integer-linear form: " +
                                           print_term(expo));
        auto bc = as_rational_constant(base);
        if (!bc)
            throw NotHypergeometric("variable exponent requires a rational base: " +
                                    print_term(base));
        return make(TermExpr::Kind::Pow, base, expo);
    }

    ExprPtr parse_atom() {
        skip_ws();
        if (pos >= s.size()) throw SyntaxError("unexpected end of input", pos);
        char c = s[pos];
        if (c == '(') {
            ++pos;
            ExprPtr e = parse_expr();
            expect(')');
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            size_t start = pos;
            while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
            Rat v(s.substr(start, pos - start));
            return make(TermExpr::Kind::Literal, nullptr, nullptr, v);
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            size_t start = pos;
            while (pos < s.size() &&
                   (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_'))
                ++pos;
            std::string name = s.substr(start, pos - start);
            if (name == "n") return make(TermExpr::Kind::VarN);
            if (name == "k") return make(TermExpr::Kind::VarK);
            if (name == "binomial") {
                expect('(');
                ExprPtr a = parse_expr();
                expect(',');
                ExprPtr b = parse_expr();
                expect(')');
                check_linear(a);
                check_linear(b);
                return make(TermExpr::Kind::Binomial, a, b);
            }
            if (name == "factorial") {
                expect('(');
                ExprPtr a = parse_expr();
                expect(')');
                check_linear(a);
                return make(TermExpr::Kind::Factorial, a);
            }
            throw SyntaxError("unknown identifier '" + name + "'", start);
        }
        throw SyntaxError(std::string("unexpected character '") + c + "'", pos);
    }

    void check_linear(const ExprPtr& e) {
        if (!as_integer_linear(e))
            throw NonIntegerLinearArgument("argument is not an integer-linear form: " +
                                           print_term(e));
    }
};

}  // namespace

ExprPtr parse_term(const std::string& text) {
    Parser p(text);
    ExprPtr e = p.parse_expr();
    p.skip_ws();
    if (p.pos != text.size()) throw SyntaxError("trailing input", p.pos);
    return e;
}

std::optional<Rat> as_rational_constant(const ExprPtr& e) {
    using K = TermExpr::Kind;
    switch (e->kind) {
        case K::Literal: return e->lit;
        case K::Neg: {
            auto v = as_rational_constant(e->a);
            if (v) return -*v;
            return std::nullopt;
        }
        case K::Add: case K::Sub: case K::Mul: case K::Div: {
            auto x = as_rational_constant(e->a), y = as_rational_constant(e->b);
            if (!x || !y) return std::nullopt;
            switch (e->kind) {
                case K::Add: return *x + *y;
                case K::Sub: return *x - *y;
                case K::Mul: return *x * *y;
                default:
                    if (*y == 0) return std::nullopt;
                    return *x / *y;
            }
        }
        case K::Pow: {
            auto x = as_rational_constant(e->a), y = as_rational_constant(e->b);
            if (!x || !y || !is_integer(*y) || !y->get_num().fits_slong_p()) return std::nullopt;
            if (*x == 0 && *y < 0) return std::nullopt;
            return rat_pow(*x, y->get_num().get_si());
        }
        default: return std::nullopt;
    }
}

std::optional<LinFormNK> as_integer_linear(const ExprPtr& e) {
    using K = TermExpr::Kind;
    switch (e->kind) {
        case K::Literal:
            if (!is_integer(e->lit)) return std::nullopt;
            return LinFormNK{0, 0, Int(e->lit.get_num())};
        case K::VarN: return LinFormNK{1, 0, Int(0)};
        case K::VarK: return LinFormNK{0, 1, Int(0)};
        case K::Neg: {
            auto v = as_integer_linear(e->a);
            if (!v) return std::nullopt;
            return LinFormNK{-v->a, -v->b, -v->c};
        }
        case K::Add: case K::Sub: {
            auto x = as_integer_linear(e->a), y = as_integer_linear(e->b);
            if (!x || !y) return std::nullopt;
            long sign = e->kind == K::Add ? 1 : -1;
            return LinFormNK{x->a + sign * y->a, x->b + sign * y->b, x->c + sign * y->c};
        }
        case K::Mul: {
            auto cx = as_rational_constant(e->a);
            auto cy = as_rational_constant(e->b);
            if (cx && is_integer(*cx) && cx->get_num().fits_slong_p()) {
                auto y = as_integer_linear(e->b);
                if (!y) return std::nullopt;
                long m = cx->get_num().get_si();
                return LinFormNK{m * y->a, m * y->b, y->c * Int(m)};
            }
            if (cy && is_integer(*cy) && cy->get_num().fits_slong_p()) {
                auto x = as_integer_linear(e->a);
                if (!x) return std::nullopt;
                long m = cy->get_num().get_si();
                return LinFormNK{m * x->a, m * x->b, x->c * Int(m)};
            }
            return std::nullopt;
        }
        default: return std::nullopt;
    }
}

static void print_rec(std::ostringstream& os, const ExprPtr& e, int parent_prec) {
    using K = TermExpr::Kind;
    auto parens = [&](int prec, auto&& body) {
        bool need = prec < parent_prec;
        if (need) os << "(";
        body();
        if (need) os << ")";
    };
    switch (e->kind) {
        case K::Literal:
            if (e->lit < 0) {
                parens(2, [&] { os << e->lit.get_str(); });
            } else {
                os << e->lit.get_str();
            }
            break;
        case K::VarN: os << "n"; break;
        case K::VarK: os << "k"; break;
        case K::Add:
            parens(1, [&] {
                print_rec(os, e->a, 1);
                os << " + ";
                print_rec(os, e->b, 2);
            });
            break;
        case K::Sub:
            parens(1, [&] {
                print_rec(os, e->a, 1);
                os << " - ";
                print_rec(os, e->b, 2);
            });
            break;
        case K::Neg:
            parens(2, [&] {
                os << "-";
                print_rec(os, e->a, 3);
            });
            break;
        case K::Mul:
            parens(2, [&] {
                print_rec(os, e->a, 2);
                os << "*";
                print_rec(os, e->b, 3);
            });
            break;
        case K::Div:
            parens(2, [&] {
                print_rec(os, e->a, 2);
                os << "/";
                print_rec(os, e->b, 3);
            });
            break;
        case K::Pow:
            parens(4, [&] {
                print_rec(os, e->a, 5);
                os << "^";
                print_rec(os, e->b, 5);
            });
            break;
        case K::Binomial:
            os << "binomial(";
            print_rec(os, e->a, 0);
            os << ", ";
            print_rec(os, e->b, 0);
            os << ")";
            break;
        case K::Factorial:
            os << "factorial(";
            print_rec(os, e->a, 0);
            os << ")";
            break;
    }
}

std::string print_term(const ExprPtr& e) {
    std::ostringstream os;
    print_rec(os, e, 0);
    return os.str();
}

// ---- compilation to shift quotients ----

namespace {

PolyNK linform_poly(const LinFormNK& L, const Int& offset = Int(0)) {
    PolyNK p = PolyNK::monomial(Rat(L.a), 1, 0) + PolyNK::monomial(Rat(L.b), 0, 1);
    Rat c(L.c + offset);
    if (c != 0) p = p + PolyNK(c);
    return p;
}

// (L+1)(L+2)...(L+delta) for delta >= 0; inverse product for delta < 0
FactoredNK rising_product(const LinFormNK& L, long delta) {
    FactoredNK r(Rat(1));
    if (delta >= 0) {
        for (long i = 1; i <= delta; ++i) r.mul_factor(linform_poly(L, Int(i)), 1);
    } else {
        for (long i = 0; i < -delta; ++i) r.mul_factor(linform_poly(L, Int(-i)), -1);
    }
    return r;
}

struct Compiled {
    FactoredNK rat;  // rational-function factor of the term
    FactoredNK gn, gk;  // shift quotients of the special (non-rational) factor
    bool special = false;

    static Compiled from_rat(FactoredNK r) {
        Compiled c;
        c.rat = std::move(r);
        c.gn = FactoredNK(Rat(1));
        c.gk = FactoredNK(Rat(1));
        return c;
    }
};

Compiled compile_rec(const ExprPtr& e) {
    using K = TermExpr::Kind;
    switch (e->kind) {
        case K::Literal: return Compiled::from_rat(FactoredNK(e->lit));
        case K::VarN: {
            FactoredNK r(Rat(1));
            r.mul_factor(PolyNK::var_n(), 1);
            return Compiled::from_rat(std::move(r));
        }
        case K::VarK: {
            FactoredNK r(Rat(1));
            r.mul_factor(PolyNK::var_k(), 1);
            return Compiled::from_rat(std::move(r));
        }
        case K::Neg: {
            Compiled c = compile_rec(e->a);
            c.rat.coeff = -c.rat.coeff;
            return c;
        }
        case K::Add: case K::Sub: {
            Compiled x = compile_rec(e->a), y = compile_rec(e->b);
            if (x.special || y.special)
                throw NotHypergeometric(
                    "sums of special factors are not hypergeometric terms: " + print_term(e));
            RatNK sum = e->kind == K::Add ? x.rat.expand() + y.rat.expand()
                                          : x.rat.expand() - y.rat.expand();
            return Compiled::from_rat(factored_from(sum));
        }
        case K::Mul: case K::Div: {
            Compiled x = compile_rec(e->a), y = compile_rec(e->b);
            Compiled r;
            r.special = x.special || y.special;
            if (e->kind == K::Mul) {
                r.rat = x.rat * y.rat;
                r.gn = x.gn * y.gn;
                r.gk = x.gk * y.gk;
            } else {
                if (y.rat.is_zero()) throw std::domain_error("division by zero term");
                r.rat = x.rat / y.rat;
                r.gn = x.gn / y.gn;
                r.gk = x.gk / y.gk;
            }
            return r;
        }
        case K::Pow: {
            auto expc = as_rational_constant(e->b);
            if (expc) {
                if (!expc->get_num().fits_slong_p())
                    throw NotHypergeometric("exponent too large");
                long m = expc->get_num().get_si();
                Compiled x = compile_rec(e->a);
                Compiled r;
                r.special = x.special;
                r.rat = x.rat.powed(m);
                r.gn = x.gn.powed(m);
                r.gk = x.gk.powed(m);
                return r;
            }
            // c^(a n + b k + c0)
            Rat base = *as_rational_constant(e->a);
            if (base == 0) throw ZeroTerm();
            LinFormNK L = *as_integer_linear(e->b);
            Compiled r;
            r.special = true;
            r.rat = FactoredNK(Rat(1));
            r.gn = FactoredNK(rat_pow(base, L.a));
            r.gk = FactoredNK(rat_pow(base, L.b));
            return r;
        }
        case K::Factorial: {
            LinFormNK L = *as_integer_linear(e->a);
            Compiled r;
            r.special = true;
            r.rat = FactoredNK(Rat(1));
            r.gn = rising_product(L, L.a);
            r.gk = rising_product(L, L.b);
            return r;
        }
        case K::Binomial: {
            // binomial(A,B) = A! / (B! (A-B)!)
            LinFormNK A = *as_integer_linear(e->a);
            LinFormNK B = *as_integer_linear(e->b);
            LinFormNK AB{A.a - B.a, A.b - B.b, A.c - B.c};
            Compiled r;
            r.special = true;
            r.rat = FactoredNK(Rat(1));
            r.gn = rising_product(A, A.a) / (rising_product(B, B.a) * rising_product(AB, AB.a));
            r.gk = rising_product(A, A.b) / (rising_product(B, B.b) * rising_product(AB, AB.b));
            return r;
        }
    }
    throw std::logic_error("unreachable");
}

FactoredNK shell_quotient(const FactoredNK& rat, Var v) {
    // S_v(R)/R in factored form
    return rat.shifted(v, 1) / rat;
}

}  // namespace

HyperTerm compile_term(const ExprPtr& e) {
    Compiled c = compile_rec(e);
    if (c.rat.is_zero()) throw ZeroTerm();
    HyperTerm h;
    h.gn_f = (c.gn * shell_quotient(c.rat, Var::n)).refined();
    h.gk_f = (c.gk * shell_quotient(c.rat, Var::k)).refined();
    h.gn = h.gn_f.expand();
    h.gk = h.gk_f.expand();
    h.source = e;
    if (h.gn.is_zero() || h.gk.is_zero()) throw ZeroTerm();
    // compatibility: gn(n,k+1) gk(n,k) = gk(n+1,k) gn(n,k)
    if (!(shift(h.gn, Var::k, 1) * h.gk == shift(h.gk, Var::n, 1) * h.gn))
        throw IncompatibleQuotients();
    return h;
}

HyperTerm hyperterm_from_quotients(const RatNK& gn, const RatNK& gk) {
    if (gn.is_zero() || gk.is_zero()) throw ZeroTerm();
    if (!(shift(gn, Var::k, 1) * gk == shift(gk, Var::n, 1) * gn))
        throw IncompatibleQuotients();
    HyperTerm h;
    h.gn = gn;
    h.gk = gk;
    h.gn_f = (factored_from(gn)).refined();
    h.gk_f = (factored_from(gk)).refined();
    h.source = nullptr;
    return h;
}

// ---- evaluation ----

static std::optional<Rat> binom_value(const Rat& ar, const Rat& br) {
    if (!is_integer(ar) || !is_integer(br)) return std::nullopt;
    Int a = Int(ar.get_num()), b = Int(br.get_num());
    if (b < 0) return Rat(0);
    if (a >= 0 && b > a) return Rat(0);
    // product formula, valid for 0 <= b <= a and for a < 0 <= b
    Rat r(1);
    if (!b.fits_slong_p()) return std::nullopt;
    long bl = b.get_si();
    for (long i = 1; i <= bl; ++i) {
        Rat fac(a - b + i, i);
        fac.canonicalize();
        r *= fac;
    }
    return r;
}

std::optional<Rat> eval_expr(const ExprPtr& e, const Rat& n0, const Rat& k0) {
    using K = TermExpr::Kind;
    switch (e->kind) {
        case K::Literal: return e->lit;
        case K::VarN: return n0;
        case K::VarK: return k0;
        case K::Neg: {
            auto v = eval_expr(e->a, n0, k0);
            if (!v) return std::nullopt;
            return -*v;
        }
        case K::Add: case K::Sub: case K::Mul: {
            auto x = eval_expr(e->a, n0, k0), y = eval_expr(e->b, n0, k0);
            if (!x || !y) return std::nullopt;
            if (e->kind == K::Add) return *x + *y;
            if (e->kind == K::Sub) return *x - *y;
            return *x * *y;
        }
        case K::Div: {
            auto x = eval_expr(e->a, n0, k0), y = eval_expr(e->b, n0, k0);
            if (!x || !y || *y == 0) return std::nullopt;
            return *x / *y;
        }
        case K::Pow: {
            auto x = eval_expr(e->a, n0, k0), y = eval_expr(e->b, n0, k0);
            if (!x || !y || !is_integer(*y) || !y->get_num().fits_slong_p()) return std::nullopt;
            long m = y->get_num().get_si();
            if (*x == 0 && m < 0) return std::nullopt;
            return rat_pow(*x, m);
        }
        case K::Factorial: {
            auto x = eval_expr(e->a, n0, k0);
            if (!x || !is_integer(*x)) return std::nullopt;
            Int m = Int(x->get_num());
            if (m < 0) return std::nullopt;  // undefined
            if (!m.fits_slong_p()) return std::nullopt;
            Int r(1);
            for (long i = 2; i <= m.get_si(); ++i) r *= i;
            return Rat(r);
        }
        case K::Binomial: {
            auto x = eval_expr(e->a, n0, k0), y = eval_expr(e->b, n0, k0);
            if (!x || !y) return std::nullopt;
            return binom_value(*x, *y);
        }
    }
    return std::nullopt;
}

std::optional<Rat> eval_int(const HyperTerm& h, const Int& n0, const Int& k0) {
    if (!h.source) return std::nullopt;
    return eval_expr(h.source, Rat(n0), Rat(k0));
}

// ---- rational function parsing ----

static RatNK fold_ratnk(const ExprPtr& e) {
    using K = TermExpr::Kind;
    switch (e->kind) {
        case K::Literal: return RatNK(e->lit);
        case K::VarN: return RatNK(PolyNK::var_n());
        case K::VarK: return RatNK(PolyNK::var_k());
        case K::Neg: return -fold_ratnk(e->a);
        case K::Add: return fold_ratnk(e->a) + fold_ratnk(e->b);
        case K::Sub: return fold_ratnk(e->a) - fold_ratnk(e->b);
        case K::Mul: return fold_ratnk(e->a) * fold_ratnk(e->b);
        case K::Div: return fold_ratnk(e->a) / fold_ratnk(e->b);
        case K::Pow: {
            auto c = as_rational_constant(e->b);
            if (!c || !is_integer(*c) || !c->get_num().fits_slong_p())
                throw NotHypergeometric("exponent must be an integer constant");
            return pow(fold_ratnk(e->a), c->get_num().get_si());
        }
        default:
            throw NotHypergeometric("binomial/factorial are not allowed in rational functions");
    }
}

RatNK parse_ratnk(const std::string& text) { return fold_ratnk(parse_term(text)); }

}  // namespace prescope
