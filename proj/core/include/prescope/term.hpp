#pragma once
#include <prescope/factored.hpp>
#include <prescope/poly_nk.hpp>

#include <memory>
#include <optional>
#include <string>

namespace prescope {

struct SyntaxError : std::runtime_error {
    size_t pos;
    SyntaxError(const std::string& m, size_t p)
        : std::runtime_error(m + " at position " + std::to_string(p)), pos(p) {}
};
struct NonIntegerLinearArgument : std::runtime_error {
    explicit NonIntegerLinearArgument(const std::string& m) : std::runtime_error(m) {}
};
struct ZeroTerm : std::runtime_error {
    ZeroTerm() : std::runtime_error("expression is identically zero") {}
};
struct NotHypergeometric : std::runtime_error {
    explicit NotHypergeometric(const std::string& m) : std::runtime_error(m) {}
};
struct IncompatibleQuotients : std::runtime_error {
    IncompatibleQuotients()
        : std::runtime_error("shift quotients fail the mixed-shift compatibility identity") {}
};

struct TermExpr;
using ExprPtr = std::shared_ptr<const TermExpr>;

struct TermExpr {
    enum class Kind { Literal, VarN, VarK, Add, Sub, Neg, Mul, Div, Pow, Binomial, Factorial };
    Kind kind;
    Rat lit;       // Literal
    ExprPtr a, b;  // children; Pow: a^b
};

ExprPtr parse_term(const std::string& text);
std::string print_term(const ExprPtr& e);

// integer-linear form a*n + b*k + c with integer coefficients
struct LinFormNK {
    long a = 0, b = 0;
    Int c{0};
};
std::optional<LinFormNK> as_integer_linear(const ExprPtr& e);
std::optional<Rat> as_rational_constant(const ExprPtr& e);

// Hypergeometric term: compatible shift quotients plus an exact evaluator
// when built from an expression.
struct HyperTerm {
    FactoredNK gn_f, gk_f;
    RatNK gn, gk;
    ExprPtr source;  // null when built from raw quotients

    bool has_eval() const { return source != nullptr; }
};

HyperTerm compile_term(const ExprPtr& e);
inline HyperTerm compile_term(const std::string& text) { return compile_term(parse_term(text)); }
HyperTerm hyperterm_from_quotients(const RatNK& gn, const RatNK& gk);

std::optional<Rat> eval_expr(const ExprPtr& e, const Rat& n0, const Rat& k0);
std::optional<Rat> eval_int(const HyperTerm& h, const Int& n0, const Int& k0);

// parser reuse for plain rational functions (binomial/factorial rejected)
RatNK parse_ratnk(const std::string& text);

}  // namespace prescope
