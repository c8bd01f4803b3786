#pragma once
#include <gmpxx.h>
#include <optional>
#include <stdexcept>
#include <string>

namespace prescope {

using Int = mpz_class;
using Rat = mpq_class;  // always canonical: gcd(|num|,den)=1, den>0

inline Rat make_rat(long num, long den = 1) {
    Rat q(num, den);
    q.canonicalize();
    return q;
}

inline bool is_integer(const Rat& q) { return q.get_den() == 1; }

// floor(q) as an integer
inline Int rat_floor(const Rat& q) {
    Int f;
    mpz_fdiv_q(f.get_mpz_t(), q.get_num().get_mpz_t(), q.get_den().get_mpz_t());
    return f;
}

inline Rat rat_pow(const Rat& base, long e) {
    if (e == 0) return Rat(1);
    if (base == 0) {
        if (e < 0) throw std::domain_error("rat_pow: 0^negative");
        return Rat(0);
    }
    Rat b = e < 0 ? Rat(base.get_den(), base.get_num()) : base;
    b.canonicalize();
    unsigned long m = static_cast<unsigned long>(e < 0 ? -e : e);
    Rat r;
    mpz_pow_ui(r.get_num_mpz_t(), b.get_num().get_mpz_t(), m);
    mpz_pow_ui(r.get_den_mpz_t(), b.get_den().get_mpz_t(), m);
    r.canonicalize();
    return r;
}

inline std::string rat_str(const Rat& q) { return q.get_str(); }

inline Int int_pow(const Int& base, unsigned long e) {
    Int r;
    mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
    return r;
}

}  // namespace prescope
