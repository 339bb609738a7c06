// This file is part of gff.
//
// Licensed under the Apache License, Version 2.0 (see
// LICENSE or https://www.apache.org/licenses/LICENSE-2.0).

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "gff/errors.hpp"

namespace gff {

using Integer  = mpz_class;
using Rational = mpq_class;

inline Integer gcd(const Integer& a, const Integer& b) {
    Integer r;
    mpz_gcd(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return r;
}

inline Integer pow_integer(const Integer& base, unsigned long exp) {
    Integer r;
    mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), exp);
    return r;
}

/// base^exp mod m, m >= 2, exp >= 0.
inline Integer powmod(const Integer& base, const Integer& exp, const Integer& m) {
    Integer r;
    mpz_powm(r.get_mpz_t(), base.get_mpz_t(), exp.get_mpz_t(), m.get_mpz_t());
    return r;
}

/// Deterministic Miller-Rabin. The witness set {2,...,37} is known to be
/// exact below 3.3e24, far beyond anything this library handles.
inline bool is_prime(const Integer& n) {
    if (n < 2) return false;
    static const long small_primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
    for (long p : small_primes) {
        if (n == p) return true;
        if (n % p == 0) return false;
    }
    Integer d = n - 1;
    unsigned long s = mpz_scan1(d.get_mpz_t(), 0);
    d >>= s;
    for (long a : small_primes) {
        Integer x = powmod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (unsigned long i = 0; i + 1 < s; ++i) {
            x = x * x % n;
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

/// Factorization by trial division up to 1e6. The remaining cofactor must be
/// prime; anything harder is outside this library's scope and throws.
inline std::map<Integer, unsigned> factor(const Integer& n) {
    if (n < 1) throw domain_error("factor: argument must be positive");
    std::map<Integer, unsigned> out;
    Integer m = n;
    auto strip = [&](const Integer& p) {
        unsigned e = 0;
        while (m % p == 0) {
            m /= p;
            ++e;
        }
        if (e) out[p] = e;
    };
    strip(2);
    for (Integer p = 3; p <= 1000000 && p * p <= m; p += 2) strip(p);
    if (m > 1) {
        if (!is_prime(m))
            throw size_error("factor: cofactor " + m.get_str() +
                             " exceeds the trial-division bound and is not prime");
        out[m] += 1;
    }
    return out;
}

/// l-adic valuation of a nonzero integer. l must be prime.
inline unsigned ord_l(const Integer& l, const Integer& a) {
    if (!is_prime(l)) throw domain_error("ord_l: " + l.get_str() + " is not prime");
    if (a == 0) throw domain_error("ord_l: valuation of zero undefined");
    Integer q;
    return static_cast<unsigned>(mpz_remove(q.get_mpz_t(), a.get_mpz_t(), l.get_mpz_t()));
}

/// l-adic valuation of a nonzero rational: ord(num) - ord(den).
inline long ord_l_rational(const Integer& l, const Rational& a) {
    if (a == 0) throw domain_error("ord_l: valuation of zero undefined");
    Integer num(a.get_num()), den(a.get_den());
    return static_cast<long>(ord_l(l, num)) - static_cast<long>(ord_l(l, den));
}

/// phi(m) from the factorization of m.
inline Integer euler_phi(const Integer& m) {
    Integer phi = 1;
    for (const auto& [p, e] : factor(m)) phi *= pow_integer(p, e - 1) * (p - 1);
    return phi;
}

/// Least e >= 1 with a^e = 1 mod m. Requires gcd(a, m) = 1 and m >= 2.
inline Integer multiplicative_order(const Integer& a, const Integer& m) {
    if (m < 2) throw domain_error("multiplicative_order: modulus must be >= 2");
    if (gcd(a, m) != 1)
        throw domain_error("multiplicative_order: gcd(" + a.get_str() + ", " + m.get_str() +
                           ") != 1");
    Integer order = euler_phi(m);
    for (const auto& [p, e] : factor(order)) {
        (void)e;
        while (order % p == 0 && powmod(a, order / p, m) == 1) order /= p;
    }
    return order;
}

/// One lifting-the-exponent step: given ord_l(a-1) = n with n >= 1 and
/// (l != 2 or n >= 2), returns ord_l(a^l - 1), which equals n + 1.
inline unsigned lte_step(const Integer& a, const Integer& l) {
    if (!is_prime(l)) throw domain_error("lte_step: " + l.get_str() + " is not prime");
    if (a == 1) throw domain_error("lte_step: a = 1 has no finite valuation for a - 1");
    Integer am1 = a - 1;
    if (am1 % l != 0)
        throw domain_error("lte_step: requires ord_l(a-1) >= 1, i.e. a = 1 mod l");
    unsigned n = ord_l(l, am1);
    if (l == 2 && n == 1)
        throw domain_error("lte_step: excluded case l = 2 with ord_2(a-1) = 1");
    if (!l.fits_ulong_p()) throw size_error("lte_step: exponent l does not fit a machine word");
    Integer al = pow_integer(a, l.get_ui());
    return ord_l(l, al - 1);
}

/// A prime-power constant field size q = p^n.
struct PrimePower {
    Integer p;
    unsigned n = 1;
    Integer q; // cached p^n

    static PrimePower make(const Integer& p, unsigned n) {
        if (n < 1) throw domain_error("PrimePower: exponent must be positive");
        if (!is_prime(p)) throw domain_error("PrimePower: " + p.get_str() + " is not prime");
        PrimePower pp;
        pp.p = p;
        pp.n = n;
        pp.q = pow_integer(p, n);
        return pp;
    }

    /// Recognizes q as p^n. Throws if q is not a prime power.
    static PrimePower from_value(const Integer& q) {
        if (q < 2) throw domain_error("PrimePower: " + q.get_str() + " is not a prime power");
        if (is_prime(q)) return make(q, 1);
        unsigned bits = static_cast<unsigned>(mpz_sizeinbase(q.get_mpz_t(), 2));
        for (unsigned k = bits; k >= 2; --k) {
            Integer root;
            if (mpz_root(root.get_mpz_t(), q.get_mpz_t(), k) != 0 && is_prime(root))
                return make(root, k);
        }
        throw domain_error("PrimePower: " + q.get_str() + " is not a prime power");
    }

    /// Accepts either a bare integer ("64") or an explicit "p^n" literal.
    static PrimePower parse(const std::string& text) {
        auto caret = text.find('^');
        if (caret == std::string::npos) return from_value(Integer(text));
        Integer p(text.substr(0, caret));
        unsigned long n = std::stoul(text.substr(caret + 1));
        return make(p, static_cast<unsigned>(n));
    }

    bool operator==(const PrimePower& o) const { return p == o.p && n == o.n; }

    std::string to_string() const { return p.get_str() + "^" + std::to_string(n); }
};

/// Primes in [2, bound], ascending.
inline std::vector<Integer> primes_up_to(const Integer& bound) {
    std::vector<Integer> out;
    if (bound >= 2) out.push_back(2);
    for (Integer l = 3; l <= bound; l += 2)
        if (is_prime(l)) out.push_back(l);
    return out;
}

} // namespace gff
