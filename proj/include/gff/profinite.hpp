// This file is part of gff.
//
// Licensed under the Apache License, Version 2.0 (see
// LICENSE or https://www.apache.org/licenses/LICENSE-2.0).

#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gff/abelian_group.hpp"
#include "gff/arith.hpp"
#include "gff/errors.hpp"

namespace gff {

/// The prime-to-p part of the extension degree n of q = p^n. Two constant
/// fields of the same characteristic give isomorphic torsion kernels exactly
/// when this number agrees.
struct DInvariant {
    Integer value = 1;

    bool operator==(const DInvariant& o) const { return value == o.value; }
    bool operator!=(const DInvariant& o) const { return value != o.value; }
};

inline DInvariant d_of(const PrimePower& q) {
    Integer d = q.n;
    while (d % q.p == 0) d /= q.p;
    return DInvariant{d};
}

/// p for p = 2 or p = 1 mod 4, and -p for p = 3 mod 4.
inline Integer p_star(const Integer& p) {
    if (!is_prime(p)) throw domain_error("p_star: " + p.get_str() + " is not prime");
    if (p == 2 || p % 4 == 1) return p;
    return -p;
}

/// The multiplicity pattern of Z/l^m factors at one prime l: every
/// multiplicity is zero or countably infinite, so the pattern is described by
/// a threshold (no threshold at l = p, where everything vanishes) plus an
/// isolated m = 1 point in the q = 3 mod 4 case at l = 2.
struct LProfile {
    std::optional<unsigned> threshold; // infinite for m >= threshold; nullopt: all zero
    bool isolated_m1 = false;          // additionally infinite at exactly m = 1

    bool operator==(const LProfile& o) const {
        return threshold == o.threshold && isolated_m1 == o.isolated_m1;
    }
};

/// ord_l(q^(l-1) - 1) for an odd prime l different from p, computed with
/// modular exponentiation at increasing modulus l^j; q^(l-1) itself is never
/// materialized. The level is capped at 64, far above anything reachable.
inline unsigned n_of_l(const PrimePower& q, const Integer& l) {
    if (!is_prime(l)) throw domain_error("n_of_l: " + l.get_str() + " is not prime");
    if (l == 2) throw domain_error("n_of_l: l = 2 has its own rule, use n_of_2");
    if (l == q.p) throw domain_error("n_of_l: l equals the characteristic");
    Integer e = l - 1;
    unsigned j = 0;
    Integer mod = 1;
    while (true) {
        mod *= l;
        if (powmod(q.q, e, mod) != 1) return j;
        ++j;
        if (j > 64) throw internal_error("n_of_l: level cap exceeded");
    }
}

/// The l = 2 pattern for odd characteristic: q = 1 mod 4 gives the threshold
/// ord_2(q-1); q = 3 mod 4 gives ord_2(q^2-1) plus the isolated m = 1 point.
inline std::pair<unsigned, bool> n_of_2(const PrimePower& q) {
    if (q.p == 2) throw domain_error("n_of_2: characteristic 2 has no 2-torsion factors");
    if (q.q % 4 == 1) return {ord_l(2, q.q - 1), false};
    return {ord_l(2, q.q * q.q - 1), true};
}

/// ord_l(p^(l-1) - 1) + ord_l(d): the closed form for the threshold at an odd
/// prime l != p.
inline unsigned n_of_l_via_formula(const Integer& p, const DInvariant& d, const Integer& l) {
    if (!is_prime(l) || l == 2) throw domain_error("n_of_l_via_formula: l must be an odd prime");
    if (l == p) throw domain_error("n_of_l_via_formula: l equals the characteristic");
    PrimePower base = PrimePower::make(p, 1);
    return n_of_l(base, l) + ord_l(l, d.value);
}

/// Lazily computed per-prime profile of the torsion kernel attached to a
/// constant field of size q. Copies share one memoization cache; the cache
/// is guarded for concurrent use.
class TqProfile {
public:
    explicit TqProfile(PrimePower q) : q_(std::move(q)), cache_(std::make_shared<Cache>()) {}

    const PrimePower& q() const { return q_; }

    LProfile at(const Integer& l) const {
        if (!is_prime(l)) throw domain_error("TqProfile: " + l.get_str() + " is not prime");
        {
            std::lock_guard<std::mutex> lock(cache_->mu);
            auto it = cache_->map.find(l);
            if (it != cache_->map.end()) return it->second;
        }
        LProfile prof = compute(l);
        std::lock_guard<std::mutex> lock(cache_->mu);
        cache_->map.emplace(l, prof);
        return prof;
    }

private:
    LProfile compute(const Integer& l) const {
        if (l == q_.p) return {std::nullopt, false};
        if (l == 2) {
            auto [n, isolated] = n_of_2(q_);
            return {n, isolated};
        }
        return {n_of_l(q_, l), false};
    }

    struct Cache {
        std::mutex mu;
        std::map<Integer, LProfile> map;
    };

    PrimePower q_;
    std::shared_ptr<Cache> cache_;
};

/// Whether the factor Z/l^m appears (with countably infinite multiplicity).
inline bool a_lm_infinite(const TqProfile& t, const Integer& l, unsigned m) {
    if (m < 1) throw domain_error("a_lm_infinite: m must be positive");
    LProfile prof = t.at(l);
    if (prof.isolated_m1 && m == 1) return true;
    return prof.threshold && m >= *prof.threshold;
}

/// Least m such that Z/l^m is a direct summand; defined for l != p.
inline unsigned s_l(const TqProfile& t, const Integer& l) {
    if (l == t.q().p)
        throw domain_error("s_l: no Z/" + l.get_str() + "^m summands at the characteristic");
    LProfile prof = t.at(l);
    if (prof.isolated_m1) return 1;
    if (!prof.threshold) throw internal_error("s_l: empty profile away from the characteristic");
    return *prof.threshold;
}

/// Recovers ord_l(d) from the observable s_l: zero in the exceptional
/// (l = 2, s = 1) branch, otherwise s_l - ord_l((p*)^(l-1) - 1).
inline unsigned recover_ord_l_d(unsigned s, const Integer& l, const Integer& p) {
    if (!is_prime(l)) throw domain_error("recover_ord_l_d: " + l.get_str() + " is not prime");
    if (l == p) throw domain_error("recover_ord_l_d: l equals the characteristic");
    if (l == 2 && s == 1) return 0;
    Integer ps = p_star(p);
    unsigned shift;
    if (l == 2) {
        shift = ord_l(2, ps - 1);
    } else {
        PrimePower base = PrimePower::make(p, 1);
        shift = n_of_l(base, l); // ord_l(p^(l-1)-1) = ord_l((p*)^(l-1)-1) for odd l
    }
    if (s < shift)
        throw internal_error("recover_ord_l_d: s_" + l.get_str() +
                             " below the base-field contribution; corrupted profile");
    return s - shift;
}

/// Torsion kernels are isomorphic exactly when the characteristics and the
/// d-invariants agree.
inline bool tq_isomorphic(const PrimePower& q1, const PrimePower& q2) {
    return q1.p == q2.p && d_of(q1) == d_of(q2);
}

/// The full isomorphism invariant of the abelianized absolute Galois group of
/// a global function field: characteristic, d-invariant, and the non-p part
/// of the degree-zero class group. The remaining building blocks (the
/// pro-p factor and the procyclic factor) are the same for every field and
/// carry no data.
struct GabInvariant {
    Integer p;
    DInvariant d;
    FiniteAbelianGroup cl_non_p;

    /// From the constant field and the full class group; the p-part of the
    /// class group is discarded, as it leaves no trace in the invariant.
    static GabInvariant from_field_data(const PrimePower& q, const FiniteAbelianGroup& cl) {
        return GabInvariant{q.p, d_of(q), cl.non_p_part(q.p)};
    }

    static GabInvariant make(const Integer& p, const DInvariant& d,
                             const FiniteAbelianGroup& cl_non_p) {
        if (!is_prime(p)) throw domain_error("GabInvariant: characteristic must be prime");
        if (gcd(d.value, p) != 1)
            throw domain_error("GabInvariant: d must be coprime to the characteristic");
        if (cl_non_p.order() % p == 0)
            throw domain_error("GabInvariant: class-group part must have order coprime to p");
        return GabInvariant{p, d, cl_non_p};
    }

    /// The class-group reconstruction: at the invariant level, the torsion of
    /// the quotient by the closed torsion subgroup is the stored non-p class
    /// group itself, so this is a documented accessor.
    const FiniteAbelianGroup& recovered_non_p_class_group() const { return cl_non_p; }

    bool operator==(const GabInvariant& o) const {
        return p == o.p && d == o.d && cl_non_p == o.cl_non_p;
    }
};

/// The three-condition isomorphism criterion.
inline bool gab_isomorphic(const GabInvariant& a, const GabInvariant& b) {
    return a.p == b.p && a.d == b.d && a.cl_non_p == b.cl_non_p;
}

/// Primes l <= l_max with threshold above 1 (so the least summand level sits
/// strictly above the generic value). l = 2 participates only when its
/// pattern has no isolated m = 1 point; the isolated case is reported
/// separately by the callers that display profiles.
inline std::vector<Integer> exceptional_scan(const PrimePower& q, const Integer& l_max) {
    if (l_max < 2) throw domain_error("exceptional_scan: bound must be at least 2");
    if (l_max > 10000000) throw size_error("exceptional_scan: bound exceeds the 1e7 cap");
    std::vector<Integer> out;
    TqProfile prof(q);
    for (const Integer& l : primes_up_to(l_max)) {
        if (l == q.p) continue;
        LProfile lp = prof.at(l);
        if (lp.isolated_m1) continue;
        if (lp.threshold && *lp.threshold > 1) out.push_back(l);
    }
    return out;
}

} // namespace gff
