// This file is part of gff.
//
// Licensed under the Apache License, Version 2.0 (see
// LICENSE or https://www.apache.org/licenses/LICENSE-2.0).

#pragma once

#include <array>
#include <cstdint>
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
#include "gff/finite_field.hpp"

namespace gff {

constexpr uint64_t kCountingCap = uint64_t(1) << 24; // largest enumerable F_{q^i}

enum class CurveFamily {
    weierstrass_odd,
    weierstrass_char2,
    hyperelliptic_odd,
    artin_schreier_char2,
    plane_projective,
};

inline std::string family_name(CurveFamily f) {
    switch (f) {
        case CurveFamily::weierstrass_odd: return "weierstrass_odd";
        case CurveFamily::weierstrass_char2: return "weierstrass_char2";
        case CurveFamily::hyperelliptic_odd: return "hyperelliptic_odd";
        case CurveFamily::artin_schreier_char2: return "artin_schreier_char2";
        case CurveFamily::plane_projective: return "plane_projective";
    }
    throw internal_error("family_name: unknown family");
}

inline CurveFamily family_from_name(const std::string& s) {
    if (s == "weierstrass_odd") return CurveFamily::weierstrass_odd;
    if (s == "weierstrass_char2") return CurveFamily::weierstrass_char2;
    if (s == "hyperelliptic_odd") return CurveFamily::hyperelliptic_odd;
    if (s == "artin_schreier_char2") return CurveFamily::artin_schreier_char2;
    if (s == "plane_projective") return CurveFamily::plane_projective;
    throw domain_error("unknown curve family: " + s);
}

/// One monomial c x^i y^j z^k of a homogeneous plane model.
struct PlaneTerm {
    int ex = 0, ey = 0, ez = 0;
    FqElement c;
};

/// A curve over F_q in one of the supported model families, together with its
/// genus. Instances are produced by the make_* factories, which validate the
/// smoothness preconditions and the genus.
struct CurveModel {
    PrimePower base;
    Field field; // F_q
    CurveFamily family = CurveFamily::weierstrass_odd;
    int genus = 0;

    std::vector<FqElement> a_inv;        // weierstrass: a1, a2, a3, a4, a6
    std::optional<FqPolynomial> hyper_f; // y^2 = f
    std::optional<FqPolynomial> as_num;  // y^2 + y = num/den
    std::optional<FqPolynomial> as_den;
    int plane_degree = 0;
    std::vector<PlaneTerm> plane_terms;
};

namespace detail {

inline Field field_of(const PrimePower& q) {
    if (!q.p.fits_slong_p()) throw size_error("curve base field characteristic too large");
    return extension_field(q.p.get_si(), static_cast<int>(q.n));
}

/// b-invariants and discriminant of a general Weierstrass quintuple, valid in
/// any characteristic.
inline FqElement weierstrass_discriminant(const std::vector<FqElement>& a) {
    const FqElement &a1 = a[0], &a2 = a[1], &a3 = a[2], &a4 = a[3], &a6 = a[4];
    auto k = [&](int64_t v) { return FqElement::from_int(a1.field(), v); };
    FqElement b2 = a1 * a1 + k(4) * a2;
    FqElement b4 = k(2) * a4 + a1 * a3;
    FqElement b6 = a3 * a3 + k(4) * a6;
    FqElement b8 = a1 * a1 * a6 + k(4) * a2 * a6 - a1 * a3 * a4 + a2 * (a3 * a3) - a4 * a4;
    return -(b2 * b2 * b8) - k(8) * (b4 * b4 * b4) - k(27) * (b6 * b6) + k(9) * b2 * b4 * b6;
}

/// Bit-packed arithmetic on F_{2^m} element encodings, m <= 32: carryless
/// multiplication with shift-reduce against the modulus bits. The counting
/// loops run on encodings directly, which avoids coefficient vectors in the
/// inner loops.
struct Char2Ops {
    int m = 0;
    uint64_t mod_bits = 0; // modulus encoding including the t^m bit

    explicit Char2Ops(const Field& F) : m(F->m) {
        if (F->p != 2 || F->m > 32) throw internal_error("Char2Ops: unsupported field");
        for (int i = 0; i <= F->m; ++i)
            if (F->modulus[i]) mod_bits |= uint64_t(1) << i;
    }

    uint64_t mul(uint64_t a, uint64_t b) const {
        uint64_t acc = 0;
        const uint64_t top = uint64_t(1) << m;
        while (b) {
            if (b & 1) acc ^= a;
            b >>= 1;
            a <<= 1;
            if (a & top) a ^= mod_bits;
        }
        return acc;
    }

    uint64_t pow(uint64_t a, uint64_t e) const {
        uint64_t acc = 1;
        while (e) {
            if (e & 1) acc = mul(acc, a);
            a = mul(a, a);
            e >>= 1;
        }
        return acc;
    }

    /// Horner evaluation of a polynomial given by coefficient encodings.
    uint64_t eval(const std::vector<uint64_t>& coeffs, uint64_t x) const {
        uint64_t acc = 0;
        for (size_t i = coeffs.size(); i-- > 0;) acc = mul(acc, x) ^ coeffs[i];
        return acc;
    }

    /// In-place inversion of a batch of nonzero elements: prefix products,
    /// one inversion, backward sweep.
    void batch_invert(std::vector<uint64_t>& xs, uint64_t q_size) const {
        if (xs.empty()) return;
        std::vector<uint64_t> prefix(xs.size());
        uint64_t run = 1;
        for (size_t i = 0; i < xs.size(); ++i) {
            prefix[i] = run;
            run = mul(run, xs[i]);
        }
        uint64_t inv_run = pow(run, q_size - 2);
        for (size_t i = xs.size(); i-- > 0;) {
            uint64_t v = mul(inv_run, prefix[i]);
            inv_run = mul(inv_run, xs[i]);
            xs[i] = v;
        }
    }
};

inline std::vector<uint64_t> poly_encodings(const FqPolynomial& f) {
    std::vector<uint64_t> out;
    out.reserve(f.coeffs().size());
    for (const auto& c : f.coeffs()) out.push_back(c.encode());
    return out;
}

/// Allocation-free digit arithmetic on F_{p^m} for odd p, m <= 32, used by
/// the odd-characteristic counting loops. Buffers live on the stack.
struct OddOps {
    int m = 0;
    int64_t p = 0;
    std::array<int64_t, 33> mod{};

    explicit OddOps(const Field& F) : m(F->m), p(F->p) {
        if (F->m > 32) throw internal_error("OddOps: extension degree too large");
        if (F->p > (int64_t(1) << 25)) throw internal_error("OddOps: characteristic too large");
        for (int i = 0; i <= F->m; ++i) mod[i] = F->modulus[i];
    }

    void decode(uint64_t v, int64_t* out) const {
        for (int i = 0; i < m; ++i) {
            out[i] = static_cast<int64_t>(v % static_cast<uint64_t>(p));
            v /= static_cast<uint64_t>(p);
        }
    }

    uint64_t encode(const int64_t* a) const {
        uint64_t v = 0;
        for (int i = m; i-- > 0;) v = v * static_cast<uint64_t>(p) + static_cast<uint64_t>(a[i]);
        return v;
    }

    void mul(const int64_t* a, const int64_t* b, int64_t* out) const {
        // raw accumulation with deferred reduction: every intermediate stays
        // below m * p^2 <= 2^53 in magnitude, well within int64
        int64_t prod[65] = {0};
        for (int i = 0; i < m; ++i) {
            if (!a[i]) continue;
            for (int j = 0; j < m; ++j) prod[i + j] += a[i] * b[j];
        }
        for (int d = 2 * m - 2; d >= m; --d) {
            int64_t lead = prod[d] % p;
            if (lead < 0) lead += p;
            if (!lead) continue;
            for (int i = 0; i < m; ++i) prod[d - m + i] -= lead * mod[i];
        }
        for (int i = 0; i < m; ++i) {
            int64_t v = prod[i] % p;
            out[i] = v < 0 ? v + p : v;
        }
    }

    using Digits = std::array<int64_t, 32>;

    std::vector<Digits> digits_of(const std::vector<uint64_t>& encodings) const {
        std::vector<Digits> out(encodings.size());
        for (size_t i = 0; i < encodings.size(); ++i) {
            out[i].fill(0);
            decode(encodings[i], out[i].data());
        }
        return out;
    }

    /// Horner evaluation; x given as digits, result as an encoding.
    uint64_t eval(const std::vector<Digits>& coeffs, const int64_t* x) const {
        int64_t acc[32] = {0}, tmp[32];
        for (size_t i = coeffs.size(); i-- > 0;) {
            mul(acc, x, tmp);
            for (int j = 0; j < m; ++j) {
                acc[j] = tmp[j] + coeffs[i][j];
                if (acc[j] >= p) acc[j] -= p;
            }
        }
        return encode(acc);
    }
};

/// Per-field lookup tables used by the counting loops; built once per field.
/// The solve tables (artin, sqrt_tab) are only materialized for fields small
/// enough that something enumerates solutions, not just counts them.
struct CountTables {
    std::vector<int8_t> chi;        // odd characteristic: quadratic character by encoding
    std::vector<int8_t> trace;      // char 2: absolute trace by encoding
    std::vector<uint64_t> artin;    // char 2: some z with z^2+z = w, or UINT64_MAX
    std::vector<uint64_t> sqrt_tab; // odd: some y with y^2 = w, or UINT64_MAX
};

constexpr uint64_t kSolveTableCap = uint64_t(1) << 20;

inline std::shared_ptr<const CountTables> count_tables(const Field& F) {
    static std::map<const FqField*, std::shared_ptr<const CountTables>> cache;
    static std::mutex mu;
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(F.get());
        if (it != cache.end()) return it->second;
    }
    auto t = std::make_shared<CountTables>();
    const uint64_t Q = F->size;
    if (F->p == 2) {
        auto basis = trace_of_basis(F);
        t->trace.assign(Q, 0);
        for (uint64_t v = 0; v < Q; ++v) {
            uint64_t rest = v;
            int64_t acc = 0;
            for (int j = 0; j < F->m; ++j) {
                acc ^= static_cast<int64_t>(rest % 2) * basis[j];
                rest /= 2;
            }
            t->trace[v] = static_cast<int8_t>(acc & 1);
        }
        if (Q <= kSolveTableCap) {
            Char2Ops ops(F);
            t->artin.assign(Q, UINT64_MAX);
            for (uint64_t v = 0; v < Q; ++v) {
                uint64_t w = ops.mul(v, v) ^ v;
                if (t->artin[w] == UINT64_MAX) t->artin[w] = v;
            }
        }
    } else {
        t->chi.assign(Q, -1);
        t->chi[0] = 0;
        bool solve = Q <= kSolveTableCap;
        if (solve) t->sqrt_tab.assign(Q, UINT64_MAX);
        OddOps ops(F);
        int64_t digits[32], sq[32];
        for (uint64_t v = 0; v < Q; ++v) {
            ops.decode(v, digits);
            ops.mul(digits, digits, sq);
            uint64_t w = ops.encode(sq);
            if (w) t->chi[w] = 1;
            if (solve && t->sqrt_tab[w] == UINT64_MAX) t->sqrt_tab[w] = v;
        }
    }
    std::lock_guard<std::mutex> lock(mu);
    auto [it, ins] = cache.emplace(F.get(), std::move(t));
    return it->second;
}

/// Local analysis of y^2 + y = f at one point of the projective line: after
/// substitutions y -> y + g that clear even-order poles (square roots are
/// unique in characteristic 2), the point is either ramified under an odd
/// remaining pole order, or carries a regular value whose absolute trace
/// decides splitting.
struct AsLocal {
    bool ramified = false;
    unsigned pole_order = 0;
    FqElement value;
};

inline AsLocal as_reduce_laurent(std::vector<FqElement> c, const Field& F) {
    // c[i] is the coefficient of w^(i - d0), d0 = c.size() - 1
    const int d0 = static_cast<int>(c.size()) - 1;
    while (true) {
        int d = 0;
        for (int k = d0; k >= 1; --k)
            if (!c[d0 - k].is_zero()) {
                d = k;
                break;
            }
        if (d == 0) return {false, 0, c[d0]};
        if (d % 2 == 1) return {true, static_cast<unsigned>(d), FqElement::zero(F)};
        FqElement s = c[d0 - d].sqrt_char2();
        c[d0 - d] = FqElement::zero(F);
        c[d0 - d / 2] = c[d0 - d / 2] + s;
    }
}

/// Truncated power-series inverse of v (v(0) != 0) times u, to `terms`
/// coefficients.
inline std::vector<FqElement> series_quotient(const FqPolynomial& u, const FqPolynomial& v,
                                              int terms, const Field& F) {
    std::vector<FqElement> inv(terms, FqElement::zero(F));
    FqElement v0inv = v.coeff(0).inverse();
    inv[0] = v0inv;
    for (int k = 1; k < terms; ++k) {
        FqElement acc = FqElement::zero(F);
        for (int i = 1; i <= k; ++i) acc = acc + v.coeff(i) * inv[k - i];
        inv[k] = -(acc * v0inv);
    }
    std::vector<FqElement> out(terms, FqElement::zero(F));
    for (int k = 0; k < terms; ++k) {
        FqElement acc = FqElement::zero(F);
        for (int i = 0; i <= k; ++i) acc = acc + u.coeff(i) * inv[k - i];
        out[k] = acc;
    }
    return out;
}

/// Local data of u/v at a finite point x0 with v(x0) = 0 (and gcd(u,v) = 1).
inline AsLocal as_local_at(const FqPolynomial& u, const FqPolynomial& v, const FqElement& x0) {
    const Field& F = u.field();
    FqPolynomial us = u.taylor_shift(x0);
    FqPolynomial vs = v.taylor_shift(x0);
    int dv = 0;
    while (vs.coeff(dv).is_zero()) ++dv;
    if (dv == 0) throw internal_error("as_local_at: not a pole");
    if (us.coeff(0).is_zero()) throw internal_error("as_local_at: common zero, fraction not reduced");
    std::vector<FqElement> v1(vs.coeffs().begin() + dv, vs.coeffs().end());
    auto series = series_quotient(us, FqPolynomial(F, v1), dv + 1, F);
    return as_reduce_laurent(std::move(series), F);
}

/// Local data of u/v at infinity (x -> 1/x).
inline AsLocal as_local_at_infinity(const FqPolynomial& u, const FqPolynomial& v) {
    const Field& F = u.field();
    int e = u.degree() - v.degree();
    if (e <= 0) {
        FqElement value = e < 0 ? FqElement::zero(F) : u.leading() / v.leading();
        return {false, 0, value};
    }
    auto series = series_quotient(u.reversed(), v.reversed(), e + 1, F);
    return as_reduce_laurent(std::move(series), F);
}

} // namespace detail

// ---------------------------------------------------------------------------
// model factories

inline CurveModel make_weierstrass(const PrimePower& q, const std::array<FqElement, 5>& a) {
    CurveModel c;
    c.base = q;
    c.field = detail::field_of(q);
    for (const auto& e : a)
        if (e.field() != c.field) throw domain_error("make_weierstrass: coefficient field mismatch");
    c.a_inv.assign(a.begin(), a.end());
    if (detail::weierstrass_discriminant(c.a_inv).is_zero())
        throw structure_error("make_weierstrass: singular model (discriminant zero)");
    c.family = q.p == 2 ? CurveFamily::weierstrass_char2 : CurveFamily::weierstrass_odd;
    c.genus = 1;
    return c;
}

inline CurveModel make_hyperelliptic(const PrimePower& q, const FqPolynomial& f) {
    if (q.p == 2) throw domain_error("make_hyperelliptic: needs odd characteristic");
    CurveModel c;
    c.base = q;
    c.field = detail::field_of(q);
    if (f.field() != c.field) throw domain_error("make_hyperelliptic: coefficient field mismatch");
    if (f.degree() < 1) throw structure_error("make_hyperelliptic: constant right-hand side");
    if (!is_squarefree(f))
        throw structure_error("make_hyperelliptic: right-hand side is not squarefree");
    c.hyper_f = f;
    c.family = CurveFamily::hyperelliptic_odd;
    c.genus = (f.degree() - 1) / 2;
    return c;
}

inline CurveModel make_artin_schreier(const PrimePower& q, const FqPolynomial& num,
                                      const FqPolynomial& den) {
    if (q.p != 2) throw domain_error("make_artin_schreier: needs characteristic 2");
    CurveModel c;
    c.base = q;
    c.field = detail::field_of(q);
    if (num.field() != c.field || den.field() != c.field)
        throw domain_error("make_artin_schreier: coefficient field mismatch");
    if (den.is_zero()) throw structure_error("make_artin_schreier: zero denominator");
    if (!poly_gcd(num, den).is_constant())
        throw structure_error("make_artin_schreier: fraction not in lowest terms");
    c.as_num = num;
    c.as_den = den;
    c.family = CurveFamily::artin_schreier_char2;

    // conductor over the base field: reduced odd pole orders at the places of
    // the denominator and at infinity give 2g - 2 = -4 + sum (d_v + 1) deg v
    Integer cond = 0;
    int dd = den.degree();
    for (int k = 1; k <= std::max(dd, 1) && k <= dd; ++k) {
        Integer ext = pow_integer(q.q, k);
        if (ext > kCountingCap)
            throw size_error("make_artin_schreier: denominator splits beyond the counting cap");
        Field FK = extension_field(c.field->p, c.field->m * k);
        FieldEmbedding emb(c.field, FK);
        FqPolynomial uk = emb.map(num), vk = emb.map(den);
        for (const FqElement& r : poly_roots(vk)) {
            bool minimal = true;
            for (int j = 1; j < k; ++j) {
                if (k % j != 0) continue;
                if (r.pow(pow_integer(q.q, j)) == r) {
                    minimal = false;
                    break;
                }
            }
            if (!minimal) continue;
            auto local = detail::as_local_at(uk, vk, r);
            if (local.ramified) cond += local.pole_order + 1;
        }
    }
    auto inf = detail::as_local_at_infinity(num, den);
    if (inf.ramified) cond += inf.pole_order + 1;

    if (cond == 0)
        throw structure_error(
            "make_artin_schreier: cover is unramified everywhere, not a function field");
    if (cond % 2 != 0 || cond < 2)
        throw internal_error("make_artin_schreier: impossible conductor " + cond.get_str());
    Integer genus = (cond - 2) / 2;
    c.genus = static_cast<int>(genus.get_si());
    return c;
}

inline CurveModel make_plane(const PrimePower& q, int degree, std::vector<PlaneTerm> terms);

// ---------------------------------------------------------------------------
// point counting

inline uint64_t count_points(const CurveModel& c, unsigned i) {
    if (i < 1) throw domain_error("count_points: extension degree must be >= 1");
    Integer ext = pow_integer(c.base.q, i);
    if (ext > kCountingCap) throw size_error("count_points: q^i exceeds the 2^24 cap");
    Field FQ = extension_field(c.field->p, c.field->m * static_cast<int>(i));
    FieldEmbedding emb(c.field, FQ);
    const uint64_t Q = FQ->size;
    auto tables = detail::count_tables(FQ);

    switch (c.family) {
        case CurveFamily::weierstrass_odd: {
            detail::OddOps ops(FQ);
            std::vector<uint64_t> a;
            for (const auto& e : c.a_inv) a.push_back(emb.map(e).encode());
            // fiber size is 1 + chi((a1 x + a3)^2 + 4(x^3 + a2 x^2 + a4 x + a6))
            auto h_poly = ops.digits_of({a[2], a[0]});
            auto v_poly = ops.digits_of({a[4], a[3], a[1], 1});
            uint64_t n = 1; // infinity
            int64_t x[32], hbuf[32], four[32] = {0};
            four[0] = 4 % FQ->p;
            for (uint64_t xv = 0; xv < Q; ++xv) {
                ops.decode(xv, x);
                uint64_t hv = ops.eval(h_poly, x);
                uint64_t vv = ops.eval(v_poly, x);
                ops.decode(hv, hbuf);
                int64_t hsq[32], vbuf[32], fourv[32];
                ops.mul(hbuf, hbuf, hsq);
                ops.decode(vv, vbuf);
                ops.mul(four, vbuf, fourv);
                int64_t disc[32];
                for (int j = 0; j < ops.m; ++j) {
                    disc[j] = hsq[j] + fourv[j];
                    if (disc[j] >= ops.p) disc[j] -= ops.p;
                }
                n += 1 + tables->chi[ops.encode(disc)];
            }
            return n;
        }
        case CurveFamily::weierstrass_char2: {
            detail::Char2Ops ops(FQ);
            std::vector<uint64_t> a;
            for (const auto& e : c.a_inv) a.push_back(emb.map(e).encode());
            uint64_t n = 1;
            const uint64_t block = 4096;
            std::vector<uint64_t> hs, vs;
            auto flush = [&] {
                ops.batch_invert(hs, Q);
                for (size_t k = 0; k < hs.size(); ++k) {
                    uint64_t ih = hs[k];
                    uint64_t w = ops.mul(vs[k], ops.mul(ih, ih));
                    n += tables->trace[w] == 0 ? 2 : 0;
                }
                hs.clear();
                vs.clear();
            };
            for (uint64_t x = 0; x < Q; ++x) {
                uint64_t h = ops.mul(a[0], x) ^ a[2];
                uint64_t v = ops.mul(ops.mul(x ^ a[1], x) ^ a[3], x) ^ a[4];
                if (h == 0) {
                    n += 1; // y^2 = v has exactly one root
                } else {
                    hs.push_back(h);
                    vs.push_back(v);
                    if (hs.size() == block) flush();
                }
            }
            flush();
            return n;
        }
        case CurveFamily::hyperelliptic_odd: {
            detail::OddOps ops(FQ);
            auto fc = ops.digits_of(detail::poly_encodings(emb.map(*c.hyper_f)));
            uint64_t n = 0;
            int64_t x[32];
            for (uint64_t xv = 0; xv < Q; ++xv) {
                ops.decode(xv, x);
                n += 1 + tables->chi[ops.eval(fc, x)];
            }
            // smooth-model points above x = infinity, recomputed per
            // extension: squareness of the leading coefficient varies with Q
            int d = c.hyper_f->degree();
            if (d % 2 == 1)
                n += 1;
            else
                n += tables->chi[emb.map(c.hyper_f->leading()).encode()] == 1 ? 2 : 0;
            return n;
        }
        case CurveFamily::artin_schreier_char2: {
            detail::Char2Ops ops(FQ);
            FqPolynomial u = emb.map(*c.as_num), v = emb.map(*c.as_den);
            auto uc = detail::poly_encodings(u), vc = detail::poly_encodings(v);
            uint64_t n = 0;
            const uint64_t block = 4096;
            std::vector<uint64_t> us, ds;
            auto flush = [&] {
                ops.batch_invert(ds, Q);
                for (size_t k = 0; k < ds.size(); ++k)
                    n += tables->trace[ops.mul(us[k], ds[k])] == 0 ? 2 : 0;
                us.clear();
                ds.clear();
            };
            for (uint64_t x = 0; x < Q; ++x) {
                uint64_t dv = ops.eval(vc, x);
                if (dv != 0) {
                    us.push_back(ops.eval(uc, x));
                    ds.push_back(dv);
                    if (ds.size() == block) flush();
                } else {
                    auto local = detail::as_local_at(u, v, FqElement::decode(FQ, x));
                    if (local.ramified)
                        n += 1;
                    else
                        n += tables->trace[local.value.encode()] == 0 ? 2 : 0;
                }
            }
            flush();
            auto inf = detail::as_local_at_infinity(u, v);
            if (inf.ramified)
                n += 1;
            else
                n += tables->trace[inf.value.encode()] == 0 ? 2 : 0;
            return n;
        }
        case CurveFamily::plane_projective: {
            std::vector<PlaneTerm> terms;
            terms.reserve(c.plane_terms.size());
            for (const auto& t : c.plane_terms)
                terms.push_back({t.ex, t.ey, t.ez, emb.map(t.c)});
            auto eval = [&](const FqElement& x, const FqElement& y, const FqElement& z) {
                FqElement acc = FqElement::zero(FQ);
                for (const auto& t : terms)
                    acc = acc + t.c * x.pow(t.ex) * y.pow(t.ey) * z.pow(t.ez);
                return acc;
            };
            uint64_t n = 0;
            FqElement one = FqElement::one(FQ), zero = FqElement::zero(FQ);
            for (uint64_t yv = 0; yv < Q; ++yv)
                for (uint64_t zv = 0; zv < Q; ++zv)
                    if (eval(one, FqElement::decode(FQ, yv), FqElement::decode(FQ, zv)).is_zero())
                        ++n;
            for (uint64_t zv = 0; zv < Q; ++zv)
                if (eval(zero, one, FqElement::decode(FQ, zv)).is_zero()) ++n;
            if (eval(zero, zero, one).is_zero()) ++n;
            return n;
        }
    }
    throw internal_error("count_points: unknown family");
}

inline CurveModel make_plane(const PrimePower& q, int degree, std::vector<PlaneTerm> terms) {
    CurveModel c;
    c.base = q;
    c.field = detail::field_of(q);
    if (degree < 1) throw domain_error("make_plane: degree must be positive");
    for (const auto& t : terms) {
        if (t.ex < 0 || t.ey < 0 || t.ez < 0 || t.ex + t.ey + t.ez != degree)
            throw domain_error("make_plane: non-homogeneous term");
        if (t.c.field() != c.field) throw domain_error("make_plane: coefficient field mismatch");
    }
    c.plane_degree = degree;
    c.plane_terms = std::move(terms);
    c.family = CurveFamily::plane_projective;
    c.genus = (degree - 1) * (degree - 2) / 2;

    // smoothness: no projective point over F_{q^i}, i <= 2g (at least 1),
    // where the form and all three partials vanish
    int scan = std::max(1, 2 * c.genus);
    for (int i = 1; i <= scan; ++i) {
        Integer ext = pow_integer(q.q, i);
        if (ext > kCountingCap)
            throw size_error("make_plane: smoothness scan exceeds the counting cap");
        Field FQ = extension_field(c.field->p, c.field->m * i);
        FieldEmbedding emb(c.field, FQ);
        std::vector<PlaneTerm> et;
        for (const auto& t : c.plane_terms) et.push_back({t.ex, t.ey, t.ez, emb.map(t.c)});
        auto eval_all = [&](const FqElement& x, const FqElement& y, const FqElement& z) {
            FqElement f = FqElement::zero(FQ), fx = f, fy = f, fz = f;
            for (const auto& t : et) {
                FqElement xp = x.pow(t.ex), yp = y.pow(t.ey), zp = z.pow(t.ez);
                f = f + t.c * xp * yp * zp;
                if (t.ex > 0)
                    fx = fx + t.c * FqElement::from_int(FQ, t.ex) * x.pow(t.ex - 1) * yp * zp;
                if (t.ey > 0)
                    fy = fy + t.c * FqElement::from_int(FQ, t.ey) * xp * y.pow(t.ey - 1) * zp;
                if (t.ez > 0)
                    fz = fz + t.c * FqElement::from_int(FQ, t.ez) * xp * yp * z.pow(t.ez - 1);
            }
            return f.is_zero() && fx.is_zero() && fy.is_zero() && fz.is_zero();
        };
        const uint64_t Q = FQ->size;
        FqElement one = FqElement::one(FQ), zero = FqElement::zero(FQ);
        for (uint64_t yv = 0; yv < Q; ++yv)
            for (uint64_t zv = 0; zv < Q; ++zv)
                if (eval_all(one, FqElement::decode(FQ, yv), FqElement::decode(FQ, zv)))
                    throw structure_error("make_plane: singular point found");
        for (uint64_t zv = 0; zv < Q; ++zv)
            if (eval_all(zero, one, FqElement::decode(FQ, zv)))
                throw structure_error("make_plane: singular point found");
        if (eval_all(zero, zero, one)) throw structure_error("make_plane: singular point found");
    }
    return c;
}

// ---------------------------------------------------------------------------
// zeta machinery

/// Numerator of the zeta function: P(T) = sum b_i T^i with b_0 = 1. The class
/// number is P(1) and the coefficients satisfy b_{2g-i} = q^{g-i} b_i.
struct LPolynomial {
    PrimePower q;
    int genus = 0;
    std::vector<Integer> b; // size 2*genus + 1

    Integer h() const {
        Integer s = 0;
        for (const Integer& c : b) s += c;
        return s;
    }

    bool functional_equation_holds() const {
        for (int i = 0; i <= genus; ++i)
            if (b[2 * genus - i] != pow_integer(q.q, genus - i) * b[i]) return false;
        return true;
    }

    /// Power sum S_j of inverse roots via the Newton recurrence.
    Integer power_sum(unsigned j) const {
        std::vector<Integer> s(j + 1, 0);
        for (unsigned k = 1; k <= j; ++k) {
            Integer acc = k <= static_cast<unsigned>(2 * genus) ? Integer(k * b[k]) : Integer(0);
            for (unsigned i = 1; i < k && i <= static_cast<unsigned>(2 * genus); ++i)
                acc += b[i] * s[k - i];
            s[k] = -acc;
        }
        return s[j];
    }

    /// The point count over F_{q^j} predicted by this polynomial.
    Integer predicted_count(unsigned j) const { return pow_integer(q.q, j) + 1 - power_sum(j); }

    /// Exact integer bracket [ceil((sqrt(q)-1)^{2g}), floor((sqrt(q)+1)^{2g})].
    std::pair<Integer, Integer> weil_interval() const {
        auto bound = [&](bool upper) -> Integer {
            // (±1 + sqrt(q))^{2g} = A + B sqrt(q), tracked exactly
            Integer A = 1, B = 0;
            for (int k = 0; k < 2 * genus; ++k) {
                Integer na = (upper ? A : -A) + B * q.q;
                Integer nb = (upper ? B : -B) + A;
                A = na;
                B = nb;
            }
            Integer b2q = B * B * q.q;
            Integer root;
            mpz_sqrt(root.get_mpz_t(), b2q.get_mpz_t());
            bool exact = mpz_perfect_square_p(b2q.get_mpz_t()) != 0;
            if (upper) {
                // floor(A + B sqrt(q))
                if (B >= 0) return Integer(A + root);
                return Integer(A - (exact ? root : root + 1));
            }
            // ceil(A + B sqrt(q))
            if (B >= 0) return Integer(A + root + (exact ? 0 : 1));
            return Integer(A - root);
        };
        return {bound(false), bound(true)};
    }
};

/// L-polynomial from the point counts N_1..N_g via Newton's identities and
/// the functional equation. Non-exact divisions abort: they would mean the
/// counts are inconsistent.
inline LPolynomial l_polynomial(const CurveModel& c) {
    LPolynomial lp;
    lp.q = c.base;
    lp.genus = c.genus;
    lp.b.assign(2 * c.genus + 1, 0);
    lp.b[0] = 1;
    if (c.genus == 0) return lp;

    std::vector<Integer> s(c.genus + 1, 0);
    for (int j = 1; j <= c.genus; ++j) {
        Integer nj = static_cast<unsigned long>(count_points(c, j));
        s[j] = pow_integer(c.base.q, j) + 1 - nj;
    }
    for (int j = 1; j <= c.genus; ++j) {
        Integer acc = s[j];
        for (int i = 1; i < j; ++i) acc += lp.b[i] * s[j - i];
        if (acc % j != 0)
            throw internal_error("l_polynomial: non-integer Newton step at degree " +
                                 std::to_string(j) + "; counting bug");
        lp.b[j] = -acc / j;
    }
    for (int i = c.genus - 1; i >= 0; --i)
        lp.b[2 * c.genus - i] = pow_integer(c.base.q, c.genus - i) * lp.b[i];

    if (!lp.functional_equation_holds())
        throw internal_error("l_polynomial: functional equation violated");
    Integer h = lp.h();
    auto [lo, hi] = lp.weil_interval();
    if (h < lo || h > hi)
        throw internal_error("l_polynomial: class number " + h.get_str() +
                             " violates the Weil bound");
    return lp;
}

inline Integer class_number(const CurveModel& c) { return l_polynomial(c).h(); }

// ---------------------------------------------------------------------------
// elliptic group structure

/// Enumerates the rational points of a genus-1 Weierstrass model and returns
/// the group structure under the chord-tangent law. Point ids encode
/// infinity as 0 and (x, y) as 1 + enc(x) * q + enc(y).
inline FiniteAbelianGroup elliptic_group_structure(const CurveModel& c) {
    if (c.family != CurveFamily::weierstrass_odd && c.family != CurveFamily::weierstrass_char2)
        throw domain_error("elliptic_group_structure: needs a Weierstrass model");
    if (c.base.q > 16384) throw size_error("elliptic_group_structure: q exceeds the 2^14 cap");
    const Field& F = c.field;
    const uint64_t Q = F->size;
    const FqElement &a1 = c.a_inv[0], &a2 = c.a_inv[1], &a3 = c.a_inv[2], &a4 = c.a_inv[3],
                    &a6 = c.a_inv[4];
    auto tables = detail::count_tables(F);

    auto rhs = [&](const FqElement& x) { return ((x + a2) * x + a4) * x + a6; };
    auto on_curve_ids = [&]() {
        std::vector<uint64_t> ids{0};
        for (uint64_t xv = 0; xv < Q; ++xv) {
            FqElement x = FqElement::decode(F, xv);
            FqElement h = a1 * x + a3;
            FqElement v = rhs(x);
            std::vector<FqElement> ys;
            if (F->p == 2) {
                if (h.is_zero()) {
                    ys.push_back(v.sqrt_char2());
                } else {
                    FqElement w = v / (h * h);
                    uint64_t z = tables->artin[w.encode()];
                    if (z != UINT64_MAX) {
                        FqElement z0 = FqElement::decode(F, z);
                        ys.push_back(h * z0);
                        ys.push_back(h * (z0 + FqElement::one(F)));
                    }
                }
            } else {
                // y^2 + h y - v = 0; complete the square
                FqElement disc = h * h + FqElement::from_int(F, 4) * v;
                int chi = tables->chi[disc.encode()];
                FqElement inv2 = FqElement::from_int(F, 2).inverse();
                if (chi == 0) {
                    ys.push_back(-h * inv2);
                } else if (chi == 1) {
                    FqElement root = FqElement::decode(F, tables->sqrt_tab[disc.encode()]);
                    ys.push_back((root - h) * inv2);
                    ys.push_back((-root - h) * inv2);
                }
            }
            for (const auto& y : ys) ids.push_back(1 + xv * Q + y.encode());
        }
        return ids;
    };

    auto op = [&](uint64_t pa, uint64_t pb) -> uint64_t {
        if (pa == 0) return pb;
        if (pb == 0) return pa;
        FqElement x1 = FqElement::decode(F, (pa - 1) / Q), y1 = FqElement::decode(F, (pa - 1) % Q);
        FqElement x2 = FqElement::decode(F, (pb - 1) / Q), y2 = FqElement::decode(F, (pb - 1) % Q);
        if (x1 == x2 && y2 == -y1 - a1 * x1 - a3) return 0;
        FqElement lambda(F, {}), nu(F, {});
        if (x1 == x2 && y1 == y2) {
            FqElement den = FqElement::from_int(F, 2) * y1 + a1 * x1 + a3;
            FqElement three = FqElement::from_int(F, 3), two = FqElement::from_int(F, 2);
            lambda = (three * x1 * x1 + two * a2 * x1 + a4 - a1 * y1) / den;
            nu = (-(x1 * x1 * x1) + a4 * x1 + two * a6 - a3 * y1) / den;
        } else {
            FqElement den = x2 - x1;
            lambda = (y2 - y1) / den;
            nu = (y1 * x2 - y2 * x1) / den;
        }
        FqElement x3 = lambda * lambda + a1 * lambda - a2 - x1 - x2;
        FqElement y3 = -(lambda + a1) * x3 - nu - a3;
        return 1 + x3.encode() * Q + y3.encode();
    };

    auto ids = on_curve_ids();
    return structure_from_elements(ids, op, 0);
}

// ---------------------------------------------------------------------------
// existence searches and families

/// The sufficient admissibility criterion: |N| <= 2 sqrt(q) and gcd(p, N) = 1.
inline bool waterhouse_admissible(const PrimePower& q, const Integer& n) {
    if (n * n > 4 * q.q) return false;
    return gcd(q.p, n) == 1;
}

/// Exhaustive deterministic search for an elliptic curve with exactly q
/// rational points. Characteristic 2 scans y^2 + xy = x^3 + a x^2 + b and
/// then y^2 + cy = x^3 + ax + b; odd characteristic scans the full cubic
/// y^2 = x^3 + a x^2 + b x + c, first hit in coefficient-encoding order.
inline CurveModel waterhouse_search(const PrimePower& q) {
    if (q.q > 64) throw size_error("waterhouse_search: q exceeds the 64 cap");
    Field F = detail::field_of(q);
    const uint64_t Q = F->size;
    auto zero = FqElement::zero(F), one = FqElement::one(F);

    auto try_curve = [&](const std::array<FqElement, 5>& a) -> std::optional<CurveModel> {
        if (detail::weierstrass_discriminant({a[0], a[1], a[2], a[3], a[4]}).is_zero())
            return std::nullopt;
        CurveModel c = make_weierstrass(q, a);
        if (count_points(c, 1) == q.q) return c;
        return std::nullopt;
    };

    if (q.p == 2) {
        for (uint64_t av = 0; av < Q; ++av)
            for (uint64_t bv = 0; bv < Q; ++bv) {
                auto c = try_curve({one, FqElement::decode(F, av), zero, zero,
                                    FqElement::decode(F, bv)});
                if (c) return *c;
            }
        for (uint64_t cv = 0; cv < Q; ++cv)
            for (uint64_t av = 0; av < Q; ++av)
                for (uint64_t bv = 0; bv < Q; ++bv) {
                    auto c = try_curve({zero, zero, FqElement::decode(F, cv),
                                        FqElement::decode(F, av), FqElement::decode(F, bv)});
                    if (c) return *c;
                }
    } else {
        for (uint64_t av = 0; av < Q; ++av)
            for (uint64_t bv = 0; bv < Q; ++bv)
                for (uint64_t cv = 0; cv < Q; ++cv) {
                    auto c = try_curve({zero, FqElement::decode(F, av), zero,
                                        FqElement::decode(F, bv), FqElement::decode(F, cv)});
                    if (c) return *c;
                }
    }
    throw internal_error("waterhouse_search: no curve with q points found; this contradicts "
                         "the existence guarantee");
}

/// The hyperelliptic family y^2 = D_1...D_m with deg D_i = i + 2: each D_i is
/// the deterministic irreducible polynomial of its degree, so the product is
/// squarefree. Returns the model, class number, and whether 2^(m-2) divides
/// it (vacuous for m < 3).
struct TwoRankFamilyResult {
    CurveModel curve;
    std::vector<FqPolynomial> factors;
    LPolynomial lpoly;
    Integer h;
    Integer divisor;
    bool divides = false;
};

inline TwoRankFamilyResult two_rank_family(const PrimePower& q, unsigned m) {
    if (q.p == 2) throw domain_error("two_rank_family: needs odd characteristic");
    if (m < 1) throw domain_error("two_rank_family: m must be >= 1");
    Field F = detail::field_of(q);
    int total_degree = 0;
    for (unsigned i = 1; i <= m; ++i) total_degree += static_cast<int>(i) + 2;
    int genus = (total_degree - 1) / 2;
    if (genus > 8) throw size_error("two_rank_family: genus " + std::to_string(genus) +
                                    " exceeds the cap of 8");

    TwoRankFamilyResult out;
    FqPolynomial f = FqPolynomial::one(F);
    for (unsigned i = 1; i <= m; ++i) {
        FqPolynomial d = irreducible_poly(F, static_cast<int>(i) + 2);
        out.factors.push_back(d);
        f = f * d;
    }
    out.curve = make_hyperelliptic(q, f);
    out.lpoly = l_polynomial(out.curve);
    out.h = out.lpoly.h();
    out.divisor = m >= 3 ? pow_integer(2, m - 2) : Integer(1);
    out.divides = out.h % out.divisor == 0;
    return out;
}

} // namespace gff
