// This file is part of gff.
//
// Licensed under the Apache License, Version 2.0 (see
// LICENSE or https://www.apache.org/licenses/LICENSE-2.0).

#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "gff/arith.hpp"
#include "gff/errors.hpp"

namespace gff {

/// Immutable description of F_{p^m} = F_p[t]/(modulus). Instances are created
/// through the factories below, which always pick the lexicographically least
/// monic irreducible modulus, so serialized elements are reproducible.
struct FqField {
    int64_t p = 0;
    int m = 1;
    std::vector<int64_t> modulus; // monic, length m+1, coefficients in [0,p)
    uint64_t size = 0;            // p^m

    int64_t reduce_coeff(int64_t c) const {
        c %= p;
        return c < 0 ? c + p : c;
    }
};

using Field = std::shared_ptr<const FqField>;

class FqElement;
class FqPolynomial;

Field extension_field(int64_t p, int m);

inline Field prime_field(int64_t p) { return extension_field(p, 1); }

/// An element of F_{p^m}: m coefficients over F_p, little-endian by degree.
class FqElement {
public:
    FqElement() = default;
    FqElement(Field field, std::vector<int64_t> coeffs) : field_(std::move(field)) {
        if (coeffs.size() > static_cast<size_t>(field_->m))
            throw domain_error("FqElement: too many coefficients");
        coeffs.resize(field_->m, 0);
        for (auto& c : coeffs) c = field_->reduce_coeff(c);
        c_ = std::move(coeffs);
    }

    static FqElement zero(const Field& f) { return FqElement(f, {}); }
    static FqElement one(const Field& f) { return FqElement(f, {1}); }
    static FqElement from_int(const Field& f, int64_t v) { return FqElement(f, {v}); }

    /// t, the residue of the modulus variable (a generator of the field over F_p).
    static FqElement generator(const Field& f) {
        if (f->m == 1) throw domain_error("FqElement::generator: prime field has no t");
        return FqElement(f, {0, 1});
    }

    const Field& field() const { return field_; }
    const std::vector<int64_t>& coeffs() const { return c_; }

    bool is_zero() const {
        for (int64_t c : c_)
            if (c) return false;
        return true;
    }
    bool is_one() const {
        if (c_.empty() || c_[0] != 1) return false;
        for (size_t i = 1; i < c_.size(); ++i)
            if (c_[i]) return false;
        return true;
    }

    bool operator==(const FqElement& o) const { return field_ == o.field_ && c_ == o.c_; }
    bool operator!=(const FqElement& o) const { return !(*this == o); }

    /// Integer encoding sum c_i p^i in [0, p^m).
    uint64_t encode() const {
        uint64_t v = 0;
        for (size_t i = c_.size(); i-- > 0;)
            v = v * static_cast<uint64_t>(field_->p) + static_cast<uint64_t>(c_[i]);
        return v;
    }

    static FqElement decode(const Field& f, uint64_t v) {
        std::vector<int64_t> c(f->m);
        for (int i = 0; i < f->m; ++i) {
            c[i] = static_cast<int64_t>(v % static_cast<uint64_t>(f->p));
            v /= static_cast<uint64_t>(f->p);
        }
        if (v) throw domain_error("FqElement::decode: encoding out of range");
        return FqElement(f, std::move(c));
    }

    FqElement operator+(const FqElement& o) const {
        check_same(o);
        std::vector<int64_t> r(c_.size());
        for (size_t i = 0; i < c_.size(); ++i) {
            r[i] = c_[i] + o.c_[i];
            if (r[i] >= field_->p) r[i] -= field_->p;
        }
        return raw(field_, std::move(r));
    }

    FqElement operator-(const FqElement& o) const {
        check_same(o);
        std::vector<int64_t> r(c_.size());
        for (size_t i = 0; i < c_.size(); ++i) {
            r[i] = c_[i] - o.c_[i];
            if (r[i] < 0) r[i] += field_->p;
        }
        return raw(field_, std::move(r));
    }

    FqElement operator-() const {
        std::vector<int64_t> r(c_.size());
        for (size_t i = 0; i < c_.size(); ++i) r[i] = c_[i] ? field_->p - c_[i] : 0;
        return raw(field_, std::move(r));
    }

    FqElement operator*(const FqElement& o) const {
        check_same(o);
        const int m = field_->m;
        const int64_t p = field_->p;
        std::vector<int64_t> prod(2 * m - 1, 0);
        for (int i = 0; i < m; ++i) {
            if (!c_[i]) continue;
            for (int j = 0; j < m; ++j) prod[i + j] = (prod[i + j] + c_[i] * o.c_[j]) % p;
        }
        // reduce modulo the monic modulus
        for (int d = 2 * m - 2; d >= m; --d) {
            int64_t lead = prod[d];
            if (!lead) continue;
            prod[d] = 0;
            for (int i = 0; i < m; ++i) {
                int64_t& slot = prod[d - m + i];
                slot = (slot - lead * field_->modulus[i]) % p;
                if (slot < 0) slot += p;
            }
        }
        prod.resize(m);
        return raw(field_, std::move(prod));
    }

    FqElement pow(Integer e) const {
        if (e < 0) return inverse().pow(-e);
        FqElement acc = one(field_);
        FqElement base = *this;
        while (e > 0) {
            if (mpz_odd_p(e.get_mpz_t())) acc = acc * base;
            base = base * base;
            e >>= 1;
        }
        return acc;
    }

    FqElement inverse() const {
        if (is_zero()) throw domain_error("FqElement: inverse of zero");
        return pow(Integer(field_->size) - 2);
    }

    FqElement operator/(const FqElement& o) const { return *this * o.inverse(); }

    FqElement frobenius() const { return pow(field_->p); }

    /// Absolute trace to the prime field, as a residue mod p.
    int64_t absolute_trace() const {
        FqElement acc = *this, power = *this;
        for (int i = 1; i < field_->m; ++i) {
            power = power.frobenius();
            acc = acc + power;
        }
        for (size_t i = 1; i < acc.c_.size(); ++i)
            if (acc.c_[i]) throw internal_error("absolute_trace: result not in prime field");
        return acc.c_.empty() ? 0 : acc.c_[0];
    }

    /// Unique square root in characteristic 2.
    FqElement sqrt_char2() const {
        if (field_->p != 2) throw domain_error("sqrt_char2: field is not of characteristic 2");
        return pow(Integer(field_->size) / 2);
    }

    /// Quadratic character for odd characteristic: 0, 1 or -1.
    int quadratic_character() const {
        if (field_->p == 2) throw domain_error("quadratic_character: characteristic 2");
        if (is_zero()) return 0;
        FqElement r = pow((Integer(field_->size) - 1) / 2);
        return r.is_one() ? 1 : -1;
    }

    std::string to_string() const {
        if (field_->m == 1) return std::to_string(c_.empty() ? 0 : c_[0]);
        std::string s = "[";
        for (size_t i = 0; i < c_.size(); ++i) {
            if (i) s += ",";
            s += std::to_string(c_[i]);
        }
        return s + "]";
    }

private:
    static FqElement raw(const Field& f, std::vector<int64_t> c) {
        FqElement e;
        e.field_ = f;
        e.c_ = std::move(c);
        return e;
    }

    void check_same(const FqElement& o) const {
        if (field_ != o.field_) throw domain_error("FqElement: mixed-field arithmetic");
    }

    Field field_;
    std::vector<int64_t> c_;
};

/// Traces of the power basis 1, t, ..., t^(m-1); the absolute trace of any
/// element is then an F_p-linear combination of these.
inline std::vector<int64_t> trace_of_basis(const Field& f) {
    std::vector<int64_t> tr(f->m);
    FqElement t_power = FqElement::one(f);
    for (int j = 0; j < f->m; ++j) {
        tr[j] = t_power.absolute_trace();
        if (j + 1 < f->m) t_power = t_power * FqElement::generator(f);
    }
    return tr;
}

/// A polynomial over F_q, little-endian by degree, trailing zeros stripped.
/// The zero polynomial has an empty coefficient list and degree() == -1,
/// standing in for degree minus infinity.
class FqPolynomial {
public:
    explicit FqPolynomial(Field field) : field_(std::move(field)) {}
    FqPolynomial(Field field, std::vector<FqElement> coeffs)
        : field_(std::move(field)), c_(std::move(coeffs)) {
        for (const auto& c : c_)
            if (c.field() != field_) throw domain_error("FqPolynomial: mixed-field coefficients");
        normalize();
    }

    static FqPolynomial from_encodings(const Field& f, const std::vector<uint64_t>& enc) {
        std::vector<FqElement> c;
        c.reserve(enc.size());
        for (uint64_t v : enc) c.push_back(FqElement::decode(f, v));
        return FqPolynomial(f, std::move(c));
    }

    static FqPolynomial zero(const Field& f) { return FqPolynomial(f); }
    static FqPolynomial one(const Field& f) { return FqPolynomial(f, {FqElement::one(f)}); }
    static FqPolynomial x(const Field& f) {
        return FqPolynomial(f, {FqElement::zero(f), FqElement::one(f)});
    }
    static FqPolynomial constant(const FqElement& c) { return FqPolynomial(c.field(), {c}); }

    const Field& field() const { return field_; }
    const std::vector<FqElement>& coeffs() const { return c_; }
    int degree() const { return static_cast<int>(c_.size()) - 1; }
    bool is_zero() const { return c_.empty(); }
    bool is_constant() const { return c_.size() <= 1; }

    FqElement coeff(size_t i) const {
        return i < c_.size() ? c_[i] : FqElement::zero(field_);
    }
    FqElement leading() const {
        if (is_zero()) throw domain_error("FqPolynomial: zero polynomial has no leading term");
        return c_.back();
    }

    bool operator==(const FqPolynomial& o) const { return field_ == o.field_ && c_ == o.c_; }
    bool operator!=(const FqPolynomial& o) const { return !(*this == o); }

    FqPolynomial operator+(const FqPolynomial& o) const {
        std::vector<FqElement> r(std::max(c_.size(), o.c_.size()), FqElement::zero(field_));
        for (size_t i = 0; i < r.size(); ++i) r[i] = coeff(i) + o.coeff(i);
        return FqPolynomial(field_, std::move(r));
    }
    FqPolynomial operator-(const FqPolynomial& o) const {
        std::vector<FqElement> r(std::max(c_.size(), o.c_.size()), FqElement::zero(field_));
        for (size_t i = 0; i < r.size(); ++i) r[i] = coeff(i) - o.coeff(i);
        return FqPolynomial(field_, std::move(r));
    }
    FqPolynomial operator*(const FqPolynomial& o) const {
        if (is_zero() || o.is_zero()) return zero(field_);
        std::vector<FqElement> r(c_.size() + o.c_.size() - 1, FqElement::zero(field_));
        for (size_t i = 0; i < c_.size(); ++i) {
            if (c_[i].is_zero()) continue;
            for (size_t j = 0; j < o.c_.size(); ++j) r[i + j] = r[i + j] + c_[i] * o.c_[j];
        }
        return FqPolynomial(field_, std::move(r));
    }
    FqPolynomial operator*(const FqElement& s) const {
        std::vector<FqElement> r = c_;
        for (auto& c : r) c = c * s;
        return FqPolynomial(field_, std::move(r));
    }

    std::pair<FqPolynomial, FqPolynomial> divmod(const FqPolynomial& d) const {
        if (d.is_zero()) throw domain_error("FqPolynomial: division by zero polynomial");
        FqPolynomial q = zero(field_), r = *this;
        FqElement lc_inv = d.leading().inverse();
        std::vector<FqElement> qc(
            r.degree() >= d.degree() ? r.degree() - d.degree() + 1 : 0,
            FqElement::zero(field_));
        while (!r.is_zero() && r.degree() >= d.degree()) {
            int shift = r.degree() - d.degree();
            FqElement t = r.leading() * lc_inv;
            qc[shift] = t;
            std::vector<FqElement> rc = r.c_;
            for (int i = 0; i <= d.degree(); ++i)
                rc[shift + i] = rc[shift + i] - t * d.c_[i];
            r = FqPolynomial(field_, std::move(rc));
        }
        return {FqPolynomial(field_, std::move(qc)), r};
    }
    FqPolynomial operator%(const FqPolynomial& d) const { return divmod(d).second; }
    FqPolynomial operator/(const FqPolynomial& d) const { return divmod(d).first; }

    FqPolynomial monic() const {
        if (is_zero()) return *this;
        return *this * leading().inverse();
    }

    FqPolynomial derivative() const {
        if (c_.size() <= 1) return zero(field_);
        std::vector<FqElement> r(c_.size() - 1, FqElement::zero(field_));
        for (size_t i = 1; i < c_.size(); ++i)
            r[i - 1] = c_[i] * FqElement::from_int(field_, static_cast<int64_t>(i));
        return FqPolynomial(field_, std::move(r));
    }

    FqElement eval(const FqElement& at) const {
        FqElement acc = FqElement::zero(field_);
        for (size_t i = c_.size(); i-- > 0;) acc = acc * at + c_[i];
        return acc;
    }

    /// Coefficients of f(y + at) in y; synthetic-division Taylor shift,
    /// valid in any characteristic.
    FqPolynomial taylor_shift(const FqElement& at) const {
        if (is_zero()) return *this;
        std::vector<FqElement> c = c_;
        size_t n = c.size();
        for (size_t j = 0; j + 1 < n; ++j)
            for (size_t i = n - 1; i-- > j;) c[i] = c[i] + at * c[i + 1];
        return FqPolynomial(field_, std::move(c));
    }

    /// Reversed coefficients: x^deg * f(1/x).
    FqPolynomial reversed() const {
        std::vector<FqElement> r(c_.rbegin(), c_.rend());
        return FqPolynomial(field_, std::move(r));
    }

    /// this^e mod f using square-and-multiply.
    FqPolynomial powmod(Integer e, const FqPolynomial& f) const {
        FqPolynomial acc = one(field_) % f;
        FqPolynomial base = *this % f;
        while (e > 0) {
            if (mpz_odd_p(e.get_mpz_t())) acc = acc * base % f;
            base = base * base % f;
            e >>= 1;
        }
        return acc;
    }

    std::string to_string(const std::string& var = "x") const {
        if (is_zero()) return "0";
        std::string s;
        for (size_t i = c_.size(); i-- > 0;) {
            if (c_[i].is_zero()) continue;
            if (!s.empty()) s += " + ";
            bool unit = c_[i].is_one();
            if (i == 0) {
                s += c_[i].to_string();
            } else {
                if (!unit) s += c_[i].to_string() + "*";
                s += var;
                if (i > 1) s += "^" + std::to_string(i);
            }
        }
        return s;
    }

private:
    void normalize() {
        while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
    }

    Field field_;
    std::vector<FqElement> c_;
};

inline FqPolynomial poly_gcd(FqPolynomial a, FqPolynomial b) {
    while (!b.is_zero()) {
        FqPolynomial r = a % b;
        a = std::move(b);
        b = std::move(r);
    }
    return a.monic();
}

/// True iff gcd(f, f') is constant. The derivative of a p-th power vanishes,
/// so those are correctly reported as not squarefree.
inline bool is_squarefree(const FqPolynomial& f) {
    if (f.is_zero()) throw domain_error("is_squarefree: zero polynomial");
    if (f.is_constant()) return true;
    FqPolynomial d = f.derivative();
    if (d.is_zero()) return false;
    return poly_gcd(f, d).is_constant();
}

/// Rabin's irreducibility test over F_q.
inline bool is_irreducible(const FqPolynomial& f) {
    int d = f.degree();
    if (d <= 0) return false;
    if (d == 1) return true;
    const Field& F = f.field();
    FqPolynomial fm = f.monic();
    FqPolynomial x = FqPolynomial::x(F);
    Integer q = Integer(F->size);
    if (x.powmod(pow_integer(q, d), fm) != x % fm) return false;
    for (const auto& [r, e] : factor(Integer(d))) {
        (void)e;
        unsigned long sub = d / r.get_ui();
        FqPolynomial g = x.powmod(pow_integer(q, sub), fm) - x;
        if (!poly_gcd(g, fm).is_constant()) return false;
    }
    return true;
}

/// All roots of f in its own field, by exhaustive evaluation, ascending by
/// element encoding.
inline std::vector<FqElement> poly_roots(const FqPolynomial& f) {
    std::vector<FqElement> out;
    if (f.is_zero()) throw domain_error("poly_roots: zero polynomial");
    for (uint64_t v = 0; v < f.field()->size; ++v) {
        FqElement e = FqElement::decode(f.field(), v);
        if (f.eval(e).is_zero()) out.push_back(e);
    }
    return out;
}

/// Deterministic monic irreducible polynomial of degree d over F_q: the first
/// candidate in the coefficient-encoding order where the constant coefficient
/// is the least significant digit.
inline FqPolynomial irreducible_poly(const Field& f, int d) {
    if (d < 1) throw domain_error("irreducible_poly: degree must be >= 1");
    Integer q = Integer(f->size);
    for (Integer k = 0;; ++k) {
        Integer rest = k;
        std::vector<FqElement> c(d + 1, FqElement::zero(f));
        for (int i = 0; i < d; ++i) {
            Integer digit = rest % q;
            rest /= q;
            c[i] = FqElement::decode(f, digit.get_ui());
        }
        if (rest > 0) throw internal_error("irreducible_poly: exhausted candidate space");
        c[d] = FqElement::one(f);
        FqPolynomial cand(f, std::move(c));
        if (is_irreducible(cand)) return cand;
    }
}

namespace detail {

// Coefficient-vector helpers over F_p used only to bootstrap extension moduli.
inline bool prime_poly_irreducible(int64_t p, const std::vector<int64_t>& coeffs) {
    Field fp = extension_field(p, 1);
    std::vector<FqElement> c;
    c.reserve(coeffs.size());
    for (int64_t v : coeffs) c.push_back(FqElement::from_int(fp, v));
    return is_irreducible(FqPolynomial(fp, std::move(c)));
}

} // namespace detail

/// F_{p^m} with the deterministic lexicographically-least modulus; memoized.
inline Field extension_field(int64_t p, int m) {
    if (p < 2 || !is_prime(Integer(p))) throw domain_error("extension_field: p must be prime");
    if (m < 1) throw domain_error("extension_field: extension degree must be >= 1");
    if (p > (int64_t(1) << 30)) throw size_error("extension_field: characteristic too large");
    {
        Integer total = pow_integer(Integer(p), m);
        if (total > (Integer(1) << 62)) throw size_error("extension_field: field too large");
    }

    static std::map<std::pair<int64_t, int>, Field> cache;
    static std::mutex mu;
    auto key = std::make_pair(p, m);
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }

    // built outside the lock: the modulus search below re-enters this
    // factory for the prime field
    auto field = std::make_shared<FqField>();
    field->p = p;
    field->m = m;
    uint64_t size = 1;
    for (int i = 0; i < m; ++i) size *= static_cast<uint64_t>(p);
    field->size = size;

    if (m == 1) {
        field->modulus = {0, 1}; // t
    } else {
        // least monic irreducible of degree m over F_p, constant digit fastest
        uint64_t pm = 1;
        for (int i = 0; i < m; ++i) pm *= static_cast<uint64_t>(p);
        bool found = false;
        for (uint64_t k = 0; k < pm && !found; ++k) {
            std::vector<int64_t> c(m + 1, 0);
            uint64_t rest = k;
            for (int i = 0; i < m; ++i) {
                c[i] = static_cast<int64_t>(rest % static_cast<uint64_t>(p));
                rest /= static_cast<uint64_t>(p);
            }
            c[m] = 1;
            if (detail::prime_poly_irreducible(p, c)) {
                field->modulus = c;
                found = true;
            }
        }
        if (!found) throw internal_error("extension_field: no irreducible modulus found");
    }

    Field out = field;
    std::lock_guard<std::mutex> lock(mu);
    auto [it, inserted] = cache.emplace(key, out);
    return it->second;
}

/// Ring embedding F_{p^a} -> F_{p^b} for a | b, sending the source generator
/// to the least-encoded root of the source modulus in the target field.
class FieldEmbedding {
public:
    FieldEmbedding(Field src, Field dst) : src_(std::move(src)), dst_(std::move(dst)) {
        if (src_->p != dst_->p)
            throw domain_error("FieldEmbedding: different characteristics");
        if (dst_->m % src_->m != 0)
            throw domain_error("FieldEmbedding: source degree does not divide target degree");
        if (src_ == dst_) {
            gen_image_ = src_->m == 1 ? FqElement::one(dst_) : FqElement::generator(dst_);
            identity_ = true;
            return;
        }
        // evaluate the source modulus (prime-field coefficients) at candidates
        for (uint64_t v = 0; v < dst_->size; ++v) {
            FqElement cand = FqElement::decode(dst_, v);
            FqElement acc = FqElement::zero(dst_);
            for (size_t i = src_->modulus.size(); i-- > 0;)
                acc = acc * cand + FqElement::from_int(dst_, src_->modulus[i]);
            if (acc.is_zero()) {
                gen_image_ = cand;
                return;
            }
        }
        throw internal_error("FieldEmbedding: modulus has no root in the target field");
    }

    const Field& source() const { return src_; }
    const Field& target() const { return dst_; }

    FqElement map(const FqElement& e) const {
        if (e.field() != src_) throw domain_error("FieldEmbedding: element not in source field");
        if (identity_) return e;
        FqElement acc = FqElement::zero(dst_);
        const auto& c = e.coeffs();
        for (size_t i = c.size(); i-- > 0;)
            acc = acc * gen_image_ + FqElement::from_int(dst_, c[i]);
        return acc;
    }

    FqPolynomial map(const FqPolynomial& f) const {
        std::vector<FqElement> c;
        c.reserve(f.coeffs().size());
        for (const auto& e : f.coeffs()) c.push_back(map(e));
        return FqPolynomial(dst_, std::move(c));
    }

private:
    Field src_, dst_;
    FqElement gen_image_;
    bool identity_ = false;
};

} // namespace gff
