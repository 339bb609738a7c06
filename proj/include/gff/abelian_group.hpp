// This file is part of gff.
//
// Licensed under the Apache License, Version 2.0 (see
// LICENSE or https://www.apache.org/licenses/LICENSE-2.0).

#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "gff/arith.hpp"
#include "gff/errors.hpp"

namespace gff {

/// A finite abelian group in canonical form: the multiset of prime-power
/// cyclic orders of its primary decomposition, sorted by (prime, exponent).
/// Equality of the factor list is isomorphism.
class FiniteAbelianGroup {
public:
    FiniteAbelianGroup() = default; // trivial group

    static FiniteAbelianGroup trivial() { return {}; }

    /// From prime-power cyclic orders; each value must be a prime power >= 2.
    static FiniteAbelianGroup from_prime_powers(const std::vector<Integer>& values) {
        FiniteAbelianGroup g;
        for (const Integer& v : values) {
            if (v < 2) throw domain_error("FiniteAbelianGroup: factor " + v.get_str() + " < 2");
            auto f = factor(v);
            if (f.size() != 1)
                throw domain_error("FiniteAbelianGroup: " + v.get_str() + " is not a prime power");
            g.factors_.emplace_back(f.begin()->first, f.begin()->second);
        }
        g.canonicalize();
        return g;
    }

    /// From arbitrary cyclic orders >= 1, split into primary components.
    static FiniteAbelianGroup from_cyclic_orders(const std::vector<Integer>& orders) {
        FiniteAbelianGroup g;
        for (const Integer& v : orders) {
            if (v < 1) throw domain_error("FiniteAbelianGroup: cyclic order must be positive");
            for (const auto& [p, e] : factor(v)) g.factors_.emplace_back(p, e);
        }
        g.canonicalize();
        return g;
    }

    /// Parses the comma-separated prime-power literal, e.g. "2,2,9".
    /// "1" (or the empty string) denotes the trivial group.
    static FiniteAbelianGroup parse(const std::string& text) {
        if (text.empty() || text == "1") return trivial();
        std::vector<Integer> values;
        size_t pos = 0;
        while (pos <= text.size()) {
            size_t comma = text.find(',', pos);
            if (comma == std::string::npos) comma = text.size();
            std::string tok = text.substr(pos, comma - pos);
            if (tok.empty()) throw domain_error("group literal: empty entry");
            values.emplace_back(tok);
            pos = comma + 1;
        }
        return from_prime_powers(values);
    }

    const std::vector<std::pair<Integer, unsigned>>& factors() const { return factors_; }

    bool is_trivial() const { return factors_.empty(); }

    Integer order() const {
        Integer o = 1;
        for (const auto& [p, e] : factors_) o *= pow_integer(p, e);
        return o;
    }

    Integer exponent() const {
        std::map<Integer, unsigned> top;
        for (const auto& [p, e] : factors_) top[p] = std::max(top[p], e);
        Integer x = 1;
        for (const auto& [p, e] : top) x *= pow_integer(p, e);
        return x;
    }

    /// Prime-power cyclic orders in canonical order.
    std::vector<Integer> prime_powers() const {
        std::vector<Integer> v;
        v.reserve(factors_.size());
        for (const auto& [p, e] : factors_) v.push_back(pow_integer(p, e));
        return v;
    }

    /// Invariant factors d_1 | d_2 | ... | d_k (ascending divisor chain).
    std::vector<Integer> invariant_factors() const {
        std::map<Integer, std::vector<unsigned>> per_prime;
        size_t slots = 0;
        for (const auto& [p, e] : factors_) per_prime[p].push_back(e);
        for (auto& [p, es] : per_prime) {
            std::sort(es.rbegin(), es.rend()); // largest exponent first
            slots = std::max(slots, es.size());
        }
        std::vector<Integer> out(slots, 1);
        for (const auto& [p, es] : per_prime)
            for (size_t i = 0; i < es.size(); ++i) out[i] *= pow_integer(p, es[i]);
        std::reverse(out.begin(), out.end());
        return out;
    }

    static FiniteAbelianGroup from_invariant_factors(const std::vector<Integer>& ds) {
        return from_cyclic_orders(ds);
    }

    FiniteAbelianGroup l_part(const Integer& l) const {
        FiniteAbelianGroup g;
        for (const auto& f : factors_)
            if (f.first == l) g.factors_.push_back(f);
        return g;
    }

    FiniteAbelianGroup non_p_part(const Integer& p) const {
        FiniteAbelianGroup g;
        for (const auto& f : factors_)
            if (f.first != p) g.factors_.push_back(f);
        return g;
    }

    /// Number of factors at the prime 2 = dim of G[2] over F_2.
    unsigned two_rank() const {
        unsigned r = 0;
        for (const auto& f : factors_)
            if (f.first == 2) ++r;
        return r;
    }

    bool is_l_group(const Integer& l) const {
        for (const auto& f : factors_)
            if (f.first != l) return false;
        return true;
    }

    bool operator==(const FiniteAbelianGroup& o) const { return factors_ == o.factors_; }
    bool operator!=(const FiniteAbelianGroup& o) const { return factors_ != o.factors_; }

    std::string to_string() const {
        if (factors_.empty()) return "1";
        std::string s;
        for (const auto& [p, e] : factors_) {
            if (!s.empty()) s += ",";
            s += pow_integer(p, e).get_str();
        }
        return s;
    }

private:
    void canonicalize() { std::sort(factors_.begin(), factors_.end()); }

    std::vector<std::pair<Integer, unsigned>> factors_;
};

/// A finitely presented abelian group: num_generators symbols g_i, and
/// relations sum_i c_i g_i = 0, one coefficient vector per relation.
struct RelationPresentation {
    int num_generators = 0;
    std::vector<std::vector<Integer>> relations;

    void validate() const {
        if (num_generators < 0) throw domain_error("RelationPresentation: negative generator count");
        for (const auto& r : relations)
            if (static_cast<int>(r.size()) != num_generators)
                throw domain_error("RelationPresentation: relation arity mismatch");
    }
};

/// Smith normal form data for the cokernel of a presentation, with the
/// change of basis needed to locate the original generators inside the
/// canonical form.
struct SmithDecomposition {
    std::vector<Integer> diagonal; // invariant chain, d_i | d_{i+1}, nonnegative
    unsigned free_rank = 0;        // rank of the infinite part
    bool finite() const { return free_rank == 0; }

    // populated only when finite():
    std::vector<uint64_t> table_moduli; // the d_i > 1, in diagonal order
    std::vector<std::vector<Integer>> generator_coords; // per generator, length = table_moduli
    FiniteAbelianGroup group;
};

/// Exact integer Smith normal form with minimal-absolute-value pivoting.
inline SmithDecomposition smith_decompose(const RelationPresentation& rel) {
    rel.validate();
    const int g = rel.num_generators;
    const int m = static_cast<int>(rel.relations.size());

    // columns are relations: A is g x m
    std::vector<std::vector<Integer>> A(g, std::vector<Integer>(m, 0));
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < g; ++i) A[i][j] = rel.relations[j][i];
    std::vector<std::vector<Integer>> U(g, std::vector<Integer>(g, 0));
    for (int i = 0; i < g; ++i) U[i][i] = 1;

    auto row_sub = [&](int i, int k, const Integer& q) {
        for (int j = 0; j < m; ++j) A[i][j] -= q * A[k][j];
        for (int j = 0; j < g; ++j) U[i][j] -= q * U[k][j];
    };
    auto row_swap = [&](int i, int k) {
        std::swap(A[i], A[k]);
        std::swap(U[i], U[k]);
    };
    auto row_negate = [&](int i) {
        for (auto& v : A[i]) v = -v;
        for (auto& v : U[i]) v = -v;
    };
    auto col_sub = [&](int j, int k, const Integer& q) {
        for (int i = 0; i < g; ++i) A[i][j] -= q * A[i][k];
    };
    auto col_swap = [&](int j, int k) {
        for (int i = 0; i < g; ++i) std::swap(A[i][j], A[i][k]);
    };

    const int steps = std::min(g, m);
    int k = 0;
    while (k < steps) {
        // minimal nonzero entry of the trailing submatrix becomes the pivot
        int pi = -1, pj = -1;
        for (int i = k; i < g; ++i)
            for (int j = k; j < m; ++j)
                if (A[i][j] != 0 &&
                    (pi < 0 || abs(A[i][j]) < abs(A[pi][pj]))) {
                    pi = i;
                    pj = j;
                }
        if (pi < 0) break;
        if (pi != k) row_swap(pi, k);
        if (pj != k) col_swap(pj, k);

        bool clean = true;
        for (int i = k + 1; i < g; ++i) {
            if (A[i][k] == 0) continue;
            Integer q = A[i][k] / A[k][k];
            row_sub(i, k, q);
            if (A[i][k] != 0) clean = false;
        }
        for (int j = k + 1; j < m; ++j) {
            if (A[k][j] == 0) continue;
            Integer q = A[k][j] / A[k][k];
            col_sub(j, k, q);
            if (A[k][j] != 0) clean = false;
        }
        if (!clean) continue;

        // divisor chain: the pivot must divide the rest of the submatrix
        bool divides = true;
        for (int i = k + 1; i < g && divides; ++i)
            for (int j = k + 1; j < m && divides; ++j)
                if (A[i][j] % A[k][k] != 0) {
                    row_sub(k, i, -1); // fold the offending row into the pivot row
                    divides = false;
                }
        if (!divides) continue;
        ++k;
    }

    SmithDecomposition out;
    out.diagonal.resize(steps, 0);
    unsigned rank = 0;
    for (int i = 0; i < steps; ++i) {
        if (A[i][i] < 0) row_negate(i);
        out.diagonal[i] = A[i][i];
        if (out.diagonal[i] != 0) ++rank;
    }
    out.free_rank = static_cast<unsigned>(g) - rank;
    if (!out.finite()) return out;

    std::vector<int> kept;
    std::vector<Integer> moduli;
    for (int i = 0; i < g; ++i)
        if (out.diagonal[i] > 1) {
            kept.push_back(i);
            moduli.push_back(out.diagonal[i]);
        }
    for (const Integer& d : moduli) {
        if (!d.fits_ulong_p()) throw size_error("smith_decompose: invariant factor too large");
        out.table_moduli.push_back(d.get_ui());
    }
    out.generator_coords.assign(g, std::vector<Integer>(kept.size(), 0));
    for (int t = 0; t < g; ++t)
        for (size_t s = 0; s < kept.size(); ++s) {
            Integer c = U[kept[s]][t] % moduli[s];
            if (c < 0) c += moduli[s];
            out.generator_coords[t][s] = c;
        }
    out.group = FiniteAbelianGroup::from_cyclic_orders(moduli);
    return out;
}

/// Isomorphism class of the presented group; throws if it is infinite.
inline FiniteAbelianGroup smith_normal_form(const RelationPresentation& rel) {
    auto dec = smith_decompose(rel);
    if (!dec.finite())
        throw structure_error("smith_normal_form: presentation has infinite cokernel (free rank " +
                              std::to_string(dec.free_rank) + ")");
    return dec.group;
}

/// A concrete realization of a finite abelian group: element ids 0..size-1
/// encode mixed-radix coordinate tuples over the given cyclic moduli, with
/// componentwise addition. Immutable after construction.
class ElementTableGroup {
public:
    explicit ElementTableGroup(std::vector<uint64_t> moduli) : moduli_(std::move(moduli)) {
        size_ = 1;
        for (uint64_t m : moduli_) {
            if (m < 1) throw domain_error("ElementTableGroup: modulus must be >= 1");
            if (size_ > (uint64_t(1) << 40) / std::max<uint64_t>(m, 1))
                throw size_error("ElementTableGroup: group too large to realize");
            size_ *= m;
        }
    }

    static ElementTableGroup realize(const FiniteAbelianGroup& g) {
        std::vector<uint64_t> mods;
        for (const Integer& v : g.prime_powers()) {
            if (!v.fits_ulong_p()) throw size_error("ElementTableGroup: factor too large");
            mods.push_back(v.get_ui());
        }
        return ElementTableGroup(std::move(mods));
    }

    uint64_t size() const { return size_; }
    const std::vector<uint64_t>& moduli() const { return moduli_; }

    std::vector<uint64_t> coords(uint64_t id) const {
        std::vector<uint64_t> c(moduli_.size());
        for (size_t i = 0; i < moduli_.size(); ++i) {
            c[i] = id % moduli_[i];
            id /= moduli_[i];
        }
        return c;
    }

    uint64_t from_coords(const std::vector<uint64_t>& c) const {
        uint64_t id = 0;
        for (size_t i = moduli_.size(); i-- > 0;)
            id = id * moduli_[i] + (c[i] % moduli_[i]);
        return id;
    }

    uint64_t add(uint64_t a, uint64_t b) const {
        uint64_t id = 0, mult = 1;
        for (size_t i = 0; i < moduli_.size(); ++i) {
            uint64_t m = moduli_[i];
            uint64_t s = (a % m + b % m) % m;
            a /= m;
            b /= m;
            id += s * mult;
            mult *= m;
        }
        return id;
    }

    uint64_t neg(uint64_t a) const {
        uint64_t id = 0, mult = 1;
        for (size_t i = 0; i < moduli_.size(); ++i) {
            uint64_t m = moduli_[i];
            uint64_t c = a % m;
            a /= m;
            id += (c ? m - c : 0) * mult;
            mult *= m;
        }
        return id;
    }

    uint64_t scalar(Integer k, uint64_t a) const {
        Integer ord = 1;
        for (uint64_t m : moduli_) ord = ord / gcd(ord, Integer(m)) * m; // lcm
        k %= ord;
        if (k < 0) k += ord;
        uint64_t acc = 0, base = a;
        while (k > 0) {
            if (mpz_odd_p(k.get_mpz_t())) acc = add(acc, base);
            base = add(base, base);
            k >>= 1;
        }
        return acc;
    }

    uint64_t order_of(uint64_t a) const {
        Integer ord = 1;
        for (size_t i = 0; i < moduli_.size(); ++i) {
            uint64_t m = moduli_[i];
            uint64_t c = a % m;
            a /= m;
            uint64_t co = m / std::gcd(c, m); // order of c in Z/m (gcd(0,m)=m)
            ord = ord / gcd(ord, Integer(co)) * co;
        }
        if (!ord.fits_ulong_p()) throw size_error("order_of: element order too large");
        return ord.get_ui();
    }

private:
    std::vector<uint64_t> moduli_;
    uint64_t size_ = 1;
};

/// A subgroup of an element-table realization: its full (sorted) element set
/// together with a generating set.
struct Subgroup {
    std::vector<uint64_t> elements;
    std::vector<uint64_t> generators;

    bool contains(uint64_t x) const {
        return std::binary_search(elements.begin(), elements.end(), x);
    }
    uint64_t size() const { return elements.size(); }
};

/// Closure of a generating set under the group operation.
inline Subgroup span(const ElementTableGroup& g, const std::vector<uint64_t>& gens) {
    std::set<uint64_t> seen{0};
    std::vector<uint64_t> stack{0};
    while (!stack.empty()) {
        uint64_t x = stack.back();
        stack.pop_back();
        for (uint64_t gen : gens) {
            uint64_t y = g.add(x, gen);
            if (seen.insert(y).second) stack.push_back(y);
        }
    }
    Subgroup s;
    s.elements.assign(seen.begin(), seen.end());
    // redundancy-free generating subset, kept closed incrementally
    std::set<uint64_t> have{0};
    for (uint64_t gen : gens) {
        if (have.count(gen)) continue;
        s.generators.push_back(gen);
        std::vector<uint64_t> st(have.begin(), have.end());
        st.push_back(gen);
        have.insert(gen);
        while (!st.empty()) {
            uint64_t x = st.back();
            st.pop_back();
            for (uint64_t g2 : s.generators) {
                uint64_t y = g.add(x, g2);
                if (have.insert(y).second) st.push_back(y);
            }
        }
    }
    return s;
}

/// All subgroups, enumerated by closure over extensions of a generating
/// lattice. Hard-capped at |g| <= 128.
inline std::vector<Subgroup> subgroups(const ElementTableGroup& g) {
    if (g.size() > 128) throw size_error("subgroups: group order exceeds the 128 cap");
    std::map<std::vector<uint64_t>, Subgroup> seen;
    Subgroup triv = span(g, {});
    seen.emplace(triv.elements, triv);
    std::vector<Subgroup> queue{triv};
    while (!queue.empty()) {
        Subgroup h = queue.back();
        queue.pop_back();
        for (uint64_t x = 0; x < g.size(); ++x) {
            if (h.contains(x)) continue;
            auto gens = h.generators;
            gens.push_back(x);
            Subgroup bigger = span(g, gens);
            if (seen.emplace(bigger.elements, bigger).second) queue.push_back(bigger);
        }
    }
    std::vector<Subgroup> out;
    out.reserve(seen.size());
    for (auto& [k, v] : seen) out.push_back(std::move(v));
    return out;
}

/// The quotient of a realization by a subgroup: coset ids 0..|B/A|-1 in
/// order of least coset representative, with a projection table.
struct QuotientTable {
    std::vector<uint64_t> proj;       // B id -> coset id
    std::vector<uint64_t> reps;       // coset id -> least representative
    uint64_t size = 0;

    uint64_t add(const ElementTableGroup& b, uint64_t c1, uint64_t c2) const {
        return proj[b.add(reps[c1], reps[c2])];
    }
    uint64_t order_of(const ElementTableGroup& b, uint64_t c) const {
        uint64_t acc = reps[c], ord = 1;
        while (proj[acc] != proj[0]) {
            acc = b.add(acc, reps[c]);
            ++ord;
        }
        return ord;
    }
};

inline QuotientTable quotient_by(const ElementTableGroup& b, const Subgroup& a) {
    QuotientTable q;
    q.proj.assign(b.size(), UINT64_MAX);
    for (uint64_t x = 0; x < b.size(); ++x) {
        if (q.proj[x] != UINT64_MAX) continue;
        uint64_t id = q.reps.size();
        q.reps.push_back(x);
        for (uint64_t aa : a.elements) q.proj[b.add(x, aa)] = id;
        if (q.proj[x] != id)
            throw input_error("quotient_by: subgroup is not closed");
    }
    q.size = q.reps.size();
    return q;
}

/// Tests total non-splitness of 0 -> A -> B -> B/A -> 0: no nontrivial
/// subgroup S of the quotient admits a subgroup of its preimage mapping
/// isomorphically onto S. A splitting over S restricts to an order-preserving
/// lift of each cyclic subgroup of S, so cyclic witnesses are exhaustive.
inline bool is_totally_non_split(const ElementTableGroup& b, const Subgroup& a,
                                 const QuotientTable& psi) {
    if (b.size() > 128) throw size_error("is_totally_non_split: group order exceeds the 128 cap");
    if (a.elements.size() * psi.size != b.size())
        throw input_error("is_totally_non_split: quotient table does not match the subgroup");
    // enumerate subgroups of the quotient via closure on coset ids
    std::vector<std::vector<uint64_t>> add(psi.size, std::vector<uint64_t>(psi.size));
    for (uint64_t x = 0; x < psi.size; ++x)
        for (uint64_t y = 0; y < psi.size; ++y) add[x][y] = psi.add(b, x, y);

    std::set<std::set<uint64_t>> seen;
    std::vector<std::set<uint64_t>> queue;
    std::set<uint64_t> triv{0};
    seen.insert(triv);
    queue.push_back(triv);
    auto close = [&](std::set<uint64_t> s) {
        std::vector<uint64_t> stack(s.begin(), s.end());
        while (!stack.empty()) {
            uint64_t x = stack.back();
            stack.pop_back();
            for (uint64_t y : std::vector<uint64_t>(s.begin(), s.end())) {
                uint64_t z = add[x][y];
                if (s.insert(z).second) stack.push_back(z);
            }
        }
        return s;
    };
    while (!queue.empty()) {
        auto h = queue.back();
        queue.pop_back();
        for (uint64_t x = 0; x < psi.size; ++x) {
            if (h.count(x)) continue;
            auto bigger = h;
            bigger.insert(x);
            bigger = close(std::move(bigger));
            if (seen.insert(bigger).second) queue.push_back(bigger);
        }
    }

    for (const auto& s : seen) {
        if (s.size() <= 1) continue;
        for (uint64_t cls : s) {
            if (cls == 0) continue;
            uint64_t ord_s = psi.order_of(b, cls);
            for (uint64_t x = 0; x < b.size(); ++x) {
                if (psi.proj[x] != cls) continue;
                if (b.order_of(x) == ord_s) return false; // <x> maps isomorphically onto <cls>
            }
        }
    }
    return true;
}

/// Annihilator of a subgroup under the standard pairing of B = prod Z/m_i
/// with itself: <x, y> = sum_i x_i y_i (L/m_i) mod L, L = lcm(m_i).
inline Subgroup annihilator(const ElementTableGroup& b, const Subgroup& a) {
    if (b.size() > 10000) throw size_error("annihilator: group order exceeds the 1e4 cap");
    Integer big_l = 1;
    for (uint64_t m : b.moduli()) big_l = big_l / gcd(big_l, Integer(m)) * m;
    if (!big_l.fits_ulong_p()) throw size_error("annihilator: exponent too large");
    uint64_t L = big_l.get_ui();

    auto pair = [&](uint64_t x, uint64_t y) {
        const auto& mods = b.moduli();
        uint64_t acc = 0;
        for (size_t i = 0; i < mods.size(); ++i) {
            uint64_t m = mods[i];
            uint64_t xi = x % m, yi = y % m;
            x /= m;
            y /= m;
            acc = (acc + xi % L * (yi % L) % L * ((L / m) % L)) % L;
        }
        return acc;
    };

    std::vector<uint64_t> members;
    for (uint64_t y = 0; y < b.size(); ++y) {
        bool ok = true;
        for (uint64_t gen : a.generators)
            if (pair(gen, y) != 0) {
                ok = false;
                break;
            }
        if (ok) members.push_back(y);
    }
    Subgroup out;
    out.elements = members;
    std::set<uint64_t> have{0};
    for (uint64_t y : members) {
        if (have.count(y)) continue;
        out.generators.push_back(y);
        std::vector<uint64_t> st(have.begin(), have.end());
        st.push_back(y);
        have.insert(y);
        while (!st.empty()) {
            uint64_t x = st.back();
            st.pop_back();
            for (uint64_t g2 : out.generators) {
                uint64_t z = b.add(x, g2);
                if (have.insert(z).second) st.push_back(z);
            }
        }
    }
    return out;
}

/// Recovers the canonical form of a finite abelian group from an element
/// enumeration and an operation oracle, by measuring l^k-torsion subgroup
/// sizes per prime. Elements are opaque ids; any operation result outside
/// the element set is reported as a closure failure.
inline FiniteAbelianGroup structure_from_elements(
    const std::vector<uint64_t>& elements,
    const std::function<uint64_t(uint64_t, uint64_t)>& op, uint64_t identity) {
    if (elements.size() > 1000000)
        throw size_error("structure_from_elements: order exceeds the 1e6 cap");
    std::unordered_map<uint64_t, uint32_t> index;
    index.reserve(elements.size() * 2);
    for (size_t i = 0; i < elements.size(); ++i)
        if (!index.emplace(elements[i], static_cast<uint32_t>(i)).second)
            throw input_error("structure_from_elements: duplicate element id");
    if (!index.count(identity))
        throw input_error("structure_from_elements: identity not among the elements");

    auto checked_op = [&](uint64_t a, uint64_t b2) {
        uint64_t r = op(a, b2);
        if (!index.count(r))
            throw input_error("structure_from_elements: not closed under the operation");
        return r;
    };
    for (uint64_t x : elements)
        if (checked_op(identity, x) != x)
            throw input_error("structure_from_elements: identity does not act trivially");

    auto scalar = [&](Integer k, uint64_t x) {
        uint64_t acc = identity, base = x;
        while (k > 0) {
            if (mpz_odd_p(k.get_mpz_t())) acc = checked_op(acc, base);
            base = checked_op(base, base);
            k >>= 1;
        }
        return acc;
    };

    const Integer n = static_cast<unsigned long>(elements.size());
    std::vector<Integer> parts;
    for (const auto& [l, e] : factor(n)) {
        // r_k = log_l |G[l^k]|
        std::vector<unsigned> r{0};
        for (unsigned k = 1; k <= e; ++k) {
            Integer lk = pow_integer(l, k);
            uint64_t cnt = 0;
            for (uint64_t x : elements)
                if (scalar(lk, x) == identity) ++cnt;
            Integer c = static_cast<unsigned long>(cnt);
            unsigned rk = 0;
            while (c % l == 0) {
                c /= l;
                ++rk;
            }
            if (c != 1)
                throw input_error("structure_from_elements: torsion count is not a power of " +
                                  l.get_str());
            r.push_back(rk);
            if (rk == e) break; // saturated the full l-part
        }
        unsigned depth = static_cast<unsigned>(r.size()) - 1;
        if (r[depth] != e)
            throw input_error("structure_from_elements: l-part size mismatch at prime " +
                              l.get_str());
        auto rank_at = [&](unsigned k) { return k <= depth ? r[k] : r[depth]; };
        for (unsigned j = 1; j <= depth; ++j) {
            unsigned mult = (rank_at(j) - rank_at(j - 1)) - (rank_at(j + 1) - rank_at(j));
            for (unsigned i = 0; i < mult; ++i) parts.push_back(pow_integer(l, j));
        }
    }
    return FiniteAbelianGroup::from_prime_powers(parts);
}

} // namespace gff
