// This file is part of gff.
//
// Licensed under the Apache License, Version 2.0 (see
// LICENSE or https://www.apache.org/licenses/LICENSE-2.0).

#pragma once

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "gff/abelian_group.hpp"
#include "gff/arith.hpp"
#include "gff/errors.hpp"

namespace gff {

/// A finite truncation of the extension data (A, {C_i}): a prime l, a finite
/// abelian l-group A with a chosen generator list, cyclic l-power orders
/// k_1..k_M, and an assignment sending each index to a generator (by list
/// position) or to zero. The group B is presented by A together with one new
/// generator X_i per index and the relations k_i X_i = a_i.
///
/// Generators are given as coordinate vectors with respect to the canonical
/// primary factors of A; the list may be redundant but must generate A.
struct TruncatedExtensionSpec {
    Integer l;
    FiniteAbelianGroup a;
    std::vector<std::vector<Integer>> generators;
    std::vector<Integer> orders;
    std::vector<int> assignment; // -1 for zero, else a generator list index

    unsigned num_generators() const { return static_cast<unsigned>(generators.size()); }

    /// Largest v with l^v <= max(orders): the level range the truncation can
    /// speak about.
    unsigned covered_level() const {
        Integer top = 0;
        for (const Integer& k : orders) top = std::max(top, k);
        unsigned v = 0;
        while (top > 1) {
            top /= l;
            ++v;
        }
        return v;
    }

    /// Structural checks only; the all-zero assignment (the split control) is
    /// structurally fine.
    void validate_structure() const {
        if (!is_prime(l)) throw domain_error("extension spec: l must be prime");
        if (!a.is_l_group(l))
            throw domain_error("extension spec: A must be a group of l-power order");
        if (orders.empty()) throw domain_error("extension spec: no cyclic orders given");
        for (const Integer& k : orders) {
            Integer m = k;
            if (m < 2) throw domain_error("extension spec: orders must be at least l");
            while (m % l == 0) m /= l;
            if (m != 1)
                throw domain_error("extension spec: order " + k.get_str() +
                                   " is not a power of " + l.get_str());
        }
        if (assignment.size() != orders.size())
            throw domain_error("extension spec: assignment length mismatch");
        const int n = static_cast<int>(num_generators());
        for (int t : assignment)
            if (t < -1 || t >= n)
                throw domain_error("extension spec: assignment index out of range");
        const size_t rank = a.factors().size();
        for (const auto& g : generators)
            if (g.size() != rank)
                throw domain_error("extension spec: generator coordinate arity mismatch");
        if (!a.is_trivial()) {
            ElementTableGroup t = ElementTableGroup::realize(a);
            if (span(t, generator_ids(t)).size() != t.size())
                throw domain_error("extension spec: generator list does not generate A");
        }
    }

    /// The strong-generation precondition: at every level v up to the covered
    /// level, the generators assigned on indices with k_i >= l^v span A.
    void validate_generation() const {
        validate_structure();
        if (a.is_trivial()) return;
        ElementTableGroup t = ElementTableGroup::realize(a);
        auto ids = generator_ids(t);
        for (unsigned v = 0; v <= covered_level(); ++v) {
            Integer lv = pow_integer(l, v);
            std::vector<uint64_t> hit;
            for (size_t i = 0; i < orders.size(); ++i)
                if (orders[i] >= lv && assignment[i] >= 0) hit.push_back(ids[assignment[i]]);
            if (span(t, hit).size() != t.size())
                throw domain_error("extension spec: assigned generators at level " +
                                   std::to_string(v) + " do not generate A");
        }
    }

    void validate() const { validate_generation(); }

    std::vector<uint64_t> generator_ids(const ElementTableGroup& t) const {
        std::vector<uint64_t> ids;
        for (const auto& g : generators) {
            std::vector<uint64_t> coords;
            const auto& factors = a.factors();
            for (size_t s = 0; s < factors.size(); ++s) {
                Integer m = pow_integer(factors[s].first, factors[s].second);
                Integer c = g[s] % m;
                if (c < 0) c += m;
                coords.push_back(c.get_ui());
            }
            ids.push_back(t.from_coords(coords));
        }
        return ids;
    }

    static std::vector<std::vector<Integer>> canonical_generators(const FiniteAbelianGroup& a) {
        const size_t rank = a.factors().size();
        std::vector<std::vector<Integer>> gens;
        for (size_t t = 0; t < rank; ++t) {
            std::vector<Integer> g(rank, 0);
            g[t] = 1;
            gens.push_back(std::move(g));
        }
        return gens;
    }

    /// Deterministic assignment covering every level: walk the levels from the
    /// covered level down, and at each one give every generator in the list
    /// the smallest unused index of sufficient order. Leftovers get zero.
    static TruncatedExtensionSpec with_default_assignment(
        const Integer& l, const FiniteAbelianGroup& a, const std::vector<Integer>& orders,
        std::vector<std::vector<Integer>> generator_list = {}) {
        TruncatedExtensionSpec s;
        s.l = l;
        s.a = a;
        s.generators = generator_list.empty() ? canonical_generators(a)
                                              : std::move(generator_list);
        s.orders = orders;
        s.assignment.assign(orders.size(), -1);
        const int n = static_cast<int>(s.num_generators());
        if (n == 0) return s;
        std::vector<bool> used(orders.size(), false);
        for (int v = static_cast<int>(s.covered_level()); v >= 0; --v) {
            Integer lv = pow_integer(l, static_cast<unsigned>(v));
            for (int t = 0; t < n; ++t) {
                int pick = -1;
                for (size_t i = 0; i < orders.size(); ++i)
                    if (!used[i] && orders[i] >= lv) {
                        pick = static_cast<int>(i);
                        break;
                    }
                if (pick < 0) break;
                used[pick] = true;
                s.assignment[pick] = t;
            }
        }
        return s;
    }

    /// A different assignment derived from a seed: permutes the assigned
    /// generators within each order class (which preserves level-wise
    /// generation) and, when the result stays valid, also rotates the
    /// generator indices globally.
    TruncatedExtensionSpec reordered(uint64_t seed) const {
        const int n = static_cast<int>(num_generators());
        if (n == 0) return *this;
        std::mt19937_64 rng(seed);
        int rot = static_cast<int>(rng() % static_cast<uint64_t>(n));

        auto shuffled = [&](int rotation) {
            TruncatedExtensionSpec s = *this;
            std::vector<Integer> classes = orders;
            std::sort(classes.begin(), classes.end());
            classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
            for (const Integer& k : classes) {
                std::vector<size_t> idx;
                for (size_t i = 0; i < orders.size(); ++i)
                    if (orders[i] == k && assignment[i] >= 0) idx.push_back(i);
                std::vector<int> vals;
                for (size_t i : idx) vals.push_back(assignment[i]);
                std::shuffle(vals.begin(), vals.end(), rng);
                for (size_t j = 0; j < idx.size(); ++j)
                    s.assignment[idx[j]] = (vals[j] + rotation) % n;
            }
            return s;
        };

        TruncatedExtensionSpec rotated = shuffled(rot);
        try {
            rotated.validate_generation();
            return rotated;
        } catch (const domain_error&) {
            // rotation can move a redundant generator onto a critical level;
            // fall back to the pure within-class shuffle
        }
        return shuffled(0);
    }
};

/// Relation presentation of B = (A + sum Z X_i) / (k_i X_i = a_i).
inline RelationPresentation extension_presentation(const TruncatedExtensionSpec& s) {
    const int rank = static_cast<int>(s.a.factors().size());
    const int m = static_cast<int>(s.orders.size());
    RelationPresentation rel;
    rel.num_generators = rank + m;
    auto factors = s.a.factors();
    for (int t = 0; t < rank; ++t) {
        std::vector<Integer> row(rank + m, 0);
        row[t] = pow_integer(factors[t].first, factors[t].second);
        rel.relations.push_back(std::move(row));
    }
    for (int i = 0; i < m; ++i) {
        std::vector<Integer> row(rank + m, 0);
        row[rank + i] = s.orders[i];
        if (s.assignment[i] >= 0) {
            const auto& g = s.generators[s.assignment[i]];
            for (int t = 0; t < rank; ++t) row[t] = -g[t];
        }
        rel.relations.push_back(std::move(row));
    }
    return rel;
}

/// Isomorphism class of the truncated extension group. Split controls (zero
/// assignments) are allowed; only structural validity is required.
inline FiniteAbelianGroup construct_b(const TruncatedExtensionSpec& s) {
    s.validate_structure();
    FiniteAbelianGroup b = smith_normal_form(extension_presentation(s));
    Integer expected = s.a.order();
    for (const Integer& k : s.orders) expected *= k;
    if (b.order() != expected)
        throw internal_error("construct_b: order " + b.order().get_str() +
                             " does not match |A| * prod k_i = " + expected.get_str());
    return b;
}

/// B realized as an element table together with the embedded copy of A.
struct RealizedExtension {
    FiniteAbelianGroup b_class;
    ElementTableGroup table;
    Subgroup a_embedded;
    std::vector<uint64_t> a_generator_ids; // images of the canonical factors of A
};

inline RealizedExtension realize_extension(const TruncatedExtensionSpec& s) {
    s.validate_structure();
    auto dec = smith_decompose(extension_presentation(s));
    if (!dec.finite()) throw internal_error("realize_extension: infinite cokernel");
    ElementTableGroup table(dec.table_moduli);
    if (table.size() > 10000)
        throw size_error("realize_extension: group order exceeds the 1e4 realization cap");
    std::vector<uint64_t> agens;
    for (size_t t = 0; t < s.a.factors().size(); ++t) {
        std::vector<uint64_t> coords;
        for (const Integer& c : dec.generator_coords[t]) coords.push_back(c.get_ui());
        agens.push_back(table.from_coords(coords));
    }
    Subgroup a_sub = span(table, agens);
    RealizedExtension out{dec.group, std::move(table), std::move(a_sub), std::move(agens)};
    if (out.a_embedded.size() != s.a.order())
        throw internal_error("realize_extension: embedded copy of A has the wrong order");
    return out;
}

/// Image subgroup l^depth B, the finite stand-in for the divisible core: at
/// truncation the defining intersection over all multiples collapses to the
/// single deepest image.
inline Subgroup divisible_core(const ElementTableGroup& b, const Integer& l, unsigned depth) {
    if (b.size() > 10000) throw size_error("divisible_core: group order exceeds the 1e4 cap");
    std::set<uint64_t> cur;
    for (uint64_t x = 0; x < b.size(); ++x) cur.insert(x);
    for (unsigned d = 0; d < depth; ++d) {
        std::set<uint64_t> next;
        for (uint64_t x : cur) next.insert(b.scalar(l, x));
        cur = std::move(next);
    }
    std::vector<uint64_t> gens(cur.begin(), cur.end());
    Subgroup out = span(b, gens);
    if (out.elements != std::vector<uint64_t>(cur.begin(), cur.end()))
        throw internal_error("divisible_core: image is not a subgroup");
    return out;
}

/// The meaningful non-splitting check for a constructed extension. The primal
/// sequence 0 -> A -> B -> B/A -> 0 splits over cyclic images whenever an
/// assignment repeats or vanishes, so at finite level the faithful invariant
/// is that the dual sequence 0 -> ann(A) -> B -> A^ -> 0 is totally
/// non-split: no nontrivial quotient of A can be retracted off B.
inline bool dual_totally_non_split(const RealizedExtension& e) {
    Subgroup ann = annihilator(e.table, e.a_embedded);
    return is_totally_non_split(e.table, ann, quotient_by(e.table, ann));
}

/// Builds both assignments' groups and compares their canonical forms.
/// Both inputs must share (l, A, orders) and satisfy the strong-generation
/// precondition; a failed level check surfaces as a domain error naming the
/// level.
inline bool uniqueness_demo(const TruncatedExtensionSpec& s1, const TruncatedExtensionSpec& s2) {
    if (s1.l != s2.l || !(s1.a == s2.a) || s1.orders != s2.orders)
        throw domain_error("uniqueness_demo: specs do not share (l, A, orders)");
    s1.validate_generation();
    s2.validate_generation();
    return construct_b(s1) == construct_b(s2);
}

} // namespace gff
