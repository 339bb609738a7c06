// This file is part of gff.
//
// Licensed under the Apache License, Version 2.0 (see
// LICENSE or https://www.apache.org/licenses/LICENSE-2.0).

#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "gff/finite_field.hpp"

using namespace gff;

namespace {

// independent irreducibility oracle: trial division by every smaller monic
bool irreducible_by_trial_division(const FqPolynomial& f) {
    int d = f.degree();
    if (d <= 0) return false;
    if (d == 1) return true;
    const Field& F = f.field();
    for (int dd = 1; dd <= d / 2; ++dd) {
        uint64_t count = 1;
        for (int i = 0; i < dd; ++i) count *= F->size;
        for (uint64_t k = 0; k < count; ++k) {
            std::vector<FqElement> c(dd + 1, FqElement::zero(F));
            uint64_t rest = k;
            for (int i = 0; i < dd; ++i) {
                c[i] = FqElement::decode(F, rest % F->size);
                rest /= F->size;
            }
            c[dd] = FqElement::one(F);
            if ((f % FqPolynomial(F, c)).is_zero()) return false;
        }
    }
    return true;
}

} // namespace

TEST_CASE("field construction picks deterministic least moduli") {
    auto f4 = extension_field(2, 2);
    REQUIRE(f4->modulus == std::vector<int64_t>{1, 1, 1}); // t^2+t+1
    auto f16 = extension_field(2, 4);
    REQUIRE(f16->modulus == std::vector<int64_t>{1, 1, 0, 0, 1}); // t^4+t+1
    REQUIRE(f16->size == 16);
    REQUIRE(extension_field(2, 2) == f4); // memoized
    REQUIRE_THROWS_AS(extension_field(4, 1), domain_error);
    REQUIRE_THROWS_AS(extension_field(3, 0), domain_error);
}

TEST_CASE("F_4 arithmetic table") {
    auto f4 = extension_field(2, 2);
    auto mu = FqElement::generator(f4);
    auto one = FqElement::one(f4);
    REQUIRE(mu * mu == mu + one);       // t^2 = t + 1
    REQUIRE((mu * mu * mu).is_one());   // order 3, so t generates F_4^x
    REQUIRE(mu.inverse() == mu * mu);
    REQUIRE((mu / mu).is_one());
}

TEST_CASE("multiplicative group order spot-check") {
    std::mt19937_64 rng(11);
    for (auto [p, m] : {std::pair{2, 3}, {3, 2}, {2, 4}, {3, 3}, {5, 2}, {7, 2}}) {
        auto F = extension_field(p, m);
        for (int i = 0; i < 10; ++i) {
            auto x = FqElement::decode(F, 1 + rng() % (F->size - 1));
            REQUIRE(x.pow(Integer(F->size) - 1).is_one());
        }
    }
}

TEST_CASE("encode/decode round trip") {
    auto F = extension_field(3, 3);
    for (uint64_t v = 0; v < F->size; ++v)
        REQUIRE(FqElement::decode(F, v).encode() == v);
    REQUIRE_THROWS_AS(FqElement::decode(F, F->size), domain_error);
}

TEST_CASE("irreducible_poly deterministic results") {
    auto f2 = prime_field(2);
    REQUIRE(irreducible_poly(f2, 1).to_string("t") == "t");
    REQUIRE(irreducible_poly(f2, 2).to_string("t") == "t^2 + t + 1");
    auto f3 = prime_field(3);
    auto cubic = irreducible_poly(f3, 3);
    REQUIRE(cubic.to_string("t") == "t^3 + 2*t + 1");
    REQUIRE(irreducible_by_trial_division(cubic));
    // nothing earlier in the enumeration order is irreducible
    bool earlier_found = false;
    for (uint64_t k = 0; k < 7; ++k) { // candidates before t^3+2t+1
        uint64_t rest = k;
        std::vector<FqElement> c(4, FqElement::zero(f3));
        for (int i = 0; i < 3; ++i) {
            c[i] = FqElement::decode(f3, rest % 3);
            rest /= 3;
        }
        c[3] = FqElement::one(f3);
        if (irreducible_by_trial_division(FqPolynomial(f3, c))) earlier_found = true;
    }
    REQUIRE_FALSE(earlier_found);
}

TEST_CASE("irreducible_poly passes Rabin checks and has no roots") {
    for (auto [p, m, dmax] : {std::tuple{2, 1, 8}, {3, 1, 5}, {2, 2, 3}, {5, 1, 4}}) {
        auto F = extension_field(p, m);
        for (int d = 1; d <= dmax; ++d) {
            auto f = irreducible_poly(F, d);
            REQUIRE(f.degree() == d);
            REQUIRE(f.leading().is_one());
            REQUIRE(is_irreducible(f));
            if (d >= 2) REQUIRE(poly_roots(f).empty());
            if (pow_integer(Integer(F->size), d) <= 4096)
                REQUIRE(irreducible_by_trial_division(f));
        }
    }
}

TEST_CASE("squarefree detection") {
    auto f2 = prime_field(2);
    auto x = FqPolynomial::x(f2);
    REQUIRE(is_squarefree(x * x + x)); // t^2+t = t(t+1)
    auto f3 = prime_field(3);
    auto y = FqPolynomial::x(f3);
    REQUIRE_FALSE(is_squarefree(y * y));
    auto f5 = prime_field(5);
    auto a = irreducible_poly(f5, 2);
    auto b = irreducible_poly(f5, 3);
    REQUIRE(is_squarefree(a * b));
    REQUIRE_FALSE(is_squarefree(a * a * b));
    // p-th powers have zero derivative
    auto z = FqPolynomial::x(f3);
    REQUIRE_FALSE(is_squarefree(z * z * z));
    REQUIRE_THROWS_AS(is_squarefree(FqPolynomial::zero(f3)), domain_error);
}

TEST_CASE("absolute trace on F_4 and linearity") {
    auto f4 = extension_field(2, 2);
    auto mu = FqElement::generator(f4);
    // by definition Tr(x) = x + x^2
    for (uint64_t v = 0; v < 4; ++v) {
        auto x = FqElement::decode(f4, v);
        auto direct = x + x * x;
        REQUIRE(direct.coeffs()[1] == 0);
        REQUIRE(x.absolute_trace() == direct.coeffs()[0]);
    }
    REQUIRE(FqElement::one(f4).absolute_trace() == 0);
    REQUIRE(mu.absolute_trace() == 1);
    // trace_of_basis reproduces the trace linearly
    auto F = extension_field(2, 4);
    auto tr = trace_of_basis(F);
    for (uint64_t v = 0; v < F->size; ++v) {
        auto x = FqElement::decode(F, v);
        int64_t lin = 0;
        for (int j = 0; j < F->m; ++j) lin = (lin + x.coeffs()[j] * tr[j]) % 2;
        REQUIRE(lin == x.absolute_trace());
    }
}

TEST_CASE("square roots in characteristic 2") {
    auto F = extension_field(2, 4);
    for (uint64_t v = 0; v < F->size; ++v) {
        auto x = FqElement::decode(F, v);
        auto s = x.sqrt_char2();
        REQUIRE(s * s == x);
    }
}

TEST_CASE("quadratic character matches squaring table") {
    for (auto [p, m] : {std::pair{3, 2}, {5, 1}, {7, 1}, {3, 1}}) {
        auto F = extension_field(p, m);
        std::vector<int> is_sq(F->size, 0);
        for (uint64_t v = 0; v < F->size; ++v) {
            auto y = FqElement::decode(F, v);
            is_sq[(y * y).encode()] = 1;
        }
        for (uint64_t v = 0; v < F->size; ++v) {
            auto x = FqElement::decode(F, v);
            int chi = x.quadratic_character();
            if (v == 0)
                REQUIRE(chi == 0);
            else
                REQUIRE(chi == (is_sq[v] ? 1 : -1));
        }
    }
}

TEST_CASE("field embeddings are ring homomorphisms") {
    auto f4 = extension_field(2, 2);
    auto f16 = extension_field(2, 4);
    FieldEmbedding emb(f4, f16);
    auto mu = FqElement::generator(f4);
    auto im = emb.map(mu);
    REQUIRE((im * im + im + FqElement::one(f16)).is_zero()); // satisfies t^2+t+1
    std::mt19937_64 rng(3);
    for (int i = 0; i < 50; ++i) {
        auto a = FqElement::decode(f4, rng() % 4);
        auto b = FqElement::decode(f4, rng() % 4);
        REQUIRE(emb.map(a * b) == emb.map(a) * emb.map(b));
        REQUIRE(emb.map(a + b) == emb.map(a) + emb.map(b));
    }
    REQUIRE(emb.map(FqElement::one(f4)).is_one());
    // embeddings from the prime field send constants to constants
    FieldEmbedding pe(prime_field(3), extension_field(3, 2));
    REQUIRE(pe.map(FqElement::from_int(prime_field(3), 2)) ==
            FqElement::from_int(extension_field(3, 2), 2));
    REQUIRE_THROWS_AS(FieldEmbedding(extension_field(2, 3), extension_field(2, 4)),
                      domain_error);
}

TEST_CASE("polynomial division, gcd and shift") {
    auto f5 = prime_field(5);
    auto x = FqPolynomial::x(f5);
    auto two = FqPolynomial::constant(FqElement::from_int(f5, 2));
    auto f = (x * x + x) * (x + FqPolynomial::one(f5)) + two;
    auto [q, r] = f.divmod(x * x + x);
    REQUIRE(q * (x * x + x) + r == f);
    REQUIRE(r.degree() < 2);
    auto g1 = irreducible_poly(f5, 2);
    auto g2 = irreducible_poly(f5, 3);
    REQUIRE(poly_gcd(g1 * g2, g1 * g1) == g1);
    // Taylor shift: f(y + a) at y agrees with f at y + a
    auto sh = f.taylor_shift(FqElement::from_int(f5, 2));
    for (uint64_t v = 0; v < 5; ++v) {
        auto pt = FqElement::decode(f5, v);
        REQUIRE(sh.eval(pt) == f.eval(pt + FqElement::from_int(f5, 2)));
    }
    // zero polynomial degree marker
    REQUIRE(FqPolynomial::zero(f5).degree() == -1);
    REQUIRE((f - f).is_zero());
}
