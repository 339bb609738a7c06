// This file is part of gff.
//
// Licensed under the Apache License, Version 2.0 (see
// LICENSE or https://www.apache.org/licenses/LICENSE-2.0).

#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gff/curves.hpp"
#include "gff/errors.hpp"

namespace gff {

using Json = nlohmann::ordered_json;

/// Curve file schema: {"field": {"p": int, "n": int}, "family": string,
/// "genus": int, "data": {...}} with field elements encoded as coefficient
/// vectors over F_p, little-endian by degree. Polynomials are arrays of
/// elements, little-endian by degree.

namespace curve_json {

inline Json element_to_json(const FqElement& e) {
    Json a = Json::array();
    for (int64_t c : e.coeffs()) a.push_back(c);
    return a;
}

inline FqElement element_from_json(const Field& f, const Json& j) {
    if (!j.is_array()) throw domain_error("curve file: field element must be an array");
    std::vector<int64_t> c;
    for (const auto& v : j) {
        if (!v.is_number_integer()) throw domain_error("curve file: element entry not an integer");
        c.push_back(v.get<int64_t>());
    }
    if (static_cast<int>(c.size()) != f->m)
        throw domain_error("curve file: element has wrong coefficient count");
    for (int64_t v : c)
        if (v < 0 || v >= f->p) throw domain_error("curve file: coefficient out of range");
    return FqElement(f, std::move(c));
}

inline Json poly_to_json(const FqPolynomial& p) {
    Json a = Json::array();
    for (const auto& c : p.coeffs()) a.push_back(element_to_json(c));
    return a;
}

inline FqPolynomial poly_from_json(const Field& f, const Json& j) {
    if (!j.is_array()) throw domain_error("curve file: polynomial must be an array");
    std::vector<FqElement> c;
    for (const auto& e : j) c.push_back(element_from_json(f, e));
    return FqPolynomial(f, std::move(c));
}

} // namespace curve_json

inline Json curve_to_json(const CurveModel& c) {
    using namespace curve_json;
    Json j;
    j["field"] = {{"p", c.base.p.get_si()}, {"n", c.base.n}};
    j["family"] = family_name(c.family);
    j["genus"] = c.genus;
    Json data;
    switch (c.family) {
        case CurveFamily::weierstrass_odd:
        case CurveFamily::weierstrass_char2: {
            Json a = Json::array();
            for (const auto& e : c.a_inv) a.push_back(element_to_json(e));
            data["a_invariants"] = a;
            break;
        }
        case CurveFamily::hyperelliptic_odd:
            data["f"] = poly_to_json(*c.hyper_f);
            break;
        case CurveFamily::artin_schreier_char2:
            data["numerator"] = poly_to_json(*c.as_num);
            data["denominator"] = poly_to_json(*c.as_den);
            break;
        case CurveFamily::plane_projective: {
            data["degree"] = c.plane_degree;
            Json terms = Json::array();
            for (const auto& t : c.plane_terms)
                terms.push_back(Json::array({t.ex, t.ey, t.ez, element_to_json(t.c)}));
            data["monomials"] = terms;
            break;
        }
    }
    j["data"] = data;
    return j;
}

inline CurveModel curve_from_json(const Json& j) {
    using namespace curve_json;
    if (!j.is_object()) throw domain_error("curve file: top level must be an object");
    for (const char* key : {"field", "family", "genus", "data"})
        if (!j.contains(key)) throw domain_error(std::string("curve file: missing key ") + key);
    const Json& jf = j["field"];
    if (!jf.contains("p") || !jf.contains("n")) throw domain_error("curve file: bad field object");
    PrimePower q = PrimePower::make(Integer(jf["p"].get<long>()), jf["n"].get<unsigned>());
    Field f = extension_field(q.p.get_si(), static_cast<int>(q.n));
    CurveFamily fam = family_from_name(j["family"].get<std::string>());
    const Json& data = j["data"];

    CurveModel c;
    switch (fam) {
        case CurveFamily::weierstrass_odd:
        case CurveFamily::weierstrass_char2: {
            const Json& a = data.at("a_invariants");
            if (!a.is_array() || a.size() != 5)
                throw domain_error("curve file: a_invariants must have 5 entries");
            std::array<FqElement, 5> ai{
                element_from_json(f, a[0]), element_from_json(f, a[1]),
                element_from_json(f, a[2]), element_from_json(f, a[3]),
                element_from_json(f, a[4])};
            c = make_weierstrass(q, ai);
            if ((q.p == 2) != (fam == CurveFamily::weierstrass_char2))
                throw domain_error("curve file: family does not match the characteristic");
            break;
        }
        case CurveFamily::hyperelliptic_odd:
            c = make_hyperelliptic(q, poly_from_json(f, data.at("f")));
            break;
        case CurveFamily::artin_schreier_char2: {
            FqPolynomial num = poly_from_json(f, data.at("numerator"));
            FqPolynomial den = data.contains("denominator")
                                   ? poly_from_json(f, data.at("denominator"))
                                   : FqPolynomial::one(f);
            c = make_artin_schreier(q, num, den);
            break;
        }
        case CurveFamily::plane_projective: {
            int degree = data.at("degree").get<int>();
            std::vector<PlaneTerm> terms;
            for (const auto& t : data.at("monomials")) {
                if (!t.is_array() || t.size() != 4)
                    throw domain_error("curve file: monomial must be [i, j, k, element]");
                terms.push_back({t[0].get<int>(), t[1].get<int>(), t[2].get<int>(),
                                 element_from_json(f, t[3])});
            }
            c = make_plane(q, degree, std::move(terms));
            break;
        }
    }
    int declared = j["genus"].get<int>();
    if (declared != c.genus)
        throw structure_error("curve file: declared genus " + std::to_string(declared) +
                              " does not match the computed genus " + std::to_string(c.genus));
    return c;
}

inline CurveModel load_curve_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw domain_error("cannot open curve file: " + path);
    Json j = Json::parse(in);
    return curve_from_json(j);
}

/// One corpus entry: a curve object extended with its expected class number
/// (and an optional label).
struct CorpusEntry {
    std::string label;
    CurveModel curve;
    Integer expected_h;
};

inline std::vector<CorpusEntry> load_corpus_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw domain_error("cannot open corpus file: " + path);
    Json j = Json::parse(in);
    if (!j.is_array()) throw domain_error("corpus file: top level must be an array");
    std::vector<CorpusEntry> out;
    for (const auto& entry : j) {
        CorpusEntry e;
        e.label = entry.value("label", std::string("entry " + std::to_string(out.size() + 1)));
        e.curve = curve_from_json(entry);
        if (!entry.contains("expected_h"))
            throw domain_error("corpus file: entry without expected_h");
        const auto& h = entry["expected_h"];
        e.expected_h = h.is_string() ? Integer(h.get<std::string>()) : Integer(h.get<long>());
        out.push_back(std::move(e));
    }
    return out;
}

} // namespace gff
