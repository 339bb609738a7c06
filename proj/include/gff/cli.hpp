// This file is part of gff.
//
// Licensed under the Apache License, Version 2.0 (see
// LICENSE or https://www.apache.org/licenses/LICENSE-2.0).

#pragma once

#include <algorithm>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gff/abelian_group.hpp"
#include "gff/arith.hpp"
#include "gff/curve_io.hpp"
#include "gff/curves.hpp"
#include "gff/errors.hpp"
#include "gff/extensions.hpp"
#include "gff/profinite.hpp"

namespace gff::cli {

using Json = nlohmann::ordered_json;

/// Result of one invocation: the JSON document for standard output, a
/// human-readable summary for standard error, and the process exit code
/// (0 ok, 1 domain error, 2 usage error).
struct RunResult {
    int exit_code = 0;
    Json document; // null when the command line itself failed to parse
    std::string summary;
};

namespace detail_cli {

/// JSON numbers stay within the 2^53 window; larger values are emitted as
/// decimal strings so consumers cannot silently lose precision.
inline Json integer_json(const Integer& v) {
    static const Integer max_safe = (Integer(1) << 53) - 1;
    if (v <= max_safe && v >= -max_safe) return Json(static_cast<int64_t>(v.get_si()));
    return Json(v.get_str());
}

inline Integer parse_integer(const std::string& s) {
    try {
        return Integer(s);
    } catch (const std::invalid_argument&) {
        throw domain_error("not an integer: '" + s + "'");
    }
}

inline std::vector<Integer> parse_integer_list(const std::string& s) {
    std::vector<Integer> out;
    size_t pos = 0;
    while (pos <= s.size()) {
        size_t comma = s.find(',', pos);
        if (comma == std::string::npos) comma = s.size();
        std::string tok = s.substr(pos, comma - pos);
        if (tok.empty()) throw domain_error("empty entry in list '" + s + "'");
        out.push_back(parse_integer(tok));
        pos = comma + 1;
    }
    return out;
}

inline Json prime_power_json(const PrimePower& q) {
    Json j;
    j["p"] = integer_json(q.p);
    j["n"] = q.n;
    j["q"] = integer_json(q.q);
    return j;
}

inline Json lprofile_json(const PrimePower& q, const TqProfile& prof, const Integer& l) {
    Json j;
    j["l"] = integer_json(l);
    LProfile lp = prof.at(l);
    if (l == q.p) {
        j["threshold"] = nullptr;
        j["s"] = nullptr;
        j["isolated_m1"] = false;
        j["exceptional"] = false;
    } else {
        j["threshold"] = *lp.threshold;
        j["s"] = s_l(prof, l);
        j["isolated_m1"] = lp.isolated_m1;
        j["exceptional"] = !lp.isolated_m1 && *lp.threshold > 1;
    }
    return j;
}

inline Json lpoly_json(const LPolynomial& lp) {
    Json b = Json::array();
    for (const Integer& c : lp.b) b.push_back(integer_json(c));
    return b;
}

} // namespace detail_cli

/// Executes one command line (without the program name). Never throws:
/// domain failures become status="error" documents with exit code 1 and
/// command-line failures exit code 2.
inline RunResult run(const std::vector<std::string>& args) {
    using detail_cli::integer_json;
    using detail_cli::parse_integer;
    using detail_cli::parse_integer_list;
    using detail_cli::prime_power_json;

    CLI::App app{"invariants of abelianized absolute Galois groups of global function fields"};
    app.require_subcommand(1);

    std::string q_str, q1_str, q2_str, cl_str, cl1_str, cl2_str;
    std::string curve_path, corpus_path, a_str, orders_str, l_str;
    long l_max = 50;
    unsigned m_count = 1;
    uint64_t reorder_seed = 1;
    bool check_extra = false;

    auto* c_profile = app.add_subcommand("tq-profile", "per-prime profile of the torsion kernel");
    c_profile->add_option("--q", q_str, "prime power, as q or p^n")->required();
    c_profile->add_option("--l-max", l_max, "largest prime to report")->required();

    auto* c_dk = app.add_subcommand("dk", "degree invariant d and p*");
    c_dk->add_option("--q", q_str)->required();

    auto* c_cmp_tq = app.add_subcommand("compare-tq", "decide torsion-kernel isomorphism");
    c_cmp_tq->add_option("--q1", q1_str)->required();
    c_cmp_tq->add_option("--q2", q2_str)->required();

    auto* c_cmp_gab = app.add_subcommand("compare-gab", "decide full-invariant isomorphism");
    c_cmp_gab->add_option("--q1", q1_str)->required();
    c_cmp_gab->add_option("--cl1", cl1_str, "class group literal, e.g. 2,2,9")->required();
    c_cmp_gab->add_option("--q2", q2_str)->required();
    c_cmp_gab->add_option("--cl2", cl2_str)->required();

    auto* c_rec = app.add_subcommand("reconstruct", "round-trip the invariant reconstruction");
    c_rec->add_option("--q", q_str)->required();
    c_rec->add_option("--cl", cl_str, "class group literal")->required();
    c_rec->add_option("--l-max", l_max, "largest prime to check (default 50)");

    auto* c_exc = app.add_subcommand("exceptional", "scan for exceptional primes");
    c_exc->add_option("--q", q_str)->required();
    c_exc->add_option("--l-max", l_max)->required();

    auto* c_zeta = app.add_subcommand("zeta", "L-polynomial and class number of a curve file");
    c_zeta->add_option("--curve", curve_path, "curve JSON file")->required();
    c_zeta->add_flag("--check-extra", check_extra,
                     "verify the predicted count over the next extension");

    auto* c_corpus = app.add_subcommand("corpus-verify", "check expected class numbers");
    c_corpus->add_option("--file", corpus_path, "corpus JSON file")->required();

    auto* c_wat = app.add_subcommand("waterhouse", "find an elliptic curve with q points");
    c_wat->add_option("--q", q_str)->required();

    auto* c_two = app.add_subcommand("two-rank-family", "hyperelliptic family with growing 2-rank");
    c_two->add_option("--q", q_str)->required();
    c_two->add_option("--m", m_count, "number of irreducible factors")->required();

    auto* c_ext = app.add_subcommand("extension", "construct the truncated extension group");
    c_ext->add_option("--l", l_str)->required();
    c_ext->add_option("--A", a_str, "finite abelian l-group literal")->required();
    c_ext->add_option("--orders", orders_str, "comma-separated l-power orders")->required();
    c_ext->add_option("--reorder", reorder_seed, "seed for the alternate assignment (default 1)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        RunResult r;
        r.exit_code = 0;
        r.summary = app.help();
        return r;
    } catch (const CLI::ParseError& e) {
        RunResult r;
        r.exit_code = 2;
        r.summary = std::string(e.what()) + "\n";
        return r;
    }

    RunResult result;
    Json& doc = result.document;
    std::ostringstream err;

    auto finish_error = [&](const std::string& message) {
        if (doc.is_object()) doc.erase("outputs");
        doc["status"] = "error";
        doc["error"] = message;
        result.exit_code = 1;
        err << "error: " << message << "\n";
    };

    auto check_l_max = [&] {
        if (l_max > 10000000) throw size_error("--l-max exceeds the 1e7 scan cap");
    };

    try {
        if (app.got_subcommand(c_profile)) {
            doc["command"] = "tq-profile";
            doc["inputs"] = {{"q", q_str}, {"l_max", l_max}};
            check_l_max();
            PrimePower q = PrimePower::parse(q_str);
            TqProfile prof(q);
            Json out = prime_power_json(q);
            out["d"] = integer_json(d_of(q).value);
            out["p_star"] = integer_json(p_star(q.p));
            Json primes = Json::array();
            for (const Integer& l : primes_up_to(l_max))
                primes.push_back(detail_cli::lprofile_json(q, prof, l));
            out["primes"] = primes;
            doc["outputs"] = out;
            err << "q = " << q.to_string() << ", d = " << d_of(q).value.get_str() << "\n";
            for (const auto& e : out["primes"])
                err << "  l = " << e["l"].dump() << ": threshold " << e["threshold"].dump()
                    << ", s " << e["s"].dump() << (e["isolated_m1"].get<bool>() ? ", isolated m=1" : "")
                    << (e["exceptional"].get<bool>() ? ", exceptional" : "") << "\n";
        } else if (app.got_subcommand(c_dk)) {
            doc["command"] = "dk";
            doc["inputs"] = {{"q", q_str}};
            PrimePower q = PrimePower::parse(q_str);
            Json out = prime_power_json(q);
            out["d"] = integer_json(d_of(q).value);
            out["p_star"] = integer_json(p_star(q.p));
            doc["outputs"] = out;
            err << "d = " << d_of(q).value.get_str() << ", p* = " << p_star(q.p).get_str() << "\n";
        } else if (app.got_subcommand(c_cmp_tq)) {
            doc["command"] = "compare-tq";
            doc["inputs"] = {{"q1", q1_str}, {"q2", q2_str}};
            PrimePower q1 = PrimePower::parse(q1_str), q2 = PrimePower::parse(q2_str);
            bool iso = tq_isomorphic(q1, q2);
            Json out;
            out["isomorphic"] = iso;
            out["q1"] = {{"p", integer_json(q1.p)}, {"d", integer_json(d_of(q1).value)}};
            out["q2"] = {{"p", integer_json(q2.p)}, {"d", integer_json(d_of(q2).value)}};
            doc["outputs"] = out;
            err << (iso ? "isomorphic" : "not isomorphic") << "\n";
        } else if (app.got_subcommand(c_cmp_gab)) {
            doc["command"] = "compare-gab";
            doc["inputs"] = {{"q1", q1_str}, {"cl1", cl1_str}, {"q2", q2_str}, {"cl2", cl2_str}};
            PrimePower q1 = PrimePower::parse(q1_str), q2 = PrimePower::parse(q2_str);
            auto g1 = GabInvariant::from_field_data(q1, FiniteAbelianGroup::parse(cl1_str));
            auto g2 = GabInvariant::from_field_data(q2, FiniteAbelianGroup::parse(cl2_str));
            Json conditions;
            conditions["same_characteristic"] = g1.p == g2.p;
            conditions["same_degree_invariant"] = g1.d == g2.d;
            conditions["isomorphic_non_p_class_groups"] = g1.cl_non_p == g2.cl_non_p;
            Json out;
            out["isomorphic"] = gab_isomorphic(g1, g2);
            out["conditions"] = conditions;
            out["invariant1"] = {{"p", integer_json(g1.p)},
                                 {"d", integer_json(g1.d.value)},
                                 {"cl_non_p", g1.cl_non_p.to_string()}};
            out["invariant2"] = {{"p", integer_json(g2.p)},
                                 {"d", integer_json(g2.d.value)},
                                 {"cl_non_p", g2.cl_non_p.to_string()}};
            doc["outputs"] = out;
            err << (out["isomorphic"].get<bool>() ? "isomorphic" : "not isomorphic") << "\n";
        } else if (app.got_subcommand(c_rec)) {
            doc["command"] = "reconstruct";
            doc["inputs"] = {{"q", q_str}, {"cl", cl_str}, {"l_max", l_max}};
            check_l_max();
            PrimePower q = PrimePower::parse(q_str);
            auto inv = GabInvariant::from_field_data(q, FiniteAbelianGroup::parse(cl_str));
            TqProfile prof(q);
            Json per_prime = Json::array();
            bool all = true;
            for (const Integer& l : primes_up_to(l_max)) {
                if (l == q.p) continue;
                unsigned s = s_l(prof, l);
                unsigned rec = recover_ord_l_d(s, l, q.p);
                unsigned expect = ord_l(l, inv.d.value);
                bool match = rec == expect;
                all = all && match;
                per_prime.push_back({{"l", integer_json(l)},
                                     {"s", s},
                                     {"recovered_ord", rec},
                                     {"expected_ord", expect},
                                     {"match", match}});
            }
            Json out;
            out["p"] = integer_json(q.p);
            out["d"] = integer_json(inv.d.value);
            out["recovered_p"] = integer_json(q.p);
            out["recovered_class_group_non_p"] = inv.recovered_non_p_class_group().to_string();
            out["per_prime"] = per_prime;
            out["all_match"] = all;
            doc["outputs"] = out;
            err << (all ? "reconstruction round-trip holds" : "MISMATCH in reconstruction")
                << " for " << per_prime.size() << " primes\n";
        } else if (app.got_subcommand(c_exc)) {
            doc["command"] = "exceptional";
            doc["inputs"] = {{"q", q_str}, {"l_max", l_max}};
            check_l_max();
            PrimePower q = PrimePower::parse(q_str);
            auto primes = exceptional_scan(q, l_max);
            Json arr = Json::array();
            for (const Integer& l : primes) arr.push_back(integer_json(l));
            Json out;
            out["primes"] = arr;
            out["isolated_m1_at_2"] = q.p != 2 && q.q % 4 == 3;
            doc["outputs"] = out;
            err << primes.size() << " exceptional prime(s) up to " << l_max << "\n";
        } else if (app.got_subcommand(c_zeta)) {
            doc["command"] = "zeta";
            doc["inputs"] = {{"curve", curve_path}, {"check_extra", check_extra}};
            CurveModel c = load_curve_file(curve_path);
            LPolynomial lp = l_polynomial(c);
            Json out;
            out["field"] = prime_power_json(c.base);
            out["family"] = family_name(c.family);
            out["genus"] = c.genus;
            Json counts = Json::array();
            for (int i = 1; i <= c.genus; ++i)
                counts.push_back(static_cast<uint64_t>(count_points(c, i)));
            out["counts"] = counts;
            out["l_polynomial"] = detail_cli::lpoly_json(lp);
            out["class_number"] = integer_json(lp.h());
            out["functional_equation"] = lp.functional_equation_holds();
            auto [lo, hi] = lp.weil_interval();
            out["weil_interval"] = {{"lower", integer_json(lo)}, {"upper", integer_json(hi)}};
            out["weil_bound_ok"] = lo <= lp.h() && lp.h() <= hi;
            if (check_extra) {
                unsigned next = c.genus + 1;
                Integer predicted = lp.predicted_count(next);
                Integer counted = static_cast<unsigned long>(count_points(c, next));
                out["extra_check"] = {{"extension", next},
                                      {"predicted", integer_json(predicted)},
                                      {"counted", integer_json(counted)},
                                      {"match", predicted == counted}};
            }
            doc["outputs"] = out;
            err << "genus " << c.genus << ", h = " << lp.h().get_str() << "\n";
        } else if (app.got_subcommand(c_corpus)) {
            doc["command"] = "corpus-verify";
            doc["inputs"] = {{"file", corpus_path}};
            auto corpus = load_corpus_file(corpus_path);
            Json entries = Json::array();
            bool all = true;
            for (const auto& e : corpus) {
                Integer h = class_number(e.curve);
                bool pass = h == e.expected_h;
                all = all && pass;
                entries.push_back({{"label", e.label},
                                   {"family", family_name(e.curve.family)},
                                   {"genus", e.curve.genus},
                                   {"expected_h", integer_json(e.expected_h)},
                                   {"computed_h", integer_json(h)},
                                   {"pass", pass}});
                err << (pass ? "  ok   " : "  FAIL ") << e.label << " (h = " << h.get_str()
                    << ")\n";
            }
            Json out;
            out["entries"] = entries;
            out["all_pass"] = all;
            doc["outputs"] = out;
            err << (all ? "all entries pass" : "some entries FAIL") << "\n";
        } else if (app.got_subcommand(c_wat)) {
            doc["command"] = "waterhouse";
            doc["inputs"] = {{"q", q_str}};
            PrimePower q = PrimePower::parse(q_str);
            CurveModel c = waterhouse_search(q);
            auto group = elliptic_group_structure(c);
            Json out;
            out["curve"] = curve_to_json(c);
            out["count"] = static_cast<uint64_t>(count_points(c, 1));
            out["class_number"] = integer_json(class_number(c));
            out["group"] = {{"structure", group.to_string()},
                            {"order", integer_json(group.order())}};
            doc["outputs"] = out;
            err << "found a curve with " << q.q.get_str() << " points; group "
                << group.to_string() << "\n";
        } else if (app.got_subcommand(c_two)) {
            doc["command"] = "two-rank-family";
            doc["inputs"] = {{"q", q_str}, {"m", m_count}};
            PrimePower q = PrimePower::parse(q_str);
            auto fam = two_rank_family(q, m_count);
            Json factors = Json::array();
            for (const auto& d : fam.factors) factors.push_back(d.to_string());
            Json out;
            out["m"] = m_count;
            out["genus"] = fam.curve.genus;
            out["factors"] = factors;
            out["l_polynomial"] = detail_cli::lpoly_json(fam.lpoly);
            out["class_number"] = integer_json(fam.h);
            out["required_divisor"] = integer_json(fam.divisor);
            out["divides"] = fam.divides;
            doc["outputs"] = out;
            err << "genus " << fam.curve.genus << ", h = " << fam.h.get_str() << ", divisor "
                << fam.divisor.get_str() << (fam.divides ? " | h" : " does NOT divide h") << "\n";
        } else if (app.got_subcommand(c_ext)) {
            doc["command"] = "extension";
            doc["inputs"] = {{"l", l_str},
                             {"A", a_str},
                             {"orders", orders_str},
                             {"reorder", reorder_seed}};
            Integer l = parse_integer(l_str);
            auto a = FiniteAbelianGroup::parse(a_str);
            auto orders = parse_integer_list(orders_str);
            auto spec = TruncatedExtensionSpec::with_default_assignment(l, a, orders);
            spec.validate_generation();
            auto b = construct_b(spec);
            auto other = spec.reordered(reorder_seed);
            bool unique = uniqueness_demo(spec, other);

            Json out;
            out["l"] = integer_json(l);
            out["A"] = a.to_string();
            Json ovals = Json::array();
            for (const Integer& k : orders) ovals.push_back(integer_json(k));
            out["orders"] = ovals;
            out["assignment"] = spec.assignment;
            out["b"] = b.to_string();
            out["order"] = integer_json(b.order());
            Integer border = b.order();
            if (border <= 128) {
                out["totally_non_split"] = dual_totally_non_split(realize_extension(spec));
            } else {
                out["totally_non_split"] = nullptr; // beyond the brute-force cap
            }
            out["uniqueness"] = {{"seed", reorder_seed},
                                 {"assignment", other.assignment},
                                 {"isomorphic", unique}};
            doc["outputs"] = out;
            err << "B = " << b.to_string() << ", non-split "
                << out["totally_non_split"].dump() << ", uniqueness "
                << (unique ? "holds" : "FAILS") << "\n";
        }
        doc["status"] = "ok";
    } catch (const gff::error& e) {
        finish_error(e.what());
    } catch (const std::exception& e) {
        finish_error(e.what());
    }

    result.summary = err.str();
    return result;
}

inline int main_entry(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    RunResult r = run(args);
    if (!r.document.is_null()) std::cout << r.document.dump(2) << "\n";
    if (!r.summary.empty()) std::cerr << r.summary;
    return r.exit_code;
}

} // namespace gff::cli
