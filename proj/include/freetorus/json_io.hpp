#pragma once

// JSON encodings. Integers are written as JSON numbers when they fit in 64
// bits and as decimal strings otherwise; both forms are accepted on input.
// Rationals are {"num": ..., "den": ...}.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "analytic_action.hpp"
#include "errors.hpp"
#include "exact_lattice.hpp"
#include "freeness.hpp"
#include "int_matrix.hpp"
#include "normal_form.hpp"
#include "sym_scalar.hpp"
#include "trig_affine_map.hpp"
#include "zp_action.hpp"

namespace freetorus {

using json = nlohmann::json;

/// Parses text, reporting syntax errors with line and column.
inline json parse_json_text(std::string_view text) {
    try {
        return json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        std::size_t line = 1, col = 1;
        for (std::size_t k = 0; k + 1 < e.byte && k < text.size(); ++k) {
            if (text[k] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw InputError("JSON parse error at line " + std::to_string(line) + ", column " + std::to_string(col) +
                         ": " + e.what());
    }
}

inline json int_to_json(const Int& x) {
    if (x >= std::numeric_limits<std::int64_t>::min() && x <= std::numeric_limits<std::int64_t>::max())
        return x.convert_to<std::int64_t>();
    return x.str();
}

inline Int int_from_json(const json& j) {
    if (j.is_number_integer()) return j.is_number_unsigned() ? Int(j.get<std::uint64_t>()) : Int(j.get<std::int64_t>());
    if (j.is_string()) {
        const auto& s = j.get_ref<const std::string&>();
        std::size_t start = (!s.empty() && (s[0] == '-' || s[0] == '+')) ? 1 : 0;
        if (start == s.size() || s.find_first_not_of("0123456789", start) != std::string::npos)
            throw InputError("not an integer: \"" + s + "\"");
        return Int(s);
    }
    throw InputError("expected an exact integer, got " + j.dump());
}

inline json rational_to_json(const Rational& r) {
    return {{"num", int_to_json(boost::multiprecision::numerator(r))},
            {"den", int_to_json(boost::multiprecision::denominator(r))}};
}

inline Rational rational_from_json(const json& j) {
    if (j.is_number_integer() || j.is_string()) return Rational(int_from_json(j));
    if (!j.is_object() || !j.contains("num") || !j.contains("den")) throw InputError("expected {\"num\", \"den\"}");
    Int den = int_from_json(j.at("den"));
    if (den == 0) throw InputError("zero denominator");
    return Rational(int_from_json(j.at("num")), den);
}

inline json vector_to_json(const IntVector& v) {
    json out = json::array();
    for (const auto& x : v) out.push_back(int_to_json(x));
    return out;
}

inline IntVector vector_from_json(const json& j) {
    if (!j.is_array()) throw InputError("expected an integer array");
    IntVector v;
    for (const auto& x : j) v.push_back(int_from_json(x));
    return v;
}

inline json matrix_to_json(const IntMatrix& m) {
    json out = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) out.push_back(vector_to_json(m.row(i)));
    return out;
}

inline IntMatrix matrix_from_json(const json& j) {
    if (!j.is_array() || j.empty()) throw InputError("expected a nonempty array of rows");
    std::vector<IntVector> rows;
    for (const auto& r : j) rows.push_back(vector_from_json(r));
    IntMatrix m(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != m.cols()) throw InputError("ragged matrix rows");
        for (std::size_t k = 0; k < m.cols(); ++k) m(i, k) = rows[i][k];
    }
    return m;
}

// --- ActionSpec: {"p": int, "q": int, "generators": [[row arrays]]}

inline json to_json(const ActionSpec& a) {
    json gens = json::array();
    for (const auto& g : a.generators()) gens.push_back(matrix_to_json(g));
    return {{"p", a.p()}, {"q", a.q()}, {"generators", gens}};
}

inline ActionSpec action_from_json(const json& j) {
    if (!j.is_object() || !j.contains("generators")) throw InputError("action: missing \"generators\"");
    std::vector<IntMatrix> gens;
    for (const auto& g : j.at("generators")) gens.push_back(matrix_from_json(g));
    if (j.contains("p") && j.at("p") != gens.size())
        throw InputError("action: \"p\" = " + j.at("p").dump() + " but " + std::to_string(gens.size()) +
                         " generators given");
    if (j.contains("q") && !gens.empty() && j.at("q") != gens.front().rows())
        throw InputError("action: \"q\" = " + j.at("q").dump() + " does not match the generator size");
    return ActionSpec(std::move(gens));
}

// --- NormalFormResult: {"a","b","c","d","P","W"}

inline json to_json(const NormalFormResult& nf) {
    return {{"a", int_to_json(nf.params.a)}, {"b", int_to_json(nf.params.b)}, {"c", int_to_json(nf.params.c)},
            {"d", int_to_json(nf.params.d)}, {"P", matrix_to_json(nf.P)},       {"W", matrix_to_json(nf.W)}};
}

inline NormalFormResult normal_form_from_json(const json& j) {
    for (const char* k : {"a", "b", "c", "d", "P", "W"})
        if (!j.contains(k)) throw InputError(std::string("normal form: missing \"") + k + "\"");
    return {{int_from_json(j.at("a")), int_from_json(j.at("b")), int_from_json(j.at("c")), int_from_json(j.at("d"))},
            matrix_from_json(j.at("P")),
            matrix_from_json(j.at("W"))};
}

// --- SymScalar: {"const": rational, "alpha": [rational, ...]}

inline json to_json(const SymScalar& s) {
    json alpha = json::array();
    for (const auto& c : s.alpha_coefficients()) alpha.push_back(rational_to_json(c));
    return {{"const", rational_to_json(s.constant())}, {"alpha", alpha}};
}

inline SymScalar sym_from_json(const json& j) {
    if (!j.is_object()) return SymScalar(rational_from_json(j));
    SymScalar s(j.contains("const") ? rational_from_json(j.at("const")) : Rational(0));
    if (j.contains("alpha")) {
        std::size_t k = 0;
        for (const auto& c : j.at("alpha")) s += SymScalar::alpha(k++, rational_from_json(c));
    }
    return s;
}

inline json sym3_to_json(const SymVec3& v) { return json::array({to_json(v[0]), to_json(v[1]), to_json(v[2])}); }

inline SymVec3 sym3_from_json(const json& j) {
    if (!j.is_array() || j.size() != 3) throw InputError("expected three symbolic scalars");
    return {sym_from_json(j[0]), sym_from_json(j[1]), sym_from_json(j[2])};
}

// --- TrigAffineMap: {"A", "t", "u", "v", "formula"}

inline json to_json(const TrigAffineMap& f) {
    return {{"A", matrix_to_json(f.linear())},
            {"t", sym3_to_json(f.t())},
            {"u", sym3_to_json(f.u())},
            {"v", sym3_to_json(f.v())},
            {"formula", to_string(f)}};
}

inline TrigAffineMap map_from_json(const json& j) {
    for (const char* k : {"A", "t", "u", "v"})
        if (!j.contains(k)) throw InputError(std::string("map: missing \"") + k + "\"");
    return TrigAffineMap(matrix_from_json(j.at("A")), sym3_from_json(j.at("t")), sym3_from_json(j.at("u")),
                         sym3_from_json(j.at("v")));
}

// --- FreeActionFamily: {"p", "normal_form", "lifts"}

inline json to_json(const FreeActionFamily& fam) {
    json lifts = json::array();
    for (const auto& f : fam.lifts) lifts.push_back(to_json(f));
    return {{"p", fam.p}, {"normal_form", to_json(fam.nf)}, {"lifts", lifts}};
}

inline FreeActionFamily family_from_json(const json& j) {
    for (const char* k : {"p", "normal_form", "lifts"})
        if (!j.contains(k)) throw InputError(std::string("family: missing \"") + k + "\"");
    FreeActionFamily fam;
    fam.p = j.at("p").get<std::size_t>();
    fam.nf = normal_form_from_json(j.at("normal_form"));
    for (const auto& f : j.at("lifts")) fam.lifts.push_back(map_from_json(f));
    if (fam.lifts.size() != fam.p) throw InputError("family: number of lifts does not match p");
    return fam;
}

// --- reports

inline json to_json(const LatticeBasis& b) {
    json vs = json::array();
    for (const auto& v : b.vectors) vs.push_back(vector_to_json(v));
    return {{"ambient_dim", b.ambient_dim}, {"vectors", vs}};
}

inline json to_json(const SpectralVerdict& v) {
    json out{{"status", to_string(v.status)}};
    out["closure_size"] = v.closure_size ? json(*v.closure_size) : json(nullptr);
    out["box_radius"] = v.box_radius ? json(*v.box_radius) : json(nullptr);
    out["witness"] = v.witness ? vector_to_json(*v.witness) : json(nullptr);
    return out;
}

inline json to_json(const DefectReport& r) {
    json out{{"constant_integer", r.constant_integer}};
    out["defect"] = r.constant_integer ? vector_to_json(r.defect) : json(nullptr);
    out["discrepancies"] = r.discrepancies;
    return out;
}

inline json to_json(const FixedPointReport& r) {
    json out{{"ell", vector_to_json(r.ell)}, {"verdict", to_string(r.verdict)}};
    if (r.obstruction) {
        json mono = json::array();
        for (const auto& [jk, c] : r.obstruction->monomials)
            mono.push_back({{"j", jk.first + 1}, {"k", jk.second + 1}, {"coeff", rational_to_json(c)}});
        out["obstruction"] = {{"monomials", mono},
                              {"x_offset", rational_to_json(r.obstruction->x_offset)},
                              {"y_offset", rational_to_json(r.obstruction->y_offset)},
                              {"slope", rational_to_json(r.obstruction->slope)},
                              {"text", r.obstruction->text}};
    }
    if (r.witness) out["witness"] = *r.witness;
    return out;
}

inline json to_json(const LiftVerdict& v) {
    return {{"free", v.free},
            {"index", int_to_json(v.index)},
            {"radius", v.radius},
            {"checked", v.checked},
            {"argument", v.argument}};
}

inline std::string exponent_key(const IntVector& ell) {
    std::string k;
    for (std::size_t i = 0; i < ell.size(); ++i) k += (i ? "," : "") + ell[i].str();
    return k;
}

/// Keyed by the exponent vector, "l1,l2,...".
inline json to_json(const ScanReport& r) {
    json entries = json::object();
    for (const auto& e : r.entries)
        entries[exponent_key(e.ell)] = {{"min_displacement", e.min_displacement}, {"flagged", e.flagged}};
    return {{"box", r.box}, {"grid", r.grid}, {"tol", r.tol}, {"any_flagged", r.any_flagged()}, {"entries", entries}};
}

}  // namespace freetorus
