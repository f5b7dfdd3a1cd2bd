#pragma once

// Command-line front end. Exit codes: 0 success, 1 hypothesis rejection,
// 2 input error, 3 internal verification failure.

#include <cstddef>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "analytic_action.hpp"
#include "errors.hpp"
#include "exact_lattice.hpp"
#include "fixtures.hpp"
#include "freeness.hpp"
#include "json_io.hpp"
#include "normal_form.hpp"
#include "zp_action.hpp"

namespace freetorus::cli {

enum ExitCode : int { kOk = 0, kHypothesis = 1, kInput = 2, kInternal = 3 };

struct CliConfig {
    std::string subcommand;
    std::string input_path = "-";
    long long box_radius = kDefaultBoxRadius;
    std::size_t closure_cap = kDefaultClosureCap;
    std::optional<std::vector<double>> alpha;
    std::optional<long long> seed;
    std::string output_format = "json";
    std::string word;
    std::string start = "0,0,0";
    bool scan = false;
    long long scan_box = 2;
    std::size_t grid = 64;
    double tol = 1e-3;
};

inline json to_json(const CliConfig& c) {
    json j{{"subcommand", c.subcommand},
           {"input", c.input_path},
           {"box", c.box_radius},
           {"closure_cap", c.closure_cap},
           {"format", c.output_format}};
    j["alpha"] = c.alpha ? json(*c.alpha) : json(nullptr);
    j["seed"] = c.seed ? json(*c.seed) : json(nullptr);
    if (c.subcommand == "orbit") {
        j["word"] = c.word;
        j["start"] = c.start;
    }
    if (c.subcommand == "verify-free") {
        j["scan"] = c.scan;
        if (c.scan) {
            j["scan_box"] = c.scan_box;
            j["grid"] = c.grid;
            j["tol"] = c.tol;
        }
    }
    return j;
}

namespace detail {

inline std::string read_input(const CliConfig& cfg, std::istream& in) {
    std::ostringstream buf;
    if (cfg.input_path == "-") {
        buf << in.rdbuf();
    } else {
        std::ifstream f(cfg.input_path);
        if (!f) throw InputError("cannot open input file " + cfg.input_path);
        buf << f.rdbuf();
    }
    return buf.str();
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) out.push_back(cur);
    return out;
}

inline std::vector<std::size_t> parse_word(const std::string& s, std::size_t p) {
    std::vector<std::size_t> word;
    if (s.empty()) return word;
    for (const auto& tok : split(s, ',')) {
        std::size_t pos = 0;
        long long k = 0;
        try {
            k = std::stoll(tok, &pos);
        } catch (const std::exception&) {
            throw InputError("malformed word entry \"" + tok + "\"");
        }
        if (pos != tok.size()) throw InputError("malformed word entry \"" + tok + "\"");
        if (k < 1 || static_cast<std::size_t>(k) > p)
            throw InputError("word entry " + tok + " out of range 1.." + std::to_string(p));
        word.push_back(static_cast<std::size_t>(k - 1));
    }
    return word;
}

inline Point3 parse_point(const std::string& s) {
    auto parts = split(s, ',');
    if (parts.size() != 3) throw InputError("start point needs three coordinates, got \"" + s + "\"");
    Point3 p{};
    for (std::size_t i = 0; i < 3; ++i) {
        try {
            p[i] = std::stod(parts[i]);
        } catch (const std::exception&) {
            throw InputError("malformed start coordinate \"" + parts[i] + "\"");
        }
    }
    return p;
}

inline std::vector<double> alpha_for(const CliConfig& cfg, std::size_t p) {
    if (!cfg.alpha) return default_alpha(p);
    if (cfg.alpha->size() < p)
        throw InputError("--alpha needs " + std::to_string(p) + " values, got " + std::to_string(cfg.alpha->size()));
    return *cfg.alpha;
}

// Raw generators, before ActionSpec validation, so `check` can report on them.
inline std::vector<IntMatrix> raw_generators(const json& j) {
    if (!j.is_object() || !j.contains("generators")) throw InputError("action: missing \"generators\"");
    std::vector<IntMatrix> gens;
    for (const auto& g : j.at("generators")) gens.push_back(matrix_from_json(g));
    if (gens.empty()) throw InputError("action: no generators");
    for (std::size_t i = 0; i < gens.size(); ++i) {
        if (!gens[i].is_square() || gens[i].rows() != gens.front().rows())
            throw InputError("generator " + std::to_string(i + 1) + " has the wrong shape");
        Int det = determinant(gens[i]);
        if (det != 1 && det != -1)
            throw InputError("generator " + std::to_string(i + 1) + " is not unimodular (det = " + det.str() + ")");
    }
    return gens;
}

struct Emitter {
    const CliConfig& cfg;
    std::ostream& out;

    void emit(json report, const std::string& text) const {
        if (cfg.output_format == "text") {
            out << text;
        } else {
            report["config"] = to_json(cfg);
            out << report.dump(2) << '\n';
        }
    }
};

inline json check_report(const ActionSpec& action, const CliConfig& cfg, std::string& text) {
    json r;
    auto verdict = spectral_unitarity(action, cfg.closure_cap, cfg.box_radius);
    auto fix = fix_lattice(action);
    const bool q3 = action.q() == 3, p2 = action.p() >= 2, fix_trivial = fix.is_trivial(),
               spectral_ok = verdict.status != SpectralStatus::Refuted;
    r["p"] = action.p();
    r["q"] = action.q();
    r["commutative"] = true;
    r["spectral"] = to_json(verdict);
    r["fix_lattice"] = to_json(fix);
    json notes = json::array();
    if (!q3) notes.push_back("lattice dimension is " + std::to_string(action.q()) + ", the normal form needs 3");
    if (!p2) notes.push_back("needs at least two generators");
    if (!fix_trivial) notes.push_back("Fix(A) is nontrivial");
    if (!spectral_ok) notes.push_back("refuted: A(" + exponent_key(*verdict.witness) + ") has no eigenvalue 1");
    if (verdict.status == SpectralStatus::VerifiedOnBox)
        notes.push_back("image exceeds the closure cap; eigenvalue 1 verified only on the box");
    r["hypotheses"] = {{"q_is_3", q3},
                       {"p_at_least_2", p2},
                       {"fix_trivial", fix_trivial},
                       {"spectral_ok", spectral_ok},
                       {"normal_form_applies", q3 && p2 && fix_trivial && spectral_ok},
                       {"notes", notes}};

    std::ostringstream t;
    t << "action: p = " << action.p() << ", q = " << action.q() << ", generators commute\n";
    t << "spectral: " << to_string(verdict.status);
    if (verdict.closure_size) t << " (closure size " << *verdict.closure_size << ")";
    if (verdict.box_radius) t << " (box radius " << *verdict.box_radius << ")";
    if (verdict.witness) t << " witness " << to_string(*verdict.witness);
    t << "\nFix(A): " << (fix_trivial ? "{0}" : "rank " + std::to_string(fix.rank()));
    for (const auto& v : fix.vectors) t << ' ' << to_string(v);
    t << "\nnormal form applies: " << (q3 && p2 && fix_trivial && spectral_ok ? "yes" : "no") << '\n';
    for (const auto& n : notes) t << "  - " << n.get<std::string>() << '\n';
    text += t.str();
    return r;
}

inline int run_check(const CliConfig& cfg, std::istream& in, std::ostream& out) {
    auto gens = raw_generators(parse_json_text(read_input(cfg, in)));
    if (auto pair = find_noncommuting_pair(gens)) {
        json r{{"commutative", false}, {"noncommuting_pair", {pair->first + 1, pair->second + 1}}};
        Emitter{cfg, out}.emit(r, "generators " + std::to_string(pair->first + 1) + " and " +
                                      std::to_string(pair->second + 1) + " do not commute\n");
        return kHypothesis;
    }
    ActionSpec action(std::move(gens));
    std::string text;
    json r = check_report(action, cfg, text);
    Emitter{cfg, out}.emit(r, text);
    return kOk;
}

struct PipelineResult {
    json report;
    std::string text;
    std::optional<FreeActionFamily> family;
    int code = kOk;
};

// normal form -> lifts -> action law -> freeness on H -> lifting to Z^p
inline PipelineResult pipeline(const ActionSpec& action, const CliConfig& cfg, bool through_freeness) {
    PipelineResult res;
    json stages = json::array();
    std::ostringstream t;
    std::string stage = "normal-form";
    auto fail = [&](int code, const std::string& msg) {
        stages.push_back({{"stage", stage}, {"ok", false}, {"message", msg}});
        res.report["stages"] = stages;
        res.report["error"] = {{"stage", stage}, {"message", msg}};
        t << "stage " << stage << " failed: " << msg << '\n';
        res.text = t.str();
        res.code = code;
        return res;
    };
    try {
        NormalFormResult nf = normalize_action(action, cfg.box_radius, cfg.closure_cap);
        auto violations = verify_normal_form(action, nf);
        res.report["normal_form"] = to_json(nf);
        res.report["violations"] = violations;
        if (!violations.empty()) return fail(kInternal, "normal form verification: " + violations.front());
        stages.push_back({{"stage", stage}, {"ok", true}});
        t << "normal form: a = " << nf.params.a << ", b = " << nf.params.b << ", c = " << nf.params.c
          << ", d = " << nf.params.d << "\n  P = " << to_string(nf.P) << "\n  W = " << to_string(nf.W) << '\n';

        stage = "construct";
        FreeActionFamily fam = build_generators(nf, action.p());
        json formulas = json::array();
        t << "lifts:\n";
        for (std::size_t i = 0; i < fam.p; ++i) {
            std::string f = "φ" + std::to_string(i + 1) + "(x, y, z) = " + to_string(fam.lifts[i]);
            formulas.push_back(f);
            t << "  " << f << '\n';
        }
        res.report["family"] = to_json(fam);
        res.report["formulas"] = formulas;
        stages.push_back({{"stage", stage}, {"ok", true}});

        stage = "action-law";
        json defects = json::array();
        for (std::size_t i = 0; i < fam.p; ++i)
            for (std::size_t j = i + 1; j < fam.p; ++j) {
                auto d = commutator_defect(fam.lifts[i], fam.lifts[j]);
                defects.push_back({{"pair", {i + 1, j + 1}}, {"report", to_json(d)}});
                if (!d.constant_integer) return fail(kInternal, "lifts " + std::to_string(i + 1) + ", " +
                                                                    std::to_string(j + 1) + " do not commute mod Z^3");
            }
        json identities = json::array();
        for (const auto& id : action_law_identities(fam)) {
            identities.push_back({{"identity", id.name}, {"holds", id.holds}});
            if (!id.holds) return fail(kInternal, "identity fails: " + id.name);
        }
        {
            auto induced = induced_action(fam);
            if (!(induced.generator(0) == nf.n() && induced.generator(1) == nf.m()))
                return fail(kInternal, "induced action differs from the normal form");
        }
        res.report["defects"] = defects;
        res.report["identities"] = identities;
        stages.push_back({{"stage", stage}, {"ok", true}});
        t << "action law: all " << defects.size() << " commutator defects are constant integer vectors, "
          << identities.size() << " trigonometric identities hold\n";
        res.family = fam;
        if (!through_freeness) {
            res.report["stages"] = stages;
            res.text = t.str();
            return res;
        }

        stage = "freeness-on-H";
        FreenessEvidence ev = collect_h_evidence(fam, cfg.box_radius);
        std::size_t none = 0;
        for (const auto& r : ev.reports)
            if (r.verdict == FixedPointVerdict::NoFixedPoint) ++none;
        json sample = json::array();
        for (const auto& r : ev.reports)
            if (r.verdict != FixedPointVerdict::IdentityMap && sample.size() < 2 * fam.p) sample.push_back(to_json(r));
        res.report["freeness_on_H"] = {
            {"radius", ev.radius}, {"elements", ev.reports.size()}, {"no_fixed_point", none}, {"sample", sample}};
        stages.push_back({{"stage", stage}, {"ok", true}});
        t << "freeness on H: " << none << " nonzero elements with |l_i| <= " << ev.radius
          << " have no fixed point\n";

        stage = "lift";
        LiftVerdict lv = lift_freeness(SubgroupSpec::h_subgroup(fam.p), ev);
        res.report["lift"] = to_json(lv);
        stages.push_back({{"stage", stage}, {"ok", true}});
        t << "lift: index " << lv.index << ", action on Z^" << fam.p << " is free\n  " << lv.argument << '\n';

        if (cfg.scan) {
            stage = "numeric-scan";
            auto alpha = alpha_for(cfg, fam.p);
            ScanReport sr = numeric_fixed_point_scan(fam, alpha, cfg.scan_box, cfg.tol, cfg.grid);
            res.report["scan"] = to_json(sr);
            stages.push_back({{"stage", stage}, {"ok", !sr.any_flagged()}});
            t << "numeric scan: min displacement " << sr.min_displacement() << " over " << sr.entries.size()
              << " elements" << (sr.any_flagged() ? " (FLAGGED)" : "") << '\n';
            if (sr.any_flagged()) return fail(kInternal, "numeric scan flagged a near-fixed point");
        }
    } catch (const HypothesisError& e) {
        return fail(kHypothesis, e.what());
    } catch (const VerificationError& e) {
        return fail(kInternal, e.what());
    }
    res.report["stages"] = stages;
    res.text = t.str();
    return res;
}

inline int run_normal_form(const CliConfig& cfg, std::istream& in, std::ostream& out) {
    ActionSpec action = action_from_json(parse_json_text(read_input(cfg, in)));
    json r;
    std::ostringstream t;
    int code = kOk;
    try {
        NormalFormResult nf = normalize_action(action, cfg.box_radius, cfg.closure_cap);
        auto violations = verify_normal_form(action, nf);
        r["normal_form"] = to_json(nf);
        r["violations"] = violations;
        t << "a = " << nf.params.a << ", b = " << nf.params.b << ", c = " << nf.params.c << ", d = " << nf.params.d
          << "\nP = " << to_string(nf.P) << "\nW = " << to_string(nf.W) << '\n';
        for (const auto& v : violations) t << "violation: " << v << '\n';
        if (!violations.empty()) code = kInternal;
    } catch (const HypothesisError& e) {
        r["error"] = {{"stage", e.stage()}, {"message", e.what()}};
        t << "rejected: " << e.what() << '\n';
        code = kHypothesis;
    }
    Emitter{cfg, out}.emit(r, t.str());
    return code;
}

inline int run_pipeline(const CliConfig& cfg, std::istream& in, std::ostream& out, bool through_freeness) {
    ActionSpec action = action_from_json(parse_json_text(read_input(cfg, in)));
    auto res = pipeline(action, cfg, through_freeness);
    Emitter{cfg, out}.emit(res.report, res.text);
    return res.code;
}

inline int run_orbit(const CliConfig& cfg, std::istream& in, std::ostream& out, std::ostream& err) {
    json input = parse_json_text(read_input(cfg, in));
    FreeActionFamily fam;
    if (input.is_object() && input.contains("lifts")) {
        fam = family_from_json(input);
    } else if (input.is_object() && input.contains("family")) {
        fam = family_from_json(input.at("family"));
    } else {
        auto res = pipeline(action_from_json(input), cfg, false);
        if (!res.family) {
            err << res.text;
            return res.code;
        }
        fam = *res.family;
    }
    auto word = parse_word(cfg.word, fam.p);
    auto alpha = alpha_for(cfg, fam.p);
    auto traj = orbit_iterate(fam, alpha, parse_point(cfg.start), word);
    if (cfg.output_format == "json") {
        Emitter{cfg, out}.emit({{"trajectory", traj}}, "");
    } else {
        // the CSV stream starts with its header; the configuration goes to stderr
        err << "# config: " << to_json(cfg).dump() << '\n';
        write_trajectory_csv(out, traj);
    }
    return kOk;
}

inline int run_demo(const CliConfig& cfg, std::ostream& out) {
    const NormalFormParams params{2, 1, -3, 2};
    ActionSpec klein = fixtures::klein_action(params);
    ActionSpec infinite = fixtures::infinite_image_action(1);
    if (cfg.seed) {
        std::mt19937_64 rng(static_cast<std::uint64_t>(*cfg.seed));
        klein = fixtures::conjugate_action(klein, fixtures::random_unimodular(rng, 3));
    }
    json r;
    std::string text = "== Klein four-group action on Z^3 ==\n";
    r["klein_action"] = {{"action", to_json(klein)}};
    r["klein_action"]["check"] = check_report(klein, cfg, text);
    auto res = pipeline(klein, cfg, true);
    r["klein_action"]["pipeline"] = res.report;
    text += res.text;
    text += "== Z^2-action on Z^4 with infinite image ==\n";
    CliConfig wide = cfg;
    wide.box_radius = std::max<long long>(cfg.box_radius, 6);
    r["infinite_image_action"] = {{"action", to_json(infinite)}};
    r["infinite_image_action"]["check"] = check_report(infinite, wide, text);
    Emitter{cfg, out}.emit(r, text);
    return res.code;
}

}  // namespace detail

/// Parses argv and runs one subcommand.
inline int run(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err) {
    CLI::App app{"Normal forms and free analytic actions of Z^p on the 3-torus", "freetorus"};
    app.require_subcommand(1);
    CliConfig cfg;
    std::vector<double> alpha;
    long long seed = 0;

    auto common = [&](CLI::App* sub, bool with_input) {
        if (with_input) sub->add_option("input", cfg.input_path, "action or family JSON file ('-' for stdin)");
        sub->add_option("--box", cfg.box_radius, "exponent box radius")->check(CLI::Range(1LL, 1000LL));
        sub->add_option("--closure-cap", cfg.closure_cap, "image enumeration cap")->check(CLI::Range(4, 10000000));
        sub->add_option("--alpha", alpha, "numeric alpha values (comma separated)")->delimiter(',');
        sub->add_option("--seed", seed, "random seed");
        sub->add_option("--format", cfg.output_format, "output format")
            ->check(CLI::IsMember({"json", "text", "csv"}));
    };
    auto* check = app.add_subcommand("check", "validate an action and report the normal-form hypotheses");
    auto* nf = app.add_subcommand("normal-form", "compute the normal form (a, b, c, d), P and W");
    auto* construct = app.add_subcommand("construct", "build the free analytic lifts");
    auto* verify = app.add_subcommand("verify-free", "run the full freeness certificate chain");
    auto* orbit = app.add_subcommand("orbit", "export an orbit as CSV");
    auto* demo = app.add_subcommand("demo", "run the built-in reference actions");
    for (auto* s : {check, nf, construct, verify, orbit}) common(s, true);
    common(demo, false);
    verify->add_flag("--scan", cfg.scan, "also run the numeric fixed-point scan");
    verify->add_option("--scan-box", cfg.scan_box, "numeric scan radius")->check(CLI::Range(1LL, 10LL));
    verify->add_option("--grid", cfg.grid, "numeric scan grid size per axis")->check(CLI::Range(1, 1024));
    verify->add_option("--tol", cfg.tol, "numeric scan flag threshold");
    orbit->add_option("--word", cfg.word, "generator indices, 1-based, comma separated");
    orbit->add_option("--start", cfg.start, "start point x,y,z");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kOk : kInput;
    }
    for (auto* s : app.get_subcommands()) cfg.subcommand = s->get_name();
    for (auto* s : app.get_subcommands()) {
        if (s->count("--alpha")) cfg.alpha = alpha;
        if (s->count("--seed")) cfg.seed = seed;
        if (cfg.subcommand == "orbit" && !s->count("--format")) cfg.output_format = "csv";
    }
    if (cfg.output_format == "csv" && cfg.subcommand != "orbit") {
        err << "error: --format csv is only available for orbit\n";
        return kInput;
    }

    try {
        if (cfg.subcommand == "check") return detail::run_check(cfg, in, out);
        if (cfg.subcommand == "normal-form") return detail::run_normal_form(cfg, in, out);
        if (cfg.subcommand == "construct") return detail::run_pipeline(cfg, in, out, false);
        if (cfg.subcommand == "verify-free") return detail::run_pipeline(cfg, in, out, true);
        if (cfg.subcommand == "orbit") return detail::run_orbit(cfg, in, out, err);
        return detail::run_demo(cfg, out);
    } catch (const InputError& e) {
        err << "input error: " << e.what() << '\n';
        return kInput;
    } catch (const json::exception& e) {
        err << "input error: " << e.what() << '\n';
        return kInput;
    } catch (const HypothesisError& e) {
        err << "rejected: " << e.what() << '\n';
        return kHypothesis;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return kInternal;
    }
}

}  // namespace freetorus::cli
