#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "freetorus/cli.hpp"
#include "freetorus/fixtures.hpp"
#include "freetorus/json_io.hpp"

using namespace freetorus;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run run_cli(std::vector<std::string> args, const std::string& stdin_text = "") {
    args.insert(args.begin(), "freetorus");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::istringstream in(stdin_text);
    std::ostringstream out, err;
    int code = cli::run(static_cast<int>(argv.size()), argv.data(), in, out, err);
    return {code, out.str(), err.str()};
}

std::string action_text(const ActionSpec& a) { return to_json(a).dump(); }

std::vector<std::string> lines(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    for (std::string l; std::getline(is, l);) out.push_back(l);
    return out;
}

const ActionSpec kKlein = fixtures::conjugate_action(fixtures::klein_action({2, 1, -3, 2}),
                                                     IntMatrix{{1, 1, 0}, {0, 1, 0}, {0, 1, 1}});

}  // namespace

TEST(JsonIo, ActionRoundTrip) {
    auto j = to_json(kKlein);
    EXPECT_EQ(action_from_json(j), kKlein);
    EXPECT_EQ(action_from_json(parse_json_text(j.dump())), kKlein);
}

TEST(JsonIo, LargeIntegersSurvive) {
    Int big("123456789012345678901234567890");
    EXPECT_EQ(int_from_json(int_to_json(big)), big);
    EXPECT_EQ(int_from_json(int_to_json(Int(-7))), -7);
    Rational q(Int(-3), Int(8));
    EXPECT_EQ(rational_from_json(rational_to_json(q)), q);
}

TEST(JsonIo, NormalFormRoundTrip) {
    auto nf = normalize_action(kKlein);
    auto back = normal_form_from_json(to_json(nf));
    EXPECT_EQ(back.params, nf.params);
    EXPECT_EQ(back.P, nf.P);
    EXPECT_EQ(back.W, nf.W);
}

TEST(JsonIo, FamilyRoundTrip) {
    auto nf = normalize_action(kKlein);
    auto fam = build_generators(nf, 2);
    auto back = family_from_json(parse_json_text(to_json(fam).dump()));
    ASSERT_EQ(back.lifts.size(), fam.lifts.size());
    for (std::size_t i = 0; i < fam.lifts.size(); ++i) EXPECT_EQ(back.lifts[i], fam.lifts[i]);
    EXPECT_EQ(sym_from_json(to_json(SymScalar::alpha(2, Rational(-1, 3)) + Rational(5))),
              SymScalar::alpha(2, Rational(-1, 3)) + Rational(5));
}

TEST(JsonIo, MalformedInput) {
    EXPECT_THROW(parse_json_text("{\"generators\": [[[1, 0], [0"), InputError);
    EXPECT_THROW(action_from_json(parse_json_text("{\"gens\": []}")), InputError);
    EXPECT_THROW(action_from_json(parse_json_text("{\"generators\": [[[2, 0], [0, 1]]]}")), InputError);
    EXPECT_THROW(int_from_json(parse_json_text("1.5")), InputError);
}

TEST(Cli, CheckKlein) {
    auto r = run_cli({"check", "-"}, action_text(kKlein));
    ASSERT_EQ(r.code, 0) << r.err;
    auto j = json::parse(r.out);
    EXPECT_EQ(j["spectral"]["status"], "ExactlyVerified");
    EXPECT_EQ(j["spectral"]["closure_size"], 4);
    EXPECT_TRUE(j["hypotheses"]["normal_form_applies"].get<bool>());
    EXPECT_EQ(j["config"]["subcommand"], "check");
}

TEST(Cli, CheckInfiniteImage) {
    auto r = run_cli({"check", "-", "--box", "6"}, action_text(fixtures::infinite_image_action(1)));
    ASSERT_EQ(r.code, 0) << r.err;
    auto j = json::parse(r.out);
    EXPECT_EQ(j["spectral"]["status"], "VerifiedOnBox");
    EXPECT_EQ(j["q"], 4);
    EXPECT_TRUE(j["hypotheses"]["fix_trivial"].get<bool>());
    EXPECT_FALSE(j["hypotheses"]["normal_form_applies"].get<bool>());
}

TEST(Cli, CheckNonCommuting) {
    auto r = run_cli({"check", "-"}, "{\"generators\": [[[1, 1], [0, 1]], [[1, 0], [1, 1]]]}");
    EXPECT_EQ(r.code, 1);
    EXPECT_EQ(json::parse(r.out)["noncommuting_pair"], json::array({1, 2}));
}

TEST(Cli, InputErrors) {
    EXPECT_EQ(run_cli({"check", "-"}, "{not json").code, 2);
    EXPECT_EQ(run_cli({"check", "-"}, "{\"generators\": [[[2, 0], [0, 1]]]}").code, 2);
    EXPECT_EQ(run_cli({"check", "/nonexistent/file.json"}).code, 2);
    EXPECT_EQ(run_cli({"normal-form", "-", "--format", "csv"}, action_text(kKlein)).code, 2);
    EXPECT_EQ(run_cli({"bogus"}).code, 2);
    EXPECT_EQ(run_cli({}).code, 2);
}

TEST(Cli, NormalForm) {
    auto r = run_cli({"normal-form", "-"}, action_text(kKlein));
    ASSERT_EQ(r.code, 0) << r.err;
    auto j = json::parse(r.out);
    auto nf = normal_form_from_json(j["normal_form"]);
    EXPECT_TRUE(nf.params.relation_holds());
    EXPECT_TRUE(verify_normal_form(kKlein, nf).empty());
    EXPECT_TRUE(j["violations"].empty());
}

TEST(Cli, NormalFormRejectsNontrivialFix) {
    auto r = run_cli({"normal-form", "-"}, action_text(ActionSpec({normal_form_n(0, 0), IntMatrix::identity(3)})));
    EXPECT_EQ(r.code, 1);
    EXPECT_EQ(json::parse(r.out)["error"]["stage"], "trivial-fix");
}

TEST(Cli, NormalFormRankFour) {
    const IntMatrix n = normal_form_n(0, 0), m = normal_form_m(0, 0), id = IntMatrix::identity(3);
    auto r = run_cli({"normal-form", "-"}, action_text(ActionSpec({m, id, n, n * m})));
    ASSERT_EQ(r.code, 0) << r.err;
    auto w = matrix_from_json(json::parse(r.out)["normal_form"]["W"]);
    EXPECT_EQ(w.rows(), 4u);
    EXPECT_EQ(w.cols(), 4u);
    EXPECT_TRUE(is_unimodular(w));
}

TEST(Cli, VerifyFree) {
    auto r = run_cli({"verify-free", "-", "--box", "3"}, action_text(kKlein));
    ASSERT_EQ(r.code, 0) << r.err;
    auto j = json::parse(r.out);
    EXPECT_EQ(j["lift"]["index"], 4);
    EXPECT_TRUE(j["lift"]["free"].get<bool>());
    EXPECT_EQ(j["freeness_on_H"]["no_fixed_point"], 48);
    for (const auto& s : j["stages"]) EXPECT_TRUE(s["ok"].get<bool>()) << s.dump();
}

TEST(Cli, VerifyFreeWithScan) {
    auto r = run_cli({"verify-free", "-", "--box", "2", "--scan", "--scan-box", "1", "--grid", "16"}, action_text(kKlein));
    ASSERT_EQ(r.code, 0) << r.err;
    auto j = json::parse(r.out);
    EXPECT_FALSE(j["scan"]["any_flagged"].get<bool>());
}

TEST(Cli, VerifyFreeRejectsHypothesisFailure) {
    auto r = run_cli({"verify-free", "-"}, action_text(ActionSpec({-IntMatrix::identity(3), normal_form_m(0, 0)})));
    EXPECT_EQ(r.code, 1);
    EXPECT_EQ(json::parse(r.out)["error"]["stage"], "normal-form");
}

TEST(Cli, ConstructTextFormulas) {
    auto r = run_cli({"construct", "-", "--format", "text"}, action_text(fixtures::klein_action({0, 0, 0, 0})));
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("φ1(x, y, z) = (x + 1/2·α1·cos 2πz, -y - 1/2·α1·sin 2πz, -z)"), std::string::npos) << r.out;
}

TEST(Cli, OrbitCsv) {
    auto r = run_cli({"orbit", "-", "--word", "2,2", "--start", "0.1,0.2,0"}, action_text(kKlein));
    ASSERT_EQ(r.code, 0) << r.err;
    auto l = lines(r.out);
    ASSERT_EQ(l.size(), 4u);
    EXPECT_EQ(l[0], "step,x,y,z");
    EXPECT_EQ(l[1].substr(l[1].rfind(',') + 1), "0");
    EXPECT_EQ(l[2].substr(l[2].rfind(',') + 1), "0.5");
    EXPECT_EQ(l[3].substr(l[3].rfind(',') + 1), "0");
    EXPECT_EQ(r.err.rfind("# config: ", 0), 0u);
}

TEST(Cli, OrbitFromFamilyJson) {
    auto fam = build_generators(normalize_action(kKlein), 2);
    auto r1 = run_cli({"orbit", "-", "--word", "1,2,1"}, to_json(fam).dump());
    auto r2 = run_cli({"orbit", "-", "--word", "1,2,1"}, action_text(kKlein));
    ASSERT_EQ(r1.code, 0) << r1.err;
    EXPECT_EQ(r1.out, r2.out);
}

TEST(Cli, OrbitEdgeCases) {
    auto empty = run_cli({"orbit", "-"}, action_text(kKlein));
    ASSERT_EQ(empty.code, 0);
    EXPECT_EQ(lines(empty.out).size(), 2u);
    EXPECT_EQ(run_cli({"orbit", "-", "--word", "9"}, action_text(kKlein)).code, 2);
    EXPECT_EQ(run_cli({"orbit", "-", "--word", "0"}, action_text(kKlein)).code, 2);
    EXPECT_EQ(run_cli({"orbit", "-", "--start", "0,1"}, action_text(kKlein)).code, 2);
    EXPECT_EQ(run_cli({"orbit", "-", "--word", "1", "--alpha", "0.5"}, action_text(kKlein)).code, 2);
    auto as_json = run_cli({"orbit", "-", "--word", "1", "--format", "json"}, action_text(kKlein));
    ASSERT_EQ(as_json.code, 0);
    EXPECT_EQ(json::parse(as_json.out)["trajectory"].size(), 2u);
}

TEST(Cli, Deterministic) {
    for (const auto& args : std::vector<std::vector<std::string>>{
             {"verify-free", "-", "--box", "2"}, {"normal-form", "-"}, {"orbit", "-", "--word", "1,2,2,1"}}) {
        auto a = run_cli(args, action_text(kKlein)), b = run_cli(args, action_text(kKlein));
        EXPECT_EQ(a.code, 0);
        EXPECT_EQ(a.out, b.out);
    }
}

TEST(Cli, Demo) {
    auto r = run_cli({"demo", "--box", "2"});
    ASSERT_EQ(r.code, 0) << r.err;
    auto j = json::parse(r.out);
    EXPECT_EQ(j["klein_action"]["pipeline"]["lift"]["index"], 4);
    EXPECT_EQ(j["infinite_image_action"]["check"]["spectral"]["status"], "VerifiedOnBox");

    auto seeded1 = run_cli({"demo", "--box", "2", "--seed", "5", "--format", "text"});
    auto seeded2 = run_cli({"demo", "--box", "2", "--seed", "5", "--format", "text"});
    ASSERT_EQ(seeded1.code, 0);
    EXPECT_EQ(seeded1.out, seeded2.out);
    EXPECT_NE(seeded1.out.find("lift: index 4"), std::string::npos);
}
