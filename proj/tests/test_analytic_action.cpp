#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "freetorus/analytic_action.hpp"
#include "freetorus/fixtures.hpp"
#include "freetorus/freeness.hpp"

using namespace freetorus;

namespace {

const Rational kHalf(1, 2);

NormalFormResult nf_of(const NormalFormParams& p, std::size_t rank) {
    return {p, IntMatrix::identity(3), IntMatrix::identity(rank)};
}

SymScalar random_sym(std::mt19937_64& rng, std::size_t p) {
    std::uniform_int_distribution<int> num(-6, 6), den(1, 4);
    SymScalar s(Rational(num(rng), den(rng)));
    for (std::size_t j = 0; j < p; ++j) s += SymScalar::alpha(j, Rational(num(rng), den(rng)));
    return s;
}

TrigAffineMap random_map(std::mt19937_64& rng, std::size_t p) {
    std::uniform_int_distribution<int> small(-3, 3);
    std::bernoulli_distribution coin(0.5);
    IntMatrix b = fixtures::random_unimodular(rng, 2, 4, 2);
    IntMatrix a = IntMatrix::identity(3);
    a.set_block(0, 0, b);
    a(0, 2) = small(rng);
    a(1, 2) = small(rng);
    a(2, 2) = coin(rng) ? 1 : -1;
    SymVec3 t{random_sym(rng, p), random_sym(rng, p), Rational(small(rng), 2)};
    SymVec3 u{random_sym(rng, p), random_sym(rng, p), 0};
    SymVec3 v{random_sym(rng, p), random_sym(rng, p), 0};
    return TrigAffineMap(a, t, u, v);
}

// The two squares displayed for the construction, typed in by hand:
//   phi1^2 = (x + α1 cos - (a/2) α1 sin + 2r, y + α1 sin, z)
//   phi2^2 = (x + α2 cos - (a/2) α2 sin + c/2, y + α2 sin + d/2, z + 1)
TrigAffineMap displayed_phi1_squared(const NormalFormParams& p) {
    const Rational r = -Rational(p.b) / 4;
    return TrigAffineMap(IntMatrix::identity(3), SymVec3{Rational(2 * r), 0, 0}, SymVec3{SymScalar::alpha(0), 0, 0},
                         SymVec3{SymScalar::alpha(0, -Rational(p.a) / 2), SymScalar::alpha(0), 0});
}

TrigAffineMap displayed_phi2_squared(const NormalFormParams& p) {
    return TrigAffineMap(IntMatrix::identity(3), SymVec3{Rational(Rational(p.c) / 2), Rational(Rational(p.d) / 2), 1},
                         SymVec3{SymScalar::alpha(1), 0, 0},
                         SymVec3{SymScalar::alpha(1, -Rational(p.a) / 2), SymScalar::alpha(1), 0});
}

void expect_near(const Point3& a, const Point3& b, double tol) {
    for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(a[i], b[i], tol) << "coordinate " << i;
}

}  // namespace

TEST(SymScalar, Arithmetic) {
    SymScalar a = SymScalar::alpha(0, kHalf) + Rational(1, 3);
    SymScalar b = SymScalar::alpha(1, 2) - SymScalar::alpha(0, kHalf);
    SymScalar s = a + b;
    EXPECT_EQ(s.alpha_coefficient(0), 0);
    EXPECT_EQ(s.alpha_coefficient(1), 2);
    EXPECT_EQ(s.constant(), Rational(1, 3));
    EXPECT_EQ(s.alpha_count(), 2u);
    EXPECT_EQ(SymScalar::alpha(2) - SymScalar::alpha(2), SymScalar(0));
    EXPECT_TRUE((SymScalar::alpha(2) - SymScalar::alpha(2)).is_zero());
    EXPECT_TRUE(SymScalar(Rational(4, 2)).is_integer());
    EXPECT_EQ(to_string(SymScalar::alpha(0, -kHalf) + Rational(1, 4)), "-1/2·α1 + 1/4");
    const double alpha[2] = {2.0, 10.0};
    EXPECT_DOUBLE_EQ(s.evaluate(alpha), 20.0 + 1.0 / 3.0);
}

TEST(Compose, IdentityIsNeutral) {
    std::mt19937_64 rng(31);
    for (int k = 0; k < 20; ++k) {
        auto f = random_map(rng, 3);
        EXPECT_EQ(compose(TrigAffineMap::identity(), f), f);
        EXPECT_EQ(compose(f, TrigAffineMap::identity()), f);
    }
}

TEST(Compose, SquaresMatchDisplays) {
    std::mt19937_64 rng(32);
    std::vector<NormalFormParams> cases{{0, 0, 0, 0}, {2, 1, -3, 2}, {0, 2, -2, 5}};
    for (int k = 0; k < 30; ++k) cases.push_back(fixtures::random_params(rng, 8));
    for (const auto& p : cases) {
        auto fam = build_generators(nf_of(p, 2), 2);
        EXPECT_EQ(compose(fam.lifts[0], fam.lifts[0]), displayed_phi1_squared(p));
        EXPECT_EQ(compose(fam.lifts[1], fam.lifts[1]), displayed_phi2_squared(p));
        EXPECT_EQ(power(fam.lifts[0], 2), compose(fam.lifts[0], fam.lifts[0]));
    }
}

TEST(Compose, Associative) {
    std::mt19937_64 rng(33);
    for (int k = 0; k < 100; ++k) {
        auto f = random_map(rng, 3), g = random_map(rng, 3), h = random_map(rng, 3);
        ASSERT_EQ(compose(compose(f, g), h), compose(f, compose(g, h)));
    }
}

TEST(Compose, ClassClosure) {
    // the constructor enforces the class invariants, so composing must not throw
    std::mt19937_64 rng(34);
    for (int k = 0; k < 200; ++k) {
        auto f = random_map(rng, 2), g = random_map(rng, 2);
        TrigAffineMap h;
        ASSERT_NO_THROW(h = compose(f, g));
        ASSERT_TRUE(h.u()[2].is_zero() && h.v()[2].is_zero());
        ASSERT_TRUE(is_integer(2 * h.t()[2].constant()));
    }
}

TEST(Compose, NumericConsistency) {
    std::mt19937_64 rng(35);
    std::uniform_real_distribution<double> pt(-2.0, 2.0);
    const double alpha[3] = {0.7, -1.3, 0.25};
    for (int k = 0; k < 200; ++k) {
        auto f = random_map(rng, 3), g = random_map(rng, 3);
        Point3 x{pt(rng), pt(rng), pt(rng)};
        expect_near(evaluate_numeric(compose(f, g), x, alpha),
                    evaluate_numeric(f, evaluate_numeric(g, x, alpha), alpha), 1e-12);
        if (HasFailure()) return;
    }
}

TEST(Power, InverseAndNegative) {
    std::mt19937_64 rng(36);
    for (int k = 0; k < 50; ++k) {
        auto f = random_map(rng, 2);
        EXPECT_TRUE(compose(f, inverse(f)).is_identity());
        EXPECT_TRUE(compose(inverse(f), f).is_identity());
        EXPECT_EQ(power(f, 1), f);
        EXPECT_TRUE(power(f, 0).is_identity());
        EXPECT_TRUE(compose(power(f, 3), power(f, -3)).is_identity());
    }
}

TEST(BuildGenerators, FundamentalExample) {
    auto fam = build_generators(nf_of({0, 0, 0, 0}, 2), 2);
    EXPECT_EQ(to_string(fam.lifts[0]), "(x + 1/2·α1·cos 2πz, -y - 1/2·α1·sin 2πz, -z)");
    EXPECT_EQ(fam.lifts[1].t()[2], SymScalar(kHalf));
    EXPECT_EQ(fam.lifts[1].linear(), normal_form_m(0, 0));
}

TEST(BuildGenerators, TranslationR) {
    // b = 2 forces r = -1/2; take a = 1, c = -2, d = 0 for the relation
    auto fam = build_generators(nf_of({1, 2, -2, 0}, 2), 2);
    EXPECT_EQ(fam.lifts[0].t()[0], SymScalar(-kHalf));
}

TEST(BuildGenerators, HigherLiftsKeepZ) {
    auto fam = build_generators(nf_of({2, 1, -3, 2}, 5), 5);
    for (std::size_t j = 2; j < 5; ++j) {
        EXPECT_EQ(fam.lifts[j].linear(), IntMatrix::identity(3));
        EXPECT_TRUE(fam.lifts[j].t()[2].is_zero());
    }
    EXPECT_EQ(to_string(fam.lifts[2]), "(x + α3·cos 2πz - α3·sin 2πz, y + α3·sin 2πz, z)");
}

TEST(BuildGenerators, Rejects) {
    EXPECT_THROW(build_generators(nf_of({1, 1, 1, 1}, 2), 2), InputError);
    EXPECT_THROW(build_generators(nf_of({0, 0, 0, 0}, 1), 1), InputError);
}

TEST(CommutatorDefect, BuiltFamily) {
    std::mt19937_64 rng(37);
    for (int k = 0; k < 50; ++k) {
        auto p = fixtures::random_params(rng, 8);
        auto fam = build_generators(nf_of(p, 4), 4);
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = i + 1; j < 4; ++j) {
                auto d = commutator_defect(fam.lifts[i], fam.lifts[j]);
                ASSERT_TRUE(d.constant_integer) << d.discrepancies.front();
                ASSERT_EQ(d.defect, (i == 0 && j == 1) ? make_vector({0, 0, 1}) : make_vector({0, 0, 0}));
            }
    }
}

TEST(CommutatorDefect, MismatchedF2) {
    const NormalFormParams p{2, 1, -3, 2};
    auto fam = build_generators(nf_of(p, 2), 2);
    const auto& f2 = fam.lifts[1];
    // drop the (a/4) α2 sin term of f2
    SymVec3 v = f2.v();
    v[0] = 0;
    TrigAffineMap bad(f2.linear(), f2.t(), f2.u(), v);
    auto d = commutator_defect(fam.lifts[0], bad);
    EXPECT_FALSE(d.constant_integer);
    bool found = false;
    for (const auto& s : d.discrepancies) found |= s.find("α2") != std::string::npos && s.find("sin") != std::string::npos;
    EXPECT_TRUE(found);
    EXPECT_EQ(d.v[0], SymScalar::alpha(1));  // 2 * (a/4) α2 with a = 2
}

TEST(CommutatorDefect, PrintedSignOfGjFails) {
    // with g_j = -α_j sin the j-th lift no longer commutes with phi_1 when a != 0
    const NormalFormParams p{2, 1, -3, 2};
    auto fam = build_generators(nf_of(p, 3), 3);
    const auto& fj = fam.lifts[2];
    SymVec3 v = fj.v();
    v[1] = SymScalar::alpha(2, -1);
    TrigAffineMap printed(fj.linear(), fj.t(), fj.u(), v);
    EXPECT_FALSE(commutator_defect(fam.lifts[0], printed).constant_integer);
    EXPECT_TRUE(commutator_defect(fam.lifts[0], fj).constant_integer);
    // when a = 0 both signs work
    auto fam0 = build_generators(nf_of({0, 1, -1, 3}, 3), 3);
    SymVec3 v0 = fam0.lifts[2].v();
    v0[1] = SymScalar::alpha(2, -1);
    TrigAffineMap printed0(fam0.lifts[2].linear(), fam0.lifts[2].t(), fam0.lifts[2].u(), v0);
    EXPECT_TRUE(commutator_defect(fam0.lifts[0], printed0).constant_integer);
}

TEST(Identities, HoldForBuiltFamilies) {
    std::mt19937_64 rng(38);
    for (int k = 0; k < 50; ++k) {
        auto p = fixtures::random_params(rng, 8);
        auto fam = build_generators(nf_of(p, 4), 4);
        auto ids = action_law_identities(fam);
        ASSERT_EQ(ids.size(), 2u + 4u * 2u);
        for (const auto& id : ids) ASSERT_TRUE(id.holds) << id.name;
    }
}

TEST(Identities, TrigHelpers) {
    TrigFunction f{SymScalar::alpha(0), SymScalar::alpha(1)};
    EXPECT_EQ(f.reflected(), (TrigFunction{SymScalar::alpha(0), -SymScalar::alpha(1)}));
    EXPECT_EQ(f.half_shifted(), -f);
}

TEST(ClosedForm, MatchesIteratedComposition) {
    std::mt19937_64 rng(39);
    for (std::size_t p : {2u, 3u}) {
        for (int k = 0; k < 3; ++k) {
            auto params = fixtures::random_params(rng, 6);
            auto fam = build_generators(nf_of(params, p), p);
            for (const auto& ell : box_exponents(p, 3)) {
                // phi_1^{2 l1} o phi_2^{2 l2} o phi_3^{l3} o ...
                TrigAffineMap iterated;
                for (std::size_t i = p; i-- > 0;) {
                    long long e = ell[i].convert_to<long long>() * (i < 2 ? 2 : 1);
                    iterated = compose(power(fam.lifts[i], e), iterated);
                }
                ASSERT_EQ(closed_form_power(fam, HCoordinates{ell}), iterated) << to_string(ell);
            }
        }
    }
}

TEST(ClosedForm, Examples) {
    const NormalFormParams p{2, 1, -3, 2};
    auto fam = build_generators(nf_of(p, 2), 2);
    EXPECT_TRUE(closed_form_power(fam, HCoordinates{make_vector({0, 0})}).is_identity());
    EXPECT_EQ(closed_form_power(fam, HCoordinates{make_vector({1, 0})}), displayed_phi1_squared(p));
    EXPECT_EQ(closed_form_power(fam, HCoordinates{make_vector({0, 1})}), displayed_phi2_squared(p));
    EXPECT_EQ(closed_form_power(fam, HCoordinates{make_vector({1, 1})}),
              compose(power(fam.lifts[0], 2), power(fam.lifts[1], 2)));
    EXPECT_THROW(closed_form_power(fam, HCoordinates{make_vector({1})}), InputError);
}

TEST(InducedAction, LinearParts) {
    const NormalFormParams p{2, 1, -3, 2};
    auto fam = build_generators(nf_of(p, 3), 3);
    auto act = induced_action(fam);
    EXPECT_EQ(act.generator(0), normal_form_n(2, 1));
    EXPECT_EQ(act.generator(1), normal_form_m(-3, 2));
    EXPECT_EQ(act.generator(2), IntMatrix::identity(3));
    auto nf = normalize_action(act);
    EXPECT_TRUE(verify_normal_form(act, nf).empty());
}

TEST(EvaluateNumeric, Examples) {
    const double alpha1[2] = {1.0, 0.0};
    expect_near(evaluate_numeric(TrigAffineMap::identity(), {0.1, 0.2, 0.3}, alpha1), {0.1, 0.2, 0.3}, 0.0);
    auto fam = build_generators(nf_of({0, 0, 0, 0}, 2), 2);
    EXPECT_DOUBLE_EQ(evaluate_numeric(fam.lifts[1], {0.0, 0.0, 0.25}, alpha1)[2], 0.75);
    Point3 sq = evaluate_numeric(power(fam.lifts[0], 2), {0.0, 0.0, 0.0}, alpha1);
    EXPECT_NEAR(sq[0], 1.0, 1e-15);
    EXPECT_NEAR(sq[1], 0.0, 1e-15);
    auto r = reduce_mod_one({1.25, -0.25, 3.0});
    expect_near(r, {0.25, 0.75, 0.0}, 1e-15);
}

TEST(TrigAffineMap, RejectsInvalid) {
    EXPECT_THROW(TrigAffineMap(IntMatrix{{1, 0, 0}, {0, 1, 0}, {1, 0, 1}}, {}, {}, {}), InputError);
    EXPECT_THROW(TrigAffineMap(IntMatrix::identity(3), SymVec3{0, 0, Rational(1, 3)}, {}, {}), InputError);
    EXPECT_THROW(TrigAffineMap(IntMatrix::identity(3), SymVec3{0, 0, SymScalar::alpha(0)}, {}, {}), InputError);
    EXPECT_THROW(TrigAffineMap(IntMatrix::identity(3), {}, SymVec3{0, 0, 1}, {}), InputError);
    EXPECT_THROW(TrigAffineMap(IntMatrix::diagonal(make_vector({2, 1, 1})), {}, {}, {}), InputError);
}
