#include <gtest/gtest.h>

#include <algorithm>
#include <functional>
#include <random>

#include "freetorus/fixtures.hpp"
#include "freetorus/normal_form.hpp"

using namespace freetorus;

namespace {

const IntMatrix kId = IntMatrix::identity(3);

std::string stage_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const HypothesisError& e) {
        return e.stage();
    }
    return "";
}

}  // namespace

TEST(NormalizePair, AlreadyNormal) {
    auto r = normalize_pair(normal_form_n(0, 0), normal_form_m(0, 0));
    EXPECT_EQ(r.params, (NormalFormParams{0, 0, 0, 0}));
    EXPECT_EQ(r.P, kId);
}

TEST(NormalizePair, AlreadyNormalWithParameters) {
    auto r = normalize_pair(normal_form_n(2, 1), normal_form_m(-3, 2));
    EXPECT_EQ(r.params, (NormalFormParams{2, 1, -3, 2}));
    EXPECT_EQ(r.P, kId);
}

TEST(NormalizePair, ElementaryConjugate) {
    const IntMatrix p0{{1, 1, 0}, {0, 1, 0}, {0, 0, 1}};
    const IntMatrix p0_inv = unimodular_inverse(p0);
    const IntMatrix n = p0_inv * normal_form_n(0, 0) * p0, m = p0_inv * normal_form_m(0, 0) * p0;
    auto r = normalize_pair(n, m);
    EXPECT_TRUE(r.params.relation_holds());
    const IntMatrix r_inv = unimodular_inverse(r.P);
    EXPECT_EQ(r_inv * n * r.P, normal_form_n(r.params.a, r.params.b));
    EXPECT_EQ(r_inv * m * r.P, normal_form_m(r.params.c, r.params.d));
}

TEST(NormalizePair, Errors) {
    EXPECT_EQ(stage_of([] { normalize_pair(kId, kId); }), "joint-fix");
    EXPECT_EQ(stage_of([] { normalize_pair(-kId, kId); }), "spectral");
    const IntMatrix shear{{1, 1, 0}, {0, 1, 0}, {0, 0, 1}};
    EXPECT_EQ(stage_of([&] { normalize_pair(normal_form_n(0, 0), shear); }), "commutation");
    // N = diag(1, R) with R of order 3 is not an involution, but the spectral
    // box already catches it: M N = diag(-1, R) has no eigenvalue 1
    const IntMatrix r3{{1, 0, 0}, {0, 0, -1}, {0, 1, -1}};
    const IntMatrix m = IntMatrix::diagonal(make_vector({-1, 1, 1}));
    EXPECT_EQ(stage_of([&] { normalize_pair(r3, m); }), "spectral");
    EXPECT_THROW(normalize_pair(IntMatrix::diagonal(make_vector({2, 1, 1})), kId), NotUnimodularError);
}

TEST(NormalizePair, RandomRoundTrip) {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 200; ++trial) {
        auto params = fixtures::random_params(rng, 6);
        auto act = fixtures::conjugate_action(fixtures::klein_action(params), fixtures::random_unimodular(rng, 3));
        auto r = normalize_pair(act.generator(0), act.generator(1));
        NormalFormResult res{r.params, r.P, IntMatrix::identity(2)};
        auto violations = verify_normal_form(act, res);
        ASSERT_TRUE(violations.empty()) << violations.front();
        ASSERT_TRUE(r.params.relation_holds());
    }
}

TEST(NormalizeAction, FundamentalExample) {
    auto act = fixtures::klein_action({0, 0, 0, 0});
    auto r = normalize_action(act);
    EXPECT_EQ(r.params, (NormalFormParams{0, 0, 0, 0}));
    EXPECT_EQ(r.P, kId);
    EXPECT_EQ(r.W, IntMatrix::identity(2));
}

TEST(NormalizeAction, ThreeGeneratorsWithProduct) {
    const IntMatrix n = normal_form_n(0, 0), m = normal_form_m(0, 0);
    auto act = ActionSpec({n, m, n * m});
    auto r = normalize_action(act);
    EXPECT_EQ(r.W, IntMatrix::from_columns({make_vector({1, 0, 0}), make_vector({0, 1, 0}), make_vector({1, 1, 1})}, 3));
    EXPECT_EQ(evaluate(act, r.W.column(2)), kId);
    EXPECT_TRUE(verify_normal_form(act, r).empty());
}

TEST(NormalizeAction, ThreeGeneratorsWithIdentity) {
    auto act = ActionSpec({normal_form_n(0, 0), normal_form_m(0, 0), kId});
    auto r = normalize_action(act);
    EXPECT_EQ(r.W, IntMatrix::identity(3));
}

TEST(NormalizeAction, FourGenerators) {
    const IntMatrix n = normal_form_n(2, 1), m = normal_form_m(-3, 2);
    auto act = ActionSpec({n * m, kId, n, m});
    auto r = normalize_action(act);
    EXPECT_EQ(r.W.rows(), 4u);
    EXPECT_TRUE(verify_normal_form(act, r).empty());
}

TEST(NormalizeAction, HypothesisErrors) {
    auto infinite = fixtures::infinite_image_action(1);
    EXPECT_EQ(stage_of([&] { normalize_action(infinite); }), "dimension");
    EXPECT_EQ(stage_of([] { normalize_action(ActionSpec({normal_form_n(0, 0)})); }), "rank");
    EXPECT_EQ(stage_of([] { normalize_action(ActionSpec({normal_form_n(0, 0), kId})); }), "trivial-fix");
    EXPECT_EQ(stage_of([] { normalize_action(ActionSpec({-kId, normal_form_m(0, 0)})); }), "spectral");
}

TEST(NormalizeAction, RandomKleinActionsHigherRank) {
    std::mt19937_64 rng(22);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t p = 2 + trial % 3;
        auto params = fixtures::random_params(rng, 5);
        auto act = fixtures::conjugate_action(fixtures::random_klein_action(rng, params, p),
                                              fixtures::random_unimodular(rng, 3));
        auto r = normalize_action(act);
        auto violations = verify_normal_form(act, r);
        ASSERT_TRUE(violations.empty()) << violations.front();
        auto image = image_group(act, 100);
        ASSERT_TRUE(image);
        ASSERT_EQ(image->size(), 4u);
    }
}

TEST(NormalizeAction, ConjugationEquivariance) {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 50; ++trial) {
        auto act = fixtures::conjugate_action(fixtures::klein_action(fixtures::random_params(rng, 5)),
                                              fixtures::random_unimodular(rng, 3));
        const IntMatrix s = fixtures::random_unimodular(rng, 3);
        auto moved = fixtures::conjugate_action(act, s);
        auto r1 = normalize_action(act), r2 = normalize_action(moved);
        ASSERT_TRUE(r2.params.relation_holds());
        // X = P1^-1 S P2 carries one normal-form pair onto the other
        const IntMatrix x = unimodular_inverse(r1.P) * s * r2.P, x_inv = unimodular_inverse(x);
        ASSERT_EQ(x_inv * r1.n() * x, r2.n());
        ASSERT_EQ(x_inv * r1.m() * x, r2.m());
    }
}

TEST(VerifyNormalForm, Tampering) {
    auto act = fixtures::conjugate_action(fixtures::klein_action({2, 1, -3, 2}), IntMatrix{{1, 1, 0}, {0, 1, 1}, {0, 0, 1}});
    auto good = normalize_action(act);
    ASSERT_TRUE(verify_normal_form(act, good).empty());

    auto bad_d = good;
    bad_d.params.d += 1;
    auto v = verify_normal_form(act, bad_d);
    EXPECT_NE(std::find(v.begin(), v.end(), "ad+2(b+c) != 0"), v.end());

    auto bad_p = good;
    bad_p.P(0, 0) += 1;
    v = verify_normal_form(act, bad_p);
    ASSERT_FALSE(v.empty());
    EXPECT_TRUE(v.front() == "P not unimodular" || v.front().rfind("conjugate mismatch", 0) == 0) << v.front();

    auto bad_w = good;
    bad_w.W = IntMatrix{{1, 0}, {1, 1}};
    v = verify_normal_form(act, bad_w);
    EXPECT_FALSE(v.empty());
}
