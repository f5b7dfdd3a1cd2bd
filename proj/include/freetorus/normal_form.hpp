#pragma once

// Normal form of spectrally unitary Z^p-actions on Z^3 with trivial fixed
// lattice: a conjugator P in GL(3, Z) and a basis W of Z^p with
//
//   P^-1 A(w1) P = [[1, a, b], [0, -1, 0], [0, 0, -1]]
//   P^-1 A(w2) P = [[-1, 0, c], [0, -1, d], [0, 0, 1]]
//   P^-1 A(wj) P = I for j > 2,       a*d + 2*(b + c) = 0.

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "exact_lattice.hpp"
#include "int_matrix.hpp"
#include "zp_action.hpp"

namespace freetorus {

struct NormalFormResult {
    NormalFormParams params;
    IntMatrix P;  // lattice conjugator, 3 x 3
    IntMatrix W;  // columns w_1, ..., w_p, p x p

    std::size_t p() const noexcept { return W.cols(); }
    IntMatrix n() const { return normal_form_n(params.a, params.b); }
    IntMatrix m() const { return normal_form_m(params.c, params.d); }

    friend bool operator==(const NormalFormResult&, const NormalFormResult&) = default;
};

struct PairNormalForm {
    NormalFormParams params;
    IntMatrix P;
};

namespace detail {

inline void require(bool ok, const char* stage, const std::string& what) {
    if (!ok) throw HypothesisError(stage, what);
}

inline IntMatrix conjugate(const IntMatrix& p_inv, const IntMatrix& x, const IntMatrix& p) { return p_inv * x * p; }

}  // namespace detail

/// Brings a commuting pair (N, M) to the normal form by an explicit
/// GL(3, Z) conjugation. Each step names the hypothesis it found violated.
inline PairNormalForm normalize_pair(const IntMatrix& n, const IntMatrix& m, long long box_radius = kDefaultBoxRadius) {
    using detail::require;
    const IntMatrix id = IntMatrix::identity(3);
    if (n.rows() != 3 || n.cols() != 3 || m.rows() != 3 || m.cols() != 3)
        throw InputError("normalize_pair: N and M must be 3x3");
    if (!is_unimodular(n)) throw NotUnimodularError(determinant(n));
    if (!is_unimodular(m)) throw NotUnimodularError(determinant(m));
    require(n * m == m * n, "commutation", "N and M do not commute");

    ActionSpec pair({n, m});
    for (const auto& ell : box_exponents(2, box_radius))
        require(has_eigenvalue_one(evaluate(pair, ell)), "spectral",
                "N^n M^m has no eigenvalue 1 at (n,m) = " + to_string(ell));
    require(fix_lattice(pair).is_trivial(), "joint-fix", "N and M have a nontrivial common fixed lattice");

    // 1. involutions
    require(n * n == id && m * m == id && (n * m) * (n * m) == id, "involution",
            "N^2 = M^2 = (NM)^2 = I fails; hypotheses not satisfiable");

    // 2. first basis vector spans Fix(N)
    LatticeBasis fix_n = integer_kernel(n - id);
    require(fix_n.rank() == 1, "fix-rank", "Fix(N) has rank " + std::to_string(fix_n.rank()) + ", expected 1");
    IntVector e1 = primitive_generator(fix_n.vectors.front());
    IntMatrix q = complete_to_basis(e1, 3);
    IntMatrix q_inv = unimodular_inverse(q);
    IntMatrix n1 = detail::conjugate(q_inv, n, q);
    IntMatrix m1 = detail::conjugate(q_inv, m, q);

    // 3. N = [[1, *], [0, B_N]] with B_N = -I
    require(n1.column(0) == make_vector({1, 0, 0}), "fix-rank", "N does not fix the first basis vector");
    require(n1.block(1, 1, 2, 2) == -IntMatrix::identity(2), "involution",
            "lower block of N is not -I after the basis change");

    // 4. M e1 = -e1, lower block B of M has det -1
    if (m1.column(0) == make_vector({1, 0, 0}))
        throw HypothesisError("joint-fix", "M e1 = e1, so the common fixed lattice is nontrivial");
    require(m1.column(0) == make_vector({-1, 0, 0}), "eigenvector", "M e1 is not -e1");
    IntMatrix b = m1.block(1, 1, 2, 2);
    require(determinant(b) == -1, "determinant", "lower block of M has det " + determinant(b).str() + ", expected -1");

    // 5. U in GL(2, Z) triangularizing B, applied as diag(1, U)
    LatticeBasis eig = integer_kernel(b + IntMatrix::identity(2));
    require(eig.rank() == 1, "eigenvector", "B + I has kernel rank " + std::to_string(eig.rank()) + ", expected 1");
    IntMatrix u = complete_to_basis(primitive_generator(eig.vectors.front()), 2);
    IntMatrix t = IntMatrix::identity(3);
    t.set_block(1, 1, u);
    IntMatrix p = q * t;
    IntMatrix p_inv = unimodular_inverse(p);
    IntMatrix n2 = detail::conjugate(p_inv, n, p);
    IntMatrix m2 = detail::conjugate(p_inv, m, p);

    // 6. b33 = 1, b12 = 0, relation ad + 2(b + c) = 0
    require(m2(2, 2) == 1, "determinant", "M has b33 = " + m2(2, 2).str() + ", expected 1");
    require(m2(0, 1) == 0, "commutation", "M has b12 = " + m2(0, 1).str() + ", expected 0");
    NormalFormParams params{n2(0, 1), n2(0, 2), m2(0, 2), m2(1, 2)};
    require(params.relation_holds(), "commutation", "ad + 2(b + c) != 0");

    // 7. exact final check
    if (n2 != normal_form_n(params.a, params.b) || m2 != normal_form_m(params.c, params.d))
        throw VerificationError("normalize_pair: conjugated pair is not in normal form: N' = " + to_string(n2) +
                                ", M' = " + to_string(m2));
    return {params, std::move(p)};
}

namespace detail {

inline NormalFormResult normalize_action_impl(const ActionSpec& action, long long box_radius) {
    const std::size_t p = action.p();
    if (p == 2) {
        auto pair = normalize_pair(action.generator(0), action.generator(1), box_radius);
        return {pair.params, std::move(pair.P), IntMatrix::identity(2)};
    }

    // Prefer dropping the last generator, then fall back to the smallest index.
    std::size_t drop = restricted_fix_lattice(action, p - 1).is_trivial() ? p - 1 : find_trivial_restriction(action);
    NormalFormResult sub = normalize_action_impl(restrict(action, drop), box_radius);

    // Embed the basis of G_drop (coordinates of the restricted action) into Z^p.
    auto embed = [&](const IntVector& v) {
        IntVector out(p);
        for (std::size_t k = 0, j = 0; j < p; ++j)
            if (j != drop) out[j] = v[k++];
        return out;
    };
    std::vector<IntVector> columns;
    for (std::size_t k = 0; k + 1 < p; ++k) columns.push_back(embed(sub.W.column(k)));

    IntMatrix p_inv = unimodular_inverse(sub.P);
    IntMatrix c = p_inv * action.generator(drop) * sub.P;
    KleinElement tag;
    try {
        tag = klein_membership(c, sub.n(), sub.m(), box_radius);
    } catch (const KleinMembershipError& e) {
        throw HypothesisError("klein-membership", std::string("generator ") + std::to_string(drop + 1) + ": " + e.what());
    }
    auto [bit_n, bit_m] = klein_exponents(tag);
    // w_p = v + e_drop where A(v) = A(e_drop)
    IntVector w(p);
    w[drop] = 1;
    for (std::size_t j = 0; j < p; ++j) w[j] += bit_n * columns[0][j] + bit_m * columns[1][j];
    columns.push_back(std::move(w));

    IntMatrix basis = IntMatrix::from_columns(columns, p);
    if (!is_unimodular(basis)) throw VerificationError("normalize_action: assembled W is not unimodular");
    return {sub.params, std::move(sub.P), std::move(basis)};
}

}  // namespace detail

/// Normal form of a Z^p-action on Z^3 (p >= 2) by induction on p.
inline NormalFormResult normalize_action(const ActionSpec& action, long long box_radius = kDefaultBoxRadius,
                                         std::size_t closure_cap = kDefaultClosureCap) {
    if (action.q() != 3) throw HypothesisError("dimension", "lattice dimension is " + std::to_string(action.q()) + ", expected 3");
    if (action.p() < 2) throw HypothesisError("rank", "needs at least two generators");
    if (!fix_lattice(action).is_trivial()) throw HypothesisError("trivial-fix", "Fix(A) is nontrivial");
    auto verdict = spectral_unitarity(action, closure_cap, box_radius);
    if (verdict.status == SpectralStatus::Refuted)
        throw HypothesisError("spectral", "A(l) has no eigenvalue 1 at l = " + to_string(*verdict.witness));
    return detail::normalize_action_impl(action, box_radius);
}

/// Re-checks every clause of a NormalFormResult by exact multiplication and
/// lists the violated ones.
inline std::vector<std::string> verify_normal_form(const ActionSpec& action, const NormalFormResult& result) {
    std::vector<std::string> violations;
    if (!result.params.relation_holds()) violations.emplace_back("ad+2(b+c) != 0");
    if (action.q() != 3) {
        violations.emplace_back("lattice dimension is not 3");
        return violations;
    }
    if (result.W.rows() != action.p() || result.W.cols() != action.p()) {
        violations.emplace_back("W has the wrong shape");
        return violations;
    }
    if (!is_unimodular(result.W)) violations.emplace_back("W not unimodular");
    if (result.P.rows() != 3 || result.P.cols() != 3 || !is_unimodular(result.P)) {
        violations.emplace_back("P not unimodular");
        return violations;
    }
    IntMatrix p_inv = unimodular_inverse(result.P);
    const IntMatrix n = result.n(), m = result.m(), id = IntMatrix::identity(3);
    for (std::size_t j = 0; j < action.p(); ++j) {
        IntMatrix conj = p_inv * evaluate(action, result.W.column(j)) * result.P;
        const IntMatrix& want = j == 0 ? n : j == 1 ? m : id;
        if (conj != want) violations.push_back("conjugate mismatch for w" + std::to_string(j + 1));
    }
    return violations;
}

}  // namespace freetorus
