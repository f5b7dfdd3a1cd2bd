#pragma once

// Reference actions and random unimodular generators shared by the CLI demo
// and the test suites.

#include <cstddef>
#include <random>
#include <vector>

#include "exact_lattice.hpp"
#include "int_matrix.hpp"
#include "zp_action.hpp"

namespace freetorus::fixtures {

/// The Z^2-action on Z^3 generated by a normal-form pair.
inline ActionSpec klein_action(const NormalFormParams& p) {
    return ActionSpec({normal_form_n(p.a, p.b), normal_form_m(p.c, p.d)});
}

/// Z^2-action on Z^4 with trivial fixed lattice whose first generator has
/// infinite order:
///   A(e1) = [[1, a, 0, 0], [0, -1, 0, 0], [0, 0, 0, -1], [0, 0, 1, -2]],
///   A(e2) = diag(-1, -1, 1, 1).
inline ActionSpec infinite_image_action(const Int& a) {
    IntMatrix e1{{1, a, 0, 0}, {0, -1, 0, 0}, {0, 0, 0, -1}, {0, 0, 1, -2}};
    IntMatrix e2 = IntMatrix::diagonal(make_vector({-1, -1, 1, 1}));
    return ActionSpec({std::move(e1), std::move(e2)});
}

/// Uniform (a, b, c, d) with ad + 2(b + c) = 0 and |entries| <= bound, by
/// rejection sampling.
template <class Rng>
NormalFormParams random_params(Rng& rng, long long bound) {
    std::uniform_int_distribution<long long> dist(-bound, bound);
    for (;;) {
        long long a = dist(rng), b = dist(rng), c = dist(rng), d = dist(rng);
        if (a * d + 2 * (b + c) == 0) return {a, b, c, d};
    }
}

/// Product of up to `max_steps` elementary matrices I + k E_ij (i != j,
/// 1 <= |k| <= max_mult), occasionally with a sign flip of one row.
template <class Rng>
IntMatrix random_unimodular(Rng& rng, std::size_t n, std::size_t max_steps = 10, long long max_mult = 2) {
    std::uniform_int_distribution<std::size_t> steps_dist(0, max_steps);
    std::uniform_int_distribution<std::size_t> idx(0, n - 1);
    std::uniform_int_distribution<long long> mult(1, max_mult);
    std::bernoulli_distribution negative(0.5), flip(0.1);
    IntMatrix u = IntMatrix::identity(n);
    const std::size_t steps = steps_dist(rng);
    for (std::size_t s = 0; s < steps; ++s) {
        IntMatrix e = IntMatrix::identity(n);
        if (n > 1) {
            std::size_t i = idx(rng), j = idx(rng);
            while (j == i) j = idx(rng);
            long long k = mult(rng);
            e(i, j) = negative(rng) ? -k : k;
        }
        if (flip(rng)) e.negate_row(idx(rng));
        u = u * e;
    }
    return u;
}

/// S^-1 A S for every generator.
inline ActionSpec conjugate_action(const ActionSpec& action, const IntMatrix& s) {
    IntMatrix s_inv = unimodular_inverse(s);
    std::vector<IntMatrix> gens;
    for (const auto& g : action.generators()) gens.push_back(s_inv * g * s);
    return ActionSpec(std::move(gens));
}

/// Z^p-action on Z^3 whose generators are random elements of <N, M> for a
/// normal-form pair, redrawn until they generate the whole four-group.
template <class Rng>
ActionSpec random_klein_action(Rng& rng, const NormalFormParams& params, std::size_t p) {
    const IntMatrix n = normal_form_n(params.a, params.b), m = normal_form_m(params.c, params.d);
    const IntMatrix elems[4] = {IntMatrix::identity(3), n, m, n * m};
    std::uniform_int_distribution<int> pick(0, 3);
    for (;;) {
        std::vector<int> tags(p);
        bool has_n = false, has_m = false, has_nm = false;
        for (auto& t : tags) {
            t = pick(rng);
            has_n |= t == 1;
            has_m |= t == 2;
            has_nm |= t == 3;
        }
        // two distinct nontrivial elements generate the group
        if (int(has_n) + int(has_m) + int(has_nm) < 2) continue;
        std::vector<IntMatrix> gens;
        for (int t : tags) gens.push_back(elems[t]);
        return ActionSpec(std::move(gens));
    }
}

}  // namespace freetorus::fixtures
