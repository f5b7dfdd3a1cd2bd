#pragma once

// The free real-analytic Z^p-action on T^3 realizing a normal form. In the
// basis w_1, ..., w_p the lifts are
//
//   phi_1(x, y, z) = (x + a y + b z + f1(z) + r, -y + g1(z), -z)
//   phi_2(x, y, z) = (-x + c z + f2(z), -y + d z + g2(z), z + 1/2)
//   phi_j(x, y, z) = (x + fj(z), y + gj(z), z)                  (j > 2)
//
// with r = -b/4 and
//
//   f1 =  (α1/2) cos,                  g1 = -(α1/2) sin
//   f2 = -(α2/2) cos + (a/4) α2 sin,   g2 = -(α2/2) sin
//   fj =  αj cos - (a/2) αj sin,       gj = +αj sin
//
// (cos, sin evaluated at 2πz). gj carries a plus sign: with -αj sin the
// identity fj∘R - fj = a·gj fails whenever a != 0.

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "int_matrix.hpp"
#include "normal_form.hpp"
#include "sym_scalar.hpp"
#include "trig_affine_map.hpp"
#include "zp_action.hpp"

namespace freetorus {

struct FreeActionFamily {
    std::size_t p = 0;
    NormalFormResult nf;
    std::vector<TrigAffineMap> lifts;  // lifts[i] realizes w_{i+1}

    friend bool operator==(const FreeActionFamily&, const FreeActionFamily&) = default;
};

/// Exponents of an element 2 l1 w1 + 2 l2 w2 + l3 w3 + ... of the index-4
/// subgroup H, in H-coordinates (l1, ..., lp).
struct HCoordinates {
    IntVector ell;

    /// The same element in the w-basis of Z^p.
    IntVector to_w_basis() const {
        IntVector w = ell;
        for (std::size_t i = 0; i < std::min<std::size_t>(2, w.size()); ++i) w[i] *= 2;
        return w;
    }
};

/// One coordinate of a lift's trigonometric part: c cos 2πz + s sin 2πz.
struct TrigFunction {
    SymScalar cos_coeff;
    SymScalar sin_coeff;

    /// f∘R with R(z) = -z
    TrigFunction reflected() const { return {cos_coeff, -sin_coeff}; }
    /// f∘T with T(z) = z + 1/2
    TrigFunction half_shifted() const { return {-cos_coeff, -sin_coeff}; }

    friend TrigFunction operator+(const TrigFunction& f, const TrigFunction& g) {
        return {f.cos_coeff + g.cos_coeff, f.sin_coeff + g.sin_coeff};
    }
    friend TrigFunction operator-(const TrigFunction& f, const TrigFunction& g) {
        return {f.cos_coeff - g.cos_coeff, f.sin_coeff - g.sin_coeff};
    }
    friend TrigFunction operator-(const TrigFunction& f) { return {-f.cos_coeff, -f.sin_coeff}; }
    friend TrigFunction operator*(const Int& k, const TrigFunction& f) { return {k * f.cos_coeff, k * f.sin_coeff}; }
    friend bool operator==(const TrigFunction&, const TrigFunction&) = default;
};

/// f (coordinate 0) or g (coordinate 1) of a lift.
inline TrigFunction trig_part(const TrigAffineMap& f, std::size_t coordinate) {
    return {f.u().at(coordinate), f.v().at(coordinate)};
}

struct DefectReport {
    bool constant_integer = false;
    IntVector defect;                        // set when constant_integer
    std::vector<std::string> discrepancies;  // set otherwise
    IntMatrix linear_difference;
    SymVec3 t, u, v;
};

/// (g o f) - (f o g). For the built family the pair (phi_1, phi_2) gives
/// (0, 0, 1), every other pair gives 0.
inline DefectReport commutator_defect(const TrigAffineMap& f, const TrigAffineMap& g) {
    const TrigAffineMap gf = compose(g, f), fg = compose(f, g);
    DefectReport r;
    r.linear_difference = gf.linear() - fg.linear();
    r.t = gf.t() - fg.t();
    r.u = gf.u() - fg.u();
    r.v = gf.v() - fg.v();

    static const char* coords[3] = {"x", "y", "z"};
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j)
            if (r.linear_difference(i, j) != 0)
                r.discrepancies.push_back(std::string(coords[i]) + ": linear term in " + coords[j] + " with coefficient " +
                                          r.linear_difference(i, j).str());
        if (!r.u[i].is_zero())
            r.discrepancies.push_back(std::string(coords[i]) + ": (" + to_string(r.u[i]) + ")·cos 2πz");
        if (!r.v[i].is_zero())
            r.discrepancies.push_back(std::string(coords[i]) + ": (" + to_string(r.v[i]) + ")·sin 2πz");
        if (!r.t[i].is_rational())
            r.discrepancies.push_back(std::string(coords[i]) + ": α-term in the constant: " + to_string(r.t[i]));
        else if (!is_integer(r.t[i].constant()))
            r.discrepancies.push_back(std::string(coords[i]) + ": non-integer constant " + to_string(r.t[i].constant()));
    }
    if (r.discrepancies.empty()) {
        r.constant_integer = true;
        for (const auto& c : r.t) r.defect.push_back(to_int(c.constant()));
    }
    return r;
}

/// Lifts phi_1, ..., phi_p for a normal form, with alpha_j formal.
inline FreeActionFamily build_generators(const NormalFormResult& nf, std::size_t p) {
    if (p < 2) throw InputError("build_generators: p must be at least 2");
    if (!nf.params.relation_holds()) throw InputError("build_generators: ad + 2(b + c) != 0");
    const auto& [a, b, c, d] = nf.params;
    const Rational half(1, 2), quarter(1, 4);
    const Rational r = -Rational(b) / 4;

    FreeActionFamily fam{p, nf, {}};
    fam.lifts.reserve(p);
    // phi_1
    fam.lifts.emplace_back(nf.n(), SymVec3{r, 0, 0}, SymVec3{SymScalar::alpha(0, half), 0, 0},
                           SymVec3{0, SymScalar::alpha(0, -half), 0});
    // phi_2
    fam.lifts.emplace_back(nf.m(), SymVec3{0, 0, half}, SymVec3{SymScalar::alpha(1, -half), 0, 0},
                           SymVec3{SymScalar::alpha(1, Rational(a) * quarter), SymScalar::alpha(1, -half), 0});
    // phi_j, j > 2
    for (std::size_t j = 2; j < p; ++j)
        fam.lifts.emplace_back(IntMatrix::identity(3), SymVec3{}, SymVec3{SymScalar::alpha(j), 0, 0},
                               SymVec3{SymScalar::alpha(j, -Rational(a) * half), SymScalar::alpha(j), 0});

    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = i + 1; j < p; ++j) {
            auto rep = commutator_defect(fam.lifts[i], fam.lifts[j]);
            if (!rep.constant_integer)
                throw VerificationError("build_generators: lifts " + std::to_string(i + 1) + " and " +
                                        std::to_string(j + 1) + " do not commute modulo Z^3: " +
                                        rep.discrepancies.front());
        }
    return fam;
}

/// phi(2 l1 w1 + 2 l2 w2 + l3 w3 + ...) straight from the closed form:
///   x + S cos 2πz - (a/2) S sin 2πz + 2 l1 r + l2 c/2,
///   y + S sin 2πz + l2 d/2,
///   z + l2,
/// with S = sum_j l_j alpha_j.
inline TrigAffineMap closed_form_power(const FreeActionFamily& family, const HCoordinates& h) {
    if (h.ell.size() != family.p)
        throw InputError("closed_form_power: exponent vector has length " + std::to_string(h.ell.size()) +
                         ", expected " + std::to_string(family.p));
    const auto& [a, b, c, d] = family.nf.params;
    const Rational r = -Rational(b) / 4;
    SymScalar sum;
    for (std::size_t j = 0; j < family.p; ++j) sum += SymScalar::alpha(j, Rational(h.ell[j]));
    const Rational l1(h.ell[0]), l2(h.ell[1]);
    SymVec3 t{2 * l1 * r + l2 * Rational(c) / 2, l2 * Rational(d) / 2, l2};
    SymVec3 u{sum, 0, 0};
    SymVec3 v{-Rational(a) / 2 * sum, sum, 0};
    return TrigAffineMap(IntMatrix::identity(3), t, u, v);
}

/// lift_1^{k1} o lift_2^{k2} o ... o lift_p^{kp} for k in the w-basis, by
/// repeated composition.
inline TrigAffineMap element_map(std::span<const TrigAffineMap> lifts, const IntVector& k) {
    if (k.size() != lifts.size()) throw InputError("element_map: exponent vector has the wrong length");
    TrigAffineMap out;
    for (std::size_t i = lifts.size(); i-- > 0;) out = compose(power(lifts[i], small_exponent(k[i])), out);
    return out;
}

inline TrigAffineMap element_map(const FreeActionFamily& family, const IntVector& k) {
    return element_map(std::span<const TrigAffineMap>(family.lifts), k);
}

/// The action on H_1(T^3) = Z^3 by the linear parts of the lifts.
inline ActionSpec induced_action(const FreeActionFamily& family) {
    std::vector<IntMatrix> gens;
    for (const auto& f : family.lifts) gens.push_back(f.linear());
    return ActionSpec(std::move(gens));
}

struct IdentityCheck {
    std::string name;
    bool holds;
};

/// The trigonometric identities equivalent to the action law:
///   f2∘R - f2 = a·g2 + f1 + f1∘T,   g2∘R + g2 = g1 + g1∘T,
///   fj∘R - fj = a·gj,   gj∘R = -gj,   fj∘T = -fj,   gj∘T = -gj   (j > 2).
inline std::vector<IdentityCheck> action_law_identities(const FreeActionFamily& family) {
    const Int& a = family.nf.params.a;
    const auto f1 = trig_part(family.lifts[0], 0), g1 = trig_part(family.lifts[0], 1);
    const auto f2 = trig_part(family.lifts[1], 0), g2 = trig_part(family.lifts[1], 1);
    std::vector<IdentityCheck> out;
    out.push_back({"f2∘R - f2 = a·g2 + f1 + f1∘T", f2.reflected() - f2 == a * g2 + f1 + f1.half_shifted()});
    out.push_back({"g2∘R + g2 = g1 + g1∘T", g2.reflected() + g2 == g1 + g1.half_shifted()});
    for (std::size_t j = 2; j < family.p; ++j) {
        const auto fj = trig_part(family.lifts[j], 0), gj = trig_part(family.lifts[j], 1);
        const std::string s = std::to_string(j + 1);
        out.push_back({"f" + s + "∘R - f" + s + " = a·g" + s, fj.reflected() - fj == a * gj});
        out.push_back({"g" + s + "∘R = -g" + s, gj.reflected() == -gj});
        out.push_back({"f" + s + "∘T = -f" + s, fj.half_shifted() == -fj});
        out.push_back({"g" + s + "∘T = -g" + s, gj.half_shifted() == -gj});
    }
    return out;
}

}  // namespace freetorus
