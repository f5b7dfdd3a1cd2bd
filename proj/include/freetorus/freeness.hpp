#pragma once

// Freeness of the constructed action. On the index-4 subgroup
// H = 2Z w1 + 2Z w2 + Z w3 + ... + Z wp every lift is (with S = sum l_j alpha_j)
//
//   (x + S cos 2πz + κ S sin 2πz + tx,  y + S sin 2πz + ty,  z + l2),
//
// and a fixed point on T^3 forces S sin 2πz = n2 - ty and
// S cos 2πz = n1 - tx - κ (n2 - ty) for integers n1, n2. Squaring and adding
// gives S^2 = (rational), impossible for S != 0 with algebraically
// independent alphas. Freeness on H lifts to Z^p because Z^p is torsion free
// and [Z^p : H] is finite.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "analytic_action.hpp"
#include "errors.hpp"
#include "int_matrix.hpp"
#include "sym_scalar.hpp"
#include "trig_affine_map.hpp"
#include "zp_action.hpp"

namespace freetorus {

enum class FixedPointVerdict { NoFixedPoint, IdentityMap, FixedPointFound };

inline const char* to_string(FixedPointVerdict v) {
    switch (v) {
        case FixedPointVerdict::NoFixedPoint: return "NoFixedPoint";
        case FixedPointVerdict::IdentityMap: return "IdentityMap";
        case FixedPointVerdict::FixedPointFound: return "FixedPointFound";
    }
    return "?";
}

/// S^2 = (n2 - ty)^2 + (n1 - tx - κ (n2 - ty))^2 with no solution in
/// integers n1, n2: the left side has nonzero alpha monomials, the right side
/// is rational. For a pure translation `monomials` is empty and the failed
/// identity is integrality of the translation.
struct QuadraticObstruction {
    std::map<std::pair<std::size_t, std::size_t>, Rational> monomials;  // (j, k), j <= k: coefficient of α_j α_k
    Rational x_offset;
    Rational y_offset;
    Rational slope;
    std::string text;
};

struct FixedPointReport {
    IntVector ell;  // H-coordinates
    FixedPointVerdict verdict = FixedPointVerdict::NoFixedPoint;
    std::optional<QuadraticObstruction> obstruction;
    std::optional<Point3> witness;
};

namespace detail {

inline std::string monomial_text(const std::map<std::pair<std::size_t, std::size_t>, Rational>& monomials) {
    std::string out;
    for (const auto& [jk, coeff] : monomials) {
        const auto [j, k] = jk;
        std::string mono = j == k ? "α" + std::to_string(j + 1) + "^2"
                                  : "α" + std::to_string(j + 1) + "·α" + std::to_string(k + 1);
        Rational mag = coeff < 0 ? Rational(-coeff) : coeff;
        append_term(out, coeff < 0, mag == 1 ? mono : to_string(mag) + "·" + mono);
    }
    return out;
}

}  // namespace detail

/// Symbolic fixed-point analysis of phi(2 l1 w1 + 2 l2 w2 + l3 w3 + ...).
inline FixedPointReport fixed_point_on_H(const FreeActionFamily& family, const HCoordinates& h) {
    if (h.ell.size() != family.p) throw InputError("fixed_point_on_H: exponent vector has the wrong length");
    const TrigAffineMap g = closed_form_power(family, h);
    FixedPointReport rep{h.ell, FixedPointVerdict::NoFixedPoint, std::nullopt, std::nullopt};

    if (std::all_of(h.ell.begin(), h.ell.end(), [](const Int& x) { return x == 0; })) {
        if (!g.is_identity()) throw VerificationError("fixed_point_on_H: l = 0 does not give the identity");
        rep.verdict = FixedPointVerdict::IdentityMap;
        return rep;
    }

    const SymScalar& s = g.v()[1];
    if (!g.linear().is_identity() || !g.u()[1].is_zero() || !g.u()[2].is_zero() || !g.t()[2].is_integer() ||
        s.constant() != 0 || g.u()[0] != s || !g.t()[0].is_rational() || !g.t()[1].is_rational())
        throw VerificationError("fixed_point_on_H: closed form has an unexpected shape: " + to_string(g));

    QuadraticObstruction ob;
    ob.x_offset = g.t()[0].constant();
    ob.y_offset = g.t()[1].constant();

    if (s.is_zero()) {
        if (!g.v()[0].is_zero()) throw VerificationError("fixed_point_on_H: sin term without S");
        // pure translation by t
        if (is_integer(ob.x_offset) && is_integer(ob.y_offset)) {
            rep.verdict = FixedPointVerdict::FixedPointFound;
            rep.witness = Point3{0, 0, 0};
            return rep;
        }
        ob.text = "translation (" + to_string(ob.x_offset) + ", " + to_string(ob.y_offset) + ", " +
                  to_string(g.t()[2]) + ") is not integral";
        rep.obstruction = std::move(ob);
        return rep;
    }

    // κ from the first nonzero alpha coefficient of S, then checked exactly
    std::size_t lead = 0;
    while (s.alpha_coefficient(lead) == 0) ++lead;
    ob.slope = g.v()[0].alpha_coefficient(lead) / s.alpha_coefficient(lead);
    if (g.v()[0] != ob.slope * s) throw VerificationError("fixed_point_on_H: x sin term is not proportional to S");

    // S^2 expanded: α_j^2 gets c_j^2, α_j α_k (j < k) gets 2 c_j c_k
    const auto& c = s.alpha_coefficients();
    for (std::size_t j = 0; j < c.size(); ++j)
        for (std::size_t k = j; k < c.size(); ++k) {
            Rational coeff = j == k ? Rational(c[j] * c[j]) : Rational(2 * c[j] * c[k]);
            if (coeff != 0) ob.monomials[{j, k}] = coeff;
        }
    if (ob.monomials.empty()) throw VerificationError("fixed_point_on_H: S != 0 but S^2 vanished");

    const std::string ty = to_string(ob.y_offset), tx = to_string(ob.x_offset), kappa = to_string(ob.slope);
    ob.text = detail::monomial_text(ob.monomials) + " = (n2 - " + ty + ")^2 + (n1 - " + tx + " - (" + kappa +
              ")·(n2 - " + ty + "))^2: left side is a nonzero form in α, right side is rational for all integers "
              "n1, n2";
    rep.obstruction = std::move(ob);
    return rep;
}

/// Same analysis for an element given in the w-basis; rejects elements not in H.
inline FixedPointReport fixed_point_at(const FreeActionFamily& family, const IntVector& k) {
    if (k.size() != family.p) throw InputError("fixed_point_at: exponent vector has the wrong length");
    if (k[0] % 2 != 0 || k[1] % 2 != 0)
        throw InputError("fixed_point_at: " + to_string(k) + " is not in H (first two coordinates must be even)");
    HCoordinates h{k};
    h.ell[0] /= 2;
    h.ell[1] /= 2;
    return fixed_point_on_H(family, h);
}

/// Finite-index subgroup of Z^p spanned by the columns of `generators`.
struct SubgroupSpec {
    IntMatrix generators;
    Int index;

    static SubgroupSpec from_generators(IntMatrix g) {
        if (!g.is_square() || g.rows() == 0) throw InputError("SubgroupSpec: generator matrix must be square");
        Int det = determinant(g);
        if (det == 0) throw InputError("SubgroupSpec: generators span a subgroup of infinite index (det = 0)");
        return {std::move(g), abs(det)};
    }

    /// diag(2, 2, 1, ..., 1)
    static SubgroupSpec h_subgroup(std::size_t p) {
        IntVector d(p, 1);
        for (std::size_t i = 0; i < std::min<std::size_t>(2, p); ++i) d[i] = 2;
        return from_generators(IntMatrix::diagonal(d));
    }

    std::size_t rank() const noexcept { return generators.rows(); }
};

struct FreenessEvidence {
    long long radius = 0;
    std::vector<FixedPointReport> reports;
};

struct LiftVerdict {
    bool free = false;
    Int index;
    long long radius = 0;
    std::size_t checked = 0;
    std::string argument;
};

/// Symbolic evidence on every l in [-radius, radius]^p.
inline FreenessEvidence collect_h_evidence(const FreeActionFamily& family, long long radius) {
    if (radius < 1) throw InputError("collect_h_evidence: radius must be at least 1");
    FreenessEvidence ev{radius, {}};
    for (auto& ell : box_exponents(family.p, radius)) ev.reports.push_back(fixed_point_on_H(family, HCoordinates{ell}));
    return ev;
}

/// From freeness on a finite-index subgroup to freeness on Z^p: if phi(g)
/// fixes x then phi(g^m) fixes x with m = index and g^m in the subgroup, so
/// g^m = 0 and g = 0 since Z^p is torsion free.
inline LiftVerdict lift_freeness(const SubgroupSpec& sub, const FreenessEvidence& evidence) {
    if (evidence.radius < 1) throw InputError("lift_freeness: evidence radius must be at least 1");
    std::set<IntVector> covered;
    for (const auto& r : evidence.reports) {
        if (r.ell.size() != sub.rank()) throw InputError("lift_freeness: evidence has the wrong dimension");
        if (r.verdict == FixedPointVerdict::FixedPointFound)
            throw HypothesisError("lift_freeness", "subgroup element " + to_string(r.ell) + " has a fixed point");
        const bool zero = std::all_of(r.ell.begin(), r.ell.end(), [](const Int& x) { return x == 0; });
        if (r.verdict == FixedPointVerdict::IdentityMap && !zero)
            throw HypothesisError("lift_freeness", "nonzero subgroup element " + to_string(r.ell) + " acts trivially");
        if (!zero) covered.insert(r.ell);
    }
    std::size_t expected = 0;
    for (const auto& ell : box_exponents(sub.rank(), evidence.radius)) {
        if (std::all_of(ell.begin(), ell.end(), [](const Int& x) { return x == 0; })) continue;
        ++expected;
        if (!covered.count(ell)) throw InputError("lift_freeness: no evidence for " + to_string(ell));
    }
    LiftVerdict v;
    v.free = true;
    v.index = sub.index;
    v.radius = evidence.radius;
    v.checked = expected;
    v.argument = "no fixed point for any nonzero subgroup element with |l_i| <= " + std::to_string(evidence.radius) +
                 "; Z^" + std::to_string(sub.rank()) + " is torsion free and the subgroup has index " +
                 sub.index.str() + ", so g^" + sub.index.str() + " lies in the subgroup for every g";
    return v;
}

// ---------------------------------------------------------------------------
// Numeric corroboration.

/// log of the first p primes.
inline std::vector<double> default_alpha(std::size_t p) {
    std::vector<double> out;
    for (long long n = 2; out.size() < p; ++n) {
        bool prime = true;
        for (long long d = 2; d * d <= n; ++d)
            if (n % d == 0) {
                prime = false;
                break;
            }
        if (prime) out.push_back(std::log(static_cast<double>(n)));
    }
    return out;
}

/// Wrap-around max-metric distance between two points of T^3.
inline double torus_distance(const Point3& a, const Point3& b) {
    double d = 0;
    for (std::size_t i = 0; i < 3; ++i) {
        double x = a[i] - b[i];
        x -= std::round(x);
        d = std::max(d, std::abs(x));
    }
    return d;
}

struct ScanEntry {
    IntVector ell;
    double min_displacement = 0;
    bool flagged = false;
};

struct ScanReport {
    long long box = 0;
    std::size_t grid = 0;
    double tol = 0;
    std::vector<ScanEntry> entries;

    bool any_flagged() const {
        return std::any_of(entries.begin(), entries.end(), [](const ScanEntry& e) { return e.flagged; });
    }
    double min_displacement() const {
        double m = INFINITY;
        for (const auto& e : entries) m = std::min(m, e.min_displacement);
        return m;
    }
};

inline double min_displacement_on_grid(const NumericMap& m, std::size_t grid) {
    const double h = 1.0 / static_cast<double>(grid);
    double best = INFINITY;
    for (std::size_t iz = 0; iz < grid; ++iz) {
        const double z = h * static_cast<double>(iz);
        const double c = std::cos(2 * std::numbers::pi * z), s = std::sin(2 * std::numbers::pi * z);
        double base[3];
        for (std::size_t i = 0; i < 3; ++i) base[i] = m.a[i][2] * z + m.t[i] + m.u[i] * c + m.v[i] * s;
        for (std::size_t ix = 0; ix < grid; ++ix) {
            const double x = h * static_cast<double>(ix);
            for (std::size_t iy = 0; iy < grid; ++iy) {
                const double y = h * static_cast<double>(iy);
                const Point3 p{x, y, z};
                double d = 0;
                for (std::size_t i = 0; i < 3; ++i) {
                    double diff = m.a[i][0] * x + m.a[i][1] * y + base[i] - p[i];
                    diff -= std::round(diff);
                    d = std::max(d, std::abs(diff));
                }
                best = std::min(best, d);
            }
        }
    }
    return best;
}

/// Minimum torus displacement of phi(l) over a grid^3 sample, for every
/// l != 0 in [-box, box]^p (w-basis); entries below tol are flagged.
inline ScanReport numeric_fixed_point_scan(std::span<const TrigAffineMap> lifts, std::span<const double> alpha,
                                           long long box, double tol, std::size_t grid = 64) {
    if (alpha.size() < lifts.size()) throw InputError("numeric_fixed_point_scan: one alpha value per generator needed");
    if (grid == 0) throw InputError("numeric_fixed_point_scan: grid must be positive");
    ScanReport rep{box, grid, tol, {}};
    for (auto& ell : box_exponents(lifts.size(), box)) {
        if (std::all_of(ell.begin(), ell.end(), [](const Int& x) { return x == 0; })) continue;
        const double d = min_displacement_on_grid(instantiate(element_map(lifts, ell), alpha), grid);
        rep.entries.push_back({std::move(ell), d, d < tol});
    }
    return rep;
}

inline ScanReport numeric_fixed_point_scan(const FreeActionFamily& family, std::span<const double> alpha, long long box,
                                           double tol, std::size_t grid = 64) {
    return numeric_fixed_point_scan(std::span<const TrigAffineMap>(family.lifts), alpha, box, tol, grid);
}

/// Points of T^3 visited by applying lifts[word[0]], lifts[word[1]], ... in order.
inline std::vector<Point3> orbit_iterate(std::span<const TrigAffineMap> lifts, std::span<const double> alpha,
                                         const Point3& start, const std::vector<std::size_t>& word) {
    std::vector<NumericMap> maps;
    for (const auto& f : lifts) maps.push_back(instantiate(f, alpha));
    std::vector<Point3> out{reduce_mod_one(start)};
    for (std::size_t idx : word) {
        if (idx >= maps.size())
            throw InputError("orbit_iterate: generator index " + std::to_string(idx + 1) + " out of range 1.." +
                             std::to_string(maps.size()));
        out.push_back(reduce_mod_one(maps[idx](out.back())));
    }
    return out;
}

inline std::vector<Point3> orbit_iterate(const FreeActionFamily& family, std::span<const double> alpha,
                                         const Point3& start, const std::vector<std::size_t>& word) {
    return orbit_iterate(std::span<const TrigAffineMap>(family.lifts), alpha, start, word);
}

inline void write_trajectory_csv(std::ostream& os, const std::vector<Point3>& trajectory) {
    os << "step,x,y,z\n";
    std::ostringstream line;
    line.precision(15);
    for (std::size_t k = 0; k < trajectory.size(); ++k) {
        line.str("");
        line << k << ',' << trajectory[k][0] << ',' << trajectory[k][1] << ',' << trajectory[k][2] << '\n';
        os << line.str();
    }
}

}  // namespace freetorus
