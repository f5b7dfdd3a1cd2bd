#pragma once

// Lifts R^3 -> R^3 of the form
//
//   X  |->  A X + t + u cos(2 pi z) + v sin(2 pi z)
//
// with A unimodular, third row of A equal to (0, 0, eps), u3 = v3 = 0 and
// t3 in (1/2)Z. The class is closed under composition and inversion because
// the new z-coordinate eps*z + t3 only flips the sign of cos/sin.

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <utility>

#include "errors.hpp"
#include "exact_lattice.hpp"
#include "int_matrix.hpp"
#include "sym_scalar.hpp"

namespace freetorus {

using SymVec3 = std::array<SymScalar, 3>;
using Point3 = std::array<double, 3>;

class TrigAffineMap {
public:
    TrigAffineMap() : TrigAffineMap(IntMatrix::identity(3), {}, {}, {}) {}

    TrigAffineMap(IntMatrix linear, SymVec3 t, SymVec3 u, SymVec3 v)
        : linear_(std::move(linear)), t_(std::move(t)), u_(std::move(u)), v_(std::move(v)) {
        if (linear_.rows() != 3 || linear_.cols() != 3) throw InputError("TrigAffineMap: linear part must be 3x3");
        if (linear_(2, 0) != 0 || linear_(2, 1) != 0 || (linear_(2, 2) != 1 && linear_(2, 2) != -1))
            throw InputError("TrigAffineMap: third row of the linear part must be (0, 0, +-1)");
        if (!is_unimodular(linear_)) throw InputError("TrigAffineMap: linear part is not unimodular");
        if (!u_[2].is_zero() || !v_[2].is_zero())
            throw InputError("TrigAffineMap: the z-coordinate carries a trigonometric term");
        if (!t_[2].is_rational() || !is_integer(2 * t_[2].constant()))
            throw InputError("TrigAffineMap: z-translation must be a half-integer");
    }

    static TrigAffineMap identity() { return {}; }

    const IntMatrix& linear() const noexcept { return linear_; }
    const SymVec3& t() const noexcept { return t_; }
    const SymVec3& u() const noexcept { return u_; }
    const SymVec3& v() const noexcept { return v_; }

    /// eps, the sign of z in the new z-coordinate
    int z_sign() const { return linear_(2, 2) == 1 ? 1 : -1; }

    /// sigma: cos(2 pi (eps z + t3)) = sigma cos(2 pi z)
    int shift_parity() const { return is_integer(t_[2].constant()) ? 1 : -1; }

    bool is_identity() const {
        return linear_.is_identity() && t_ == SymVec3{} && u_ == SymVec3{} && v_ == SymVec3{};
    }

    friend bool operator==(const TrigAffineMap&, const TrigAffineMap&) = default;

private:
    IntMatrix linear_;
    SymVec3 t_, u_, v_;
};

inline SymVec3 operator*(const IntMatrix& a, const SymVec3& x) {
    SymVec3 out;
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            if (a(i, j) != 0) out[i] += a(i, j) * x[j];
    return out;
}

inline SymVec3 operator+(SymVec3 a, const SymVec3& b) {
    for (std::size_t i = 0; i < 3; ++i) a[i] += b[i];
    return a;
}

inline SymVec3 operator-(SymVec3 a, const SymVec3& b) {
    for (std::size_t i = 0; i < 3; ++i) a[i] -= b[i];
    return a;
}

inline SymVec3 operator-(SymVec3 a) {
    for (auto& x : a) x = -x;
    return a;
}

inline SymVec3 operator*(const Rational& k, SymVec3 a) {
    for (auto& x : a) x *= k;
    return a;
}

/// f o g
inline TrigAffineMap compose(const TrigAffineMap& f, const TrigAffineMap& g) {
    const Rational sigma = g.shift_parity();
    const Rational sigma_eps = sigma * g.z_sign();
    return TrigAffineMap(f.linear() * g.linear(), f.linear() * g.t() + f.t(), f.linear() * g.u() + sigma * f.u(),
                         f.linear() * g.v() + sigma_eps * f.v());
}

inline TrigAffineMap inverse(const TrigAffineMap& f) {
    IntMatrix a_inv = unimodular_inverse(f.linear());
    // z = eps (Y3 - t3); the shift -eps t3 has the same parity as t3
    const Rational sigma = f.shift_parity();
    const Rational sigma_eps = sigma * f.z_sign();
    return TrigAffineMap(a_inv, -(a_inv * f.t()), -sigma * (a_inv * f.u()), -sigma_eps * (a_inv * f.v()));
}

/// f^n by repeated composition, f^{n+1} = f o f^n.
inline TrigAffineMap power(const TrigAffineMap& f, long long n) {
    const TrigAffineMap step = n < 0 ? inverse(f) : f;
    TrigAffineMap out;
    for (long long k = 0; k < (n < 0 ? -n : n); ++k) out = compose(step, out);
    return out;
}

/// The map with every alpha_j replaced by a concrete real value.
struct NumericMap {
    std::array<std::array<double, 3>, 3> a{};
    Point3 t{}, u{}, v{};

    Point3 operator()(const Point3& x) const {
        const double c = std::cos(2 * std::numbers::pi * x[2]);
        const double s = std::sin(2 * std::numbers::pi * x[2]);
        Point3 y;
        for (std::size_t i = 0; i < 3; ++i)
            y[i] = a[i][0] * x[0] + a[i][1] * x[1] + a[i][2] * x[2] + t[i] + u[i] * c + v[i] * s;
        return y;
    }
};

inline NumericMap instantiate(const TrigAffineMap& f, std::span<const double> alpha) {
    NumericMap m;
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) m.a[i][j] = f.linear()(i, j).convert_to<double>();
        m.t[i] = f.t()[i].evaluate(alpha);
        m.u[i] = f.u()[i].evaluate(alpha);
        m.v[i] = f.v()[i].evaluate(alpha);
    }
    return m;
}

/// Evaluates the lift on the universal cover R^3.
inline Point3 evaluate_numeric(const TrigAffineMap& f, const Point3& point, std::span<const double> alpha) {
    return instantiate(f, alpha)(point);
}

inline Point3 reduce_mod_one(Point3 x) {
    for (auto& c : x) {
        c -= std::floor(c);
        if (c >= 1.0) c = 0.0;
    }
    return x;
}

namespace detail {

inline void append_term(std::string& out, bool negative, const std::string& text) {
    if (out.empty())
        out = negative ? "-" + text : text;
    else
        out += (negative ? " - " : " + ") + text;
}

inline void append_trig(std::string& out, const SymScalar& coeff, const char* fn) {
    if (coeff.is_zero()) return;
    auto terms = signed_terms(coeff);
    const std::string trig = std::string(fn) + " 2πz";
    if (terms.size() == 1) {
        const auto& [neg, text] = terms.front();
        append_term(out, neg, text == "1" ? trig : text + "·" + trig);
    } else {
        append_term(out, false, "(" + to_string(coeff) + ")·" + trig);
    }
}

}  // namespace detail

/// Human-readable coordinate formulas, e.g.
/// "(x + a·y + b·z + 1/2·α1·cos 2πz - 1/4, -y - 1/2·α1·sin 2πz, -z)".
inline std::string to_string(const TrigAffineMap& f) {
    static const char* vars[3] = {"x", "y", "z"};
    std::string out = "(";
    for (std::size_t i = 0; i < 3; ++i) {
        std::string coord;
        for (std::size_t j = 0; j < 3; ++j) {
            const Int& k = f.linear()(i, j);
            if (k == 0) continue;
            Int mag = abs(k);
            detail::append_term(coord, k < 0, mag == 1 ? vars[j] : mag.str() + "·" + vars[j]);
        }
        detail::append_trig(coord, f.u()[i], "cos");
        detail::append_trig(coord, f.v()[i], "sin");
        if (!f.t()[i].is_zero())
            for (const auto& [neg, text] : signed_terms(f.t()[i])) detail::append_term(coord, neg, text);
        if (coord.empty()) coord = "0";
        out += (i ? ", " : "") + coord;
    }
    return out + ")";
}

}  // namespace freetorus
