#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "int_matrix.hpp"

namespace freetorus {

/// c0 + c1*alpha_1 + ... + cp*alpha_p with exact rational coefficients and
/// the alpha_j treated as formal, algebraically independent symbols.
class SymScalar {
public:
    SymScalar() = default;
    SymScalar(long long c) : constant_(c) {}
    SymScalar(const Int& c) : constant_(c) {}
    SymScalar(Rational c) : constant_(std::move(c)) {}

    /// coeff * alpha_{j+1}
    static SymScalar alpha(std::size_t j, const Rational& coeff = 1) {
        SymScalar s;
        s.alpha_.assign(j + 1, Rational(0));
        s.alpha_[j] = coeff;
        s.trim();
        return s;
    }

    const Rational& constant() const noexcept { return constant_; }
    Rational alpha_coefficient(std::size_t j) const { return j < alpha_.size() ? alpha_[j] : Rational(0); }
    /// 1 + index of the last nonzero alpha coefficient
    std::size_t alpha_count() const noexcept { return alpha_.size(); }
    const std::vector<Rational>& alpha_coefficients() const noexcept { return alpha_; }

    bool is_rational() const noexcept { return alpha_.empty(); }
    bool is_zero() const noexcept { return alpha_.empty() && constant_ == 0; }
    bool is_integer() const { return is_rational() && freetorus::is_integer(constant_); }

    /// Same scalar with its constant term dropped.
    SymScalar alpha_part() const {
        SymScalar s = *this;
        s.constant_ = 0;
        return s;
    }

    double evaluate(std::span<const double> alpha) const {
        if (alpha.size() < alpha_.size())
            throw InputError("SymScalar::evaluate: needs " + std::to_string(alpha_.size()) + " alpha values");
        double x = constant_.convert_to<double>();
        for (std::size_t j = 0; j < alpha_.size(); ++j) x += alpha_[j].convert_to<double>() * alpha[j];
        return x;
    }

    SymScalar& operator+=(const SymScalar& o) {
        constant_ += o.constant_;
        if (alpha_.size() < o.alpha_.size()) alpha_.resize(o.alpha_.size());
        for (std::size_t j = 0; j < o.alpha_.size(); ++j) alpha_[j] += o.alpha_[j];
        trim();
        return *this;
    }
    SymScalar& operator-=(const SymScalar& o) { return *this += -o; }
    SymScalar& operator*=(const Rational& k) {
        constant_ *= k;
        for (auto& c : alpha_) c *= k;
        trim();
        return *this;
    }

    friend SymScalar operator-(SymScalar s) {
        s.constant_ = -s.constant_;
        for (auto& c : s.alpha_) c = -c;
        return s;
    }
    friend SymScalar operator+(SymScalar a, const SymScalar& b) { return a += b; }
    friend SymScalar operator-(SymScalar a, const SymScalar& b) { return a -= b; }
    friend SymScalar operator*(SymScalar a, const Rational& k) { return a *= k; }
    friend SymScalar operator*(const Rational& k, SymScalar a) { return a *= k; }
    friend SymScalar operator*(const Int& k, SymScalar a) { return a *= Rational(k); }

    friend bool operator==(const SymScalar& a, const SymScalar& b) {
        return a.constant_ == b.constant_ && a.alpha_ == b.alpha_;
    }

private:
    void trim() {
        while (!alpha_.empty() && alpha_.back() == 0) alpha_.pop_back();
    }

    Rational constant_{0};
    std::vector<Rational> alpha_;  // alpha_[j] multiplies alpha_{j+1}; no trailing zeros
};

namespace detail {

// "3/4·α2" style term for a nonzero coefficient, sign handled by the caller.
inline std::string alpha_term(const Rational& magnitude, std::size_t j) {
    std::string sym = "α" + std::to_string(j + 1);
    if (magnitude == 1) return sym;
    return to_string(magnitude) + "·" + sym;
}

}  // namespace detail

/// Signed terms of a scalar, alpha terms first; each entry is (negative, text).
inline std::vector<std::pair<bool, std::string>> signed_terms(const SymScalar& s) {
    std::vector<std::pair<bool, std::string>> terms;
    for (std::size_t j = 0; j < s.alpha_count(); ++j) {
        const Rational& c = s.alpha_coefficients()[j];
        if (c == 0) continue;
        terms.emplace_back(c < 0, detail::alpha_term(c < 0 ? Rational(-c) : c, j));
    }
    if (s.constant() != 0 || terms.empty())
        terms.emplace_back(s.constant() < 0, to_string(s.constant() < 0 ? Rational(-s.constant()) : s.constant()));
    return terms;
}

inline std::string to_string(const SymScalar& s) {
    std::string out;
    bool first = true;
    for (const auto& [neg, text] : signed_terms(s)) {
        if (first)
            out += neg ? "-" + text : text;
        else
            out += neg ? " - " + text : " + " + text;
        first = false;
    }
    return out;
}

}  // namespace freetorus
