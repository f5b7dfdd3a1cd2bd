#pragma once

// Exact integer linear algebra over Z: Smith normal form, saturated integer
// kernels, primitive vectors and completion to a basis of Z^n.

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "int_matrix.hpp"

namespace freetorus {

class NotUnimodularError : public InputError {
public:
    explicit NotUnimodularError(Int det)
        : InputError("matrix is not unimodular (det = " + det.str() + ")"),
          determinant_(std::move(det)) {}

    const Int& determinant() const noexcept { return determinant_; }

private:
    Int determinant_;
};

/// U * A * V == S, with U, V unimodular and S diagonal with d1 | d2 | ...
struct SnfDecomposition {
    IntMatrix U;
    IntMatrix S;
    IntMatrix V;

    std::size_t rank() const {
        std::size_t r = 0;
        const std::size_t n = std::min(S.rows(), S.cols());
        while (r < n && S(r, r) != 0) ++r;
        return r;
    }

    IntVector invariant_factors() const {
        IntVector d;
        for (std::size_t i = 0; i < std::min(S.rows(), S.cols()); ++i) d.push_back(S(i, i));
        return d;
    }
};

/// A saturated basis of a sublattice of Z^ambient_dim.
struct LatticeBasis {
    std::size_t ambient_dim = 0;
    std::vector<IntVector> vectors;

    bool is_trivial() const noexcept { return vectors.empty(); }
    std::size_t rank() const noexcept { return vectors.size(); }

    IntMatrix as_columns() const { return IntMatrix::from_columns(vectors, ambient_dim); }

    friend bool operator==(const LatticeBasis&, const LatticeBasis&) = default;
};

namespace detail {

// Smallest nonzero |entry| in the trailing submatrix [t.., t..]; ties go to
// the lowest row, then the lowest column.
inline std::optional<std::pair<std::size_t, std::size_t>> snf_pivot(const IntMatrix& s, std::size_t t) {
    std::optional<std::pair<std::size_t, std::size_t>> best;
    Int best_abs;
    for (std::size_t i = t; i < s.rows(); ++i)
        for (std::size_t j = t; j < s.cols(); ++j) {
            if (s(i, j) == 0) continue;
            Int a = abs(s(i, j));
            if (!best || a < best_abs) {
                best = {i, j};
                best_abs = std::move(a);
            }
        }
    return best;
}

}  // namespace detail

inline SnfDecomposition smith_normal_form(const IntMatrix& a) {
    if (a.rows() == 0 || a.cols() == 0) throw InputError("smith_normal_form: empty matrix");
    const std::size_t m = a.rows(), n = a.cols();
    IntMatrix s = a;
    IntMatrix u = IntMatrix::identity(m);
    IntMatrix v = IntMatrix::identity(n);

    for (std::size_t t = 0; t < std::min(m, n); ++t) {
        bool exhausted = false;
        for (;;) {
            auto pivot = detail::snf_pivot(s, t);
            if (!pivot) {
                exhausted = true;
                break;
            }
            auto [pi, pj] = *pivot;
            s.swap_rows(t, pi);
            u.swap_rows(t, pi);
            s.swap_cols(t, pj);
            v.swap_cols(t, pj);

            bool clean = true;
            for (std::size_t i = t + 1; i < m; ++i) {
                if (s(i, t) == 0) continue;
                Int q = s(i, t) / s(t, t);
                s.add_row_multiple(i, t, -q);
                u.add_row_multiple(i, t, -q);
                if (s(i, t) != 0) clean = false;
            }
            for (std::size_t j = t + 1; j < n; ++j) {
                if (s(t, j) == 0) continue;
                Int q = s(t, j) / s(t, t);
                s.add_col_multiple(j, t, -q);
                v.add_col_multiple(j, t, -q);
                if (s(t, j) != 0) clean = false;
            }
            if (!clean) continue;  // a smaller remainder is now the pivot

            // divisibility: pull an offending row into row t and reduce again
            std::optional<std::size_t> offending;
            for (std::size_t i = t + 1; i < m && !offending; ++i)
                for (std::size_t j = t + 1; j < n; ++j)
                    if (s(i, j) % s(t, t) != 0) {
                        offending = i;
                        break;
                    }
            if (!offending) break;
            s.add_row_multiple(t, *offending, 1);
            u.add_row_multiple(t, *offending, 1);
        }
        if (exhausted) break;
        if (s(t, t) < 0) {
            s.negate_row(t);
            u.negate_row(t);
        }
    }
    return {std::move(u), std::move(s), std::move(v)};
}

/// Sign convention for lattice vectors: first nonzero coordinate positive.
inline IntVector canonical_sign(IntVector v) {
    for (const auto& x : v) {
        if (x == 0) continue;
        if (x < 0)
            for (auto& y : v) y = -y;
        break;
    }
    return v;
}

/// Saturated basis of {k in Z^cols : A k = 0}, read off the trailing columns
/// of the SNF column transform.
inline LatticeBasis integer_kernel(const IntMatrix& a) {
    LatticeBasis out{a.cols(), {}};
    if (a.cols() == 0) return out;
    if (a.rows() == 0) {
        for (std::size_t j = 0; j < a.cols(); ++j) out.vectors.push_back(IntMatrix::identity(a.cols()).column(j));
        return out;
    }
    auto snf = smith_normal_form(a);
    for (std::size_t j = snf.rank(); j < a.cols(); ++j) out.vectors.push_back(canonical_sign(snf.V.column(j)));
    return out;
}

inline Int content(const IntVector& v) {
    Int g = 0;
    for (const auto& x : v) g = gcd(g, x);
    return g;
}

inline bool is_primitive(const IntVector& v) { return content(v) == 1; }

inline IntVector primitive_generator(IntVector v) {
    Int g = content(v);
    if (g == 0) throw InputError("primitive_generator: zero vector");
    for (auto& x : v) x /= g;
    return v;
}

/// Unimodular inverse as V * U from the SNF of a (whose S is then I).
inline IntMatrix unimodular_inverse(const IntMatrix& a) {
    if (!a.is_square()) throw InputError("unimodular_inverse: matrix is not square");
    Int det = determinant(a);
    if (det != 1 && det != -1) throw NotUnimodularError(det);
    if (a.rows() == 0) return a;
    auto snf = smith_normal_form(a);
    return snf.V * snf.U;
}

/// Q in GL(dim, Z) whose first column is the primitive vector v.
inline IntMatrix complete_to_basis(const IntVector& v, std::size_t dim) {
    if (v.size() != dim || dim == 0) throw InputError("complete_to_basis: length does not match dimension");
    if (!is_primitive(v)) throw InputError("complete_to_basis: vector " + to_string(v) + " is not primitive");
    // As an n x 1 matrix, U v V = e1 with V = (+-1); so v = +-U^{-1} e1.
    IntMatrix col(dim, 1);
    col.set_column(0, v);
    auto snf = smith_normal_form(col);
    IntMatrix q = unimodular_inverse(snf.U);
    if (snf.V(0, 0) == -1) q.negate_col(0);
    if (q.column(0) != v) throw VerificationError("complete_to_basis: first column mismatch");
    return q;
}

}  // namespace freetorus
