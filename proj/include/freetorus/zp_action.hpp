#pragma once

// Z^p-actions on Z^q by lattice automorphisms: evaluation, fixed lattices,
// the spectral-unitarity check, subgroup restriction and membership in the
// Klein four-group <N, M> of a normal-form pair.

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "exact_lattice.hpp"
#include "int_matrix.hpp"

namespace freetorus {

class NonCommutingError : public InputError {
public:
    NonCommutingError(std::size_t i, std::size_t j)
        : InputError("generators " + std::to_string(i + 1) + " and " + std::to_string(j + 1) +
                     " do not commute"),
          pair_{i, j} {}

    std::pair<std::size_t, std::size_t> pair() const noexcept { return pair_; }

private:
    std::pair<std::size_t, std::size_t> pair_;
};

inline std::optional<std::pair<std::size_t, std::size_t>> find_noncommuting_pair(
    const std::vector<IntMatrix>& gens) {
    for (std::size_t i = 0; i < gens.size(); ++i)
        for (std::size_t j = i + 1; j < gens.size(); ++j)
            if (gens[i] * gens[j] != gens[j] * gens[i]) return std::pair{i, j};
    return std::nullopt;
}

/// p pairwise commuting unimodular q x q generators A(e_1), ..., A(e_p).
/// Validated on construction.
class ActionSpec {
public:
    ActionSpec() = default;

    explicit ActionSpec(std::vector<IntMatrix> generators) : generators_(std::move(generators)) {
        if (generators_.empty()) throw InputError("action needs at least one generator");
        const std::size_t q = generators_.front().rows();
        if (q == 0) throw InputError("action on the zero lattice");
        inverses_.reserve(generators_.size());
        for (std::size_t i = 0; i < generators_.size(); ++i) {
            const auto& g = generators_[i];
            if (g.rows() != q || g.cols() != q)
                throw InputError("generator " + std::to_string(i + 1) + " is not " + std::to_string(q) + "x" +
                                 std::to_string(q));
            Int det = determinant(g);
            if (det != 1 && det != -1) {
                throw InputError("generator " + std::to_string(i + 1) + " is not unimodular (det = " + det.str() +
                                 ")");
            }
            inverses_.push_back(unimodular_inverse(g));
        }
        if (auto pair = find_noncommuting_pair(generators_)) throw NonCommutingError(pair->first, pair->second);
    }

    std::size_t p() const noexcept { return generators_.size(); }
    std::size_t q() const noexcept { return generators_.empty() ? 0 : generators_.front().rows(); }
    const std::vector<IntMatrix>& generators() const noexcept { return generators_; }
    const IntMatrix& generator(std::size_t i) const { return generators_.at(i); }
    const IntMatrix& inverse(std::size_t i) const { return inverses_.at(i); }

    friend bool operator==(const ActionSpec& a, const ActionSpec& b) { return a.generators_ == b.generators_; }

private:
    std::vector<IntMatrix> generators_;
    std::vector<IntMatrix> inverses_;
};

/// g^n for n of either sign; `inverse` must be g^{-1}.
inline IntMatrix matrix_power(const IntMatrix& g, const IntMatrix& inverse, long long n) {
    IntMatrix base = n < 0 ? inverse : g;
    unsigned long long e = n < 0 ? 0ULL - static_cast<unsigned long long>(n) : static_cast<unsigned long long>(n);
    IntMatrix result = IntMatrix::identity(g.rows());
    while (e) {
        if (e & 1ULL) result = result * base;
        e >>= 1;
        if (e) base = base * base;
    }
    return result;
}

inline long long small_exponent(const Int& x) {
    if (x > Int(1LL << 40) || x < -Int(1LL << 40)) throw InputError("exponent out of range: " + x.str());
    return x.convert_to<long long>();
}

/// A(l) = prod_i A(e_i)^{l_i}.
inline IntMatrix evaluate(const ActionSpec& action, const IntVector& exponents) {
    if (exponents.size() != action.p())
        throw InputError("exponent vector has length " + std::to_string(exponents.size()) + ", expected " +
                         std::to_string(action.p()));
    IntMatrix result = IntMatrix::identity(action.q());
    for (std::size_t i = 0; i < action.p(); ++i) {
        if (exponents[i] == 0) continue;
        result = result * matrix_power(action.generator(i), action.inverse(i), small_exponent(exponents[i]));
    }
    return result;
}

/// Saturated basis of the lattice fixed by every matrix in `mats`.
inline LatticeBasis joint_fixed_lattice(const std::vector<IntMatrix>& mats, std::size_t q) {
    if (mats.empty()) return integer_kernel(IntMatrix(0, q));
    std::vector<IntMatrix> blocks;
    blocks.reserve(mats.size());
    for (const auto& m : mats) blocks.push_back(m - IntMatrix::identity(q));
    return integer_kernel(stack_rows(blocks, q));
}

inline LatticeBasis fix_lattice(const ActionSpec& action) {
    return joint_fixed_lattice(action.generators(), action.q());
}

/// Every exponent vector in [-radius, radius]^dim, ordered by max-norm, then
/// L1 norm, then lexicographically with coordinates ranked 0, 1, -1, 2, -2, ...
inline std::vector<IntVector> box_exponents(std::size_t dim, long long radius) {
    std::vector<std::vector<long long>> raw;
    std::vector<long long> cur(dim, -radius);
    for (;;) {
        raw.push_back(cur);
        std::size_t k = 0;
        while (k < dim && cur[k] == radius) cur[k++] = -radius;
        if (k == dim) break;
        ++cur[k];
    }
    auto rank = [](long long x) { return x > 0 ? 2 * x - 1 : -2 * x; };
    auto key = [&](const std::vector<long long>& v) {
        long long mx = 0, l1 = 0;
        for (long long x : v) {
            mx = std::max(mx, std::llabs(x));
            l1 += std::llabs(x);
        }
        std::vector<long long> k{mx, l1};
        for (long long x : v) k.push_back(rank(x));
        return k;
    };
    std::sort(raw.begin(), raw.end(), [&](const auto& a, const auto& b) { return key(a) < key(b); });
    std::vector<IntVector> out;
    out.reserve(raw.size());
    for (const auto& v : raw) out.emplace_back(v.begin(), v.end());
    return out;
}

enum class SpectralStatus { ExactlyVerified, VerifiedOnBox, Refuted };

inline const char* to_string(SpectralStatus s) {
    switch (s) {
        case SpectralStatus::ExactlyVerified: return "ExactlyVerified";
        case SpectralStatus::VerifiedOnBox: return "VerifiedOnBox";
        case SpectralStatus::Refuted: return "Refuted";
    }
    return "?";
}

struct SpectralVerdict {
    SpectralStatus status = SpectralStatus::Refuted;
    std::optional<std::size_t> closure_size;  // set when the closure was enumerated completely
    std::optional<long long> box_radius;      // set when the box fallback ran
    std::optional<IntVector> witness;         // set iff Refuted: det(A(witness) - I) != 0
};

inline constexpr std::size_t kDefaultClosureCap = 1000;
inline constexpr long long kDefaultBoxRadius = 4;

inline bool has_eigenvalue_one(const IntMatrix& g) {
    return determinant(g - IntMatrix::identity(g.rows())) == 0;
}

/// Two-tier check that 1 is an eigenvalue of every A(l): exact over a finite
/// image, otherwise on the exponent box |l_i| <= box_radius.
inline SpectralVerdict spectral_unitarity(const ActionSpec& action, std::size_t closure_cap = kDefaultClosureCap,
                                          long long box_radius = kDefaultBoxRadius) {
    if (closure_cap < 4) throw InputError("spectral_unitarity: closure_cap must be at least 4");
    if (box_radius < 1) throw InputError("spectral_unitarity: box_radius must be at least 1");
    const std::size_t p = action.p(), q = action.q();

    std::map<IntMatrix, IntVector> seen;
    std::vector<const std::pair<const IntMatrix, IntVector>*> order;
    std::deque<decltype(order)::value_type> queue;
    bool exceeded = false;
    {
        auto [it, _] = seen.emplace(IntMatrix::identity(q), IntVector(p));
        order.push_back(&*it);
        queue.push_back(&*it);
    }
    while (!queue.empty() && !exceeded) {
        const auto* node = queue.front();
        queue.pop_front();
        for (std::size_t i = 0; i < p && !exceeded; ++i) {
            for (int sign : {1, -1}) {
                IntMatrix next = node->first * (sign > 0 ? action.generator(i) : action.inverse(i));
                if (seen.count(next)) continue;
                if (seen.size() == closure_cap) {
                    exceeded = true;
                    break;
                }
                IntVector ell = node->second;
                ell[i] += sign;
                auto [it, _] = seen.emplace(std::move(next), std::move(ell));
                order.push_back(&*it);
                queue.push_back(&*it);
            }
        }
    }

    SpectralVerdict verdict;
    if (!exceeded) {
        verdict.closure_size = seen.size();
        for (const auto* node : order) {
            if (!has_eigenvalue_one(node->first)) {
                verdict.status = SpectralStatus::Refuted;
                verdict.witness = node->second;
                return verdict;
            }
        }
        verdict.status = SpectralStatus::ExactlyVerified;
        return verdict;
    }

    verdict.box_radius = box_radius;
    // A(e_i)^k for k in [-r, r], indexed by k + r
    std::vector<std::vector<IntMatrix>> powers(p);
    for (std::size_t i = 0; i < p; ++i)
        for (long long k = -box_radius; k <= box_radius; ++k)
            powers[i].push_back(matrix_power(action.generator(i), action.inverse(i), k));
    for (const auto& ell : box_exponents(p, box_radius)) {
        IntMatrix g = IntMatrix::identity(q);
        for (std::size_t i = 0; i < p; ++i) g = g * powers[i][static_cast<std::size_t>(ell[i].convert_to<long long>() + box_radius)];
        if (!has_eigenvalue_one(g)) {
            verdict.status = SpectralStatus::Refuted;
            verdict.witness = ell;
            return verdict;
        }
    }
    verdict.status = SpectralStatus::VerifiedOnBox;
    return verdict;
}

/// Enumerates the image group {A(l)} when it has at most `cap` elements.
inline std::optional<std::vector<IntMatrix>> image_group(const ActionSpec& action, std::size_t cap) {
    std::map<IntMatrix, bool> seen;
    std::vector<IntMatrix> order{IntMatrix::identity(action.q())};
    seen.emplace(order.front(), true);
    for (std::size_t head = 0; head < order.size(); ++head) {
        for (std::size_t i = 0; i < action.p(); ++i)
            for (const IntMatrix* g : {&action.generator(i), &action.inverse(i)}) {
                IntMatrix next = order[head] * *g;
                if (seen.count(next)) continue;
                if (order.size() == cap) return std::nullopt;
                seen.emplace(next, true);
                order.push_back(std::move(next));
            }
    }
    return order;
}

/// The action restricted to G_i = {l : l_i = 0}: generator i is dropped.
inline ActionSpec restrict(const ActionSpec& action, std::size_t i) {
    if (action.p() < 2) throw InputError("restrict: needs at least two generators");
    if (i >= action.p()) throw InputError("restrict: generator index " + std::to_string(i + 1) + " out of range");
    std::vector<IntMatrix> gens;
    for (std::size_t j = 0; j < action.p(); ++j)
        if (j != i) gens.push_back(action.generator(j));
    return ActionSpec(std::move(gens));
}

/// Fix(A_i) = intersection over j != i of Fix(A(e_j)).
inline LatticeBasis restricted_fix_lattice(const ActionSpec& action, std::size_t i) {
    std::vector<IntMatrix> others;
    for (std::size_t j = 0; j < action.p(); ++j)
        if (j != i) others.push_back(action.generator(j));
    return joint_fixed_lattice(others, action.q());
}

/// Smallest (0-based) i whose restriction A_i has trivial fixed lattice.
inline std::size_t find_trivial_restriction(const ActionSpec& action) {
    if (action.q() != 3) throw InputError("find_trivial_restriction: lattice dimension must be 3");
    if (action.p() < 3) throw InputError("find_trivial_restriction: needs at least three generators");
    for (std::size_t i = 0; i < action.p(); ++i)
        if (restricted_fix_lattice(action, i).is_trivial()) return i;
    throw HypothesisError("find_trivial_restriction",
                          "every restriction A_i has a nontrivial fixed lattice; the action is not spectrally "
                          "unitary with trivial fixed set");
}

// ---------------------------------------------------------------------------
// Normal-form pairs and the Klein four-group they generate.

struct NormalFormParams {
    Int a, b, c, d;

    bool relation_holds() const { return a * d + 2 * (b + c) == 0; }
    friend bool operator==(const NormalFormParams&, const NormalFormParams&) = default;
};

/// [[1, a, b], [0, -1, 0], [0, 0, -1]]
inline IntMatrix normal_form_n(const Int& a, const Int& b) { return IntMatrix{{1, a, b}, {0, -1, 0}, {0, 0, -1}}; }

/// [[-1, 0, c], [0, -1, d], [0, 0, 1]]
inline IntMatrix normal_form_m(const Int& c, const Int& d) { return IntMatrix{{-1, 0, c}, {0, -1, d}, {0, 0, 1}}; }

/// Reads (a, b, c, d) off a pair already of the normal shape; the relation
/// ad + 2(b + c) = 0 is not checked here.
inline std::optional<NormalFormParams> read_normal_form(const IntMatrix& n, const IntMatrix& m) {
    if (n.rows() != 3 || n.cols() != 3 || m.rows() != 3 || m.cols() != 3) return std::nullopt;
    NormalFormParams p{n(0, 1), n(0, 2), m(0, 2), m(1, 2)};
    if (normal_form_n(p.a, p.b) != n || normal_form_m(p.c, p.d) != m) return std::nullopt;
    return p;
}

enum class KleinElement { Id, N, M, NM };

inline const char* to_string(KleinElement k) {
    switch (k) {
        case KleinElement::Id: return "Id";
        case KleinElement::N: return "N";
        case KleinElement::M: return "M";
        case KleinElement::NM: return "NM";
    }
    return "?";
}

/// (n mod 2, m mod 2) with N^n M^m equal to the element.
inline std::pair<int, int> klein_exponents(KleinElement k) {
    switch (k) {
        case KleinElement::Id: return {0, 0};
        case KleinElement::N: return {1, 0};
        case KleinElement::M: return {0, 1};
        case KleinElement::NM: return {1, 1};
    }
    return {0, 0};
}

class KleinMembershipError : public HypothesisError {
public:
    enum class Reason { NotCommuting, SpectralRefuted, NotAMember };

    KleinMembershipError(Reason reason, const std::string& what, std::optional<IntVector> witness = std::nullopt)
        : HypothesisError("klein_membership", what), reason_(reason), witness_(std::move(witness)) {}

    Reason reason() const noexcept { return reason_; }
    const std::optional<IntVector>& witness() const noexcept { return witness_; }

private:
    Reason reason_;
    std::optional<IntVector> witness_;
};

/// Identifies C in {I, N, M, NM} after checking that C commutes with N, M and
/// that N^n M^m C^s has eigenvalue 1 for |n|, |m|, |s| <= box_radius.
inline KleinElement klein_membership(const IntMatrix& c, const IntMatrix& n, const IntMatrix& m,
                                     long long box_radius = kDefaultBoxRadius) {
    if (!read_normal_form(n, m)) throw InputError("klein_membership: N, M are not a normal-form pair");
    if (box_radius < 1) throw InputError("klein_membership: box_radius must be at least 1");
    if (c.rows() != 3 || c.cols() != 3) throw InputError("klein_membership: C must be 3x3");
    Int det = determinant(c);
    if (det != 1 && det != -1) throw NotUnimodularError(det);
    if (c * n != n * c)
        throw KleinMembershipError(KleinMembershipError::Reason::NotCommuting, "C does not commute with N");
    if (c * m != m * c)
        throw KleinMembershipError(KleinMembershipError::Reason::NotCommuting, "C does not commute with M");

    const IntMatrix* gens[3] = {&n, &m, &c};
    IntMatrix invs[3] = {unimodular_inverse(n), unimodular_inverse(m), unimodular_inverse(c)};
    std::vector<IntMatrix> powers[3];
    for (int g = 0; g < 3; ++g)
        for (long long k = -box_radius; k <= box_radius; ++k) powers[g].push_back(matrix_power(*gens[g], invs[g], k));
    for (const auto& ell : box_exponents(3, box_radius)) {
        IntMatrix g = IntMatrix::identity(3);
        for (int i = 0; i < 3; ++i) g = g * powers[i][static_cast<std::size_t>(ell[i].convert_to<long long>() + box_radius)];
        if (!has_eigenvalue_one(g))
            throw KleinMembershipError(KleinMembershipError::Reason::SpectralRefuted,
                                       "N^n M^m C^s has no eigenvalue 1 at (n,m,s) = " + to_string(ell), ell);
    }

    if (c.is_identity()) return KleinElement::Id;
    if (c == n) return KleinElement::N;
    if (c == m) return KleinElement::M;
    if (c == n * m) return KleinElement::NM;
    throw KleinMembershipError(KleinMembershipError::Reason::NotAMember,
                               "C commutes with N and M and passes the spectral box but is not in <N, M>; "
                               "the inputs are inconsistent");
}

}  // namespace freetorus
