#pragma once

// Integer symplectic lattices: unimodular antisymmetric forms, symplectic
// and adapted bases, monodromy operators and their fixed/radical lattices.
//
// Vectors are columns and a form Q pairs u, v as u^T Q v. The standard form
// in the ordered basis (p_1..p_n, q_1..q_n) is J = [[0, I], [-I, 0]], so that
// Q(p_i, q_j) = delta_ij.

#include "lagfib/error.hpp"
#include "lagfib/integer_matrix.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace lagfib {

inline IntMatrix standard_symplectic_form(std::size_t n) {
    IntMatrix j(2 * n, 2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        j(i, n + i) = 1;
        j(n + i, i) = -1;
    }
    return j;
}

class AntisymForm {
  public:
    /// Throws NotAntisymmetric or NotUnimodular.
    explicit AntisymForm(IntMatrix q) : q_(std::move(q)) {
        if (!q_.is_square() || q_.rows() == 0 || q_.rows() % 2 != 0)
            throw Error(ErrorCode::NotAntisymmetric, "form must be square of even positive size");
        for (std::size_t r = 0; r < q_.rows(); ++r)
            for (std::size_t c = 0; c < q_.cols(); ++c)
                if (q_(r, c) != -q_(c, r))
                    throw Error(ErrorCode::NotAntisymmetric,
                                "Q(" + std::to_string(r) + "," + std::to_string(c) + ") != -Q(c,r)");
        const Integer det = determinant(q_);
        if (abs(det) != 1)
            throw Error(ErrorCode::NotUnimodular, "det Q = " + det.get_str());
    }

    static AntisymForm standard(std::size_t n) { return AntisymForm(standard_symplectic_form(n)); }

    std::size_t rank() const { return q_.rows(); }
    std::size_t half_rank() const { return q_.rows() / 2; }
    const IntMatrix &matrix() const { return q_; }

    Integer pair(const IntVector &u, const IntVector &v) const { return dot(u, q_ * v); }

    /// The functional Q(u, .) as a row vector.
    IntVector functional(const IntVector &u) const { return q_.transpose() * u; }

  private:
    IntMatrix q_;
};

struct SymplecticBasis {
    std::vector<IntVector> p;
    std::vector<IntVector> q;
    /// Bezout certificate of each splitting step: coefficients c over the
    /// lattice basis in use at that step with sum_j c_j Q(p, b_j) = 1.
    std::vector<IntVector> bezout;

    std::size_t half_rank() const { return p.size(); }

    /// Columns p_1..p_n, q_1..q_n.
    IntMatrix as_matrix() const {
        std::vector<IntVector> cols = p;
        cols.insert(cols.end(), q.begin(), q.end());
        const std::size_t dim = cols.empty() ? 0 : cols.front().size();
        return IntMatrix::from_columns(cols, dim);
    }
};

/// Gram matrix B^T Q B of the form in the given basis.
inline IntMatrix gram_matrix(const AntisymForm &form, const SymplecticBasis &basis) {
    const IntMatrix b = basis.as_matrix();
    return b.transpose() * form.matrix() * b;
}

inline bool is_symplectic_basis(const AntisymForm &form, const SymplecticBasis &basis) {
    if (basis.p.size() != form.half_rank() || basis.q.size() != form.half_rank())
        return false;
    if (gram_matrix(form, basis) != standard_symplectic_form(form.half_rank()))
        return false;
    return abs(determinant(basis.as_matrix())) == 1;
}

class MonodromyOp {
  public:
    explicit MonodromyOp(IntMatrix tau) : tau_(std::move(tau)) {
        if (!tau_.is_square())
            throw Error(ErrorCode::InvalidArgument, "monodromy must be square");
    }
    const IntMatrix &matrix() const { return tau_; }
    std::size_t dim() const { return tau_.rows(); }
    bool invertible_over_z() const { return abs(determinant(tau_)) == 1; }
    IntMatrix eta() const { return tau_ - IntMatrix::identity(dim()); }
    bool preserves(const AntisymForm &form) const {
        return tau_.transpose() * form.matrix() * tau_ == form.matrix();
    }

  private:
    IntMatrix tau_;
};

class Sublattice {
  public:
    Sublattice(std::vector<IntVector> generators, std::size_t ambient_dim, bool saturated)
        : gens_(std::move(generators)), dim_(ambient_dim), saturated_(saturated) {}

    const std::vector<IntVector> &generators() const { return gens_; }
    std::size_t ambient_dim() const { return dim_; }
    std::size_t rank() const { return gens_.empty() ? 0 : lagfib::rank(IntMatrix::from_rows(gens_, dim_)); }
    std::size_t corank() const { return dim_ - rank(); }
    bool saturated() const { return saturated_; }

    bool contains(const IntVector &v) const {
        if (gens_.empty())
            return is_zero_vector(v);
        return lattice_contains(gens_, dim_, v);
    }

    /// Exact check: the generators' Smith divisors are all 1.
    bool check_saturated() const {
        if (gens_.empty())
            return true;
        for (const auto &d : smith_divisors(IntMatrix::from_rows(gens_, dim_)))
            if (d != 1)
                return false;
        return true;
    }

  private:
    std::vector<IntVector> gens_;
    std::size_t dim_;
    bool saturated_;
};

namespace detail {

inline IntVector combine(const std::vector<IntVector> &basis, const IntVector &coeffs, std::size_t dim) {
    IntVector v(dim, Integer(0));
    for (std::size_t j = 0; j < basis.size(); ++j) {
        if (coeffs[j] == 0)
            continue;
        for (std::size_t k = 0; k < dim; ++k)
            v[k] += coeffs[j] * basis[j][k];
    }
    return v;
}

// Basis of { v in span(basis) : Q(a, v) = Q(b, v) = 0 }.
inline std::vector<IntVector> orthogonal_part(const AntisymForm &form, const std::vector<IntVector> &basis,
                                              const IntVector &a, const IntVector &b) {
    const std::size_t dim = form.rank();
    IntMatrix constraints(2, basis.size());
    for (std::size_t j = 0; j < basis.size(); ++j) {
        constraints(0, j) = form.pair(a, basis[j]);
        constraints(1, j) = form.pair(b, basis[j]);
    }
    std::vector<IntVector> out;
    for (const auto &coeffs : integer_kernel(constraints))
        out.push_back(combine(basis, coeffs, dim));
    return out;
}

// Splits off hyperbolic pairs from a lattice (given by a basis) on which the
// form is unimodular: take p primitive, solve Q(p, q) = 1 by extended gcd,
// recurse on the Q-orthogonal complement of span(p, q).
inline void split_hyperbolic(const AntisymForm &form, std::vector<IntVector> basis, SymplecticBasis &out) {
    const std::size_t dim = form.rank();
    while (!basis.empty()) {
        const IntVector p = basis.front();
        IntVector row(basis.size());
        for (std::size_t j = 0; j < basis.size(); ++j)
            row[j] = form.pair(p, basis[j]);
        auto [g, coeffs] = extended_gcd(row);
        if (g != 1)
            throw Error(ErrorCode::NotUnimodular, "restricted form is not unimodular (gcd " + g.get_str() + ")");
        const IntVector q = combine(basis, coeffs, dim);
        out.p.push_back(p);
        out.q.push_back(q);
        out.bezout.push_back(coeffs);
        basis = orthogonal_part(form, basis, p, q);
    }
}

inline void normalize_sign(IntVector &v) {
    for (const auto &x : v) {
        if (x == 0)
            continue;
        if (x < 0)
            for (auto &y : v)
                y = -y;
        return;
    }
}

} // namespace detail

/// A symplectic basis of Z^{2n} for the form.
inline SymplecticBasis symplectic_basis(const AntisymForm &form) {
    const IntMatrix id = IntMatrix::identity(form.rank());
    std::vector<IntVector> basis;
    for (std::size_t i = 0; i < form.rank(); ++i)
        basis.push_back(id.row(i));
    SymplecticBasis out;
    detail::split_hyperbolic(form, std::move(basis), out);
    return out;
}

/// Saturated kernel of (tau - I).
inline Sublattice fixed_sublattice(const MonodromyOp &tau) {
    return Sublattice(integer_kernel(tau.eta()), tau.dim(), true);
}

/// { v in sub : Q(v, w) = 0 for all w in sub }, in Hermite form (a rank-1
/// radical is therefore generated by a vector whose first nonzero entry is
/// positive).
inline Sublattice radical(const AntisymForm &form, const Sublattice &sub) {
    const auto &gens = sub.generators();
    const std::size_t dim = form.rank();
    if (gens.empty())
        return Sublattice({}, dim, true);
    const std::vector<IntVector> basis = lattice_basis(gens, dim);
    IntMatrix restricted(basis.size(), basis.size());
    for (std::size_t i = 0; i < basis.size(); ++i)
        for (std::size_t j = 0; j < basis.size(); ++j)
            restricted(i, j) = form.pair(basis[i], basis[j]);
    std::vector<IntVector> rad;
    for (const auto &coeffs : integer_kernel(restricted))
        rad.push_back(detail::combine(basis, coeffs, dim));
    return Sublattice(lattice_basis(rad, dim), dim, sub.saturated());
}

/// Symplectic basis with p_1..p_n, q_1..q_{n-1} inside the corank-1 saturated
/// sublattice `fixed`. The radical of Q on `fixed` is generated by p_n and
/// q_n is its Bezout partner, the one basis vector outside `fixed`.
inline SymplecticBasis adapted_basis(const AntisymForm &form, const Sublattice &fixed) {
    if (fixed.ambient_dim() != form.rank())
        throw Error(ErrorCode::InvalidArgument, "sublattice and form dimensions differ");
    if (fixed.corank() != 1)
        throw Error(ErrorCode::WrongCorank, "fixed sublattice has corank " + std::to_string(fixed.corank()));
    if (!fixed.check_saturated())
        throw Error(ErrorCode::NotSaturated, "fixed sublattice is not saturated");

    const std::size_t dim = form.rank();
    const Sublattice xi = radical(form, fixed);
    if (xi.generators().size() != 1)
        throw Error(ErrorCode::WrongCorank, "radical has rank " + std::to_string(xi.generators().size()));
    IntVector pn = xi.generators().front();
    detail::normalize_sign(pn);

    auto [g, coeffs] = extended_gcd(form.functional(pn));
    if (g != 1)
        throw Error(ErrorCode::NotUnimodular, "radical generator pairs with gcd " + g.get_str());
    const IntVector qn = coeffs; // over the standard basis

    const IntMatrix id = IntMatrix::identity(dim);
    std::vector<IntVector> standard;
    for (std::size_t i = 0; i < dim; ++i)
        standard.push_back(id.row(i));

    SymplecticBasis rest;
    detail::split_hyperbolic(form, detail::orthogonal_part(form, standard, pn, qn), rest);

    SymplecticBasis out;
    out.p = std::move(rest.p);
    out.q = std::move(rest.q);
    out.bezout = std::move(rest.bezout);
    out.p.push_back(pn);
    out.q.push_back(qn);
    out.bezout.push_back(coeffs);
    return out;
}

enum class UnipotencyStatus { Unipotent, ViolatesLemma };

struct UnipotencyResult {
    UnipotencyStatus status;
    std::optional<IntVector> witness; // v with (tau - I)^2 v != 0
};

/// Under corank-1 fixed part and tau^2 != I, (tau - I)^2 must vanish.
/// Throws HypothesesNotMet when either hypothesis fails.
inline UnipotencyResult check_unipotent(const MonodromyOp &tau) {
    const std::size_t n = tau.dim();
    const std::size_t corank = fixed_sublattice(tau).corank();
    if (corank != 1)
        throw Error(ErrorCode::HypothesesNotMet, "fixed part has corank " + std::to_string(corank));
    if (tau.matrix() * tau.matrix() == IntMatrix::identity(n))
        throw Error(ErrorCode::HypothesesNotMet, "tau is an involution");
    const IntMatrix eta = tau.eta();
    const IntMatrix eta2 = eta * eta;
    for (std::size_t c = 0; c < n; ++c) {
        if (!is_zero_vector(eta2.col(c))) {
            IntVector e(n, Integer(0));
            e[c] = 1;
            return {UnipotencyStatus::ViolatesLemma, e};
        }
    }
    return {UnipotencyStatus::Unipotent, std::nullopt};
}

/// Every column of tau - I lies in the radical of Q on the fixed part.
inline bool verify_im_eta_in_radical(const MonodromyOp &tau, const AntisymForm &form) {
    if (tau.dim() != form.rank())
        throw Error(ErrorCode::InvalidArgument, "dimension mismatch");
    if (!tau.preserves(form))
        throw Error(ErrorCode::DoesNotPreserveForm, "tau^T Q tau != Q");
    const Sublattice xi = radical(form, fixed_sublattice(tau));
    const IntMatrix eta = tau.eta();
    for (std::size_t c = 0; c < tau.dim(); ++c)
        if (!xi.contains(eta.col(c)))
            return false;
    return true;
}

/// The matrix fixing p_1..p_n, q_1..q_{n-1} and sending q_n to q_n + ell*p_n,
/// in the ordered basis (p_1..p_n, q_1..q_n).
inline MonodromyOp monodromy_matrix(std::size_t n, long ell) {
    if (n < 1)
        throw Error(ErrorCode::InvalidArgument, "n must be >= 1");
    IntMatrix m = IntMatrix::identity(2 * n);
    m(n - 1, 2 * n - 1) = ell;
    return MonodromyOp(std::move(m));
}

/// tau expressed in a basis B (columns): B^{-1} tau B, exact when B is
/// unimodular.
inline IntMatrix in_basis(const IntMatrix &tau, const IntMatrix &basis) {
    IntMatrix out(basis.cols(), basis.cols());
    const IntMatrix image = tau * basis;
    for (std::size_t c = 0; c < basis.cols(); ++c) {
        auto x = solve_integer(basis, image.col(c));
        if (!x)
            throw Error(ErrorCode::InvalidArgument, "basis is not unimodular");
        for (std::size_t r = 0; r < basis.cols(); ++r)
            out(r, c) = (*x)[r];
    }
    return out;
}

} // namespace lagfib
