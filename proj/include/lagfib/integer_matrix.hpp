#pragma once

// Dense integer matrices with Hermite/Smith normal forms, integer kernels,
// lattice membership and saturation. Sizes here are small (at most a few
// dozen rows), so everything is plain Euclidean elimination on mpz_class.

#include "lagfib/arith.hpp"
#include "lagfib/error.hpp"

#include <gmpxx.h>

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace lagfib {

using IntVector = std::vector<Integer>;

class IntMatrix {
  public:
    IntMatrix() = default;
    IntMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, Integer(0)) {}
    IntMatrix(std::initializer_list<std::initializer_list<long>> rows) {
        rows_ = rows.size();
        cols_ = rows_ == 0 ? 0 : rows.begin()->size();
        data_.reserve(rows_ * cols_);
        for (const auto &row : rows) {
            if (row.size() != cols_)
                throw Error(ErrorCode::InvalidArgument, "ragged matrix literal");
            for (long v : row)
                data_.emplace_back(v);
        }
    }

    static IntMatrix identity(std::size_t n) {
        IntMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i)
            m(i, i) = 1;
        return m;
    }

    static IntMatrix from_rows(const std::vector<IntVector> &rows, std::size_t cols) {
        IntMatrix m(rows.size(), cols);
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (rows[r].size() != cols)
                throw Error(ErrorCode::InvalidArgument, "row length mismatch");
            for (std::size_t c = 0; c < cols; ++c)
                m(r, c) = rows[r][c];
        }
        return m;
    }

    static IntMatrix from_columns(const std::vector<IntVector> &cols, std::size_t rows) {
        return from_rows(cols, rows).transpose();
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool is_square() const { return rows_ == cols_; }

    Integer &operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const Integer &operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    IntVector row(std::size_t r) const {
        return IntVector(data_.begin() + static_cast<std::ptrdiff_t>(r * cols_),
                         data_.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols_));
    }
    IntVector col(std::size_t c) const {
        IntVector v(rows_);
        for (std::size_t r = 0; r < rows_; ++r)
            v[r] = (*this)(r, c);
        return v;
    }

    IntMatrix transpose() const {
        IntMatrix t(cols_, rows_);
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t c = 0; c < cols_; ++c)
                t(c, r) = (*this)(r, c);
        return t;
    }

    bool is_zero() const {
        return std::all_of(data_.begin(), data_.end(), [](const Integer &v) { return v == 0; });
    }

    void swap_rows(std::size_t a, std::size_t b) {
        if (a == b)
            return;
        for (std::size_t c = 0; c < cols_; ++c)
            std::swap((*this)(a, c), (*this)(b, c));
    }
    // row[dst] += factor * row[src]
    void add_row_multiple(std::size_t dst, std::size_t src, const Integer &factor) {
        if (factor == 0)
            return;
        for (std::size_t c = 0; c < cols_; ++c)
            (*this)(dst, c) += factor * (*this)(src, c);
    }
    void negate_row(std::size_t r) {
        for (std::size_t c = 0; c < cols_; ++c)
            (*this)(r, c) = -(*this)(r, c);
    }

    friend IntMatrix operator*(const IntMatrix &a, const IntMatrix &b) {
        if (a.cols_ != b.rows_)
            throw Error(ErrorCode::InvalidArgument, "matrix product shape mismatch");
        IntMatrix out(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const Integer &aik = a(i, k);
                if (aik == 0)
                    continue;
                for (std::size_t j = 0; j < b.cols_; ++j)
                    out(i, j) += aik * b(k, j);
            }
        return out;
    }
    friend IntVector operator*(const IntMatrix &a, const IntVector &v) {
        if (a.cols_ != v.size())
            throw Error(ErrorCode::InvalidArgument, "matrix-vector shape mismatch");
        IntVector out(a.rows_, Integer(0));
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k)
                out[i] += a(i, k) * v[k];
        return out;
    }
    friend IntMatrix operator+(IntMatrix a, const IntMatrix &b) {
        a.check_same_shape(b);
        for (std::size_t i = 0; i < a.data_.size(); ++i)
            a.data_[i] += b.data_[i];
        return a;
    }
    friend IntMatrix operator-(IntMatrix a, const IntMatrix &b) {
        a.check_same_shape(b);
        for (std::size_t i = 0; i < a.data_.size(); ++i)
            a.data_[i] -= b.data_[i];
        return a;
    }
    friend bool operator==(const IntMatrix &a, const IntMatrix &b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }
    friend bool operator!=(const IntMatrix &a, const IntMatrix &b) { return !(a == b); }

    friend std::ostream &operator<<(std::ostream &os, const IntMatrix &m) {
        os << '[';
        for (std::size_t r = 0; r < m.rows_; ++r) {
            os << (r ? ", [" : "[");
            for (std::size_t c = 0; c < m.cols_; ++c)
                os << (c ? ", " : "") << m(r, c).get_str();
            os << ']';
        }
        return os << ']';
    }

  private:
    void check_same_shape(const IntMatrix &b) const {
        if (rows_ != b.rows_ || cols_ != b.cols_)
            throw Error(ErrorCode::InvalidArgument, "matrix shape mismatch");
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Integer> data_;
};

inline Integer dot(const IntVector &a, const IntVector &b) {
    Integer s = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += a[i] * b[i];
    return s;
}

inline bool is_zero_vector(const IntVector &v) {
    return std::all_of(v.begin(), v.end(), [](const Integer &x) { return x == 0; });
}

// floor division for mpz
inline Integer floor_div(const Integer &a, const Integer &b) {
    Integer q;
    mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return q;
}

struct HermiteForm {
    IntMatrix h;                       // U * A, row echelon
    IntMatrix transform;               // U, unimodular
    std::size_t rank = 0;
    std::vector<std::size_t> pivot_columns;
};

/// Row-style Hermite normal form: pivots positive, entries above a pivot
/// reduced into [0, pivot). The transform satisfies transform * a == h.
inline HermiteForm hermite_form(const IntMatrix &a) {
    IntMatrix h = a;
    IntMatrix u = IntMatrix::identity(a.rows());
    std::vector<std::size_t> pivots;
    std::size_t r = 0;
    for (std::size_t c = 0; c < h.cols() && r < h.rows(); ++c) {
        // Euclid down the column until a single nonzero remains at row r.
        for (;;) {
            std::size_t best = h.rows();
            for (std::size_t i = r; i < h.rows(); ++i) {
                if (h(i, c) != 0 && (best == h.rows() || abs(h(i, c)) < abs(h(best, c))))
                    best = i;
            }
            if (best == h.rows())
                break;
            h.swap_rows(r, best);
            u.swap_rows(r, best);
            bool done = true;
            for (std::size_t i = r + 1; i < h.rows(); ++i) {
                if (h(i, c) == 0)
                    continue;
                Integer q;
                mpz_tdiv_q(q.get_mpz_t(), h(i, c).get_mpz_t(), h(r, c).get_mpz_t());
                h.add_row_multiple(i, r, -q);
                u.add_row_multiple(i, r, -q);
                if (h(i, c) != 0)
                    done = false;
            }
            if (done)
                break;
        }
        if (h(r, c) == 0)
            continue;
        if (h(r, c) < 0) {
            h.negate_row(r);
            u.negate_row(r);
        }
        for (std::size_t i = 0; i < r; ++i) {
            const Integer q = floor_div(h(i, c), h(r, c));
            h.add_row_multiple(i, r, -q);
            u.add_row_multiple(i, r, -q);
        }
        pivots.push_back(c);
        ++r;
    }
    return {std::move(h), std::move(u), r, std::move(pivots)};
}

inline std::size_t rank(const IntMatrix &a) { return hermite_form(a).rank; }

/// HNF basis (rows) of the lattice spanned by the given row vectors.
inline std::vector<IntVector> lattice_basis(const std::vector<IntVector> &rows, std::size_t dim) {
    if (rows.empty())
        return {};
    const HermiteForm hf = hermite_form(IntMatrix::from_rows(rows, dim));
    std::vector<IntVector> basis;
    for (std::size_t r = 0; r < hf.rank; ++r)
        basis.push_back(hf.h.row(r));
    return basis;
}

/// Basis of { x in Z^n : a x = 0 }, in Hermite normal form. The result is a
/// saturated lattice because it comes from a unimodular transform.
inline std::vector<IntVector> integer_kernel(const IntMatrix &a) {
    const std::size_t n = a.cols();
    if (a.rows() == 0) {
        const IntMatrix id = IntMatrix::identity(n);
        std::vector<IntVector> all;
        for (std::size_t i = 0; i < n; ++i)
            all.push_back(id.row(i));
        return all;
    }
    const HermiteForm hf = hermite_form(a.transpose());
    std::vector<IntVector> kernel;
    for (std::size_t r = hf.rank; r < n; ++r)
        kernel.push_back(hf.transform.row(r));
    return lattice_basis(kernel, n);
}

/// Coefficients c with sum c_i * basis[i] == v, when v lies in the lattice.
/// `basis` must be in Hermite normal form (as returned by lattice_basis).
inline std::optional<IntVector> hnf_coordinates(const std::vector<IntVector> &basis, IntVector v) {
    IntVector coeffs(basis.size(), Integer(0));
    for (std::size_t i = 0; i < basis.size(); ++i) {
        std::size_t pc = 0;
        while (basis[i][pc] == 0)
            ++pc;
        for (std::size_t c = 0; c < pc; ++c)
            if (v[c] != 0)
                return std::nullopt;
        if (!mpz_divisible_p(v[pc].get_mpz_t(), basis[i][pc].get_mpz_t()))
            return std::nullopt;
        coeffs[i] = v[pc] / basis[i][pc];
        for (std::size_t c = pc; c < v.size(); ++c)
            v[c] -= coeffs[i] * basis[i][c];
    }
    if (!is_zero_vector(v))
        return std::nullopt;
    return coeffs;
}

inline bool lattice_contains(const std::vector<IntVector> &rows, std::size_t dim, const IntVector &v) {
    return hnf_coordinates(lattice_basis(rows, dim), v).has_value();
}

/// Some integer x with a x == b, if one exists.
inline std::optional<IntVector> solve_integer(const IntMatrix &a, const IntVector &b) {
    const HermiteForm hf = hermite_form(a.transpose());
    std::vector<IntVector> basis;
    for (std::size_t r = 0; r < hf.rank; ++r)
        basis.push_back(hf.h.row(r));
    auto coeffs = hnf_coordinates(basis, b);
    if (!coeffs)
        return std::nullopt;
    IntVector x(a.cols(), Integer(0));
    for (std::size_t r = 0; r < hf.rank; ++r)
        for (std::size_t j = 0; j < a.cols(); ++j)
            x[j] += (*coeffs)[r] * hf.transform(r, j);
    return x;
}

/// Nonzero elementary divisors d_1 | d_2 | ... of the Smith normal form.
inline std::vector<Integer> smith_divisors(const IntMatrix &a) {
    IntMatrix m = a;
    auto off_diagonal_zero = [](const IntMatrix &x) {
        for (std::size_t r = 0; r < x.rows(); ++r)
            for (std::size_t c = 0; c < x.cols(); ++c)
                if (r != c && x(r, c) != 0)
                    return false;
        return true;
    };
    // Alternating row and column Hermite reductions strictly decrease the
    // leading entries until the matrix is diagonal.
    while (!off_diagonal_zero(m)) {
        m = hermite_form(m).h;
        if (off_diagonal_zero(m))
            break;
        m = hermite_form(m.transpose()).h.transpose();
    }
    std::vector<Integer> diag;
    for (std::size_t i = 0; i < std::min(m.rows(), m.cols()); ++i)
        if (m(i, i) != 0)
            diag.push_back(abs(m(i, i)));
    for (std::size_t i = 0; i < diag.size(); ++i)
        for (std::size_t j = i + 1; j < diag.size(); ++j) {
            Integer g, l;
            mpz_gcd(g.get_mpz_t(), diag[i].get_mpz_t(), diag[j].get_mpz_t());
            mpz_lcm(l.get_mpz_t(), diag[i].get_mpz_t(), diag[j].get_mpz_t());
            diag[i] = g;
            diag[j] = l;
        }
    return diag;
}

/// Fraction-free (Bareiss) determinant.
inline Integer determinant(const IntMatrix &a) {
    if (!a.is_square())
        throw Error(ErrorCode::InvalidArgument, "determinant of a non-square matrix");
    const std::size_t n = a.rows();
    if (n == 0)
        return 1;
    IntMatrix m = a;
    Integer sign = 1;
    Integer prev = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (m(k, k) == 0) {
            std::size_t swap = k + 1;
            while (swap < n && m(swap, k) == 0)
                ++swap;
            if (swap == n)
                return 0;
            m.swap_rows(k, swap);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            for (std::size_t j = k + 1; j < n; ++j) {
                m(i, j) = m(i, j) * m(k, k) - m(i, k) * m(k, j);
                mpz_divexact(m(i, j).get_mpz_t(), m(i, j).get_mpz_t(), prev.get_mpz_t());
            }
        }
        prev = m(k, k);
    }
    return sign * m(n - 1, n - 1);
}

/// Smallest saturated lattice containing the given rows: (L^perp)^perp.
inline std::vector<IntVector> saturate(const std::vector<IntVector> &rows, std::size_t dim) {
    if (rows.empty())
        return {};
    const auto perp = integer_kernel(IntMatrix::from_rows(rows, dim));
    if (perp.empty()) {
        const IntMatrix id = IntMatrix::identity(dim);
        std::vector<IntVector> all;
        for (std::size_t i = 0; i < dim; ++i)
            all.push_back(id.row(i));
        return all;
    }
    return integer_kernel(IntMatrix::from_rows(perp, dim));
}

/// g = sum coeffs[i] * values[i] with g = gcd(values) >= 0.
inline std::pair<Integer, IntVector> extended_gcd(const IntVector &values) {
    IntVector coeffs(values.size(), Integer(0));
    Integer g = 0;
    for (std::size_t j = 0; j < values.size(); ++j) {
        if (values[j] == 0)
            continue;
        Integer ng, s, t;
        mpz_gcdext(ng.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), g.get_mpz_t(), values[j].get_mpz_t());
        for (std::size_t k = 0; k < j; ++k)
            coeffs[k] *= s;
        coeffs[j] = t;
        g = ng;
    }
    return {g, coeffs};
}

inline std::string to_string(const IntVector &v) {
    std::string out = "(";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i)
            out += ", ";
        out += v[i].get_str();
    }
    return out + ")";
}

} // namespace lagfib
