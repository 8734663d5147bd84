#pragma once

// Floating-point LLL and Babai nearest-plane rounding for small real lattices.

#include "lagfib/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

namespace lagfib {

using RealVector = std::vector<double>;

struct ReducedBasis {
    std::vector<RealVector> basis;                  // reduced vectors
    std::vector<std::vector<std::int64_t>> transform; // basis[i] = sum_j transform[i][j] * generators[j]
    std::vector<RealVector> gram_schmidt;
    std::vector<double> gs_norm2;
    bool independent = true;
};

namespace detail {

inline double dot(const RealVector &a, const RealVector &b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += a[i] * b[i];
    return s;
}

inline void gram_schmidt(ReducedBasis &rb, std::vector<std::vector<double>> &mu) {
    const std::size_t r = rb.basis.size();
    rb.gram_schmidt = rb.basis;
    rb.gs_norm2.assign(r, 0.0);
    mu.assign(r, std::vector<double>(r, 0.0));
    for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            mu[i][j] = rb.gs_norm2[j] > 0.0 ? dot(rb.basis[i], rb.gram_schmidt[j]) / rb.gs_norm2[j] : 0.0;
            for (std::size_t c = 0; c < rb.basis[i].size(); ++c)
                rb.gram_schmidt[i][c] -= mu[i][j] * rb.gram_schmidt[j][c];
        }
        rb.gs_norm2[i] = dot(rb.gram_schmidt[i], rb.gram_schmidt[i]);
    }
}

} // namespace detail

/// LLL-reduces the given generators (delta = 0.99). If they are numerically
/// dependent the result is flagged and should not be used for rounding.
inline ReducedBasis lll_reduce(const std::vector<RealVector> &generators, double delta = 0.99) {
    ReducedBasis rb;
    rb.basis = generators;
    const std::size_t r = generators.size();
    rb.transform.assign(r, std::vector<std::int64_t>(r, 0));
    for (std::size_t i = 0; i < r; ++i)
        rb.transform[i][i] = 1;
    if (r == 0)
        return rb;

    double scale = 0.0;
    for (const auto &g : generators)
        scale = std::max(scale, detail::dot(g, g));
    std::vector<std::vector<double>> mu;
    detail::gram_schmidt(rb, mu);
    for (double n2 : rb.gs_norm2)
        if (n2 <= 1e-24 * scale) {
            rb.independent = false;
            return rb;
        }

    std::size_t k = 1;
    std::size_t guard = 0;
    while (k < r) {
        if (++guard > 100000)
            throw Error(ErrorCode::InvalidArgument, "LLL did not terminate");
        for (std::size_t jj = k; jj-- > 0;) {
            const double q = std::round(mu[k][jj]);
            if (q == 0.0)
                continue;
            const auto qi = static_cast<std::int64_t>(q);
            for (std::size_t c = 0; c < rb.basis[k].size(); ++c)
                rb.basis[k][c] -= q * rb.basis[jj][c];
            for (std::size_t c = 0; c < r; ++c)
                rb.transform[k][c] -= qi * rb.transform[jj][c];
            for (std::size_t c = 0; c <= jj; ++c)
                mu[k][c] -= q * (c == jj ? 1.0 : mu[jj][c]);
        }
        if (rb.gs_norm2[k] >= (delta - mu[k][k - 1] * mu[k][k - 1]) * rb.gs_norm2[k - 1]) {
            ++k;
        } else {
            std::swap(rb.basis[k], rb.basis[k - 1]);
            std::swap(rb.transform[k], rb.transform[k - 1]);
            detail::gram_schmidt(rb, mu);
            k = std::max<std::size_t>(k - 1, 1);
        }
    }
    detail::gram_schmidt(rb, mu);
    return rb;
}

struct BabaiResult {
    std::vector<std::int64_t> coefficients; // in terms of the original generators
    RealVector residual;                      // target - lattice vector
    double residual_norm = 0.0;
};

inline BabaiResult babai_nearest_plane(const ReducedBasis &rb, const RealVector &target) {
    const std::size_t r = rb.basis.size();
    RealVector t = target;
    std::vector<std::int64_t> reduced_coeffs(r, 0);
    for (std::size_t i = r; i-- > 0;) {
        const double c = std::round(detail::dot(t, rb.gram_schmidt[i]) / rb.gs_norm2[i]);
        reduced_coeffs[i] = static_cast<std::int64_t>(c);
        for (std::size_t j = 0; j < t.size(); ++j)
            t[j] -= c * rb.basis[i][j];
    }
    BabaiResult res;
    res.coefficients.assign(r, 0);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j)
            res.coefficients[j] += reduced_coeffs[i] * rb.transform[i][j];
    res.residual = t;
    res.residual_norm = std::sqrt(detail::dot(t, t));
    return res;
}

} // namespace lagfib
