#pragma once

// Potentials, their Hessians, period matrices and the Riemann condition.

#include "lagfib/arith.hpp"
#include "lagfib/error.hpp"
#include "lagfib/parallel.hpp"
#include "lagfib/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace lagfib {

struct PotentialSpec {
    std::size_t n = 1;
    long ell = 1;
    long d = 1;
    Rational epsilon = 1;
    Polynomial psi{1};
    // Replaces the Hessian of psi everywhere it is used. Only meant for
    // feeding deliberately broken data to the verifiers.
    std::optional<PolyMatrix> theta_override;

    void validate() const {
        if (n < 1)
            throw Error(ErrorCode::InvalidArgument, "n must be at least 1");
        if (ell < 1)
            throw Error(ErrorCode::InvalidArgument, "ell must be at least 1");
        if (!is_square_free(d))
            throw Error(ErrorCode::InvalidArgument, "d must be a positive square-free integer");
        if (epsilon <= 0)
            throw Error(ErrorCode::InvalidArgument, "epsilon must be positive");
        if (psi.n_vars() != n)
            throw Error(ErrorCode::InvalidArgument, "psi must be a polynomial in n variables");
        if (theta_override) {
            if (theta_override->size() != n)
                throw Error(ErrorCode::InvalidArgument, "theta override must be n x n");
            for (const auto &row : *theta_override) {
                if (row.size() != n)
                    throw Error(ErrorCode::InvalidArgument, "theta override must be n x n");
                for (const auto &p : row)
                    if (p.n_vars() != n)
                        throw Error(ErrorCode::InvalidArgument, "theta override entries need n variables");
            }
        }
    }
};

inline PolyMatrix hessian(const Polynomial &psi) {
    const std::size_t n = psi.n_vars();
    std::vector<Polynomial> first;
    for (std::size_t i = 0; i < n; ++i)
        first.push_back(psi.derivative(i));
    PolyMatrix h(n, std::vector<Polynomial>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            h[i][j] = first[i].derivative(j);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (h[i][j] != h[j][i])
                throw Error(ErrorCode::InvalidArgument, "differentiation engine produced an asymmetric Hessian");
    return h;
}

/// The univalent part of the period matrix as polynomials.
inline PolyMatrix period_polynomials(const PotentialSpec &spec) {
    return spec.theta_override ? *spec.theta_override : hessian(spec.psi);
}

struct ClosednessWitness {
    enum class Kind { Asymmetric, NotClosed } kind;
    std::size_t i, j, k;

    std::string describe() const {
        std::ostringstream out;
        if (kind == Kind::Asymmetric)
            out << "theta[" << i + 1 << "][" << j + 1 << "] != theta[" << j + 1 << "][" << i + 1 << "]";
        else
            out << "d theta[" << i + 1 << "][" << j + 1 << "]/dz" << k + 1 << " != d theta[" << i + 1 << "][" << k + 1
                << "]/dz" << j + 1;
        return out.str();
    }
};

/// Checks that m is symmetric and that every row is a closed 1-form, i.e.
/// that m is locally a Hessian. Returns the first violation found.
inline std::optional<ClosednessWitness> check_closed_matrix(const PolyMatrix &m) {
    const std::size_t n = m.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (m[i][j] != m[j][i])
                return ClosednessWitness{ClosednessWitness::Kind::Asymmetric, i, j, 0};
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = j + 1; k < n; ++k)
                if (m[i][j].derivative(k) != m[i][k].derivative(j))
                    return ClosednessWitness{ClosednessWitness::Kind::NotClosed, i, j, k};
    return std::nullopt;
}

inline bool closedness_check(const Polynomial &psi) { return !check_closed_matrix(hessian(psi)).has_value(); }

struct PeriodMatrix {
    std::vector<ComplexF> point;
    std::optional<std::vector<FieldElement>> exact_point;
    long ell = 1;
    long branch = 0;
    std::optional<FieldMatrix> theta_tilde_exact;
    ComplexMatrix theta_tilde;
    bool on_discriminant = false;
    // theta = theta_exact_part + log_term * E_nn, where theta_exact_part is
    // theta_tilde + ell * branch * E_nn and log_term = ell * Log z_n / (2 pi i).
    std::optional<FieldMatrix> theta_exact_part;
    std::optional<ComplexF> log_term;
    std::optional<ComplexMatrix> theta;

    const ComplexMatrix &require_theta() const {
        if (!theta)
            throw Error(ErrorCode::OnDiscriminant, "z_n = 0: theta is undefined, only theta_tilde is available");
        return *theta;
    }
};

namespace detail {

inline void fill_theta(PeriodMatrix &pm, ComplexF zn) {
    const std::size_t n = pm.theta_tilde.size();
    if (zn == ComplexF(0.0, 0.0)) {
        pm.on_discriminant = true;
        return;
    }
    const ComplexF two_pi_i(0.0, 2.0 * std::numbers::pi);
    pm.log_term = static_cast<double>(pm.ell) * std::log(zn) / two_pi_i;
    ComplexMatrix theta = pm.theta_tilde;
    theta[n - 1][n - 1] += static_cast<double>(pm.ell) * static_cast<double>(pm.branch) + *pm.log_term;
    pm.theta = std::move(theta);
}

} // namespace detail

/// Period matrix at an exact point on the given branch of log z_n.
inline PeriodMatrix evaluate_period(const PotentialSpec &spec, const std::vector<FieldElement> &point, long branch) {
    spec.validate();
    if (point.size() != spec.n)
        throw Error(ErrorCode::InvalidArgument, "point has wrong dimension");
    PeriodMatrix pm;
    pm.ell = spec.ell;
    pm.branch = branch;
    pm.exact_point = point;
    for (const auto &x : point)
        pm.point.push_back(embed(x));
    pm.theta_tilde_exact = evaluate(period_polynomials(spec), point);
    pm.theta_tilde = embed(*pm.theta_tilde_exact);
    if (!point.back().is_zero()) {
        FieldMatrix exact = *pm.theta_tilde_exact;
        exact[spec.n - 1][spec.n - 1] += FieldElement(Rational(spec.ell) * branch);
        pm.theta_exact_part = std::move(exact);
    }
    detail::fill_theta(pm, pm.point.back());
    return pm;
}

inline PeriodMatrix evaluate_period(const PotentialSpec &spec, const std::vector<ComplexF> &point, long branch) {
    spec.validate();
    if (point.size() != spec.n)
        throw Error(ErrorCode::InvalidArgument, "point has wrong dimension");
    PeriodMatrix pm;
    pm.ell = spec.ell;
    pm.branch = branch;
    pm.point = point;
    pm.theta_tilde = CompiledPolyMatrix(period_polynomials(spec))(point);
    detail::fill_theta(pm, point.back());
    return pm;
}

/// Pivots d_k of the LDL^T factorization of a real symmetric matrix (the
/// squares of the Cholesky diagonal). Stops after the first pivot <= tol.
inline std::vector<double> ldl_pivots(std::vector<std::vector<double>> a, double tol) {
    const std::size_t n = a.size();
    std::vector<double> pivots;
    for (std::size_t k = 0; k < n; ++k) {
        const double p = a[k][k];
        pivots.push_back(p);
        if (!(p > tol))
            break;
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = a[i][k] / p;
            for (std::size_t j = k + 1; j < n; ++j)
                a[i][j] -= f * a[k][j];
        }
    }
    return pivots;
}

inline std::vector<std::vector<double>> imaginary_part(const ComplexMatrix &m) {
    std::vector<std::vector<double>> out(m.size());
    for (std::size_t i = 0; i < m.size(); ++i)
        for (const auto &x : m[i])
            out[i].push_back(x.imag());
    return out;
}

struct RiemannResult {
    enum class Kind { Pass, Asymmetric, Pivot } kind = Kind::Pass;
    std::size_t i = 0, j = 0; // offending entry, or pivot index in i
    double value = 0.0;       // asymmetry size or pivot value
    std::vector<double> pivots;

    bool pass() const { return kind == Kind::Pass; }
    std::string describe() const {
        std::ostringstream out;
        switch (kind) {
        case Kind::Pass: out << "pass"; break;
        case Kind::Asymmetric:
            out << "theta not symmetric at (" << i + 1 << "," << j + 1 << "), |difference| = " << value;
            break;
        case Kind::Pivot: out << "Cholesky pivot " << i + 1 << " of Im theta is " << value; break;
        }
        return out.str();
    }
};

inline RiemannResult riemann_check(const ComplexMatrix &theta, double tol) {
    RiemannResult res;
    const std::size_t n = theta.size();
    double scale = 0.0;
    for (const auto &row : theta)
        for (const auto &x : row)
            scale = std::max(scale, std::abs(x));
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double diff = std::abs(theta[i][j] - theta[j][i]);
            if (diff > worst) {
                worst = diff;
                res.i = i;
                res.j = j;
            }
        }
    if (worst > tol * scale) {
        res.kind = RiemannResult::Kind::Asymmetric;
        res.value = worst;
        return res;
    }
    res.i = res.j = 0;
    res.pivots = ldl_pivots(imaginary_part(theta), tol);
    if (res.pivots.size() < n || !(res.pivots.back() > tol)) {
        res.kind = RiemannResult::Kind::Pivot;
        res.i = res.pivots.size() - 1;
        res.value = res.pivots.back();
    }
    return res;
}

/// Checks theta when it is defined, theta_tilde on the discriminant.
inline RiemannResult riemann_check(const PeriodMatrix &pm, double tol) {
    return riemann_check(pm.theta ? *pm.theta : pm.theta_tilde, tol);
}

struct DomainReport {
    std::size_t grid_per_axis = 0;
    std::size_t samples = 0;
    double min_pivot = std::numeric_limits<double>::infinity();
    std::vector<ComplexF> worst_point;
    // A positive minimum over a finite sample is evidence, not a proof.
    static constexpr const char *evidence = "sampled";
};

/// Samples Im theta_tilde on a polar grid over the closed polydisk |z_i| <= eps:
/// radii eps*a/(N-1), angles 2*pi*b/N, N^(2n) points in total.
inline DomainReport certify_domain(const PotentialSpec &spec, std::size_t grid_per_axis) {
    spec.validate();
    if (grid_per_axis < 2)
        throw Error(ErrorCode::InvalidArgument, "grid_per_axis must be at least 2");
    const std::size_t n = spec.n;
    const std::size_t per_coord = grid_per_axis * grid_per_axis;
    std::size_t total = 1;
    for (std::size_t i = 0; i < n; ++i) {
        if (total > std::numeric_limits<std::size_t>::max() / per_coord)
            throw Error(ErrorCode::InvalidArgument, "grid too large");
        total *= per_coord;
    }
    const double eps = spec.epsilon.get_d();
    const CompiledPolyMatrix theta(period_polynomials(spec));

    auto point_at = [&](std::size_t index) {
        std::vector<ComplexF> z(n);
        for (std::size_t c = 0; c < n; ++c) {
            const std::size_t cell = index % per_coord;
            index /= per_coord;
            const double r = eps * static_cast<double>(cell / grid_per_axis) / static_cast<double>(grid_per_axis - 1);
            const double phi = 2.0 * std::numbers::pi * static_cast<double>(cell % grid_per_axis) /
                               static_cast<double>(grid_per_axis);
            z[c] = std::polar(r, phi);
        }
        return z;
    };

    const std::size_t blocks = std::min<std::size_t>(total, 256);
    std::vector<double> block_min(blocks, std::numeric_limits<double>::infinity());
    std::vector<std::size_t> block_arg(blocks, 0);
    parallel_for(blocks, [&](std::size_t b) {
        const std::size_t lo = total * b / blocks, hi = total * (b + 1) / blocks;
        for (std::size_t idx = lo; idx < hi; ++idx) {
            const auto pivots = ldl_pivots(imaginary_part(theta(point_at(idx))), 0.0);
            const double p = *std::min_element(pivots.begin(), pivots.end());
            if (p < block_min[b]) {
                block_min[b] = p;
                block_arg[b] = idx;
            }
        }
    });

    DomainReport report;
    report.grid_per_axis = grid_per_axis;
    report.samples = total;
    std::size_t arg = 0;
    for (std::size_t b = 0; b < blocks; ++b)
        if (block_min[b] < report.min_pivot) {
            report.min_pivot = block_min[b];
            arg = block_arg[b];
        }
    report.worst_point = point_at(arg);
    return report;
}

} // namespace lagfib
