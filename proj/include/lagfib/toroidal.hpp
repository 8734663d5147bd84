#pragma once

// The chain of charts E_k, the Z^n action on C^{n-1} x (C^*)^{n-1} x E, and
// the combinatorial model of the singular fibers.

#include "lagfib/arith.hpp"
#include "lagfib/classifier.hpp"
#include "lagfib/error.hpp"
#include "lagfib/integer_matrix.hpp"
#include "lagfib/polynomial.hpp"
#include "lagfib/potential.hpp"
#include "lagfib/symplectic.hpp"

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace lagfib {

struct ChartPoint {
    long k = 0;
    ComplexF x, y;
};

enum class Direction { Up, Down };

namespace detail {

inline ComplexF ipow(ComplexF base, long e) {
    if (e < 0)
        return 1.0 / ipow(base, -e);
    ComplexF out = 1.0;
    while (e > 0) {
        if (e & 1)
            out *= base;
        base *= base;
        e >>= 1;
    }
    return out;
}

inline void require_off_axis(const ChartPoint &p) {
    if (p.x == ComplexF(0.0) || p.y == ComplexF(0.0))
        throw Error(ErrorCode::OnAxis, "point lies on an axis of chart " + std::to_string(p.k));
}

inline constexpr ComplexF two_pi_i{0.0, 2.0 * std::numbers::pi};

} // namespace detail

/// up: (x, y) -> (x^2 y, 1/x) in chart k+1; down is its inverse.
inline ChartPoint transition(const ChartPoint &p, Direction dir) {
    detail::require_off_axis(p);
    if (dir == Direction::Up)
        return {p.k + 1, p.x * p.x * p.y, 1.0 / p.x};
    return {p.k - 1, 1.0 / p.y, p.x * p.y * p.y};
}

/// Moves p to chart `target` through consecutive transitions.
inline ChartPoint move_to_chart(ChartPoint p, long target) {
    while (p.k < target)
        p = transition(p, Direction::Up);
    while (p.k > target)
        p = transition(p, Direction::Down);
    return p;
}

inline ComplexF glued_zn(const ChartPoint &p) { return p.x * p.y; }

inline ComplexF glued_wn(const ChartPoint &p) {
    detail::require_off_axis(p);
    return detail::ipow(p.x, -p.k + 1) * detail::ipow(p.y, -p.k);
}

struct GluedInvariants {
    ComplexF zn, wn;
};

inline GluedInvariants glued_invariants(const ChartPoint &p) { return {glued_zn(p), glued_wn(p)}; }

struct OmegaGlueResidual {
    double chart = 0.0;      // |det d(z_n, log w_n)/d(y, x) - 1| in chart k
    double transition = 0.0; // |det d(y', x')/d(y, x) - 1| for the up transition
    double finite_difference = 0.0; // same as `chart`, from a Richardson difference quotient
};

/// Residuals of dz_n ^ dw_n/w_n = dy ^ dx at p and of its compatibility with
/// the up transition.
inline OmegaGlueResidual omega_glue_residual(const ChartPoint &p) {
    detail::require_off_axis(p);
    const auto k = static_cast<double>(p.k);
    OmegaGlueResidual r;
    // rows (z_n, log w_n), columns (y, x)
    const ComplexF a = p.x, b = p.y, c = -k / p.y, d = (1.0 - k) / p.x;
    r.chart = std::abs(a * d - b * c - 1.0);
    // rows (y', x'), columns (y, x)
    const ComplexF ta = 0.0, tb = -1.0 / (p.x * p.x), tc = p.x * p.x, td = 2.0 * p.x * p.y;
    r.transition = std::abs(ta * td - tb * tc - 1.0);

    auto z_of = [&](ComplexF y, ComplexF x) { return x * y; };
    auto logw_of = [&](ComplexF y, ComplexF x) {
        return (1.0 - k) * std::log(x / p.x) - k * std::log(y / p.y); // log w up to a constant
    };
    auto richardson = [](auto f, ComplexF h) {
        auto central = [&](ComplexF s) { return (f(s) - f(-s)) / (2.0 * s); };
        return (4.0 * central(h / 2.0) - central(h)) / 3.0;
    };
    const ComplexF hy = 1e-3 * std::abs(p.y), hx = 1e-3 * std::abs(p.x);
    const ComplexF fa = richardson([&](ComplexF s) { return z_of(p.y + s, p.x); }, hy);
    const ComplexF fb = richardson([&](ComplexF s) { return z_of(p.y, p.x + s); }, hx);
    const ComplexF fc = richardson([&](ComplexF s) { return logw_of(p.y + s, p.x); }, hy);
    const ComplexF fd = richardson([&](ComplexF s) { return logw_of(p.y, p.x + s); }, hx);
    r.finite_difference = std::abs(fa * fd - fb * fc - 1.0);
    return r;
}

struct GroupElement {
    std::vector<long> j; // length n - 1
    long m = 0;

    friend GroupElement operator+(const GroupElement &a, const GroupElement &b) {
        GroupElement out{a.j, a.m + b.m};
        for (std::size_t i = 0; i < out.j.size(); ++i)
            out.j[i] += b.j[i];
        return out;
    }
    bool is_zero() const {
        for (long x : j)
            if (x != 0)
                return false;
        return m == 0;
    }
};

inline std::string to_string(const GroupElement &g) {
    std::string out = "(j=[";
    for (std::size_t i = 0; i < g.j.size(); ++i)
        out += (i ? "," : "") + std::to_string(g.j[i]);
    return out + "], m=" + std::to_string(g.m) + ")";
}

struct TotalPoint {
    std::vector<ComplexF> z; // z_1..z_{n-1}
    std::vector<ComplexF> w; // w_1..w_{n-1}, nonzero
    ChartPoint chart;
};

/// The exponents of the action: f_i = sum_a j_a theta[a][i] + m theta[n][i]
/// (a < n, 1-based), as polynomials in z_1..z_n.
inline std::vector<Polynomial> action_exponents(const PolyMatrix &theta, const GroupElement &g) {
    const std::size_t n = theta.size();
    if (g.j.size() + 1 != n)
        throw Error(ErrorCode::InvalidArgument, "group element has wrong length");
    std::vector<Polynomial> f(n, Polynomial(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t a = 0; a + 1 < n; ++a)
            f[i] = f[i] + FieldElement(g.j[a]) * theta[a][i];
        f[i] = f[i] + FieldElement(g.m) * theta[n - 1][i];
    }
    return f;
}

/// Evaluated action for one spec and group element.
class CompiledAction {
  public:
    CompiledAction(const PotentialSpec &spec, const GroupElement &g) : n_(spec.n), ell_(spec.ell), g_(g) {
        spec.validate();
        const auto f = action_exponents(period_polynomials(spec), g);
        for (std::size_t i = 0; i < n_; ++i) {
            f_.emplace_back(f[i]);
            df_.emplace_back();
            for (std::size_t k = 0; k < n_; ++k)
                df_[i].emplace_back(f[i].derivative(k));
        }
    }

    std::size_t n() const { return n_; }

    std::vector<ComplexF> base_point(const TotalPoint &p) const {
        std::vector<ComplexF> z = p.z;
        z.push_back(glued_zn(p.chart));
        return z;
    }

    TotalPoint operator()(const TotalPoint &p) const {
        check(p);
        const auto z = base_point(p);
        TotalPoint out = p;
        for (std::size_t i = 0; i + 1 < n_; ++i)
            out.w[i] = std::exp(detail::two_pi_i * f_[i](z)) * p.w[i];
        const ComplexF lambda = std::exp(detail::two_pi_i * f_[n_ - 1](z));
        out.chart = {p.chart.k - g_.m * ell_, lambda * p.chart.x, p.chart.y / lambda};
        return out;
    }

    /// Jacobian of the action in coordinates (z_<n, w_<n, x, y).
    std::vector<std::vector<ComplexF>> jacobian(const TotalPoint &p) const {
        check(p);
        const std::size_t n1 = n_ - 1, dim = 2 * n_;
        const auto z = base_point(p);
        std::vector<ComplexF> e(n_);
        std::vector<std::vector<ComplexF>> df(n_, std::vector<ComplexF>(n_));
        for (std::size_t i = 0; i < n_; ++i) {
            e[i] = std::exp(detail::two_pi_i * f_[i](z));
            for (std::size_t k = 0; k < n_; ++k)
                df[i][k] = df_[i][k](z);
        }
        const ComplexF x = p.chart.x, y = p.chart.y;
        const std::size_t ix = 2 * n1, iy = 2 * n1 + 1;
        // d/d(coordinate) of a function of z, with z_n = x y
        auto grad = [&](std::size_t i) {
            std::vector<ComplexF> gr(dim, 0.0);
            for (std::size_t k = 0; k < n1; ++k)
                gr[k] = df[i][k];
            gr[ix] = df[i][n1] * y;
            gr[iy] = df[i][n1] * x;
            return gr;
        };
        std::vector<std::vector<ComplexF>> jac(dim, std::vector<ComplexF>(dim, 0.0));
        for (std::size_t k = 0; k < n1; ++k)
            jac[k][k] = 1.0;
        for (std::size_t i = 0; i < n1; ++i) {
            const auto gr = grad(i);
            for (std::size_t c = 0; c < dim; ++c)
                jac[n1 + i][c] = detail::two_pi_i * e[i] * p.w[i] * gr[c];
            jac[n1 + i][n1 + i] += e[i];
        }
        const auto gr = grad(n1);
        const ComplexF lam = e[n1];
        for (std::size_t c = 0; c < dim; ++c) {
            jac[ix][c] = detail::two_pi_i * lam * x * gr[c];
            jac[iy][c] = -detail::two_pi_i * (y / lam) * gr[c];
        }
        jac[ix][ix] += lam;
        jac[iy][iy] += 1.0 / lam;
        return jac;
    }

  private:
    void check(const TotalPoint &p) const {
        if (p.z.size() + 1 != n_ || p.w.size() + 1 != n_)
            throw Error(ErrorCode::InvalidArgument, "total point has wrong dimension");
        for (const auto &w : p.w)
            if (w == ComplexF(0.0))
                throw Error(ErrorCode::InvalidArgument, "w coordinates must be nonzero");
    }

    std::size_t n_;
    long ell_;
    GroupElement g_;
    std::vector<CompiledPolynomial> f_;
    std::vector<std::vector<CompiledPolynomial>> df_;
};

inline TotalPoint action(const PotentialSpec &spec, const GroupElement &g, const TotalPoint &p) {
    return CompiledAction(spec, g)(p);
}

/// Relative distance between two total points after moving both to the chart
/// of the first.
inline double total_point_distance(const TotalPoint &a, const TotalPoint &b) {
    double scale = 0.0, diff = 0.0;
    auto acc = [&](ComplexF u, ComplexF v) {
        scale = std::max(scale, std::abs(u));
        diff = std::max(diff, std::abs(u - v));
    };
    for (std::size_t i = 0; i < a.z.size(); ++i)
        acc(a.z[i], b.z[i]);
    for (std::size_t i = 0; i < a.w.size(); ++i) {
        scale = std::max(scale, 1.0);
        diff = std::max(diff, std::abs(a.w[i] - b.w[i]) / std::abs(a.w[i]));
    }
    const ChartPoint bc = move_to_chart(b.chart, a.chart.k);
    acc(a.chart.x, bc.x);
    acc(a.chart.y, bc.y);
    return diff / std::max(scale, 1e-300);
}

/// omega = sum dz_i ^ dw_i / w_i + dy ^ dx as an antisymmetric matrix in
/// coordinates (z_<n, w_<n, x, y).
inline std::vector<std::vector<ComplexF>> omega_matrix(const TotalPoint &p) {
    const std::size_t n1 = p.z.size(), dim = 2 * n1 + 2;
    std::vector<std::vector<ComplexF>> om(dim, std::vector<ComplexF>(dim, 0.0));
    for (std::size_t i = 0; i < n1; ++i) {
        om[i][n1 + i] = 1.0 / p.w[i];
        om[n1 + i][i] = -1.0 / p.w[i];
    }
    om[dim - 1][dim - 2] = 1.0;
    om[dim - 2][dim - 1] = -1.0;
    return om;
}

inline TotalPoint random_total_point(const PotentialSpec &spec, std::mt19937_64 &rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double eps = spec.epsilon.get_d();
    auto in_disk = [&](double radius) {
        return std::polar(radius * std::sqrt(unit(rng)), 2.0 * std::numbers::pi * unit(rng));
    };
    auto annulus = [&](double lo, double hi) {
        return std::polar(lo + (hi - lo) * unit(rng), 2.0 * std::numbers::pi * unit(rng));
    };
    TotalPoint p;
    for (std::size_t i = 0; i + 1 < spec.n; ++i) {
        p.z.push_back(in_disk(0.9 * eps));
        p.w.push_back(annulus(0.5, 2.0));
    }
    p.chart.k = std::uniform_int_distribution<long>(-3, 3)(rng);
    // pick z_n in the disk, then split it as x*y in chart k
    const ComplexF zn = annulus(0.05 * eps, 0.9 * eps);
    p.chart.x = annulus(0.5, 1.5);
    p.chart.y = zn / p.chart.x;
    return p;
}

struct SymplecticCheck {
    bool exact_pass = true;
    std::optional<std::pair<std::size_t, std::size_t>> exact_witness; // (i, k), 0-based
    double max_residual = 0.0;    // pullback of omega vs omega, relative
    double max_fd_deviation = 0.0; // analytic vs finite-difference Jacobian, relative
    std::size_t samples = 0;
    std::optional<TotalPoint> worst_point;
    double tol = 1e-9;

    bool numeric_pass() const { return max_residual <= tol; }
    bool pass() const { return exact_pass && numeric_pass(); }
    std::string describe() const {
        std::ostringstream out;
        if (!exact_pass && exact_witness)
            out << "df_" << exact_witness->first + 1 << "/dz_" << exact_witness->second + 1 << " != df_"
                << exact_witness->second + 1 << "/dz_" << exact_witness->first + 1 << "; ";
        out << "pullback residual " << max_residual << " over " << samples << " samples";
        return out.str();
    }
};

/// Exact identity d f_i / d z_k = d f_k / d z_i for all i, k.
inline std::optional<std::pair<std::size_t, std::size_t>> exact_symplectic_witness(const PotentialSpec &spec,
                                                                                    const GroupElement &g) {
    const auto f = action_exponents(period_polynomials(spec), g);
    const std::size_t n = f.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = i + 1; k < n; ++k)
            if (f[i].derivative(k) != f[k].derivative(i))
                return std::make_pair(i, k);
    return std::nullopt;
}

inline SymplecticCheck verify_symplectic_action(const PotentialSpec &spec, const GroupElement &g,
                                                std::size_t samples = 50, std::uint64_t seed = 1,
                                                double tol = 1e-9) {
    spec.validate();
    SymplecticCheck out;
    out.tol = tol;
    out.exact_witness = exact_symplectic_witness(spec, g);
    out.exact_pass = !out.exact_witness.has_value();

    const CompiledAction act(spec, g);
    std::mt19937_64 rng(seed);
    for (std::size_t s = 0; s < samples; ++s) {
        const TotalPoint p = random_total_point(spec, rng);
        const TotalPoint q = act(p);
        const auto jac = act.jacobian(p);
        const auto om_p = omega_matrix(p), om_q = omega_matrix(q);
        const std::size_t dim = jac.size();
        double scale = 0.0, resid = 0.0;
        for (std::size_t a = 0; a < dim; ++a)
            for (std::size_t b = 0; b < dim; ++b) {
                ComplexF pulled = 0.0;
                for (std::size_t c = 0; c < dim; ++c)
                    for (std::size_t e = 0; e < dim; ++e)
                        if (om_q[c][e] != ComplexF(0.0))
                            pulled += jac[c][a] * om_q[c][e] * jac[e][b];
                scale = std::max(scale, std::abs(om_p[a][b]));
                resid = std::max(resid, std::abs(pulled - om_p[a][b]));
            }
        const double rel = resid / scale;
        if (rel > out.max_residual || !out.worst_point) {
            out.max_residual = std::max(out.max_residual, rel);
            out.worst_point = p;
        }

        // finite-difference cross-check of the Jacobian, column by column
        auto coords = [](const TotalPoint &t) {
            std::vector<ComplexF> c = t.z;
            c.insert(c.end(), t.w.begin(), t.w.end());
            c.push_back(t.chart.x);
            c.push_back(t.chart.y);
            return c;
        };
        auto from_coords = [&](const std::vector<ComplexF> &c) {
            TotalPoint t;
            const std::size_t n1 = p.z.size();
            t.z.assign(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(n1));
            t.w.assign(c.begin() + static_cast<std::ptrdiff_t>(n1), c.begin() + static_cast<std::ptrdiff_t>(2 * n1));
            t.chart = {p.chart.k, c[2 * n1], c[2 * n1 + 1]};
            return t;
        };
        const auto base = coords(p);
        for (std::size_t col = 0; col < dim; ++col) {
            const ComplexF h = 1e-6 * std::max(1.0, std::abs(base[col]));
            auto shifted = base;
            shifted[col] = base[col] + h;
            const auto plus = coords(act(from_coords(shifted)));
            shifted[col] = base[col] - h;
            const auto minus = coords(act(from_coords(shifted)));
            for (std::size_t row = 0; row < dim; ++row) {
                double row_scale = 0.0;
                for (std::size_t c = 0; c < dim; ++c)
                    row_scale = std::max(row_scale, std::abs(jac[row][c]));
                const ComplexF fd = (plus[row] - minus[row]) / (2.0 * h);
                out.max_fd_deviation = std::max(out.max_fd_deviation, std::abs(fd - jac[row][col]) / row_scale);
            }
        }
        ++out.samples;
    }
    return out;
}

struct PolarizationCheck {
    bool pass = true;
    IntMatrix defect; // M^T J M - J
};

inline PolarizationCheck check_polarization_matrix(const IntMatrix &m) {
    const IntMatrix j = standard_symplectic_form(m.rows() / 2);
    PolarizationCheck out;
    out.defect = m.transpose() * j * m - j;
    out.pass = out.defect == IntMatrix(j.rows(), j.cols());
    return out;
}

/// M^T J M = J for the monodromy q_n -> q_n + l p_n.
inline PolarizationCheck verify_polarization(std::size_t n, long ell) {
    if (n < 1)
        throw Error(ErrorCode::InvalidArgument, "n must be at least 1");
    return check_polarization_matrix(monodromy_matrix(n, ell).matrix());
}

struct DoubleCurve {
    std::size_t id;
    std::size_t component;
    std::string section; // "x=0" or "y=0" in the chart of that component
    std::size_t glued_to; // id of the curve it is identified with
};

struct SingularFiberDescription {
    long components = 1;
    std::vector<FieldElement> point;
    // additive logarithms; the multiplicative generators are exp(2 pi i .)
    std::vector<std::vector<FieldElement>> base_torus_gens;
    std::vector<FieldElement> twist;
    std::vector<std::vector<ComplexF>> base_torus_gens_multiplicative;
    std::vector<ComplexF> twist_multiplicative;
    Classification classification;
    std::vector<DoubleCurve> double_curves;
    std::vector<std::pair<std::size_t, std::size_t>> dual_graph_edges;

    bool double_curves_distinct() const {
        for (std::size_t c = 0; c < static_cast<std::size_t>(components); ++c)
            if (double_curves[2 * c].id == double_curves[2 * c + 1].id ||
                double_curves[2 * c].section == double_curves[2 * c + 1].section)
                return false;
        return true;
    }
};

inline SingularFiberDescription singular_fiber(const PotentialSpec &spec, const std::vector<FieldElement> &point) {
    spec.validate();
    if (point.size() != spec.n)
        throw Error(ErrorCode::InvalidArgument, "point has wrong dimension");
    if (!point.back().is_zero())
        throw Error(ErrorCode::NotOnDiscriminant, "z_n must vanish");
    SingularFiberDescription out;
    out.components = spec.ell;
    out.point = point;
    const TorGroupElement el = twist_data(spec, point);
    out.base_torus_gens = el.lattice_gens;
    out.twist = el.v;
    for (const auto &w : el.lattice_gens) {
        out.base_torus_gens_multiplicative.emplace_back();
        for (const auto &x : w)
            out.base_torus_gens_multiplicative.back().push_back(std::exp(detail::two_pi_i * embed(x)));
    }
    for (const auto &x : el.v)
        out.twist_multiplicative.push_back(std::exp(detail::two_pi_i * embed(x)));
    out.classification = classify(spec, point);

    // component c is the image of the charts E_k with k = c mod l; its section
    // {y = 0} is glued to the section {x = 0} of component c + 1.
    const auto ell = static_cast<std::size_t>(spec.ell);
    for (std::size_t c = 0; c < ell; ++c) {
        const std::size_t next = (c + 1) % ell;
        const std::size_t prev = (c + ell - 1) % ell;
        out.double_curves.push_back({2 * c, c, "x=0", 2 * prev + 1});
        out.double_curves.push_back({2 * c + 1, c, "y=0", 2 * next});
        out.dual_graph_edges.emplace_back(c, next);
    }
    return out;
}

} // namespace lagfib
