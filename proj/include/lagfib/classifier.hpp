#pragma once

// Order of the twist element in the torus quotient, computed additively:
// the least k > 0 with k*v in Z^N + sum_i Z*w_i.

#include "lagfib/arith.hpp"
#include "lagfib/error.hpp"
#include "lagfib/integer_matrix.hpp"
#include "lagfib/lattice_reduction.hpp"
#include "lagfib/parallel.hpp"
#include "lagfib/polynomial.hpp"
#include "lagfib/potential.hpp"

#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace lagfib {

struct CycleType {
    enum class Tag { Finite, Infinite, UnknownUpTo };
    Tag tag = Tag::Finite;
    long value = 1; // k for Finite, K_max for UnknownUpTo

    static CycleType finite(long k) {
        if (k < 1)
            throw Error(ErrorCode::InvalidArgument, "finite order must be positive");
        return {Tag::Finite, k};
    }
    static CycleType infinite() { return {Tag::Infinite, 0}; }
    static CycleType unknown_up_to(long k_max) { return {Tag::UnknownUpTo, k_max}; }

    bool is_finite() const { return tag == Tag::Finite; }
    bool is_infinite() const { return tag == Tag::Infinite; }

    friend bool operator==(const CycleType &, const CycleType &) = default;
};

inline std::string to_string(const CycleType &c) {
    switch (c.tag) {
    case CycleType::Tag::Finite: return "I_" + std::to_string(c.value);
    case CycleType::Tag::Infinite: return "A_inf";
    case CycleType::Tag::UnknownUpTo: return "unknown_up_to_" + std::to_string(c.value);
    }
    return "?";
}

inline std::ostream &operator<<(std::ostream &os, const CycleType &c) { return os << to_string(c); }

/// v and the w_i are additive logarithms; Z^N is implicit.
struct TorGroupElement {
    std::vector<FieldElement> v;
    std::vector<std::vector<FieldElement>> lattice_gens;

    std::size_t dim() const { return v.size(); }
    void validate() const {
        for (const auto &w : lattice_gens)
            if (w.size() != v.size())
                throw Error(ErrorCode::InvalidArgument, "lattice generator has wrong length");
    }
};

/// Unknowns are (k, m_1..m_M, r_1..r_N) with k*v - sum m_i w_i - r = 0.
struct ExactCertificate {
    std::vector<std::string> unknowns;
    std::vector<IntVector> kernel;      // Z-basis of all integer solutions
    std::optional<IntVector> relation;  // a solution with minimal k > 0
};

struct ExactOrder {
    CycleType cycle;
    ExactCertificate certificate;
};

namespace detail {

inline Rational component(const FieldElement &x, int which) {
    switch (which) {
    case 0: return x.a();
    case 1: return x.b();
    case 2: return x.c();
    default: return x.e();
    }
}

inline Integer lcm_of_denominators(const std::vector<Rational> &row) {
    Integer l = 1;
    for (const auto &q : row)
        mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), q.get_den_mpz_t());
    return l;
}

} // namespace detail

inline ExactOrder order_exact_certified(const TorGroupElement &el) {
    el.validate();
    const std::size_t n = el.dim();
    const std::size_t m = el.lattice_gens.size();
    std::vector<FieldElement> all = el.v;
    for (const auto &w : el.lattice_gens)
        all.insert(all.end(), w.begin(), w.end());
    const long d = common_context(all);

    const std::size_t cols = 1 + m + n;
    std::vector<IntVector> rows;
    for (std::size_t j = 0; j < n; ++j) {
        const FieldElement vj = el.v[j].lift(d);
        for (int comp = 0; comp < 4; ++comp) {
            std::vector<Rational> row(cols, Rational(0));
            row[0] = detail::component(vj, comp);
            for (std::size_t i = 0; i < m; ++i)
                row[1 + i] = -detail::component(el.lattice_gens[i][j].lift(d), comp);
            if (comp == 0)
                row[1 + m + j] = -1;
            const Integer scale = detail::lcm_of_denominators(row);
            IntVector irow(cols);
            bool nonzero = false;
            for (std::size_t c = 0; c < cols; ++c) {
                const Rational scaled = row[c] * scale;
                irow[c] = scaled.get_num();
                nonzero = nonzero || irow[c] != 0;
            }
            if (nonzero)
                rows.push_back(std::move(irow));
        }
    }

    ExactOrder out;
    out.certificate.unknowns.push_back("k");
    for (std::size_t i = 0; i < m; ++i)
        out.certificate.unknowns.push_back("m" + std::to_string(i + 1));
    for (std::size_t j = 0; j < n; ++j)
        out.certificate.unknowns.push_back("r" + std::to_string(j + 1));

    out.certificate.kernel = integer_kernel(IntMatrix::from_rows(rows, cols));
    IntVector k_parts;
    for (const auto &b : out.certificate.kernel)
        k_parts.push_back(b[0]);
    auto [g, coeffs] = extended_gcd(k_parts);
    if (g == 0) {
        out.cycle = CycleType::infinite();
        return out;
    }
    if (!g.fits_slong_p())
        throw Error(ErrorCode::Overflow, "order does not fit in a machine integer");
    IntVector rel(cols, Integer(0));
    for (std::size_t b = 0; b < out.certificate.kernel.size(); ++b)
        for (std::size_t c = 0; c < cols; ++c)
            rel[c] += coeffs[b] * out.certificate.kernel[b][c];
    out.certificate.relation = std::move(rel);
    out.cycle = CycleType::finite(g.get_si());
    return out;
}

inline CycleType order_exact(const TorGroupElement &el) { return order_exact_certified(el).cycle; }

struct NumericOrder {
    CycleType cycle;
    // k, m_1..m_M, r_1..r_N when a relation was found
    std::optional<std::vector<std::int64_t>> relation;
    double residual = 0.0;
    bool generators_dependent = false;
};

inline NumericOrder order_numeric(const std::vector<ComplexF> &v, const std::vector<std::vector<ComplexF>> &w,
                                  long k_max = 10000, double tol = 1e-9) {
    if (k_max < 1)
        throw Error(ErrorCode::InvalidArgument, "K_max must be at least 1");
    const std::size_t n = v.size();
    const std::size_t m = w.size();
    for (const auto &wi : w)
        if (wi.size() != n)
            throw Error(ErrorCode::InvalidArgument, "lattice generator has wrong length");

    auto real_embed = [n](const std::vector<ComplexF> &x) {
        RealVector out(2 * n);
        for (std::size_t j = 0; j < n; ++j) {
            out[j] = x[j].real();
            out[n + j] = x[j].imag();
        }
        return out;
    };
    // generators: w_1..w_M, then the real unit vectors
    std::vector<RealVector> gens;
    for (const auto &wi : w)
        gens.push_back(real_embed(wi));
    for (std::size_t j = 0; j < n; ++j) {
        RealVector e(2 * n, 0.0);
        e[j] = 1.0;
        gens.push_back(e);
    }

    NumericOrder out;
    out.cycle = CycleType::unknown_up_to(k_max);
    const ReducedBasis rb = lll_reduce(gens);
    if (!rb.independent) {
        out.generators_dependent = true;
        return out;
    }
    for (long k = 1; k <= k_max; ++k) {
        std::vector<ComplexF> kv(n);
        for (std::size_t j = 0; j < n; ++j)
            kv[j] = static_cast<double>(k) * v[j];
        const BabaiResult br = babai_nearest_plane(rb, real_embed(kv));
        // recompute the residual from the original data
        double res2 = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            ComplexF r = kv[j] - static_cast<double>(br.coefficients[m + j]);
            for (std::size_t i = 0; i < m; ++i)
                r -= static_cast<double>(br.coefficients[i]) * w[i][j];
            res2 += std::norm(r);
        }
        const double residual = std::sqrt(res2);
        if (residual < tol) {
            std::vector<std::int64_t> rel{k};
            rel.insert(rel.end(), br.coefficients.begin(), br.coefficients.end());
            out.cycle = CycleType::finite(k);
            out.relation = std::move(rel);
            out.residual = residual;
            return out;
        }
    }
    return out;
}

/// For the cubic model: finite order iff z1 lies in Q(i).
inline bool rationality_criterion(const FieldElement &z1) { return z1.b() == 0 && z1.e() == 0; }

/// Twist data at a point of the discriminant z_n = 0: v_j = theta_tilde[n][j],
/// w_i = (theta_tilde[i][j])_j for i, j < n.
inline TorGroupElement twist_data(const PotentialSpec &spec, const std::vector<FieldElement> &point) {
    spec.validate();
    if (point.size() != spec.n)
        throw Error(ErrorCode::InvalidArgument, "point has wrong dimension");
    if (!point.back().is_zero())
        throw Error(ErrorCode::NotOnDiscriminant, "z_n must vanish");
    const FieldMatrix theta = evaluate(period_polynomials(spec), point);
    const std::size_t n = spec.n;
    TorGroupElement el;
    for (std::size_t j = 0; j + 1 < n; ++j)
        el.v.push_back(theta[n - 1][j]);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        std::vector<FieldElement> w;
        for (std::size_t j = 0; j + 1 < n; ++j)
            w.push_back(theta[i][j]);
        el.lattice_gens.push_back(std::move(w));
    }
    return el;
}

inline void numeric_twist_data(const PotentialSpec &spec, const std::vector<ComplexF> &point,
                               std::vector<ComplexF> &v, std::vector<std::vector<ComplexF>> &w) {
    spec.validate();
    if (point.size() != spec.n)
        throw Error(ErrorCode::InvalidArgument, "point has wrong dimension");
    if (point.back() != ComplexF(0.0, 0.0))
        throw Error(ErrorCode::NotOnDiscriminant, "z_n must vanish");
    const ComplexMatrix theta = CompiledPolyMatrix(period_polynomials(spec))(point);
    const std::size_t n = spec.n;
    v.clear();
    w.clear();
    for (std::size_t j = 0; j + 1 < n; ++j)
        v.push_back(theta[n - 1][j]);
    for (std::size_t i = 0; i + 1 < n; ++i)
        w.emplace_back(theta[i].begin(), theta[i].end() - 1);
}

inline bool inside_polydisk(const PotentialSpec &spec, const std::vector<ComplexF> &point) {
    const double eps = spec.epsilon.get_d();
    for (const auto &z : point)
        if (std::abs(z) >= eps)
            return false;
    return true;
}

struct Classification {
    long ell = 1;
    CycleType order;  // n(b)
    CycleType cycle;  // I_{ell * n(b)}
    bool extrapolated = false; // ell > 1: the cycle length is ell * n(b)
    bool inside_polydisk = true;
    std::optional<ExactCertificate> exact;
    std::optional<NumericOrder> numeric;
};

namespace detail {

inline CycleType scale_cycle(const CycleType &order, long ell) {
    if (order.tag != CycleType::Tag::Finite)
        return order;
    return CycleType::finite(order.value * ell);
}

} // namespace detail

inline Classification classify(const PotentialSpec &spec, const std::vector<FieldElement> &point) {
    const auto result = order_exact_certified(twist_data(spec, point));
    Classification c;
    c.ell = spec.ell;
    c.order = result.cycle;
    c.cycle = detail::scale_cycle(result.cycle, spec.ell);
    c.extrapolated = spec.ell > 1;
    std::vector<ComplexF> numeric_point;
    for (const auto &x : point)
        numeric_point.push_back(embed(x));
    c.inside_polydisk = inside_polydisk(spec, numeric_point);
    c.exact = result.certificate;
    return c;
}

inline Classification classify_numeric(const PotentialSpec &spec, const std::vector<ComplexF> &point,
                                       long k_max = 10000, double tol = 1e-9) {
    std::vector<ComplexF> v;
    std::vector<std::vector<ComplexF>> w;
    numeric_twist_data(spec, point, v, w);
    Classification c;
    c.ell = spec.ell;
    c.numeric = order_numeric(v, w, k_max, tol);
    c.order = c.numeric->cycle;
    c.cycle = detail::scale_cycle(c.order, spec.ell);
    c.extrapolated = spec.ell > 1;
    c.inside_polydisk = inside_polydisk(spec, point);
    return c;
}

struct ScanEntry {
    std::vector<FieldElement> point;
    std::optional<Classification> result;
    std::string error;
    double wall_ms = 0.0;
};

struct ScanReport {
    std::vector<ScanEntry> entries;
    std::size_t finite = 0;
    std::size_t infinite = 0;
    std::size_t errors = 0;
};

inline ScanReport scan_discriminant(const PotentialSpec &spec, const std::vector<std::vector<FieldElement>> &samples) {
    ScanReport report;
    report.entries.resize(samples.size());
    parallel_for(samples.size(), [&](std::size_t i) {
        auto &entry = report.entries[i];
        entry.point = samples[i];
        const auto start = std::chrono::steady_clock::now();
        try {
            entry.result = classify(spec, samples[i]);
        } catch (const Error &err) {
            entry.error = err.what();
        }
        entry.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    });
    for (const auto &e : report.entries) {
        if (!e.result)
            ++report.errors;
        else if (e.result->cycle.is_finite())
            ++report.finite;
        else
            ++report.infinite;
    }
    return report;
}

} // namespace lagfib
