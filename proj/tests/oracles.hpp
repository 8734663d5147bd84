#pragma once

// Slow reference computations used to cross-check the library.

#include "lagfib/classifier.hpp"
#include "lagfib/integer_matrix.hpp"

#include "test_support.hpp"

#include <optional>
#include <vector>

namespace lagfib::testing {

/// Does k*v lie in Z^N + sum Z*w_i? Decides one k by solving the integer
/// system W m + r = k v with a Hermite-form solve.
inline bool twist_member(const TorGroupElement &el, long k) {
    const std::size_t n = el.dim();
    const std::size_t m = el.lattice_gens.size();
    std::vector<IntVector> rows;
    IntVector rhs;
    for (std::size_t j = 0; j < n; ++j)
        for (int comp = 0; comp < 4; ++comp) {
            std::vector<Rational> row(m + n + 1, Rational(0));
            for (std::size_t i = 0; i < m; ++i)
                row[i] = detail::component(el.lattice_gens[i][j], comp);
            if (comp == 0)
                row[m + j] = 1;
            row[m + n] = detail::component(el.v[j], comp) * k;
            const Integer scale = detail::lcm_of_denominators(row);
            IntVector irow(m + n);
            for (std::size_t c = 0; c < m + n; ++c)
                irow[c] = Rational(row[c] * scale).get_num();
            rows.push_back(irow);
            rhs.push_back(Rational(row[m + n] * scale).get_num());
        }
    if (rows.empty())
        return true;
    return solve_integer(IntMatrix::from_rows(rows, m + n), rhs).has_value();
}

/// Least k in [1, k_limit] with k*v in the lattice, if any.
inline std::optional<long> brute_force_order(const TorGroupElement &el, long k_limit) {
    for (long k = 1; k <= k_limit; ++k)
        if (twist_member(el, k))
            return k;
    return std::nullopt;
}

/// Random element of finite order at most max_order: v = (W a + r) / k0 with
/// Gaussian-rational W whose imaginary part is invertible.
inline TorGroupElement random_finite_instance(Rng &rng, std::size_t n, long max_order) {
    for (;;) {
        TorGroupElement el;
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<FieldElement> w;
            for (std::size_t j = 0; j < n; ++j)
                w.push_back(FieldElement::from_parts(rng.rational(6, 4), 0, rng.rational(6, 4), 0, 1));
            el.lattice_gens.push_back(w);
        }
        // reject singular imaginary parts; the subgroup would not be a lattice
        if (n == 2) {
            const Rational det = el.lattice_gens[0][0].c() * el.lattice_gens[1][1].c() -
                                 el.lattice_gens[1][0].c() * el.lattice_gens[0][1].c();
            if (det == 0)
                continue;
        } else if (n == 1 && el.lattice_gens[0][0].c() == 0) {
            continue;
        }
        const long k0 = rng.uniform(1, max_order);
        std::vector<long> a(n);
        for (auto &x : a)
            x = rng.uniform(-3, 3);
        for (std::size_t j = 0; j < n; ++j) {
            FieldElement x(rng.uniform(-3, 3));
            for (std::size_t i = 0; i < n; ++i)
                x += FieldElement(a[i]) * el.lattice_gens[i][j];
            el.v.push_back(x / FieldElement(k0));
        }
        return el;
    }
}

inline std::vector<std::vector<ComplexF>> embed_gens(const TorGroupElement &el) {
    std::vector<std::vector<ComplexF>> out;
    for (const auto &w : el.lattice_gens) {
        out.emplace_back();
        for (const auto &x : w)
            out.back().push_back(embed(x));
    }
    return out;
}

inline std::vector<ComplexF> embed_vector(const std::vector<FieldElement> &v) {
    std::vector<ComplexF> out;
    for (const auto &x : v)
        out.push_back(embed(x));
    return out;
}

} // namespace lagfib::testing
