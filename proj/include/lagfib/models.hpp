#pragma once

// The three reference potentials in two variables with l = 1.

#include "lagfib/arith.hpp"
#include "lagfib/polynomial.hpp"
#include "lagfib/potential.hpp"

namespace lagfib::models {

namespace detail {
inline Polynomial z(std::size_t i) { return Polynomial::variable(2, i); }
inline Polynomial c(const FieldElement &x) { return Polynomial::constant(2, x); }
} // namespace detail

/// Psi = ((z1+5i)^3 + (z2+5i)^3 + 3 z1^2 z2 + 3 z1 z2^2) / 6, whose Hessian is
/// [[z1+z2+5i, z1+z2], [z1+z2, z1+z2+5i]].
inline PotentialSpec cubic(Rational epsilon = Rational(9, 10)) {
    using detail::c;
    using detail::z;
    const auto five_i = c(FieldElement::from_parts(0, 0, 5, 0, 1));
    const auto three = c(FieldElement(3));
    Polynomial psi = (z(0) + five_i).pow(3) + (z(1) + five_i).pow(3) + three * z(0) * z(0) * z(1) +
                     three * z(0) * z(1) * z(1);
    PotentialSpec spec;
    spec.n = 2;
    spec.ell = 1;
    spec.d = 1;
    spec.epsilon = epsilon;
    spec.psi = FieldElement(Rational(1, 6)) * psi;
    return spec;
}

/// Psi = i (z1^2 + z2^2) / 2 + z1 z2 / k0: constant Hessian [[i, 1/k0], [1/k0, i]].
inline PotentialSpec constant_twist(long k0, Rational epsilon = 1) {
    using detail::c;
    using detail::z;
    if (k0 == 0)
        throw Error(ErrorCode::InvalidArgument, "k0 must be nonzero");
    const auto half_i = c(FieldElement::from_parts(0, 0, Rational(1, 2), 0, 1));
    PotentialSpec spec;
    spec.n = 2;
    spec.ell = 1;
    spec.d = 1;
    spec.epsilon = epsilon;
    spec.psi = half_i * (z(0) * z(0) + z(1) * z(1)) + c(FieldElement(make_rational(1, k0))) * z(0) * z(1);
    return spec;
}

/// Psi = i (z1^2 + z2^2) / 2 + sqrt(2) z1 z2: constant Hessian [[i, sqrt2], [sqrt2, i]].
inline PotentialSpec irrational_twist(Rational epsilon = 1) {
    using detail::c;
    using detail::z;
    const auto half_i = c(FieldElement::from_parts(0, 0, Rational(1, 2), 0, 1));
    PotentialSpec spec;
    spec.n = 2;
    spec.ell = 1;
    spec.d = 2;
    spec.epsilon = epsilon;
    spec.psi = half_i * (z(0) * z(0) + z(1) * z(1)) + c(FieldElement::sqrt_d(2)) * z(0) * z(1);
    return spec;
}

} // namespace lagfib::models
