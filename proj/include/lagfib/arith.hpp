#pragma once

// Exact arithmetic in Q(sqrt(d), i) for a square-free d >= 1, plus a
// correctly-truncated embedding into double-precision complex numbers.

#include "lagfib/error.hpp"

#include <gmpxx.h>

#include <algorithm>
#include <cctype>
#include <cfloat>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace lagfib {

using Integer = mpz_class;
using Rational = mpq_class;
using ComplexF = std::complex<double>;

inline Rational make_rational(const Integer &num, const Integer &den) {
    if (den == 0)
        throw Error(ErrorCode::DivisionByZero, "zero denominator");
    Rational q(num, den);
    q.canonicalize();
    return q;
}

inline bool is_square_free(long d) {
    if (d < 1)
        return false;
    for (long p = 2; p * p <= d; ++p) {
        if (d % (p * p) == 0)
            return false;
    }
    return true;
}

/// Splits n > 0 as s^2 * r with r square-free.
inline std::pair<long, long> square_part(long n) {
    long s = 1;
    long r = n;
    for (long p = 2; p * p <= r; ++p) {
        while (r % (p * p) == 0) {
            r /= p * p;
            s *= p;
        }
    }
    return {s, r};
}

struct Decomposition {
    Rational a, b, c, e;
};

/// a + b*sqrt(d) + (c + e*sqrt(d))*i with rational a, b, c, e.
///
/// The canonical form has every rational in lowest terms and b = e = 0 when
/// d = 1, so equality is structural. Elements of Q(i) (d = 1) combine with
/// elements of any Q(sqrt(d), i); two different d > 1 do not mix.
class FieldElement {
  public:
    FieldElement() = default;
    FieldElement(long v) : a_(v) {}
    FieldElement(const Rational &v) : a_(v) {}

    static FieldElement from_parts(Rational a, Rational b, Rational c, Rational e, long d) {
        if (!is_square_free(d))
            throw Error(ErrorCode::InvalidArgument, "d must be square-free and positive, got " + std::to_string(d));
        FieldElement x;
        x.a_ = std::move(a);
        x.b_ = std::move(b);
        x.c_ = std::move(c);
        x.e_ = std::move(e);
        x.d_ = d;
        x.canonicalize();
        return x;
    }

    static FieldElement imaginary_unit() { return from_parts(0, 0, 1, 0, 1); }
    static FieldElement sqrt_d(long d) { return from_parts(0, 1, 0, 0, d); }

    const Rational &a() const { return a_; }
    const Rational &b() const { return b_; }
    const Rational &c() const { return c_; }
    const Rational &e() const { return e_; }
    long d() const { return d_; }

    bool is_zero() const { return a_ == 0 && b_ == 0 && c_ == 0 && e_ == 0; }
    bool is_rational() const { return b_ == 0 && c_ == 0 && e_ == 0; }
    bool is_real() const { return c_ == 0 && e_ == 0; }
    /// True when the element lies in Q(i), i.e. has no sqrt(d) component.
    bool in_gaussian_rationals() const { return b_ == 0 && e_ == 0; }

    /// The same value viewed in Q(sqrt(target), i).
    FieldElement lift(long target) const {
        if (target == d_)
            return *this;
        if (d_ != 1 && !in_gaussian_rationals())
            throw Error(ErrorCode::ContextMismatch,
                        "cannot move an element of d=" + std::to_string(d_) + " to d=" + std::to_string(target));
        return from_parts(a_, b_, c_, e_, target);
    }

    FieldElement conj() const { return raw(a_, b_, -c_, -e_, d_); }

    FieldElement operator-() const { return raw(-a_, -b_, -c_, -e_, d_); }

    friend FieldElement operator+(const FieldElement &x, const FieldElement &y) {
        const long d = common_d(x, y);
        return raw(x.a_ + y.a_, x.b_ + y.b_, x.c_ + y.c_, x.e_ + y.e_, d);
    }
    friend FieldElement operator-(const FieldElement &x, const FieldElement &y) {
        const long d = common_d(x, y);
        return raw(x.a_ - y.a_, x.b_ - y.b_, x.c_ - y.c_, x.e_ - y.e_, d);
    }
    friend FieldElement operator*(const FieldElement &x, const FieldElement &y) {
        const long d = common_d(x, y);
        // (al + be i)(ga + de i) with al, be, ga, de in Q(sqrt d)
        auto [r1, r2] = qmul(x.a_, x.b_, y.a_, y.b_, d);
        auto [s1, s2] = qmul(x.c_, x.e_, y.c_, y.e_, d);
        auto [t1, t2] = qmul(x.a_, x.b_, y.c_, y.e_, d);
        auto [u1, u2] = qmul(x.c_, x.e_, y.a_, y.b_, d);
        return raw(r1 - s1, r2 - s2, t1 + u1, t2 + u2, d);
    }
    friend FieldElement operator/(const FieldElement &x, const FieldElement &y) { return x * y.inverse(); }

    FieldElement &operator+=(const FieldElement &y) { return *this = *this + y; }
    FieldElement &operator-=(const FieldElement &y) { return *this = *this - y; }
    FieldElement &operator*=(const FieldElement &y) { return *this = *this * y; }
    FieldElement &operator/=(const FieldElement &y) { return *this = *this / y; }

    FieldElement inverse() const {
        if (is_zero())
            throw Error(ErrorCode::DivisionByZero, "inverse of zero");
        // 1/(al + be i) = (al - be i) / (al^2 + be^2); the norm lies in the
        // real field Q(sqrt d) and is nonzero because al, be are real.
        auto [p1, p2] = qmul(a_, b_, a_, b_, d_);
        auto [q1, q2] = qmul(c_, e_, c_, e_, d_);
        const Rational n1 = p1 + q1;
        const Rational n2 = p2 + q2;
        const Rational norm = n1 * n1 - Rational(d_) * n2 * n2;
        const Rational i1 = n1 / norm;
        const Rational i2 = -n2 / norm;
        auto [ra, rb] = qmul(a_, b_, i1, i2, d_);
        auto [rc, re] = qmul(c_, e_, i1, i2, d_);
        return raw(ra, rb, -rc, -re, d_);
    }

    friend bool operator==(const FieldElement &x, const FieldElement &y) {
        if (x.d_ != y.d_ && !(x.in_gaussian_rationals() && y.in_gaussian_rationals()))
            return false;
        return x.a_ == y.a_ && x.b_ == y.b_ && x.c_ == y.c_ && x.e_ == y.e_;
    }
    friend bool operator!=(const FieldElement &x, const FieldElement &y) { return !(x == y); }

  private:
    static FieldElement raw(Rational a, Rational b, Rational c, Rational e, long d) {
        FieldElement x;
        x.a_ = std::move(a);
        x.b_ = std::move(b);
        x.c_ = std::move(c);
        x.e_ = std::move(e);
        x.d_ = d;
        x.canonicalize();
        return x;
    }

    static long common_d(const FieldElement &x, const FieldElement &y) {
        if (x.d_ == y.d_)
            return x.d_;
        if (x.d_ == 1)
            return y.d_;
        if (y.d_ == 1)
            return x.d_;
        throw Error(ErrorCode::ContextMismatch,
                    "d=" + std::to_string(x.d_) + " vs d=" + std::to_string(y.d_));
    }

    static std::pair<Rational, Rational> qmul(const Rational &a1, const Rational &b1, const Rational &a2,
                                              const Rational &b2, long d) {
        return {a1 * a2 + Rational(d) * b1 * b2, a1 * b2 + b1 * a2};
    }

    void canonicalize() {
        if (d_ == 1) {
            a_ += b_;
            c_ += e_;
            b_ = 0;
            e_ = 0;
        }
        a_.canonicalize();
        b_.canonicalize();
        c_.canonicalize();
        e_.canonicalize();
    }

    Rational a_{0}, b_{0}, c_{0}, e_{0};
    long d_ = 1;
};

inline Decomposition decompose(const FieldElement &x) { return {x.a(), x.b(), x.c(), x.e()}; }

inline FieldElement reconstruct(const Decomposition &parts, long d) {
    return FieldElement::from_parts(parts.a, parts.b, parts.c, parts.e, d);
}

enum class FieldOp { Add, Sub, Mul, Div };

inline FieldElement field_arith(const FieldElement &x, const FieldElement &y, FieldOp op) {
    switch (op) {
    case FieldOp::Add: return x + y;
    case FieldOp::Sub: return x - y;
    case FieldOp::Mul: return x * y;
    case FieldOp::Div: return x / y;
    }
    throw Error(ErrorCode::InvalidArgument, "unknown field operation");
}

namespace detail {

inline std::size_t bit_size(const Rational &q) {
    return mpz_sizeinbase(q.get_num_mpz_t(), 2) + mpz_sizeinbase(q.get_den_mpz_t(), 2);
}

// x + y*sqrt(d) rounded toward zero to a double.
inline double embed_real(const Rational &x, const Rational &y, long d) {
    if (y == 0 && x == 0)
        return 0.0;
    const mp_bitcnt_t prec = 192 + 2 * static_cast<mp_bitcnt_t>(std::max(bit_size(x), bit_size(y)));
    mpf_class value(x, prec);
    if (y != 0) {
        mpf_class root(d, prec);
        root = sqrt(root);
        value += mpf_class(y, prec) * root;
    }
    long exp = 0;
    mpf_get_d_2exp(&exp, value.get_mpf_t());
    if (exp > DBL_MAX_EXP)
        throw Error(ErrorCode::Overflow, "value exceeds double range");
    return value.get_d();
}

} // namespace detail

/// Numeric value with sqrt(d) taken as the positive root. Each component is
/// truncated from a high-precision evaluation, so the error is below 1 ulp.
inline ComplexF embed(const FieldElement &x) {
    return {detail::embed_real(x.a(), x.b(), x.d()), detail::embed_real(x.c(), x.e(), x.d())};
}

// ---------------------------------------------------------------------------
// Text form

namespace detail {

inline void append_term(std::string &out, const Rational &coeff, std::string_view unit) {
    if (coeff == 0)
        return;
    const bool negative = coeff < 0;
    const Rational mag = abs(coeff);
    if (out.empty())
        out += negative ? "-" : "";
    else
        out += negative ? " - " : " + ";
    if (unit.empty()) {
        out += mag.get_str();
    } else {
        if (mag != 1) {
            out += mag.get_str();
            out += '*';
        }
        out += unit;
    }
}

} // namespace detail

/// Compact canonical text: zero parts dropped, e.g. "1/2 - 1/2*i",
/// "1 + sqrt(2)", "1/2*sqrt(2) + 3*sqrt(2)*i". parse_field_element reads it
/// back to the identical element.
inline std::string to_string(const FieldElement &x) {
    std::string out;
    const std::string root = "sqrt(" + std::to_string(x.d()) + ")";
    detail::append_term(out, x.a(), "");
    detail::append_term(out, x.b(), root);
    detail::append_term(out, x.c(), "i");
    detail::append_term(out, x.e(), root + "*i");
    return out.empty() ? "0" : out;
}

/// Full form "a + b*sqrt(d) + (c + e*sqrt(d))*i" with every part present.
inline std::string to_full_string(const FieldElement &x) {
    const std::string root = "sqrt(" + std::to_string(x.d()) + ")";
    return x.a().get_str() + " + " + x.b().get_str() + "*" + root + " + (" + x.c().get_str() + " + " +
           x.e().get_str() + "*" + root + ")*i";
}

namespace detail {

class FieldParser {
  public:
    explicit FieldParser(std::string_view text) : text_(text) {}

    FieldElement parse() {
        FieldElement value = expr();
        skip_space();
        if (pos_ != text_.size())
            fail("unexpected '" + std::string(1, text_[pos_]) + "'");
        return value;
    }

  private:
    [[noreturn]] void fail(const std::string &why) const {
        throw Error(ErrorCode::ParseError,
                    why + " at offset " + std::to_string(pos_) + " in \"" + std::string(text_) + "\"");
    }

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }

    bool accept(char ch) {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == ch) {
            ++pos_;
            return true;
        }
        return false;
    }

    bool accept_word(std::string_view word) {
        skip_space();
        if (text_.substr(pos_, word.size()) == word) {
            pos_ += word.size();
            return true;
        }
        return false;
    }

    FieldElement expr() {
        FieldElement value = term();
        for (;;) {
            if (accept('+'))
                value += term();
            else if (accept('-'))
                value -= term();
            else
                return value;
        }
    }

    FieldElement term() {
        FieldElement value = unary();
        for (;;) {
            if (accept('*')) {
                value *= unary();
            } else if (accept('/')) {
                FieldElement divisor = unary();
                if (divisor.is_zero())
                    fail("division by zero");
                value /= divisor;
            } else {
                return value;
            }
        }
    }

    FieldElement unary() {
        if (accept('-'))
            return -unary();
        if (accept('+'))
            return unary();
        return primary();
    }

    Integer integer_literal() {
        skip_space();
        const std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
        if (start == pos_)
            fail("expected a number");
        return Integer(std::string(text_.substr(start, pos_ - start)));
    }

    FieldElement primary() {
        skip_space();
        if (pos_ >= text_.size())
            fail("unexpected end of input");
        if (accept('(')) {
            FieldElement value = expr();
            if (!accept(')'))
                fail("expected ')'");
            return value;
        }
        if (accept_word("sqrt")) {
            if (!accept('('))
                fail("expected '(' after sqrt");
            const bool negative = accept('-');
            const Integer radicand = integer_literal();
            if (!accept(')'))
                fail("expected ')'");
            if (negative) {
                if (radicand != 1)
                    fail("only sqrt(-1) is supported among negative radicands");
                return FieldElement::imaginary_unit();
            }
            if (radicand == 0)
                return FieldElement(0);
            if (!radicand.fits_slong_p())
                fail("radicand too large");
            auto [s, r] = square_part(radicand.get_si());
            if (r == 1)
                return FieldElement(s);
            return FieldElement(s) * FieldElement::sqrt_d(r);
        }
        if (accept('i'))
            return FieldElement::imaginary_unit();
        if (std::isdigit(static_cast<unsigned char>(text_[pos_])))
            return FieldElement(Rational(integer_literal()));
        fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

} // namespace detail

/// Parses sums and products of rationals, "i", "sqrt(n)" and parentheses.
/// The field context is taken from the radicands that appear.
inline FieldElement parse_field_element(std::string_view text) { return detail::FieldParser(text).parse(); }

/// Common context of a set of elements (1 when all are Gaussian rationals).
inline long common_context(const std::vector<FieldElement> &xs) {
    long d = 1;
    for (const auto &x : xs) {
        if (x.d() == 1 || x.in_gaussian_rationals())
            continue;
        if (d == 1)
            d = x.d();
        else if (d != x.d())
            throw Error(ErrorCode::ContextMismatch,
                        "d=" + std::to_string(d) + " vs d=" + std::to_string(x.d()));
    }
    return d;
}

} // namespace lagfib
