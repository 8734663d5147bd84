#pragma once

// Sparse multivariate polynomials with FieldElement coefficients.

#include "lagfib/arith.hpp"
#include "lagfib/error.hpp"

#include <algorithm>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace lagfib {

using Exponents = std::vector<int>;

class Polynomial {
  public:
    using TermMap = std::map<Exponents, FieldElement>;

    Polynomial() = default;
    explicit Polynomial(std::size_t n_vars) : n_vars_(n_vars) {}

    static Polynomial constant(std::size_t n_vars, const FieldElement &c) {
        Polynomial p(n_vars);
        p.add_term(Exponents(n_vars, 0), c);
        return p;
    }

    static Polynomial variable(std::size_t n_vars, std::size_t index) {
        if (index >= n_vars)
            throw Error(ErrorCode::InvalidArgument, "variable index out of range");
        Exponents exps(n_vars, 0);
        exps[index] = 1;
        Polynomial p(n_vars);
        p.add_term(exps, FieldElement(1));
        return p;
    }

    std::size_t n_vars() const { return n_vars_; }
    const TermMap &terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    int degree() const {
        int deg = -1;
        for (const auto &[exps, coeff] : terms_) {
            int total = 0;
            for (int e : exps)
                total += e;
            deg = std::max(deg, total);
        }
        return deg;
    }

    void add_term(const Exponents &exps, const FieldElement &coeff) {
        if (exps.size() != n_vars_)
            throw Error(ErrorCode::InvalidArgument, "exponent vector has wrong length");
        for (int e : exps)
            if (e < 0)
                throw Error(ErrorCode::InvalidArgument, "negative exponent");
        if (coeff.is_zero())
            return;
        auto it = terms_.find(exps);
        if (it == terms_.end()) {
            terms_.emplace(exps, coeff);
            return;
        }
        it->second += coeff;
        if (it->second.is_zero())
            terms_.erase(it);
    }

    Polynomial derivative(std::size_t var) const {
        if (var >= n_vars_)
            throw Error(ErrorCode::InvalidArgument, "variable index out of range");
        Polynomial out(n_vars_);
        for (const auto &[exps, coeff] : terms_) {
            if (exps[var] == 0)
                continue;
            Exponents lowered = exps;
            lowered[var] -= 1;
            out.add_term(lowered, coeff * FieldElement(static_cast<long>(exps[var])));
        }
        return out;
    }

    FieldElement evaluate(std::span<const FieldElement> point) const {
        check_point_size(point.size());
        FieldElement sum;
        for (const auto &[exps, coeff] : terms_) {
            FieldElement term = coeff;
            for (std::size_t v = 0; v < n_vars_; ++v)
                for (int k = 0; k < exps[v]; ++k)
                    term *= point[v];
            sum += term;
        }
        return sum;
    }

    friend Polynomial operator+(Polynomial a, const Polynomial &b) {
        a.check_compatible(b);
        for (const auto &[exps, coeff] : b.terms_)
            a.add_term(exps, coeff);
        return a;
    }
    friend Polynomial operator-(Polynomial a, const Polynomial &b) {
        a.check_compatible(b);
        for (const auto &[exps, coeff] : b.terms_)
            a.add_term(exps, -coeff);
        return a;
    }
    friend Polynomial operator*(const Polynomial &a, const Polynomial &b) {
        a.check_compatible(b);
        Polynomial out(a.n_vars_);
        for (const auto &[ea, ca] : a.terms_)
            for (const auto &[eb, cb] : b.terms_) {
                Exponents sum(a.n_vars_);
                for (std::size_t v = 0; v < a.n_vars_; ++v)
                    sum[v] = ea[v] + eb[v];
                out.add_term(sum, ca * cb);
            }
        return out;
    }
    friend Polynomial operator*(const FieldElement &s, Polynomial p) {
        Polynomial out(p.n_vars_);
        for (const auto &[exps, coeff] : p.terms_)
            out.add_term(exps, s * coeff);
        return out;
    }

    Polynomial pow(unsigned k) const {
        Polynomial out = constant(n_vars_, FieldElement(1));
        for (unsigned i = 0; i < k; ++i)
            out = out * *this;
        return out;
    }

    friend bool operator==(const Polynomial &a, const Polynomial &b) {
        return a.n_vars_ == b.n_vars_ && a.terms_ == b.terms_;
    }
    friend bool operator!=(const Polynomial &a, const Polynomial &b) { return !(a == b); }

  private:
    void check_compatible(const Polynomial &b) const {
        if (n_vars_ != b.n_vars_)
            throw Error(ErrorCode::InvalidArgument, "polynomials in different numbers of variables");
    }
    void check_point_size(std::size_t size) const {
        if (size != n_vars_)
            throw Error(ErrorCode::InvalidArgument, "point has wrong dimension");
    }

    std::size_t n_vars_ = 0;
    TermMap terms_;
};

inline std::string to_string(const Polynomial &p) {
    if (p.is_zero())
        return "0";
    std::string out;
    for (const auto &[exps, coeff] : p.terms()) {
        if (!out.empty())
            out += " + ";
        out += "(" + to_string(coeff) + ")";
        for (std::size_t v = 0; v < exps.size(); ++v) {
            if (exps[v] == 0)
                continue;
            out += "*z" + std::to_string(v + 1);
            if (exps[v] > 1)
                out += "^" + std::to_string(exps[v]);
        }
    }
    return out;
}

/// Double-precision copy of a polynomial for fast repeated evaluation.
class CompiledPolynomial {
  public:
    CompiledPolynomial() = default;
    explicit CompiledPolynomial(const Polynomial &p) : n_vars_(p.n_vars()) {
        for (const auto &[exps, coeff] : p.terms()) {
            terms_.push_back({exps, embed(coeff)});
            for (int e : exps)
                max_degree_ = std::max(max_degree_, e);
        }
    }

    ComplexF operator()(std::span<const ComplexF> point) const {
        if (point.size() != n_vars_)
            throw Error(ErrorCode::InvalidArgument, "point has wrong dimension");
        // powers[v][k] = point[v]^k
        std::vector<std::vector<ComplexF>> powers(n_vars_);
        for (std::size_t v = 0; v < n_vars_; ++v) {
            powers[v].resize(static_cast<std::size_t>(max_degree_) + 1);
            powers[v][0] = 1.0;
            for (int k = 1; k <= max_degree_; ++k)
                powers[v][static_cast<std::size_t>(k)] = powers[v][static_cast<std::size_t>(k - 1)] * point[v];
        }
        ComplexF sum = 0.0;
        for (const auto &term : terms_) {
            ComplexF t = term.coeff;
            for (std::size_t v = 0; v < n_vars_; ++v)
                if (term.exps[v] != 0)
                    t *= powers[v][static_cast<std::size_t>(term.exps[v])];
            sum += t;
        }
        return sum;
    }

  private:
    struct Term {
        Exponents exps;
        ComplexF coeff;
    };
    std::size_t n_vars_ = 0;
    int max_degree_ = 0;
    std::vector<Term> terms_;
};

using PolyMatrix = std::vector<std::vector<Polynomial>>;
using FieldMatrix = std::vector<std::vector<FieldElement>>;
using ComplexMatrix = std::vector<std::vector<ComplexF>>;

class CompiledPolyMatrix {
  public:
    CompiledPolyMatrix() = default;
    explicit CompiledPolyMatrix(const PolyMatrix &m) {
        for (const auto &row : m) {
            entries_.emplace_back();
            for (const auto &p : row)
                entries_.back().emplace_back(p);
        }
    }
    ComplexMatrix operator()(std::span<const ComplexF> point) const {
        ComplexMatrix out(entries_.size());
        for (std::size_t i = 0; i < entries_.size(); ++i)
            for (const auto &p : entries_[i])
                out[i].push_back(p(point));
        return out;
    }
    std::size_t size() const { return entries_.size(); }

  private:
    std::vector<std::vector<CompiledPolynomial>> entries_;
};

inline FieldMatrix evaluate(const PolyMatrix &m, std::span<const FieldElement> point) {
    FieldMatrix out(m.size());
    for (std::size_t i = 0; i < m.size(); ++i)
        for (const auto &p : m[i])
            out[i].push_back(p.evaluate(point));
    return out;
}

inline ComplexMatrix embed(const FieldMatrix &m) {
    ComplexMatrix out(m.size());
    for (std::size_t i = 0; i < m.size(); ++i)
        for (const auto &x : m[i])
            out[i].push_back(embed(x));
    return out;
}

} // namespace lagfib
