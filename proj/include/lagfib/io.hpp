#pragma once

// JSON forms of specs, points and results. Integers and field elements are
// written as strings so no precision is lost.

#include "lagfib/arith.hpp"
#include "lagfib/classifier.hpp"
#include "lagfib/error.hpp"
#include "lagfib/integer_matrix.hpp"
#include "lagfib/polynomial.hpp"
#include "lagfib/potential.hpp"
#include "lagfib/toroidal.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace lagfib {

using Json = nlohmann::ordered_json;

inline constexpr const char *kSchemaVersion = "lagfib/1";

// ---- spec files ---------------------------------------------------------

namespace detail {

inline Polynomial polynomial_from_json(const Json &terms, std::size_t n) {
    if (!terms.is_array())
        throw Error(ErrorCode::ParseError, "polynomial must be an array of terms");
    Polynomial p(n);
    for (const auto &t : terms) {
        if (!t.is_object() || !t.contains("exps") || !t.contains("coeff"))
            throw Error(ErrorCode::ParseError, "term needs \"exps\" and \"coeff\"");
        Exponents exps;
        for (const auto &e : t.at("exps")) {
            if (!e.is_number_integer() || e.get<long>() < 0)
                throw Error(ErrorCode::ParseError, "exponents must be non-negative integers");
            exps.push_back(e.get<int>());
        }
        if (exps.size() != n)
            throw Error(ErrorCode::ParseError, "exponent vector must have length n");
        if (!t.at("coeff").is_string())
            throw Error(ErrorCode::ParseError, "coefficients are written as strings");
        p.add_term(exps, parse_field_element(t.at("coeff").get<std::string>()));
    }
    return p;
}

inline Json polynomial_to_json(const Polynomial &p) {
    Json terms = Json::array();
    for (const auto &[exps, coeff] : p.terms())
        terms.push_back({{"exps", exps}, {"coeff", to_string(coeff)}});
    return terms;
}

inline Rational parse_rational(const std::string &text) {
    Rational q;
    if (text.empty() || q.set_str(text, 10) != 0)
        throw Error(ErrorCode::ParseError, "not a rational number: '" + text + "'");
    if (q.get_den() == 0)
        throw Error(ErrorCode::ParseError, "zero denominator: '" + text + "'");
    q.canonicalize();
    return q;
}

} // namespace detail

inline PotentialSpec spec_from_json(const Json &j) {
    try {
        if (j.contains("schema") && j.at("schema") != kSchemaVersion)
            throw Error(ErrorCode::ParseError, "unsupported schema " + j.at("schema").dump());
        PotentialSpec spec;
        spec.n = j.at("n").get<std::size_t>();
        spec.ell = j.at("ell").get<long>();
        spec.d = j.value("d", 1L);
        const auto &eps = j.at("epsilon");
        spec.epsilon = eps.is_string() ? detail::parse_rational(eps.get<std::string>()) : Rational(eps.get<long>());
        spec.psi = detail::polynomial_from_json(j.at("psi"), spec.n);
        if (j.contains("theta_override")) {
            PolyMatrix m;
            for (const auto &row : j.at("theta_override")) {
                m.emplace_back();
                for (const auto &entry : row)
                    m.back().push_back(detail::polynomial_from_json(entry, spec.n));
            }
            spec.theta_override = std::move(m);
        }
        for (const auto &[key, value] : spec.psi.terms())
            if (value.d() != 1 && value.d() != spec.d)
                throw Error(ErrorCode::ParseError, "coefficient outside the declared field context");
        spec.validate();
        return spec;
    } catch (const Error &err) {
        if (err.code() == ErrorCode::ParseError)
            throw;
        throw Error(ErrorCode::ParseError, err.what());
    } catch (const Json::exception &err) {
        throw Error(ErrorCode::ParseError, err.what());
    }
}

/// Canonical form: fixed key order, terms sorted by exponent vector.
inline Json spec_to_json(const PotentialSpec &spec) {
    Json j;
    j["schema"] = kSchemaVersion;
    j["n"] = spec.n;
    j["ell"] = spec.ell;
    j["d"] = spec.d;
    j["epsilon"] = spec.epsilon.get_str();
    j["psi"] = detail::polynomial_to_json(spec.psi);
    if (spec.theta_override) {
        Json rows = Json::array();
        for (const auto &row : *spec.theta_override) {
            Json r = Json::array();
            for (const auto &p : row)
                r.push_back(detail::polynomial_to_json(p));
            rows.push_back(r);
        }
        j["theta_override"] = rows;
    }
    return j;
}

inline std::string read_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::IoError, "cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline void write_file(const std::string &path, const std::string &content) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error(ErrorCode::IoError, "cannot write " + path);
    out << content;
    if (!out)
        throw Error(ErrorCode::IoError, "write failed for " + path);
}

inline PotentialSpec load_spec(const std::string &path) {
    const std::string text = read_file(path);
    Json j;
    try {
        j = Json::parse(text);
    } catch (const Json::exception &err) {
        throw Error(ErrorCode::ParseError, path + ": " + err.what());
    }
    return spec_from_json(j);
}

// ---- points and grids ---------------------------------------------------

/// "z1=1/7,z2=0"; coordinates that are not mentioned are zero.
inline std::vector<FieldElement> parse_point(std::string_view text, std::size_t n) {
    std::vector<FieldElement> point(n, FieldElement(0));
    std::vector<bool> seen(n, false);
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t comma = std::min(text.find(',', pos), text.size());
        std::string_view item = text.substr(pos, comma - pos);
        while (!item.empty() && item.front() == ' ')
            item.remove_prefix(1);
        if (!item.empty()) {
            const std::size_t eq = item.find('=');
            if (eq == std::string_view::npos || item.size() < 2 || item[0] != 'z')
                throw Error(ErrorCode::ParseError, "point entries look like z1=<value>");
            std::size_t index = 0;
            const std::string idx(item.substr(1, eq - 1));
            try {
                std::size_t used = 0;
                index = std::stoul(idx, &used);
                if (used != idx.size())
                    throw std::invalid_argument(idx);
            } catch (const std::exception &) {
                throw Error(ErrorCode::ParseError, "bad coordinate name in '" + std::string(item) + "'");
            }
            if (index < 1 || index > n)
                throw Error(ErrorCode::ParseError, "coordinate z" + idx + " out of range");
            if (seen[index - 1])
                throw Error(ErrorCode::ParseError, "coordinate z" + idx + " given twice");
            seen[index - 1] = true;
            point[index - 1] = parse_field_element(item.substr(eq + 1));
        }
        if (comma == text.size())
            break;
        pos = comma + 1;
    }
    return point;
}

inline std::string point_to_string(const std::vector<FieldElement> &point) {
    std::string out;
    for (std::size_t i = 0; i < point.size(); ++i) {
        if (i)
            out += ",";
        out += "z" + std::to_string(i + 1) + "=" + to_string(point[i]);
    }
    return out;
}

/// Discriminant grids, varying z1 with all other coordinates zero:
///   "q<=Q"         all p/q with q <= Q and |p/q| < epsilon
///   "<c>*q<=Q"     c*p/q for the same fractions, p != 0, |c*p/q| < epsilon
///   "z1=..;z1=.."  an explicit ';'-separated list of points
///   ""             no points
inline std::vector<std::vector<FieldElement>> parse_grid(std::string_view text, const PotentialSpec &spec) {
    std::vector<std::vector<FieldElement>> out;
    std::string s(text);
    if (s.find_first_not_of(' ') == std::string::npos)
        return out;
    const auto le = s.find("q<=");
    if (le != std::string::npos && s.find('=') == le + 2) {
        std::string prefix = s.substr(0, le);
        FieldElement scale(1);
        const bool scaled = !prefix.empty();
        if (scaled) {
            if (prefix.back() != '*')
                throw Error(ErrorCode::ParseError, "scaled grids look like <c>*q<=Q");
            prefix.pop_back();
            scale = parse_field_element(prefix);
        }
        long q_max = 0;
        try {
            q_max = std::stol(s.substr(le + 3));
        } catch (const std::exception &) {
            throw Error(ErrorCode::ParseError, "bad grid bound in '" + s + "'");
        }
        if (q_max < 1)
            throw Error(ErrorCode::ParseError, "grid bound must be positive");
        const double eps = spec.epsilon.get_d();
        std::vector<Rational> seen;
        for (long q = 1; q <= q_max; ++q) {
            const long p_max = static_cast<long>(std::ceil(eps * static_cast<double>(q) / std::max(1e-300, std::abs(embed(scale))))) + 1;
            for (long p = -p_max; p <= p_max; ++p) {
                if (std::gcd(p, q) != 1 && !(p == 0 && q == 1))
                    continue;
                if (scaled && p == 0)
                    continue;
                const FieldElement z = scale * FieldElement(make_rational(p, q));
                if (!(std::abs(embed(z)) < eps))
                    continue;
                std::vector<FieldElement> pt(spec.n, FieldElement(0));
                if (spec.n >= 2)
                    pt[0] = z;
                else if (!z.is_zero())
                    continue;
                out.push_back(pt);
            }
        }
        return out;
    }
    std::size_t pos = 0;
    while (pos <= s.size()) {
        const std::size_t semi = std::min(s.find(';', pos), s.size());
        const std::string item = s.substr(pos, semi - pos);
        if (item.find_first_not_of(' ') != std::string::npos)
            out.push_back(parse_point(item, spec.n));
        if (semi == s.size())
            break;
        pos = semi + 1;
    }
    return out;
}

// ---- results ------------------------------------------------------------

inline Json to_json(const ComplexF &z) { return Json::array({z.real(), z.imag()}); }

inline Json to_json(const IntVector &v) {
    Json out = Json::array();
    for (const auto &x : v)
        out.push_back(x.get_str());
    return out;
}

inline Json to_json(const IntMatrix &m) {
    Json out = Json::array();
    for (std::size_t r = 0; r < m.rows(); ++r)
        out.push_back(to_json(m.row(r)));
    return out;
}

inline Json to_json(const CycleType &c) {
    Json j;
    switch (c.tag) {
    case CycleType::Tag::Finite: j["tag"] = "Finite"; j["k"] = c.value; break;
    case CycleType::Tag::Infinite: j["tag"] = "Infinite"; break;
    case CycleType::Tag::UnknownUpTo: j["tag"] = "UnknownUpTo"; j["K"] = c.value; break;
    }
    j["name"] = to_string(c);
    return j;
}

inline Json to_json(const std::vector<FieldElement> &v) {
    Json out = Json::array();
    for (const auto &x : v)
        out.push_back(to_string(x));
    return out;
}

inline Json to_json(const Classification &c) {
    Json j;
    j["order"] = to_json(c.order);
    j["cycle_type"] = to_json(c.cycle);
    j["ell"] = c.ell;
    if (c.extrapolated)
        j["extension"] = "cycle length taken as ell * order; extrapolated beyond ell = 1";
    j["inside_polydisk"] = c.inside_polydisk;
    if (c.exact) {
        Json cert;
        cert["method"] = "integer kernel of (k*v - sum m_i w_i - r = 0)";
        cert["unknowns"] = c.exact->unknowns;
        Json kernel = Json::array();
        for (const auto &b : c.exact->kernel)
            kernel.push_back(to_json(b));
        cert["kernel_basis"] = kernel;
        if (c.exact->relation)
            cert["relation"] = to_json(*c.exact->relation);
        j["certificate"] = cert;
    }
    if (c.numeric) {
        Json cert;
        cert["method"] = "LLL + nearest plane";
        if (c.numeric->relation)
            cert["relation"] = c.numeric->relation.value();
        cert["residual"] = c.numeric->residual;
        cert["generators_dependent"] = c.numeric->generators_dependent;
        j["certificate"] = cert;
    }
    return j;
}

inline Json to_json(const SingularFiberDescription &f) {
    Json j;
    j["schema"] = kSchemaVersion;
    j["point"] = to_json(f.point);
    j["components"] = f.components;
    Json gens = Json::array();
    for (std::size_t i = 0; i < f.base_torus_gens.size(); ++i) {
        Json g;
        g["log"] = to_json(f.base_torus_gens[i]);
        Json mult = Json::array();
        for (const auto &z : f.base_torus_gens_multiplicative[i])
            mult.push_back(to_json(z));
        g["exp"] = mult;
        gens.push_back(g);
    }
    j["base_torus_gens"] = gens;
    Json twist;
    twist["log"] = to_json(f.twist);
    Json mult = Json::array();
    for (const auto &z : f.twist_multiplicative)
        mult.push_back(to_json(z));
    twist["exp"] = mult;
    j["twist"] = twist;
    j["classification"] = to_json(f.classification);
    Json curves = Json::array();
    for (const auto &c : f.double_curves)
        curves.push_back({{"id", c.id}, {"component", c.component}, {"section", c.section}, {"glued_to", c.glued_to}});
    j["double_curves"] = curves;
    j["double_curves_distinct"] = f.double_curves_distinct();
    Json graph;
    Json nodes = Json::array();
    for (long c = 0; c < f.components; ++c)
        nodes.push_back({{"id", c}, {"label", "P1-bundle over the base torus"}});
    graph["nodes"] = nodes;
    Json edges = Json::array();
    for (const auto &[a, b] : f.dual_graph_edges)
        edges.push_back({{"source", a}, {"target", b}});
    graph["edges"] = edges;
    j["dual_graph"] = graph;
    return j;
}

} // namespace lagfib
