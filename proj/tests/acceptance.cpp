// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "commands.hpp"
#include "lagfib/models.hpp"
#include "lagfib/symplectic.hpp"

#include "oracles.hpp"
#include "test_support.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

using namespace lagfib;
using lagfib::testing::Rng;

namespace {

const std::string kFixtures = LAGFIB_FIXTURES_DIR;

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string &why) {
        if (!ok && pass) {
            pass = false;
            detail << "first failure: " << why << "; ";
        }
    }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fixture(const char *name) { return kFixtures + "/" + name + ".json"; }

// Gaussian rational with denominators <= max_den inside |z| < radius.
FieldElement random_gaussian_rational(Rng &rng, long max_den, double radius) {
    for (;;) {
        const long q = rng.uniform(1, max_den), s = rng.uniform(1, max_den);
        const FieldElement z = FieldElement::from_parts(make_rational(rng.uniform(-q, q), q), 0,
                                                        make_rational(rng.uniform(-s, s), s), 0, 1);
        if (std::abs(embed(z)) < radius)
            return z;
    }
}

// Element of Q(sqrt2, i) with a nonzero sqrt2 component inside |z| < radius.
FieldElement random_irrational(Rng &rng, double radius) {
    for (;;) {
        const FieldElement z = FieldElement::from_parts(rng.rational(9, 12), rng.rational(9, 12),
                                                        rng.rational(9, 12), rng.rational(9, 12), 2);
        if (z.in_gaussian_rationals() || !(std::abs(embed(z)) < radius))
            continue;
        return z;
    }
}

// Every kernel vector solves k v - sum m_i w_i - r = 0 exactly.
bool certificate_holds(const TorGroupElement &el, const ExactCertificate &cert) {
    const std::size_t m = el.lattice_gens.size(), n = el.dim();
    for (const auto &vec : cert.kernel) {
        if (vec.size() != 1 + m + n)
            return false;
        for (std::size_t j = 0; j < n; ++j) {
            FieldElement sum = FieldElement(Rational(vec[0])) * el.v[j];
            for (std::size_t i = 0; i < m; ++i)
                sum -= FieldElement(Rational(vec[1 + i])) * el.lattice_gens[i][j];
            sum -= FieldElement(Rational(vec[1 + m + j]));
            if (!sum.is_zero())
                return false;
        }
    }
    return true;
}

Outcome construction_one_orders() {
    Outcome out;
    const auto t0 = Clock::now();
    for (long k = 1; k <= 50; ++k) {
        const auto report = cli::cmd_classify({fixture("construction1"), "z1=1/" + std::to_string(k)});
        const auto &cycle = report.results["classification"]["cycle_type"];
        out.require(report.ok && cycle["tag"] == "Finite" && cycle["k"] == k, "z1=1/" + std::to_string(k));
    }
    const double secs = seconds_since(t0);
    out.require(secs < 10.0, "runtime over 10 s");
    out.detail << "k=1..50 all I_k, " << secs << " s";
    return out;
}

Outcome construction_one_dichotomy() {
    Outcome out;
    const auto spec = models::cubic();
    Rng rng(2024);
    int finite = 0, infinite = 0, disagreements = 0;
    for (int t = 0; t < 250; ++t) {
        const FieldElement z1 = t < 200 ? random_gaussian_rational(rng, 20, 0.9) : random_irrational(rng, 0.9);
        const std::vector<FieldElement> point{z1, FieldElement(0)};
        const auto el = twist_data(spec, point);
        const auto res = order_exact_certified(el);
        const bool rational = rationality_criterion(z1);
        if (res.cycle.is_finite() != rational)
            ++disagreements;
        if (t < 200) {
            finite += res.cycle.is_finite();
            out.require(res.cycle.is_finite(), "Q(i) point " + to_string(z1) + " not finite");
        } else {
            infinite += res.cycle.tag == CycleType::Tag::Infinite;
            out.require(res.cycle.tag == CycleType::Tag::Infinite, "point " + to_string(z1) + " not infinite");
            // an empty kernel is a valid certificate: only the zero solution exists
            out.require(certificate_holds(el, res.certificate), "kernel certificate invalid at " + to_string(z1));
            out.require(!lagfib::testing::brute_force_order(el, 200), "oracle finds an order at " + to_string(z1));
            for (const auto &vec : res.certificate.kernel)
                out.require(vec[0] == 0, "kernel vector with k != 0 at " + to_string(z1));
        }
    }
    out.require(disagreements == 0, "disagreement with the rationality criterion");
    out.detail << finite << "/200 finite, " << infinite
               << "/50 infinite with checked kernels and no order <= 200 by HNF membership, " << disagreements
               << " disagreements";
    return out;
}

Outcome construction_two_constancy() {
    Outcome out;
    Rng rng(7);
    int checked = 0;
    for (long k0 = 1; k0 <= 10; ++k0) {
        const auto spec = models::constant_twist(k0);
        for (int t = 0; t < 20; ++t) {
            const FieldElement z1 = t % 2 ? random_gaussian_rational(rng, 20, 1.0) : random_irrational(rng, 1.0);
            const auto c = classify(spec, {z1, FieldElement(0)});
            out.require(c.cycle == CycleType::finite(k0), "k0=" + std::to_string(k0) + " z1=" + to_string(z1));
            ++checked;
        }
    }
    out.detail << checked << " points, every one I_{k0}";
    return out;
}

Outcome construction_three() {
    Outcome out;
    const auto spec = models::irrational_twist();
    Rng rng(3);
    int checked = 0;
    for (int t = 0; t < 10; ++t) {
        const FieldElement z1 = t == 0 ? FieldElement(0) : random_gaussian_rational(rng, 12, 1.0);
        const auto exact = classify(spec, {z1, FieldElement(0)});
        out.require(exact.cycle == CycleType::infinite(), "exact path at " + to_string(z1));
        const auto numeric = classify_numeric(spec, {embed(z1), ComplexF(0)}, 10000, 1e-9);
        out.require(numeric.cycle == CycleType::unknown_up_to(10000), "numeric path at " + to_string(z1));
        ++checked;
    }
    out.detail << checked << " points: exact A_inf, numeric unknown_up_to_10000";
    return out;
}

Outcome riemann_domain() {
    Outcome out;
    const auto one = certify_domain(models::cubic(Rational(9, 10)), 9);
    out.require(one.min_pivot > 0, "construction I min pivot not positive");
    double worst_unit = 0.0;
    for (const auto &spec : {models::constant_twist(4), models::irrational_twist()}) {
        const auto report = certify_domain(spec, 9);
        worst_unit = std::max(worst_unit, std::abs(report.min_pivot - 1.0));
        // all pivots, not only the minimum
        std::mt19937_64 rng(5);
        for (int t = 0; t < 200; ++t) {
            const auto p = random_total_point(spec, rng);
            const std::vector<ComplexF> z{p.z[0], glued_zn(p.chart)};
            for (double pivot : ldl_pivots(imaginary_part(evaluate_period(spec, z, 0).theta_tilde), 0.0))
                worst_unit = std::max(worst_unit, std::abs(pivot - 1.0));
        }
    }
    out.require(worst_unit <= 1e-12, "construction II/III pivot differs from 1");
    out.detail << "construction I min pivot " << one.min_pivot << " over " << one.samples
               << " samples; II/III max |pivot - 1| = " << worst_unit;
    return out;
}

Outcome symplectic_action() {
    Outcome out;
    double worst = 0.0;
    int elements = 0;
    const std::vector<std::pair<const char *, PotentialSpec>> specs{
        {"construction1", models::cubic()},
        {"construction2", models::constant_twist(4)},
        {"construction3", models::irrational_twist()}};
    for (const auto &[name, spec] : specs) {
        for (long j = -3; j <= 3; ++j)
            for (long m = -3; m <= 3; ++m) {
                const GroupElement g{{j}, m};
                const auto res = verify_symplectic_action(spec, g, 50, 1000 + elements, 1e-9);
                worst = std::max(worst, res.max_residual);
                out.require(res.exact_pass, std::string(name) + " exact identity at " + to_string(g));
                out.require(res.pass(), std::string(name) + " numeric pullback at " + to_string(g));
                ++elements;
            }
    }
    out.detail << elements << " (fixture, gamma) pairs x 50 points, max relative residual " << worst;
    return out;
}

Outcome polarization_monodromy() {
    Outcome out;
    int matrices = 0, shifts = 0;
    for (std::size_t n = 1; n <= 6; ++n)
        for (long ell = 1; ell <= 10; ++ell) {
            out.require(verify_polarization(n, ell).pass, "M^T J M != J");
            ++matrices;
        }
    for (long ell = 1; ell <= 10; ++ell) {
        auto spec = models::cubic();
        spec.ell = ell;
        const std::vector<FieldElement> pt{parse_field_element("1/3+i/7"), parse_field_element("1/2-i/5")};
        for (long b = -3; b <= 3; ++b) {
            const auto lo = evaluate_period(spec, pt, b);
            const auto hi = evaluate_period(spec, pt, b + 1);
            out.require((*hi.theta_exact_part)[1][1] - (*lo.theta_exact_part)[1][1] == FieldElement(ell),
                        "branch shift at ell=" + std::to_string(ell));
            ++shifts;
        }
    }
    out.detail << matrices << " monodromies preserve J exactly, " << shifts << " branch shifts equal ell exactly";
    return out;
}

Outcome chart_atlas() {
    Outcome out;
    Rng rng(8);
    double round_trip = 0.0, drift = 0.0, glue = 0.0;
    const auto rel = [](ComplexF a, ComplexF b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); };
    for (int t = 0; t < 100; ++t) {
        ChartPoint p{rng.uniform(-4, 4), std::polar(rng.real(0.4, 2.0), rng.real(0, 6.3)),
                     std::polar(rng.real(0.4, 2.0), rng.real(0, 6.3))};
        for (Direction d : {Direction::Up, Direction::Down}) {
            const auto back = transition(transition(p, d), d == Direction::Up ? Direction::Down : Direction::Up);
            round_trip = std::max({round_trip, rel(back.x, p.x), rel(back.y, p.y)});
        }
        const auto r = omega_glue_residual(p);
        glue = std::max({glue, r.chart, r.transition});
        const auto start = glued_invariants(p);
        for (int hop = 0; hop < 10; ++hop) {
            p = transition(p, rng.uniform(0, 1) ? Direction::Up : Direction::Down);
            const auto now = glued_invariants(p);
            drift = std::max({drift, rel(now.zn, start.zn), rel(now.wn, start.wn)});
        }
    }
    out.require(round_trip <= 1e-11, "round trip");
    out.require(drift <= 1e-11, "invariant drift");
    out.require(glue <= 1e-10, "omega gluing");
    out.detail << "round trip " << round_trip << ", 10-hop drift " << drift << ", omega glue " << glue;
    return out;
}

Outcome lattice_layer() {
    Outcome out;
    const auto t0 = Clock::now();
    Rng rng(9);
    int forms = 0, monodromies = 0;
    for (int t = 0; t < 200; ++t) {
        const auto n = static_cast<std::size_t>(rng.uniform(1, 6));
        const IntMatrix m = lagfib::testing::random_unimodular(2 * n, rng, 16);
        const AntisymForm form(m.transpose() * standard_symplectic_form(n) * m);
        const auto basis = symplectic_basis(form);
        out.require(is_symplectic_basis(form, basis), "symplectic basis, rank " + std::to_string(2 * n));
        out.require(abs(determinant(basis.as_matrix())) == 1, "basis not unimodular");
        ++forms;
    }
    for (int t = 0; t < 100; ++t) {
        const auto n = static_cast<std::size_t>(rng.uniform(1, 5));
        const long ell = rng.uniform(1, 8);
        const IntMatrix s = lagfib::testing::random_symplectic(n, rng);
        const MonodromyOp tau(s * monodromy_matrix(n, ell).matrix() * lagfib::testing::symplectic_inverse(s));
        const auto form = AntisymForm::standard(n);
        const IntMatrix eta = tau.eta();
        out.require(eta * eta == IntMatrix(2 * n, 2 * n), "(tau - I)^2 != 0");
        out.require(check_unipotent(tau).status == UnipotencyStatus::Unipotent, "unipotency check");
        out.require(verify_im_eta_in_radical(tau, form), "Im(eta) not in radical");
        const Sublattice fixed = fixed_sublattice(tau);
        const auto basis = adapted_basis(form, fixed);
        out.require(is_symplectic_basis(form, basis), "adapted basis not symplectic");
        for (std::size_t i = 0; i < n; ++i) {
            out.require(fixed.contains(basis.p[i]), "p_i outside the fixed part");
            if (i + 1 < n)
                out.require(fixed.contains(basis.q[i]), "q_i outside the fixed part");
        }
        out.require(!fixed.contains(basis.q[n - 1]), "q_n inside the fixed part");
        out.require(radical(form, fixed).contains(basis.p[n - 1]), "p_n outside the radical");
        ++monodromies;
    }
    const double secs = seconds_since(t0);
    out.require(secs < 60.0, "over 60 s");
    out.detail << forms << " forms, " << monodromies << " monodromies, " << secs << " s";
    return out;
}

Outcome classifier_oracles() {
    Outcome out;
    Rng rng(10);
    int agreed = 0;
    for (int t = 0; t < 100; ++t) {
        const auto n = static_cast<std::size_t>(rng.uniform(1, 2));
        const auto el = lagfib::testing::random_finite_instance(rng, n, 30);
        const auto exact = order_exact(el);
        const auto brute = lagfib::testing::brute_force_order(el, 30);
        const auto numeric = order_numeric(lagfib::testing::embed_vector(el.v), lagfib::testing::embed_gens(el), 100);
        const bool ok = brute && exact == CycleType::finite(*brute) && numeric.cycle == exact;
        out.require(ok, "instance " + std::to_string(t) + ": exact " + to_string(exact) + ", numeric " +
                            to_string(numeric.cycle));
        agreed += ok;
    }
    out.detail << agreed << "/100 instances agree across exact, brute force and numeric";
    return out;
}

} // namespace

int main() {
    const std::vector<std::pair<const char *, std::function<Outcome()>>> criteria{
        {"construction I orders", construction_one_orders},
        {"construction I dichotomy", construction_one_dichotomy},
        {"construction II constancy", construction_two_constancy},
        {"construction III infinite", construction_three},
        {"Riemann conditions on the domain", riemann_domain},
        {"symplectic action", symplectic_action},
        {"polarization and monodromy", polarization_monodromy},
        {"chart atlas", chart_atlas},
        {"lattice layer", lattice_layer},
        {"classifier oracle equivalence", classifier_oracles},
    };
    const auto t0 = Clock::now();
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception &err) {
            o.pass = false;
            o.detail << "exception: " << err.what();
        }
        failed += !o.pass;
        std::printf("[%s] %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.str().c_str());
        std::fflush(stdout);
    }
    std::printf("%zu/%zu criteria passed in %.2f s\n", criteria.size() - failed, criteria.size(), seconds_since(t0));
    return failed ? 1 : 0;
}
