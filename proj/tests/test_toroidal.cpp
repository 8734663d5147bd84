#include "lagfib/models.hpp"
#include "lagfib/toroidal.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <numbers>

using namespace lagfib;
using lagfib::testing::Rng;

namespace {

FieldElement fe(const char *text) { return parse_field_element(text); }

double rel(ComplexF a, ComplexF b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

ChartPoint random_chart_point(Rng &rng) {
    return {rng.uniform(-4, 4), std::polar(rng.real(0.4, 2.0), rng.real(0, 6.3)),
            std::polar(rng.real(0.4, 2.0), rng.real(0, 6.3))};
}

ErrorCode code_of(const auto &fn) {
    try {
        fn();
    } catch (const Error &err) {
        return err.code();
    }
    ADD_FAILURE() << "expected an error";
    return ErrorCode::InvalidArgument;
}

// The spec with theta_12 replaced by 2 z1 + z2 (theta_21 untouched).
PotentialSpec corrupted_cubic() {
    auto spec = models::cubic();
    auto theta = hessian(spec.psi);
    theta[0][1] = FieldElement(2) * Polynomial::variable(2, 0) + Polynomial::variable(2, 1);
    spec.theta_override = theta;
    return spec;
}

} // namespace

TEST(Transition, Examples) {
    const auto a = transition({0, 1.0, 1.0}, Direction::Up);
    EXPECT_EQ(a.k, 1);
    EXPECT_EQ(a.x, ComplexF(1.0));
    EXPECT_EQ(a.y, ComplexF(1.0));

    const auto b = transition({0, 2.0, 3.0}, Direction::Up);
    EXPECT_EQ(b.k, 1);
    EXPECT_EQ(b.x, ComplexF(12.0));
    EXPECT_EQ(b.y, ComplexF(0.5));

    EXPECT_EQ(code_of([] { transition({0, 0.0, 1.0}, Direction::Up); }), ErrorCode::OnAxis);
    EXPECT_EQ(code_of([] { transition({3, 1.0, 0.0}, Direction::Down); }), ErrorCode::OnAxis);
}

TEST(Transition, RoundTrip) {
    Rng rng(81);
    for (int t = 0; t < 100; ++t) {
        const auto p = random_chart_point(rng);
        const auto ud = transition(transition(p, Direction::Up), Direction::Down);
        const auto du = transition(transition(p, Direction::Down), Direction::Up);
        EXPECT_EQ(ud.k, p.k);
        EXPECT_EQ(du.k, p.k);
        EXPECT_LE(rel(ud.x, p.x), 1e-12);
        EXPECT_LE(rel(ud.y, p.y), 1e-12);
        EXPECT_LE(rel(du.x, p.x), 1e-12);
        EXPECT_LE(rel(du.y, p.y), 1e-12);
    }
}

TEST(GluedInvariants, Examples) {
    const auto g0 = glued_invariants({0, 2.0, 3.0});
    EXPECT_EQ(g0.zn, ComplexF(6.0));
    EXPECT_EQ(g0.wn, ComplexF(2.0));
    const auto g1 = glued_invariants({1, 12.0, 0.5});
    EXPECT_EQ(g1.zn, ComplexF(6.0));
    EXPECT_EQ(g1.wn, ComplexF(2.0));
    EXPECT_EQ(glued_zn({0, 0.0, 4.0}), ComplexF(0.0));
    EXPECT_EQ(code_of([] { glued_wn({0, 0.0, 4.0}); }), ErrorCode::OnAxis);
}

TEST(GluedInvariants, ConstantAlongChartPaths) {
    Rng rng(83);
    for (int t = 0; t < 100; ++t) {
        auto p = random_chart_point(rng);
        const auto start = glued_invariants(p);
        for (int hop = 0; hop < 10; ++hop) {
            p = transition(p, rng.uniform(0, 1) ? Direction::Up : Direction::Down);
            const auto now = glued_invariants(p);
            EXPECT_LE(rel(now.zn, start.zn), 1e-11);
            EXPECT_LE(rel(now.wn, start.wn), 1e-11);
        }
    }
}

TEST(OmegaGlue, DeterminantsAreOne) {
    Rng rng(89);
    for (int t = 0; t < 100; ++t) {
        const auto r = omega_glue_residual(random_chart_point(rng));
        EXPECT_LE(r.chart, 1e-10);
        EXPECT_LE(r.transition, 1e-10);
        EXPECT_LE(r.finite_difference, 1e-6);
    }
}

TEST(Action, IdentityAndExamples) {
    const auto spec = models::constant_twist(5);
    const TotalPoint p{{ComplexF(0.25)}, {ComplexF(0.7, 0.2)}, {2, ComplexF(0.5, 0.1), ComplexF(0.3, -0.4)}};
    const auto same = action(spec, {{0}, 0}, p);
    EXPECT_EQ(same.w, p.w);
    EXPECT_EQ(same.chart.k, p.chart.k);
    EXPECT_EQ(same.chart.x, p.chart.x);

    // gamma = (1, 0): w1 picks up exp(2 pi i * i), the chart picks up exp(2 pi i / k0)
    const auto q = action(spec, {{1}, 0}, p);
    EXPECT_LE(rel(q.w[0], std::exp(-2.0 * std::numbers::pi) * p.w[0]), 1e-14);
    const ComplexF lam = std::exp(ComplexF(0, 2.0 * std::numbers::pi / 5.0));
    EXPECT_LE(rel(q.chart.x, lam * p.chart.x), 1e-14);
    EXPECT_LE(rel(q.chart.y, p.chart.y / lam), 1e-14);
    EXPECT_EQ(q.chart.k, p.chart.k);
    EXPECT_EQ(q.z, p.z);

    const auto r = action(spec, {{0}, 2}, p);
    EXPECT_EQ(r.chart.k, p.chart.k - 2);
}

TEST(Action, GroupLaw) {
    for (const auto &spec : {models::cubic(), models::constant_twist(3), models::irrational_twist()}) {
        std::mt19937_64 rng(97);
        for (int t = 0; t < 50; ++t) {
            const auto p = random_total_point(spec, rng);
            const GroupElement e1{{1}, 0}, e2{{0}, 1};
            const auto composed = action(spec, e1, action(spec, e2, p));
            const auto direct = action(spec, e1 + e2, p);
            EXPECT_EQ(composed.chart.k, direct.chart.k);
            EXPECT_LE(total_point_distance(direct, composed), 1e-10);
        }
    }
}

TEST(Action, ProducesInvariantsConsistentWithGluing) {
    // w_n after the action equals exp(2 pi i f_n) z_n^(m l) w_n
    auto spec = models::cubic();
    spec.ell = 2;
    std::mt19937_64 rng(5);
    for (int t = 0; t < 20; ++t) {
        const auto p = random_total_point(spec, rng);
        const GroupElement g{{1}, 1};
        const auto q = action(spec, g, p);
        const auto f = action_exponents(hessian(spec.psi), g);
        const std::vector<ComplexF> z{p.z[0], glued_zn(p.chart)};
        const ComplexF lam = std::exp(ComplexF(0, 2 * std::numbers::pi) * CompiledPolynomial(f[1])(z));
        EXPECT_LE(rel(glued_wn(q.chart), lam * z[1] * z[1] * glued_wn(p.chart)), 1e-11);
        EXPECT_LE(rel(glued_zn(q.chart), z[1]), 1e-12);
    }
}

TEST(SymplecticAction, ExactPassForHessians) {
    for (const auto &spec : {models::cubic(), models::constant_twist(4), models::irrational_twist()}) {
        for (long j = -2; j <= 2; ++j)
            for (long m = -2; m <= 2; ++m) {
                const auto res = verify_symplectic_action(spec, {{j}, m}, 5, 11);
                EXPECT_TRUE(res.exact_pass);
                EXPECT_LE(res.max_residual, 1e-9) << j << "," << m;
                EXPECT_LE(res.max_fd_deviation, 1e-5) << j << "," << m;
            }
    }
    EXPECT_TRUE(verify_symplectic_action(models::cubic(), {{0}, 0}).pass());
}

TEST(SymplecticAction, DetectsNonHessianMatrix) {
    const auto res = verify_symplectic_action(corrupted_cubic(), {{1}, 0}, 10, 3);
    EXPECT_FALSE(res.exact_pass);
    ASSERT_TRUE(res.exact_witness.has_value());
    EXPECT_EQ(*res.exact_witness, std::make_pair(std::size_t{0}, std::size_t{1}));
    EXPECT_GT(res.max_residual, 1e-3);
    EXPECT_FALSE(res.pass());
}

TEST(Polarization, Examples) {
    EXPECT_TRUE(verify_polarization(2, 1).pass);
    EXPECT_TRUE(verify_polarization(1, 0).pass);
    for (std::size_t n = 1; n <= 6; ++n)
        for (long ell = 1; ell <= 10; ++ell)
            EXPECT_TRUE(verify_polarization(n, ell).pass);
    IntMatrix wrong = IntMatrix::identity(4);
    wrong(2, 3) = 2; // q_2 -> q_2 + 2 q_1
    EXPECT_FALSE(check_polarization_matrix(wrong).pass);
}

TEST(SingularFiber, Examples) {
    const auto two = singular_fiber(models::constant_twist(4), {fe("1/3"), FieldElement(0)});
    EXPECT_EQ(two.components, 1);
    EXPECT_EQ(two.twist[0], fe("1/4"));
    EXPECT_LE(std::abs(two.twist_multiplicative[0] - std::exp(ComplexF(0, std::numbers::pi / 2))), 1e-15);
    EXPECT_EQ(two.classification.cycle, CycleType::finite(4));
    ASSERT_EQ(two.dual_graph_edges.size(), 1u);
    EXPECT_EQ(two.dual_graph_edges[0], std::make_pair(std::size_t{0}, std::size_t{0}));
    EXPECT_TRUE(two.double_curves_distinct());

    const auto one = singular_fiber(models::cubic(), {fe("1/3"), FieldElement(0)});
    EXPECT_EQ(one.classification.cycle, CycleType::finite(3));

    const auto three = singular_fiber(models::irrational_twist(), {FieldElement(0), FieldElement(0)});
    EXPECT_EQ(three.classification.cycle, CycleType::infinite());

    auto spec = models::constant_twist(2);
    spec.ell = 3;
    const auto chain = singular_fiber(spec, {FieldElement(0), FieldElement(0)});
    EXPECT_EQ(chain.components, 3);
    EXPECT_EQ(chain.dual_graph_edges.size(), 3u);
    EXPECT_TRUE(chain.classification.extrapolated);
    EXPECT_EQ(chain.classification.cycle, CycleType::finite(6));
    EXPECT_TRUE(chain.double_curves_distinct());
    for (const auto &dc : chain.double_curves)
        EXPECT_EQ(chain.double_curves[dc.glued_to].glued_to, dc.id);

    EXPECT_EQ(code_of([] { singular_fiber(models::cubic(), {FieldElement(0), fe("1/2")}); }),
              ErrorCode::NotOnDiscriminant);
}
