#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "finsler/metric.hpp"
#include "finsler/oracle.hpp"
#include "finsler/presets.hpp"

using namespace finsler;

TEST_CASE("metric tensor on the flat fixture is the identity") {
    MetricSpec m = presets::euclidean(2);
    MetricValue v = metric_tensor(m, PhasePoint({0.1, -0.2}, {0.7, 1.1}));
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            CHECK(v.g(i, j) == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-14));
    CHECK(v.det == doctest::Approx(1.0));
    CHECK(v.cond == doctest::Approx(1.0));
}

TEST_CASE("conformal metric tensor scales by e^{2 x1}") {
    MetricSpec m = presets::conformal(2);
    PhasePoint p({0.5, 0.0}, {1.0, 2.0});
    MetricValue v = metric_tensor(m, p);
    double e = std::exp(1.0);
    CHECK(v.g(0, 0) == doctest::Approx(e).epsilon(1e-12));
    CHECK(v.g(1, 1) == doctest::Approx(e).epsilon(1e-12));
    CHECK(std::abs(v.g(0, 1)) < 1e-12);
    CHECK(v.g_inv(0, 0) == doctest::Approx(1.0 / e).epsilon(1e-12));
}

TEST_CASE("funk metric tensor matches the finite-difference Hessian") {
    MetricSpec m = presets::funk(2);
    for (const PhasePoint& p :
         {PhasePoint({0.0, 0.0}, {1.0, 0.0}), PhasePoint({0.15, -0.1}, {0.8, 0.5})}) {
        MetricValue v = metric_tensor(m, p);
        for (int i = 1; i <= 2; ++i)
            for (int j = 1; j <= 2; ++j) {
                double fd = oracle::fd_partial2(m.L, p, y_var(i), y_var(j), 1e-4);
                CHECK(v.g(i - 1, j - 1) == doctest::Approx(fd).epsilon(1e-6));
            }
        CHECK(v.inverse_residual <= 1e-10);
    }
}

TEST_CASE("degenerate energy raises the singular-metric error") {
    Domain d = Domain::box(2, -0.3, 0.3);
    Expr L = 0.5 * pow(Expr::variable(y_var(1), 2), 2.0);  // rank 1
    MetricSpec m = make_metric_from_L("degenerate", L, d, false);
    CHECK_THROWS_AS(metric_tensor(m, PhasePoint({0, 0}, {1, 1})), SingularMetricError);
    CHECK_THROWS_AS(make_metric_from_L("degenerate", L, d, true),
                    SingularMetricError);
}

TEST_CASE("flat and x-independent metrics have vanishing spray") {
    SpraySpec euc = geodesic_spray(presets::euclidean(2));
    for (int i = 0; i < 2; ++i) CHECK(euc.G(i).is_zero());

    SpraySpec rand = geodesic_spray(presets::randers_const(3));
    for (int i = 0; i < 3; ++i) CHECK(rand.G(i).is_zero());
}

TEST_CASE("conformal geodesic spray matches the Christoffel oracle") {
    for (int n : {2, 3}) {
        MetricSpec m = presets::conformal(n);
        SpraySpec s = geodesic_spray(m);
        std::vector<double> gamma = oracle::conformal_x1_christoffel(n);
        auto pts = sample_points(m.domain, 50);
        for (const PhasePoint& p : pts) {
            std::vector<double> expect = oracle::christoffel_spray(gamma, p);
            std::vector<double> got = eval_all(s.coeffs, p);
            for (int i = 0; i < n; ++i)
                CHECK(normalized_residual(got[i] - expect[i], expect[i]) <= 1e-8);
        }
        // generic finite-difference pipeline as a second, fully blind oracle
        auto coeffs = [n](const std::vector<double>& x) {
            Mat a(n);
            for (int i = 0; i < n; ++i) a(i, i) = std::exp(2.0 * x[0]);
            return a;
        };
        PhasePoint p = pts[0];
        std::vector<double> fd = oracle::riemannian_spray(coeffs, p);
        std::vector<double> got = eval_all(s.coeffs, p);
        for (int i = 0; i < n; ++i)
            CHECK(normalized_residual(got[i] - fd[i], fd[i]) <= 1e-5);
    }
}

TEST_CASE("defining-equation residual vanishes for every preset spray") {
    for (int n : {2, 3}) {
        std::vector<std::pair<MetricSpec, SpraySpec>> fixtures;
        MetricSpec euc = presets::euclidean(n);
        fixtures.emplace_back(euc, geodesic_spray(euc));
        MetricSpec rc = presets::randers_const(n);
        fixtures.emplace_back(rc, geodesic_spray(rc));
        MetricSpec conf = presets::conformal(n);
        fixtures.emplace_back(conf, geodesic_spray(conf));
        MetricSpec fk = presets::funk(n);
        fixtures.emplace_back(fk, presets::funk_spray(fk));
        MetricSpec pr = presets::perturbed_randers(n);
        fixtures.emplace_back(pr, geodesic_spray(pr));
        for (auto& [m, s] : fixtures) {
            auto pts = sample_points(m.domain, 50);
            CHECK(defining_equation_residual(m, s, pts) <= 1e-9);
        }
    }
}

TEST_CASE("dynamical covariant derivative of the metric tensor vanishes") {
    for (int n : {2, 3}) {
        MetricSpec conf = presets::conformal(n);
        auto pts = sample_points(conf.domain, 30);
        CHECK(metric_compatibility_residual(conf, geodesic_spray(conf), pts) <= 1e-9);

        MetricSpec fk = presets::funk(n);
        auto fpts = sample_points(fk.domain, 30);
        CHECK(metric_compatibility_residual(fk, presets::funk_spray(fk), fpts) <=
              1e-9);
    }
}

TEST_CASE("symplectic pairing") {
    MetricSpec euc = presets::euclidean(2);
    SpraySpec s = geodesic_spray(euc);
    PhasePoint p({0.1, 0.2}, {1.0, -0.4});

    std::vector<double> dy1 = {0, 0, 1, 0};
    std::vector<double> dx1 = {1, 0, 0, 0};
    std::vector<double> dx2 = {0, 1, 0, 0};
    CHECK(symplectic_value(euc, s, dy1, dx1, p) == doctest::Approx(1.0));
    CHECK(symplectic_value(euc, s, dy1, dx2, p) == doctest::Approx(0.0));

    // antisymmetry: omega(G, G) = 0
    std::vector<double> Gv = eval_all(spray_vector_components(s), p);
    CHECK(std::abs(symplectic_value(euc, s, Gv, Gv, p)) < 1e-14);
}

TEST_CASE("contraction of the symplectic form with the spray gives -dL") {
    for (auto make : {+[] { return presets::conformal(2); },
                      +[] { return presets::funk(2); }}) {
        MetricSpec m = make();
        SpraySpec s = m.name.find("funk") == 0 ? presets::funk_spray(m)
                                               : geodesic_spray(m);
        auto pts = sample_points(m.domain, 20);
        for (const PhasePoint& p : pts) {
            std::vector<double> Gv = eval_all(spray_vector_components(s), p);
            for (int a = 0; a < 4; ++a) {
                std::vector<double> basis(4, 0.0);
                basis[a] = 1.0;
                double lhs = symplectic_value(m, s, Gv, basis, p);
                Expr dl = a < 2 ? m.L.dx(a + 1) : m.L.dy(a - 1);
                double rhs = -dl.eval(p);
                CHECK(normalized_residual(lhs - rhs, rhs) <= 1e-9);
            }
        }
    }
}
