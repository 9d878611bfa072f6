#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qg/analysis.hpp"
#include "qg/catalog.hpp"

using namespace qg;

namespace {

double star_tau(int N) { return -0.5 * std::log((N + 1.0) / (N - 1.0)); }

MetricGraph circle(double length) {
    return MetricGraph::make({"v"}, {{"e1", 0, 0, length}}, {});
}

} // namespace

TEST_CASE("energy identity at the star resonance") {
    SecularFunction sf(catalog("star", {1.0, 3.0}));
    Complex k0(M_PI / 2.0, star_tau(3));
    ResonantState st = extract_state(sf, k0);
    CHECK(energy_residual(sf, k0, st) < 1e-8);
    // with sum |t|^2 = 1 the state energy is 1/(2|tau|)
    CHECK(state_norm2(sf, k0, st) ==
          doctest::Approx(1.0 / (2.0 * std::abs(k0.imag()))).epsilon(1e-8));
}

TEST_CASE("energy identity rejects sigma = 0 and accepts the embedded limit") {
    SecularFunction sf(catalog("circular", {1, 1}, {2.0 * M_PI, 2.0 * M_PI}));
    ResonantState st = extract_state(sf, Complex(1.0, 0.0));
    CHECK(energy_residual(sf, Complex(1.0, 0.0), st) == 0.0); // both sides vanish
    CHECK_THROWS_AS(energy_residual(sf, Complex(0.0, -0.5), st), ValidationError);
}

TEST_CASE("edge_norm2 agrees with quadrature") {
    Complex a(0.3, -0.7), b(1.1, 0.2), k(2.0, -0.35);
    double l = 1.7;
    int n = 20000;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        double x = (i + 0.5) * l / n;
        acc += std::norm(a * std::exp(Complex(0, 1) * k * x) +
                         b * std::exp(-Complex(0, 1) * k * x));
    }
    acc *= l / n;
    CHECK(edge_norm2(a, b, k, l) == doctest::Approx(acc).epsilon(1e-6));
}

TEST_CASE("energy identity across other catalog graphs") {
    for (const auto& g : {catalog("tetrahedron"), catalog("circular", {1, 1}, {1.0, 2.0})}) {
        SecularFunction sf(g);
        FinderResult res = find_resonances(sf, {0.5, 6.0, -0.8, 1e-6});
        REQUIRE(!res.resonances.empty());
        for (const auto& r : res.resonances) {
            if (std::abs(r.sigma()) <= 0.1 || r.degraded) continue;
            ResonantState st = extract_state(sf, r.k, r.multiplicity);
            CHECK(energy_residual(sf, r.k, st) < 1e-8);
        }
    }
}

TEST_CASE("star Weyl slope and the saturated N(eps) plateau") {
    SecularFunction sf(catalog("star", {1.0, 3.0}));
    FinderResult res = resonances_in_strip(sf, 100.0, -1.0);
    WeylFit fit = weyl_fit(res.resonances, 100.0, 1.0);
    CHECK(std::abs(fit.slope - 1.0 / M_PI) / (1.0 / M_PI) < 0.02);
    // eps beyond the band depth captures every resonance: the per-unit count
    // equals the total density
    double nhat = 0.0;
    for (const auto& r : res.resonances)
        if (r.tau() >= -0.9) nhat += r.multiplicity;
    nhat /= 100.0;
    CHECK(std::abs(nhat - fit.slope) / fit.slope < 0.05);
}

TEST_CASE("weyl_fit recovers the interval density 1/pi") {
    SecularFunction sf(catalog("interval_Gnn", {1.0, 2.0, 3.0}));
    FinderResult res = resonances_in_strip(sf, 100.0, -1.5);
    WeylFit fit = weyl_fit(res.resonances, 100.0, 1.0);
    CHECK(std::abs(fit.slope - 1.0 / M_PI) / (1.0 / M_PI) < 0.02);
    CHECK(fit.l_over_pi == doctest::Approx(1.0 / M_PI));
    CHECK_THROWS_AS(weyl_fit({}, 100.0, 1.0), ValidationError);
}

TEST_CASE("estimate_h: star and interval closed forms") {
    HEstimate h1 = estimate_h(catalog("star", {1.0, 3.0}), 5, 12.0, 99);
    CHECK(std::abs(h1.h_hat - 0.5 * std::log(2.0)) < 1e-9);
    CHECK(h1.spread < 1e-9);
    HEstimate h2 = estimate_h(catalog("interval_Gnn", {1.0, 2.0, 3.0}), 5, 12.0, 99);
    CHECK(std::abs(h2.h_hat - 0.5 * std::log(6.0)) < 1e-9);
}

TEST_CASE("vanishing dimensions on the dodecahedron eigenspace") {
    double k0 = std::acos(1.0 / 3.0);
    VanishingTest vt = vanishing_eigenfunction_test(catalog("dodecahedron"), k0);
    CHECK(vt.eigen_dim == 5);
    CHECK(vt.vanishing_dim == 4);
}

TEST_CASE("estimate_h on a two-edge caterpillar tree") {
    MetricGraph cat3 = MetricGraph::make(
        {"a", "b", "c"}, {{"e1", 0, 1, 1.0}, {"e2", 1, 2, 1.0}},
        {{"a", 2}, {"b", 1}, {"c", 2}});
    CHECK(compute_invariants(cat3).graph_type == GraphType::TypeI);
    HEstimate h = estimate_h(cat3, 8, 15.0, 5);
    CHECK(h.h_hat > 0.0);
    CHECK(h.h_hat < 2.0);
    CHECK(h.per_sample.size() == 8);
}

TEST_CASE("estimate_h: rejects type II, +inf for an all-lead star") {
    CHECK_THROWS_AS(estimate_h(catalog("Y", {1.0, 2.0}), 2, 10.0, 1), ValidationError);
    MetricGraph bare = MetricGraph::make({"v"}, {}, {{"v", 5}});
    HEstimate h = estimate_h(bare, 3, 10.0, 1);
    CHECK(std::isinf(h.h_hat));
}

TEST_CASE("compact spectrum: circle, Neumann interval, tetrahedron") {
    auto eig_c = compact_eigenvalues(circle(2.0 * M_PI), 2.5);
    REQUIRE(eig_c.size() == 2);
    CHECK(eig_c[0].first == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(eig_c[0].second == 2);
    CHECK(eig_c[1].first == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(eig_c[1].second == 2);

    auto eig_i =
        compact_eigenvalues(MetricGraph::make({"a", "b"}, {{"e1", 0, 1, M_PI}}, {}), 3.5);
    REQUIRE(eig_i.size() == 3);
    for (int j = 0; j < 3; ++j) {
        CHECK(eig_i[j].first == doctest::Approx(j + 1.0).epsilon(1e-9));
        CHECK(eig_i[j].second == 1);
    }

    auto eig_t = compact_eigenvalues(catalog("tetrahedron", {1.0}, {2.0 * M_PI}), 1.5);
    bool has_one = false;
    for (auto& [k, m] : eig_t)
        if (std::abs(k - 1.0) < 1e-8 && m >= 1) has_one = true;
    CHECK(has_one);
}

TEST_CASE("vanishing eigenfunction test on C11") {
    // commensurate lengths (2pi, 2pi): eigenvalue 1 with a sine witness
    MetricGraph g = catalog("circular", {1, 1}, {2.0 * M_PI, 2.0 * M_PI});
    VanishingTest vt = vanishing_eigenfunction_test(g, 1.0);
    CHECK(vt.eigen_dim == 2);
    CHECK(vt.vanishing_dim == 1);
    REQUIRE(vt.witness.size() == 4);

    // lengths (pi, pi): torus point (-1, -1)
    MetricGraph g2 = catalog("circular", {1, 1}, {M_PI, M_PI});
    VanishingTest vt2 = vanishing_eigenfunction_test(g2, 1.0);
    CHECK(vt2.vanishing_dim == 1);

    // incommensurate: no eigenvalue at all near k = 1
    MetricGraph g3 = catalog("circular", {1, 1}, {2.0 * M_PI, 2.0 * M_PI * std::sqrt(2.0)});
    VanishingTest vt3 = vanishing_eigenfunction_test(g3, 1.0);
    CHECK(vt3.eigen_dim == 0);
    CHECK(vt3.vanishing_dim == 0);
}

TEST_CASE("W-points of the Y graph: all four (+-i, +-i)") {
    MetricGraph g = catalog("Y", {1.0, std::sqrt(2.0)});
    auto pts = find_w_points(g);
    REQUIRE(pts.size() == 4);
    for (const auto& p : pts) {
        for (double a : p) {
            double d = std::min(std::abs(a - M_PI / 2.0), std::abs(a - 3.0 * M_PI / 2.0));
            CHECK(d < 1e-9);
        }
        VanishingTest vt = vanishing_at_torus_point(g, {p[0], p[1]});
        CHECK(vt.vanishing_dim == 1);
    }
}

TEST_CASE("W-points of C11: exactly (1,1) and (-1,-1)") {
    MetricGraph g = catalog("circular", {1, 1}, {1.0, 2.0});
    auto pts = find_w_points(g);
    REQUIRE(pts.size() == 2);
    CHECK(std::abs(pts[0][0] - 0.0) < 1e-9);
    CHECK(std::abs(pts[0][1] - 0.0) < 1e-9);
    CHECK(std::abs(pts[1][0] - M_PI) < 1e-9);
    CHECK(std::abs(pts[1][1] - M_PI) < 1e-9);
}

TEST_CASE("branch trace at (i, i): flat tangent, symmetric weights") {
    MetricGraph g = catalog("Y", {1.0, 1.0});
    BranchTrace tr = branch_trace(g, {M_PI / 2.0, M_PI / 2.0}, 0.1, 100);
    CHECK(std::abs(tr.dtau_du0) < 1e-6);
    CHECK(tr.m_weight[0] / tr.m_weight[1] == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(tr.c_fit > 0.0);
    for (double t : tr.tau) CHECK(t <= 1e-12);
    // the quadratic coefficient observed by the independent expansion 1/(l+L)
    CHECK(tr.c_fit == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("branch trace rejects non-W base points") {
    MetricGraph g = catalog("Y", {1.0, 1.0});
    CHECK_THROWS_AS(branch_trace(g, {0.3, 0.4}, 0.1, 50), ValidationError);
}

TEST_CASE("N(eps) curve is monotone and the Y exponent is near 1/2") {
    MetricGraph g = catalog("Y", {1.0, std::sqrt(2.0)});
    std::vector<double> eps{5e-3, 1e-2, 2e-2, 4e-2, 8e-2};
    CountingReport rep = n_eps_curve(g, 400.0, eps);
    for (size_t i = 1; i < rep.eps_curve.size(); ++i)
        CHECK(rep.eps_curve[i].second >= rep.eps_curve[i - 1].second);
    CHECK(rep.d_hat / 2.0 == doctest::Approx(0.5).epsilon(0.35)); // small-K smoke test
}

TEST_CASE("n_eps reports insufficient counts instead of fixing them") {
    MetricGraph g = catalog("Y", {1.0, std::sqrt(2.0)});
    CHECK_THROWS_AS(n_eps_curve(g, 6.0, {1e-4, 2e-4}), ValidationError);
}

TEST_CASE("invariants unchanged by vertex and edge relabeling") {
    MetricGraph g = catalog("Y", {1.0, 2.0});
    GraphInvariants a = compute_invariants(g);
    // reversed vertex order and swapped edge order
    MetricGraph perm = MetricGraph::make(
        {"q", "p", "c"}, {{"e2", 2, 0, 2.0}, {"e1", 2, 1, 1.0}}, {{"c", 1}});
    GraphInvariants b = compute_invariants(perm);
    CHECK(a.graph_type == b.graph_type);
    CHECK(a.g == b.g);
    CHECK(a.v0_size == b.v0_size);
    CHECK(a.total_length == doctest::Approx(b.total_length));
}

TEST_CASE("barra_gaspard_counts matches the closed-form branch integral") {
    // straight synthetic branch: beta'(u) = -1, tau = -c u^2, density l+L
    BranchTrace tr;
    tr.alpha0 = {M_PI / 2, M_PI / 2};
    double c = 0.5, l = 1.0, L = 1.0;
    for (int i = -200; i <= 200; ++i) {
        double u = i * 1e-3;
        tr.u.push_back(u);
        tr.beta.push_back(M_PI / 2 - u);
        tr.tau.push_back(-c * u * u);
    }
    std::vector<double> eps{1e-3, 4e-3, 1e-2};
    auto counts = barra_gaspard_counts({tr}, {l, L}, eps);
    for (size_t i = 0; i < eps.size(); ++i) {
        double expect = (l + L) * 2.0 * std::sqrt(eps[i] / c) / (4.0 * M_PI * M_PI);
        CHECK(counts[i] == doctest::Approx(expect).epsilon(1e-4));
    }
}

TEST_CASE("deterministic rng") {
    Rng a(7), b(7);
    for (int i = 0; i < 10; ++i) CHECK(a.uniform() == b.uniform());
    Rng c(8);
    CHECK(c.uniform() != Rng(7).uniform());
}
