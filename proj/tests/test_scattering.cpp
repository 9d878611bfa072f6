#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qg/analysis.hpp"
#include "qg/catalog.hpp"
#include "qg/scattering.hpp"

using namespace qg;

namespace {

MetricGraph single_edge() {
    return MetricGraph::make({"a", "b"}, {{"e1", 0, 1, 1.0}}, {});
}

MetricGraph circle(double length) {
    return MetricGraph::make({"v"}, {{"e1", 0, 0, length}}, {});
}

std::vector<MetricGraph> catalog_instances() {
    return {catalog("star", {1.0, 3.0}),
            catalog("interval_Gnn", {1.0, 2.0, 3.0}),
            catalog("Y", {1.0, std::sqrt(2.0)}),
            catalog("circular", {1}, {2.0 * M_PI}),
            catalog("circular", {2}, {2.0 * M_PI}),
            catalog("circular", {1, 1}, {1.0, 2.0}),
            catalog("tetrahedron"),
            catalog("cube"),
            catalog("petersen"),
            catalog("dodecahedron")};
}

} // namespace

TEST_CASE("Neumann edge: U swaps the two directions") {
    BondScattering bs = build_scattering(single_edge(), false);
    CHECK(bs.U.rows() == 2);
    CHECK(bs.U(0, 0) == 0.0);
    CHECK(bs.U(0, 1) == 1.0);
    CHECK(bs.U(1, 0) == 1.0);
    CHECK(bs.U(1, 1) == 0.0);
}

TEST_CASE("bare scattering vertex: R entries 2/N - delta") {
    MetricGraph g = MetricGraph::make({"v"}, {}, {{"v", 4}});
    BondScattering bs = build_scattering(g);
    CHECK(bs.U.rows() == 0);
    CHECK(bs.R.rows() == 4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            CHECK(bs.R(i, j) == doctest::Approx(2.0 / 4.0 - (i == j ? 1.0 : 0.0)));
}

TEST_CASE("Y graph block shapes") {
    BondScattering bs = build_scattering(catalog("Y", {1.0, 2.0}));
    CHECK(bs.U.rows() == 4);
    CHECK(bs.R.rows() == 1);
    CHECK(bs.To.rows() == 1);
    CHECK(bs.To.cols() == 4);
    CHECK(bs.Ti.rows() == 4);
    CHECK(bs.Ti.cols() == 1);
}

TEST_CASE("compact circle: k = 1 is a zero for length 2 pi") {
    SecularFunction sf(circle(2.0 * M_PI), false);
    CHECK(std::abs(sf.evaluate(1.0).f()) < 1e-12);
    CHECK(std::abs(sf.evaluate(2.0).f()) < 1e-12);
    CHECK(std::abs(sf.evaluate(1.5).f()) > 1e-3);
}

TEST_CASE("star graph: closed-form resonance is a zero") {
    SecularFunction sf(catalog("star", {1.0, 3.0}));
    Complex k0(M_PI / 2.0, -0.5 * std::log(2.0));
    CHECK(std::abs(sf.evaluate(k0).f()) < 1e-10);
}

TEST_CASE("reflection symmetry f(-conj k) = conj f(k)") {
    for (const auto& g : {catalog("Y", {1.0, std::sqrt(2.0)}), catalog("tetrahedron")}) {
        SecularFunction sf(g);
        Complex k(2.3, -0.4);
        Complex a = sf.evaluate(-std::conj(k)).f();
        Complex b = std::conj(sf.evaluate(k).f());
        CHECK(std::abs(a - b) <= 1e-12 * std::abs(b));
    }
}

TEST_CASE("unitary defect small on the real axis, large off it") {
    BondScattering bs = build_scattering(catalog("Y", {1.0, std::sqrt(2.0)}));
    CHECK(unitary_defect(bs, 1.7) < 1e-12);
    BondScattering bst = build_scattering(catalog("tetrahedron", {2.0}));
    CHECK(unitary_defect(bst, 0.3) < 1e-12);
    // for contrast: S(k) is not unitary at complex k
    SecularFunction sf(catalog("Y", {1.0, std::sqrt(2.0)}));
    Complex k(1.0, -0.5);
    Eigen::MatrixXcd M = sf.matrix(k);
    Eigen::MatrixXcd UD = Eigen::MatrixXcd::Identity(4, 4) - M;
    double defect = (UD * UD.adjoint() - Eigen::MatrixXcd::Identity(4, 4)).cwiseAbs().maxCoeff();
    CHECK(defect > 0.1);
}

TEST_CASE("unitarity property: 100 random real k across the catalog") {
    Rng rng(42);
    for (const auto& g : catalog_instances()) {
        BondScattering bs = build_scattering(g);
        double worst = 0.0;
        for (int i = 0; i < 100; ++i)
            worst = std::max(worst, unitary_defect(bs, 0.1 + 49.9 * rng.uniform()));
        CHECK(worst < 1e-12);
    }
}

TEST_CASE("derivative matches central finite differences") {
    Rng rng(7);
    for (const auto& g : catalog_instances()) {
        SecularFunction sf(g);
        for (int i = 0; i < 5; ++i) {
            Complex k(0.7 + 5.0 * rng.uniform(), -0.8 + 1.0 * rng.uniform());
            SecularValue v = sf.evaluate(k);
            if (v.fd_fallback) continue;
            double h = 1e-6 * (1.0 + std::abs(k));
            Complex fd = (sf.evaluate(k + h).f() - sf.evaluate(k - h).f()) / (2.0 * h);
            Complex ex = v.f_prime();
            CHECK(std::abs(fd - ex) <= 1e-6 * std::abs(ex));
        }
    }
}

TEST_CASE("splitting an edge at a degree-2 vertex leaves f unchanged") {
    MetricGraph y = catalog("Y", {1.0, std::sqrt(2.0)});
    MetricGraph split = MetricGraph::make(
        {"c", "p", "q", "m"},
        {{"e1a", 0, 3, 0.4}, {"e1b", 3, 1, 0.6}, {"e2", 0, 2, std::sqrt(2.0)}},
        {{"c", 1}});
    SecularFunction sf1(y), sf2(split);
    Rng rng(11);
    for (int i = 0; i < 20; ++i) {
        Complex k(0.5 + 8.0 * rng.uniform(), -0.9 + 1.0 * rng.uniform());
        Complex f1 = sf1.evaluate(k).f();
        Complex f2 = sf2.evaluate(k).f();
        CHECK(std::abs(f1 - f2) <= 1e-12 * std::max(std::abs(f1), 1.0));
    }
}

TEST_CASE("compact zeros on the real axis: circle and Neumann interval") {
    // circle length 2 pi: f(j) = 0; Neumann interval length pi: f(j) = 0
    SecularFunction sc(circle(2.0 * M_PI), false);
    SecularFunction si(MetricGraph::make({"a", "b"}, {{"e1", 0, 1, M_PI}}, {}), false);
    for (int j = 1; j <= 3; ++j) {
        CHECK(std::abs(sc.evaluate(double(j)).f()) < 1e-10);
        CHECK(std::abs(si.evaluate(double(j)).f()) < 1e-10);
    }
}

TEST_CASE("scaled determinant survives deep tau") {
    SecularFunction sf(catalog("dodecahedron"));
    SecularValue v = sf.evaluate(Complex(3.0, -40.0)); // |e^{ikl}| = e^{40} per edge
    CHECK(std::isfinite(v.mantissa.real()));
    CHECK(std::abs(v.mantissa) > 0.0);
    CHECK(v.log2_abs_f() > 1000.0); // the raw determinant would overflow
    CHECK(std::isfinite(v.log_deriv.real()));
}
