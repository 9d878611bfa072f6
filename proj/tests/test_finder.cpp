#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qg/analysis.hpp"
#include "qg/catalog.hpp"
#include "qg/finder.hpp"

using namespace qg;

namespace {

MetricGraph circle(double length) {
    return MetricGraph::make({"v"}, {{"e1", 0, 0, length}}, {});
}

double star_tau(int N) { return -0.5 * std::log((N + 1.0) / (N - 1.0)); }

} // namespace

TEST_CASE("count_zeros: box around the first star resonance") {
    SecularFunction sf(catalog("star", {1.0, 3.0}));
    CHECK(count_zeros(sf, {1.0, 2.2, -0.6, 0.01}) == 1);
}

TEST_CASE("count_zeros: upper half plane is empty") {
    SecularFunction sf(catalog("Y", {1.0, std::sqrt(2.0)}));
    CHECK(count_zeros(sf, {5.0, 6.0, 0.5, 1.0}) == 0);
}

TEST_CASE("count_zeros: double eigenvalue of the compact circle") {
    SecularFunction sf(circle(2.0 * M_PI), false);
    CHECK(count_zeros(sf, {0.8, 1.2, -0.1, 0.1}) == 2);
}

TEST_CASE("count_zeros detects a zero sitting on the boundary") {
    SecularFunction sf(catalog("star", {1.0, 3.0}));
    double tau0 = star_tau(3);
    // right edge passes exactly through the resonance at pi/2 + i tau0
    CHECK_THROWS_AS(count_zeros(sf, {0.5, M_PI / 2.0, tau0 - 0.1, tau0 + 0.1}),
                    BoundaryZeroError);
    // find_resonances jitters itself off the same configuration
    FinderResult res = find_resonances(sf, {0.5, M_PI / 2.0, tau0 - 0.1, tau0 + 0.1});
    CHECK(res.stats.boundary_jitters > 0);
}

TEST_CASE("count_zeros rejects malformed regions") {
    SecularFunction sf(catalog("star", {1.0, 3.0}));
    CHECK_THROWS_AS(count_zeros(sf, {2.0, 1.0, -1.0, 0.0}), ValidationError);
}

TEST_CASE("find_resonances: star graph closed form") {
    SecularFunction sf(catalog("star", {1.0, 3.0}));
    FinderResult res = find_resonances(sf, {0.0, 10.0, -1.0, 1e-6});
    REQUIRE(res.resonances.size() == 3); // sigma = pi/2, 3pi/2, 5pi/2
    for (int j = 0; j < 3; ++j) {
        Complex expect((1 + 2 * j) * M_PI / 2.0, star_tau(3));
        CHECK(std::abs(res.resonances[j].k - expect) < 1e-8);
        CHECK(res.resonances[j].multiplicity == 1);
        CHECK(!res.resonances[j].degraded);
    }
    CHECK(res.total_multiplicity() == res.stats.root_count);
}

TEST_CASE("find_resonances: interval graph closed form") {
    SecularFunction sf(catalog("interval_Gnn", {1.0, 2.0, 3.0}));
    FinderResult res = find_resonances(sf, {0.5, 10.0, -1.5, 1e-6});
    double tau = -0.5 * std::log(6.0);
    REQUIRE(res.resonances.size() == 3); // sigma = pi, 2pi, 3pi
    for (int j = 0; j < 3; ++j)
        CHECK(std::abs(res.resonances[j].k - Complex((j + 1) * M_PI, tau)) < 1e-8);
}

TEST_CASE("find_resonances: C1 real resonances at 2 pi j / L") {
    SecularFunction sf(catalog("circular", {1}, {2.0 * M_PI}));
    FinderResult res = find_resonances(sf, {0.5, 4.5, -1.0, 1e-6});
    // the real branch k = 1,2,3,4 plus the deeper branch at tau = -ln3/(2pi)
    int real_count = 0;
    for (const auto& r : res.resonances) {
        if (std::abs(r.tau()) < 1e-9) {
            ++real_count;
            CHECK(std::abs(r.sigma() - std::round(r.sigma())) < 1e-9);
        } else {
            CHECK(r.tau() == doctest::Approx(-std::log(3.0) / (2.0 * M_PI)).epsilon(1e-6));
        }
    }
    CHECK(real_count == 4);
}

TEST_CASE("find_resonances: compact circle eigenvalues carry multiplicity 2") {
    SecularFunction sf(circle(2.0 * M_PI), false);
    FinderResult res = find_resonances(sf, {0.5, 2.5, -1e-6, 1e-6});
    REQUIRE(res.resonances.size() == 2);
    for (int j = 0; j < 2; ++j) {
        CHECK(std::abs(res.resonances[j].k - Complex(j + 1.0, 0.0)) < 1e-9);
        CHECK(res.resonances[j].multiplicity == 2);
        CHECK(res.resonances[j].degenerate);
    }
    CHECK(res.total_multiplicity() == 4);
}

TEST_CASE("mirror symmetry of the resonance set") {
    SecularFunction sf(catalog("star", {1.0, 3.0}));
    FinderResult pos = find_resonances(sf, {0.5, 8.0, -1.0, 1e-6});
    FinderResult neg = find_resonances(sf, {-8.0, -0.5, -1.0, 1e-6});
    REQUIRE(pos.resonances.size() == neg.resonances.size());
    for (size_t i = 0; i < pos.resonances.size(); ++i) {
        Complex mirrored = -std::conj(neg.resonances[neg.resonances.size() - 1 - i].k);
        CHECK(std::abs(pos.resonances[i].k - mirrored) < 1e-10);
    }
}

TEST_CASE("determinism across runs and thread counts") {
    SecularFunction sf(catalog("Y", {1.0, std::sqrt(2.0)}));
    FinderConfig cfg1;
    cfg1.threads = 1;
    FinderConfig cfg4;
    cfg4.threads = 4;
    FinderResult a = find_resonances(sf, {0.001, 60.0, -0.5, 1e-6}, cfg1);
    FinderResult b = find_resonances(sf, {0.001, 60.0, -0.5, 1e-6}, cfg1);
    FinderResult c = find_resonances(sf, {0.001, 60.0, -0.5, 1e-6}, cfg4);
    REQUIRE(a.resonances.size() == b.resonances.size());
    REQUIRE(a.resonances.size() == c.resonances.size());
    for (size_t i = 0; i < a.resonances.size(); ++i) {
        CHECK(a.resonances[i].k == b.resonances[i].k); // bitwise identical
        CHECK(a.resonances[i].k == c.resonances[i].k);
    }
    CHECK(a.stats.root_count == c.stats.root_count);
}

TEST_CASE("subdivision bookkeeping: additive counts, multiplicity = winding") {
    SecularFunction sf(catalog("interval_Gnn", {1.0, 2.0, 2.0}));
    FinderResult res = find_resonances(sf, {0.5, 30.0, -1.5, 1e-6});
    CHECK(res.total_multiplicity() == res.stats.root_count);
    CHECK(res.stats.root_count == 9); // sigma = pi .. 9pi
    CHECK(res.stats.subdivisions > 0);
}

TEST_CASE("extract_state: star resonance radiates into the leads") {
    SecularFunction sf(catalog("star", {1.0, 3.0}));
    Complex k0(M_PI / 2.0, star_tau(3));
    ResonantState st = extract_state(sf, k0);
    CHECK(st.lead_normalized);
    CHECK(st.t_norm2() == doctest::Approx(1.0));
    CHECK(st.smallest_sv < 1e-8);
    CHECK(st.second_sv > 1e-3);
    CHECK(!st.degenerate);
    // residual ||M c|| is at the singular-value level
    Eigen::VectorXcd r = sf.matrix(k0) * st.bond_vector;
    CHECK(r.norm() <= 1e-8 * st.bond_vector.norm());
}

TEST_CASE("extract_state: embedded eigenstate of C11 has no outgoing flux") {
    MetricGraph g = catalog("circular", {1, 1}, {2.0 * M_PI, 2.0 * M_PI});
    SecularFunction sf(g);
    ResonantState st = extract_state(sf, Complex(1.0, 0.0));
    CHECK(!st.lead_normalized);
    CHECK(std::sqrt(st.t_norm2()) < 1e-8);
    CHECK(std::sqrt(st.ab_norm2()) == doctest::Approx(1.0));
}

TEST_CASE("extract_state rejects points away from zeros") {
    SecularFunction sf(catalog("star", {1.0, 3.0}));
    CHECK_THROWS_AS(extract_state(sf, Complex(1.0, -0.1)), NumericError);
}

TEST_CASE("star with N = 1: transparent center, no resonances at all") {
    SecularFunction sf(catalog("star", {1.0, 1.0}));
    CHECK(std::abs(sf.evaluate(Complex(2.0, -0.3)).f() - 1.0) < 1e-14);
    CHECK(count_zeros(sf, {0.5, 20.0, -2.0, 1e-6}) == 0);
}

TEST_CASE("dodecahedron: 4-fold embedded eigenvalue at acos(1/3)") {
    // unit lengths: compact eigenfunctions at k with 3 cos k = adjacency
    // eigenvalue; eigenvalue 1 has multiplicity 5, and the 4-dimensional
    // subspace vanishing at the lead vertex stays on the real axis
    double k0 = std::acos(1.0 / 3.0);
    SecularFunction sf(catalog("dodecahedron"));
    FinderResult res = find_resonances(sf, {k0 - 0.006, k0 + 0.006, -0.02, 1e-6});
    REQUIRE(res.resonances.size() == 1);
    const Resonance& r = res.resonances.front();
    CHECK(std::abs(r.k - Complex(k0, 0.0)) < 1e-8);
    CHECK(r.multiplicity == 4);
    CHECK(r.degenerate);
    ResonantState st = extract_state(sf, r.k, r.multiplicity);
    CHECK(std::sqrt(st.t_norm2()) < 1e-8); // compactly supported
}

TEST_CASE("no spurious roots: count matches the closed form over a window") {
    SecularFunction sf(catalog("star", {1.0, 5.0}));
    FinderResult res = find_resonances(sf, {0.0, 25.0, -1.0, 1e-6});
    int expect = 0;
    for (int j = 0;; ++j) {
        if ((1 + 2 * j) * M_PI / 2.0 > 25.0) break;
        ++expect;
    }
    CHECK(static_cast<int>(res.resonances.size()) == expect);
}
