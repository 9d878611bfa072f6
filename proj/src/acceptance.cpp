#include "qg/acceptance.hpp"

#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>
#include <sstream>

#include "qg/analysis.hpp"
#include "qg/catalog.hpp"
#include "qg/secular_poly.hpp"

namespace qg {

namespace {

using Clock = std::chrono::steady_clock;

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

double wrap_pm_pi(double a) {
    a = std::fmod(a + M_PI, 2.0 * M_PI);
    if (a < 0) a += 2.0 * M_PI;
    return a - M_PI;
}

struct Suite {
    int threads;
    std::vector<CriterionResult> results;
    std::ostream* progress;

    // shared expensive artifacts
    std::vector<FinderResult> star_runs; // N = 2, 3, 5
    std::vector<FinderResult> interval_runs;
    FinderResult y_strip;   // Y(1, sqrt2), sigma <= 2000, tau >= -0.105
    double y_strip_K = 2000.0;
    bool finder_failed = false;

    FinderConfig cfg() const {
        FinderConfig c;
        c.threads = threads;
        return c;
    }

    void run(int id, const std::string& name, const std::function<std::pair<bool, std::string>()>& body) {
        CriterionResult r;
        r.id = id;
        r.name = name;
        auto t0 = Clock::now();
        try {
            auto [pass, detail] = body();
            r.pass = pass;
            r.detail = detail;
        } catch (const std::exception& e) {
            r.pass = false;
            r.detail = std::string("exception: ") + e.what();
        }
        r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
        if (progress)
            (*progress) << (r.pass ? "PASS" : "FAIL") << " criterion " << r.id << " (" << r.name
                        << "): " << r.detail << fmt("  [%.1fs]", r.seconds) << "\n"
                        << std::flush;
        results.push_back(std::move(r));
    }
};

// ---------------------------------------------------------------- helpers

double star_tau(int N) { return -0.5 * std::log((N + 1.0) / (N - 1.0)); }

// exact resonance set of the one-edge star / interval graphs in a sigma window
std::vector<Complex> star_closed_form(int N, double l, double sigma_max) {
    std::vector<Complex> ks;
    for (int j = 0;; ++j) {
        double s = (1 + 2 * j) * M_PI / (2.0 * l);
        if (s > sigma_max) break;
        ks.push_back({s, star_tau(N) / l});
    }
    return ks;
}

std::vector<Complex> interval_closed_form(int N, int N2, double l, double sigma_min,
                                          double sigma_max) {
    double tau = -0.5 * std::log((N + 1.0) * (N2 + 1.0) / ((N - 1.0) * (N2 - 1.0))) / l;
    std::vector<Complex> ks;
    for (int j = 1;; ++j) {
        double s = j * M_PI / l;
        if (s > sigma_max) break;
        if (s >= sigma_min) ks.push_back({s, tau});
    }
    return ks;
}

// largest |found - expected| under a one-to-one matching by sigma order;
// returns infinity when the counts differ
double match_sets(const std::vector<Resonance>& found, const std::vector<Complex>& expected) {
    if (found.size() != expected.size()) return std::numeric_limits<double>::infinity();
    double worst = 0.0;
    for (size_t i = 0; i < found.size(); ++i)
        worst = std::max(worst, std::abs(found[i].k - expected[i]));
    return worst;
}

MultiPoly mono(int nv, long long c, std::initializer_list<uint32_t> e) {
    return MultiPoly::term(nv, Rational(c), Monomial(e));
}

} // namespace

std::vector<CriterionResult> run_acceptance(std::ostream* progress, int threads) {
    Suite S;
    S.threads = threads;
    S.progress = progress;
    const double sqrt2 = std::sqrt(2.0);

    // 1. star closed forms
    S.run(1, "star closed form N=2,3,5", [&]() -> std::pair<bool, std::string> {
        auto t0 = Clock::now();
        bool ok = true;
        double worst = 0.0;
        for (int N : {2, 3, 5}) {
            SecularFunction sf(catalog("star", {1.0, double(N)}));
            FinderResult res =
                find_resonances(sf, {0.0, 40.0, -1.0, S.cfg().tau_cap}, S.cfg());
            S.star_runs.push_back(res);
            double d = match_sets(res.resonances, star_closed_form(N, 1.0, 40.0));
            worst = std::max(worst, d);
            ok = ok && d < 1e-8;
        }
        double secs = std::chrono::duration<double>(Clock::now() - t0).count();
        ok = ok && secs < 10.0;
        return {ok, fmt("max |dk| = %.2e over 39 resonances, %.1fs (< 10s)", worst, secs)};
    });

    // 2. interval closed forms
    S.run(2, "interval closed form (2,2), (2,3)", [&]() -> std::pair<bool, std::string> {
        bool ok = true;
        double worst = 0.0;
        for (auto [N, N2] : std::vector<std::pair<int, int>>{{2, 2}, {2, 3}}) {
            SecularFunction sf(catalog("interval_Gnn", {1.0, double(N), double(N2)}));
            FinderResult res =
                find_resonances(sf, {0.5, 40.0, -1.6, S.cfg().tau_cap}, S.cfg());
            S.interval_runs.push_back(res);
            double d = match_sets(res.resonances, interval_closed_form(N, N2, 1.0, 0.5, 40.0));
            worst = std::max(worst, d);
            ok = ok && d < 1e-8;
        }
        return {ok, fmt("max |dk| = %.2e", worst)};
    });

    // 3. h estimates
    S.run(3, "h estimates: star N=3 and G_{2,3}", [&]() -> std::pair<bool, std::string> {
        HEstimate h1 = estimate_h(catalog("star", {1.0, 3.0}), 20, 12.0, 20250810u, S.cfg());
        HEstimate h2 = estimate_h(catalog("interval_Gnn", {1.0, 2.0, 3.0}), 20, 12.0, 20250810u, S.cfg());
        double e1 = std::abs(h1.h_hat - 0.5 * std::log(2.0));
        double e2 = std::abs(h2.h_hat - 0.5 * std::log(6.0));
        bool ok = e1 < 1e-6 && e2 < 1e-6 && h1.spread < 1e-6 && h2.spread < 1e-6;
        return {ok, fmt("|h-ln2/2| = %.2e, |h-ln6/2| = %.2e, spreads %.1e / %.1e",
                        e1, e2, h1.spread, h2.spread)};
    });

    // 4. symbolic secular polynomials
    S.run(4, "symbolic polynomials C11, C111, Y", [&]() -> std::pair<bool, std::string> {
        auto t0 = Clock::now();
        MultiPoly c11 = (mono(2, 1, {1, 1}) - mono(2, 1, {0, 1}) - mono(2, 1, {1, 0}) -
                         mono(2, 3, {0, 0})) *
                        (mono(2, 1, {1, 1}) + mono(2, 1, {1, 0}) + mono(2, 1, {0, 1}) -
                         mono(2, 3, {0, 0}));
        MultiPoly y = mono(2, 1, {2, 2}) - mono(2, 1, {2, 0}) - mono(2, 1, {0, 2}) -
                      mono(2, 3, {0, 0});
        MultiPoly c111 = mono(3, 1, {2, 2, 2}) - mono(3, 1, {2, 2, 0}) - mono(3, 1, {0, 2, 2}) -
                         mono(3, 1, {2, 0, 2}) - mono(3, 3, {2, 0, 0}) - mono(3, 3, {0, 2, 0}) -
                         mono(3, 3, {0, 0, 2}) - mono(3, 16, {1, 1, 1}) + mono(3, 27, {0, 0, 0});
        bool p1 = proportional(symbolic_secular(catalog("circular", {1, 1})).poly, c11);
        bool p2 = proportional(symbolic_secular(catalog("Y", {1.0, 1.0})).poly, y);
        bool p3 = proportional(symbolic_secular(catalog("circular", {1, 1, 1})).poly, c111);
        double secs = std::chrono::duration<double>(Clock::now() - t0).count();
        bool ok = p1 && p2 && p3 && secs < 5.0;
        return {ok, fmt("C11 %s, Y %s, C111 %s, %.2fs (< 5s)", p1 ? "ok" : "BAD",
                        p2 ? "ok" : "BAD", p3 ? "ok" : "BAD", secs)};
    });

    // 5. symbolic vs numeric cross-validation
    S.run(5, "symbolic/numeric cross-validation", [&]() -> std::pair<bool, std::string> {
        Rng rng(0x5eed0005u);
        double worst = 0.0;
        std::vector<MetricGraph> graphs{catalog("circular", {1, 1}, {1.0, 2.0}),
                                        catalog("Y", {1.0, sqrt2}),
                                        catalog("circular", {1, 1, 1}, {1.0, sqrt2, std::sqrt(3.0)})};
        for (const auto& g : graphs) {
            SecularPolynomial sp = symbolic_secular(g);
            SecularFunction sf(g);
            Complex unit = 0.0;
            for (int i = 0; i < 50; ++i) {
                Complex k(0.5 + 19.5 * rng.uniform(), -1.0 + 2.0 * rng.uniform());
                std::vector<Complex> z;
                for (const auto& e : g.edges())
                    z.push_back(std::exp(Complex(0, 1) * k * e.length));
                Complex f = sf.evaluate(k).f();
                Complex p = sp.poly.eval(z);
                if (i == 0) {
                    unit = f / p;
                    continue;
                }
                worst = std::max(worst, std::abs(f / p - unit) / std::abs(unit));
            }
        }
        return {worst < 1e-9, fmt("max relative deviation from fitted unit = %.2e", worst)};
    });

    // 6. unitarity on the catalog
    S.run(6, "unitarity of S(k) on all catalog graphs", [&]() -> std::pair<bool, std::string> {
        Rng rng(0x5eed0006u);
        std::vector<MetricGraph> graphs{
            catalog("star", {1.0, 3.0}), catalog("interval_Gnn", {1.0, 2.0, 3.0}),
            catalog("Y", {1.0, sqrt2}), catalog("circular", {1}, {2.0 * M_PI}),
            catalog("circular", {2}, {2.0 * M_PI}), catalog("circular", {1, 1}, {1.0, 2.0}),
            catalog("tetrahedron"), catalog("cube"), catalog("petersen"),
            catalog("dodecahedron")};
        double worst = 0.0;
        for (const auto& g : graphs) {
            BondScattering bs = build_scattering(g);
            for (int i = 0; i < 100; ++i)
                worst = std::max(worst, unitary_defect(bs, 0.1 + 49.9 * rng.uniform()));
        }
        return {worst < 1e-12, fmt("max defect = %.2e over 10 graphs x 100 k", worst)};
    });

    // 7. energy identity
    S.run(7, "energy identity (flux = -2 tau ||u||^2)", [&]() -> std::pair<bool, std::string> {
        double worst = 0.0;
        int checked = 0;
        int idx = 0;
        for (int N : {2, 3, 5}) {
            SecularFunction sf(catalog("star", {1.0, double(N)}));
            for (const auto& r : S.star_runs.at(idx).resonances)
                if (std::abs(r.sigma()) > 0.1) {
                    ResonantState st = extract_state(sf, r.k, r.multiplicity);
                    worst = std::max(worst, energy_residual(sf, r.k, st));
                    ++checked;
                }
            ++idx;
        }
        idx = 0;
        for (auto [N, N2] : std::vector<std::pair<int, int>>{{2, 2}, {2, 3}}) {
            SecularFunction sf(catalog("interval_Gnn", {1.0, double(N), double(N2)}));
            for (const auto& r : S.interval_runs.at(idx).resonances)
                if (std::abs(r.sigma()) > 0.1) {
                    ResonantState st = extract_state(sf, r.k, r.multiplicity);
                    worst = std::max(worst, energy_residual(sf, r.k, st));
                    ++checked;
                }
            ++idx;
        }
        // 50 Y-graph resonances, and the state energy against 1/(2|tau|)
        SecularFunction sfy(catalog("Y", {1.0, sqrt2}));
        FinderResult ry = find_resonances(sfy, {S.cfg().k_floor, 70.0, -0.6, S.cfg().tau_cap}, S.cfg());
        int used = 0;
        double worst_e = 0.0;
        for (const auto& r : ry.resonances) {
            if (used >= 50) break;
            if (std::abs(r.sigma()) <= 0.1) continue;
            ResonantState st = extract_state(sfy, r.k, r.multiplicity);
            worst = std::max(worst, energy_residual(sfy, r.k, st));
            if (st.lead_normalized) {
                double e = state_norm2(sfy, r.k, st);
                worst_e = std::max(worst_e,
                                   std::abs(e - 1.0 / (2.0 * std::abs(r.tau()))) /
                                       (1.0 / (2.0 * std::abs(r.tau()))));
            }
            ++used;
            ++checked;
        }
        bool ok = worst < 1e-8 && worst_e < 1e-8 && used >= 50;
        return {ok, fmt("max residual = %.2e over %d states; max |E - 1/(2|tau|)| rel = %.2e",
                        worst, checked, worst_e)};
    });

    // 8. circular graphs: real resonance sets
    S.run(8, "circular C1 and C2 real sets", [&]() -> std::pair<bool, std::string> {
        bool ok = true;
        double worst = 0.0, worst_t = 0.0;
        for (auto params : std::vector<std::vector<double>>{{1}, {2}}) {
            MetricGraph g = catalog("circular", params, {2.0 * M_PI});
            SecularFunction sf(g);
            FinderResult res = find_resonances(sf, {0.5, 6.5, -0.02, S.cfg().tau_cap}, S.cfg());
            ok = ok && res.resonances.size() == 6;
            for (size_t j = 0; j < res.resonances.size(); ++j) {
                const auto& r = res.resonances[j];
                worst = std::max(worst, std::abs(r.k - Complex(double(j + 1), 0.0)));
                ResonantState st = extract_state(sf, r.k, r.multiplicity);
                worst_t = std::max(worst_t, std::sqrt(st.t_norm2()));
            }
        }
        ok = ok && worst < 1e-8 && worst_t < 1e-8;
        return {ok, fmt("sets = {1..6}, max |dk| = %.2e, max |t| = %.2e", worst, worst_t)};
    });

    // 9. embedded eigenvalue dichotomy
    S.run(9, "embedded eigenvalue dichotomy (C11)", [&]() -> std::pair<bool, std::string> {
        MetricGraph gc = catalog("circular", {1, 1}, {2.0 * M_PI, 2.0 * M_PI});
        SecularFunction sfc(gc);
        FinderResult rc = find_resonances(sfc, {0.9, 1.1, -0.05, S.cfg().tau_cap}, S.cfg());
        bool has_embedded = false;
        double tau_at_1 = 1.0;
        for (const auto& r : rc.resonances)
            if (std::abs(r.sigma() - 1.0) < 1e-8 && std::abs(r.tau()) < 1e-10) {
                has_embedded = true;
                tau_at_1 = r.tau();
            }
        MetricGraph gi = catalog("circular", {1, 1}, {2.0 * M_PI, 2.0 * M_PI * sqrt2});
        SecularFunction sfi(gi);
        FinderResult ri = find_resonances(sfi, {0.8, 1.2, -0.35, S.cfg().tau_cap}, S.cfg());
        double best = std::numeric_limits<double>::infinity();
        double tau_near = 0.0;
        for (const auto& r : ri.resonances)
            if (std::abs(r.sigma() - 1.0) < best) {
                best = std::abs(r.sigma() - 1.0);
                tau_near = r.tau();
            }
        bool ok = has_embedded && !ri.resonances.empty() && tau_near < -1e-10;
        return {ok, fmt("commensurate: tau(k=1) = %.1e; perturbed: nearest tau = %.3e",
                        tau_at_1, tau_near)};
    });

    // 10. Weyl slopes
    S.run(10, "Weyl slope: G_{2,3} and C1", [&]() -> std::pair<bool, std::string> {
        auto t0 = Clock::now();
        SecularFunction sfi(catalog("interval_Gnn", {1.0, 2.0, 3.0}));
        FinderResult ri = resonances_in_strip(sfi, 200.0, -1.6, S.cfg());
        WeylFit wi = weyl_fit(ri.resonances, 200.0, 1.0);
        double err_i = std::abs(wi.slope - 1.0 / M_PI) / (1.0 / M_PI);

        SecularFunction sfc(catalog("circular", {1}, {2.0 * M_PI}));
        FinderResult rc = resonances_in_strip(sfc, 60.0, -0.05, S.cfg());
        WeylFit wc = weyl_fit(rc.resonances, 60.0, 2.0 * M_PI);
        double err_c = std::abs(wc.slope - 1.0);
        double secs = std::chrono::duration<double>(Clock::now() - t0).count();
        bool ok = err_i < 0.02 && err_c < 0.02 && secs < 60.0;
        return {ok, fmt("G23 slope %.5f (1/pi: err %.2f%%); C1 slope %.5f (err %.2f%%); %.1fs",
                        wi.slope, 100 * err_i, wc.slope, 100 * err_c, secs)};
    });

    // 11. N(eps) exponent for the Y graph
    S.run(11, "N(eps) exponent, Y graph K=2000", [&]() -> std::pair<bool, std::string> {
        auto t0 = Clock::now();
        MetricGraph g = catalog("Y", {1.0, sqrt2});
        SecularFunction sf(g);
        S.y_strip = resonances_in_strip(sf, S.y_strip_K, -0.107, S.cfg());
        std::vector<double> eps;
        for (int i = 0; i <= 8; ++i)
            eps.push_back(1e-3 * std::pow(10.0, 0.25 * i)); // 1e-3 .. 1e-1
        CountingReport rep =
            n_eps_from_list(S.y_strip.resonances, S.y_strip_K, eps, g.total_length());
        double slope = rep.d_hat / 2.0;
        double secs = std::chrono::duration<double>(Clock::now() - t0).count();
        bool ok = std::abs(slope - 0.5) <= 0.075 && secs < 600.0;
        return {ok, fmt("loglog slope = %.4f (0.5 +- 0.075), d_hat = %.3f, stable=%d, "
                        "%d resonances, %.0fs (< 600s)",
                        slope, rep.d_hat, int(rep.stable), S.y_strip.total_multiplicity(), secs)};
    });

    // 12. branch trace vs direct counting (Barra-Gaspard)
    S.run(12, "branch/counting consistency", [&]() -> std::pair<bool, std::string> {
        MetricGraph g = catalog("Y", {1.0, sqrt2});
        double l = 1.0, L = sqrt2;
        auto wpts = find_w_points(g);
        if (wpts.size() != 4)
            return {false, fmt("expected 4 W-points on the torus, found %zu", wpts.size())};
        std::vector<BranchTrace> traces;
        for (const auto& w : wpts)
            traces.push_back(branch_trace(g, w, 0.22, 440));

        std::vector<double> eps{1e-3, 1.78e-3, 3.16e-3, 5.62e-3, 1e-2};
        std::vector<double> bg = barra_gaspard_counts(traces, {l, L}, eps);
        double worst = 0.0;
        for (size_t i = 0; i < eps.size(); ++i) {
            double direct = 0.0;
            for (const auto& r : S.y_strip.resonances)
                if (r.sigma() <= S.y_strip_K && r.tau() >= -eps[i]) direct += r.multiplicity;
            direct /= S.y_strip_K;
            worst = std::max(worst, std::abs(bg[i] / direct - 1.0));
        }

        // direct-resonance oracle for the Hessian coefficient c
        std::vector<double> us, ts;
        for (const auto& r : S.y_strip.resonances) {
            if (r.tau() < -8e-3) continue;
            double al = wrap_pm_pi(r.sigma() * l - M_PI / 2.0);
            double a0 = (std::abs(al) < M_PI / 2.0) ? M_PI / 2.0 : 3.0 * M_PI / 2.0;
            double da = wrap_pm_pi(r.sigma() * l - a0);
            double bl = wrap_pm_pi(r.sigma() * L - M_PI / 2.0);
            double b0 = (std::abs(bl) < M_PI / 2.0) ? M_PI / 2.0 : 3.0 * M_PI / 2.0;
            double db = wrap_pm_pi(r.sigma() * L - b0);
            if (std::abs(da + db) > 0.05) continue; // off the tangent line
            us.push_back(0.5 * (da - db));
            ts.push_back(r.tau());
        }
        double su4 = 0.0, stu2 = 0.0;
        for (size_t i = 0; i < us.size(); ++i) {
            su4 += us[i] * us[i] * us[i] * us[i];
            stu2 += ts[i] * us[i] * us[i];
        }
        double c_oracle = -stu2 / su4;
        double c_trace = traces[0].c_fit;
        double c_err = std::abs(c_trace / c_oracle - 1.0);

        double c_quarter = 1.0 / (4.0 * (l + L)); // the 1/(4(l+L)) candidate
        double n_quarter = 4.0 * std::pow(l + L, 1.5) / (M_PI * M_PI);
        double direct_1e3 = 0.0;
        for (const auto& r : S.y_strip.resonances)
            if (r.tau() >= -1e-3) direct_1e3 += r.multiplicity;
        direct_1e3 /= S.y_strip_K;
        bool ok = worst <= 0.10 && c_err <= 0.05;
        return {ok, fmt("BG vs direct: max dev %.1f%% (<=10%%); c_trace %.5f vs oracle %.5f "
                        "(dev %.2f%%, n=%zu); c vs 1/(4(l+L)): %.2f; N(1e-3) vs 4(l+L)^1.5/pi^2: %.2f",
                        100 * worst, c_trace, c_oracle, 100 * c_err, us.size(),
                        c_trace / c_quarter, direct_1e3 / (n_quarter * std::sqrt(1e-3)))};
    });

    // 13. tangent structure at w0 = (i, i)
    S.run(13, "tangent structure, Y graph l = L", [&]() -> std::pair<bool, std::string> {
        MetricGraph g = catalog("Y", {1.0, 1.0});
        BranchTrace tr = branch_trace(g, {M_PI / 2.0, M_PI / 2.0}, 0.1, 200);
        double m_dev = std::abs(tr.m_weight[0] / tr.m_weight[1] - 1.0);
        bool ok = std::abs(tr.dtau_du0) < 1e-6 && m_dev < 1e-8;
        return {ok, fmt("|dtau/du(0)| = %.2e (< 1e-6), |m_l/m_L - 1| = %.2e (< 1e-8), c = %.4f",
                        std::abs(tr.dtau_du0), m_dev, tr.c_fit)};
    });

    // 14. type I gap vs type II accumulation
    S.run(14, "gap vs near-axis accumulation", [&]() -> std::pair<bool, std::string> {
        int star_near = 0;
        for (const auto& r : S.star_runs.at(1).resonances) // N = 3
            if (r.tau() >= -0.33) star_near += r.multiplicity;
        double y_n = 0.0;
        for (const auto& r : S.y_strip.resonances)
            if (r.tau() >= -1e-3) y_n += r.multiplicity;
        y_n /= S.y_strip_K;
        bool ok = star_near == 0 && y_n > 0.0;
        return {ok, fmt("star N=3: count(tau >= -0.33) = %d; Y: Nhat(1e-3) = %.4f > 0",
                        star_near, y_n)};
    });

    // 15. winding additivity and multiplicity bookkeeping
    S.run(15, "counting self-consistency", [&]() -> std::pair<bool, std::string> {
        long subdivisions = 0, retries = 0;
        bool ok = true;
        auto check = [&](const FinderResult& r) {
            subdivisions += r.stats.subdivisions;
            retries += r.stats.additivity_retries;
            ok = ok && r.total_multiplicity() == r.stats.root_count;
        };
        for (const auto& r : S.star_runs) check(r);
        for (const auto& r : S.interval_runs) check(r);
        check(S.y_strip);
        ok = ok && subdivisions > 0;
        return {ok, fmt("%ld verified-additive subdivisions (%ld re-jittered); "
                        "total multiplicity == winding count on all stored runs",
                        subdivisions, retries)};
    });

    return S.results;
}

bool all_passed(const std::vector<CriterionResult>& results) {
    for (const auto& r : results)
        if (!r.pass) return false;
    return !results.empty();
}

} // namespace qg
