#include "qg/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qg {

namespace {

// integral of e^{c x} over [0, l]: (e^{cl} - 1)/c with the c -> 0 limit
double expm1_over(double c, double l) {
    if (c == 0.0) return l;
    return std::expm1(c * l) / c;
}

// integral of e^{i s x} over [0, l], via e^{i t}-1 = -2 sin^2(t/2) + i sin t
Complex cis_m1_over(double s, double l) {
    if (s == 0.0) return {l, 0.0};
    double t = s * l;
    double half = std::sin(0.5 * t);
    Complex num(-2.0 * half * half, std::sin(t));
    return num / Complex(0.0, s);
}

double lsq_slope(const std::vector<double>& x, const std::vector<double>& y, double* icept) {
    double n = static_cast<double>(x.size());
    double sx = std::accumulate(x.begin(), x.end(), 0.0);
    double sy = std::accumulate(y.begin(), y.end(), 0.0);
    double sxx = 0.0, sxy = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    if (icept) *icept = (sy - slope * sx) / n;
    return slope;
}

} // namespace

uint64_t Rng::next_u64() {
    s_ += 0x9E3779B97f4A7C15ull;
    uint64_t z = s_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

double Rng::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double edge_norm2(Complex a, Complex b, Complex k, double l) {
    double tau = k.imag(), sigma = k.real();
    double sq = std::norm(a) * expm1_over(-2.0 * tau, l) +
                std::norm(b) * expm1_over(2.0 * tau, l);
    Complex cross = a * std::conj(b) * cis_m1_over(2.0 * sigma, l);
    return sq + 2.0 * cross.real();
}

double state_norm2(const SecularFunction& sf, Complex k, const ResonantState& st) {
    const auto& len = sf.bonds().edge_length;
    double s = 0.0;
    for (size_t e = 0; e < len.size(); ++e)
        s += edge_norm2(st.a[e], st.b[e], k, len[e]);
    return s;
}

double energy_residual(const SecularFunction& sf, Complex k, const ResonantState& st) {
    if (k.real() == 0.0)
        throw ValidationError("energy identity degenerates at sigma = 0");
    double tau = k.imag();
    double t2 = st.t_norm2();
    if (std::abs(tau) <= 1e-12 && t2 <= 1e-16)
        return 0.0; // embedded eigenvalue: both sides vanish
    double lhs = -2.0 * tau * state_norm2(sf, k, st);
    return std::abs(lhs - t2) / std::max(t2, 1e-30);
}

WeylFit weyl_fit(const std::vector<Resonance>& resonances, double K, double total_length) {
    std::vector<double> sigmas;
    for (const auto& r : resonances)
        for (int m = 0; m < r.multiplicity; ++m) sigmas.push_back(r.sigma());
    if (sigmas.size() < 20)
        throw ValidationError("too few resonances for a Weyl fit (need at least 20)");
    std::sort(sigmas.begin(), sigmas.end());

    const int grid = 256;
    std::vector<double> xs(grid), ys(grid);
    for (int i = 0; i < grid; ++i) {
        double x = K / 4.0 + (0.75 * K) * (i + 0.5) / grid;
        xs[i] = x;
        ys[i] = static_cast<double>(
            std::upper_bound(sigmas.begin(), sigmas.end(), x) - sigmas.begin());
    }
    WeylFit fit;
    fit.slope = lsq_slope(xs, ys, &fit.intercept);
    fit.l_over_pi = total_length / M_PI;
    fit.l_over_2pi = total_length / (2.0 * M_PI);
    fit.n_resonances = static_cast<int>(sigmas.size());
    return fit;
}

CountingReport n_eps_from_list(const std::vector<Resonance>& resonances, double K,
                               const std::vector<double>& eps_grid, double total_length) {
    CountingReport rep;
    rep.K = K;
    rep.l_over_pi = total_length / M_PI;
    rep.l_over_2pi = total_length / (2.0 * M_PI);

    auto nhat = [&](double eps, double Kw) {
        int count = 0;
        for (const auto& r : resonances)
            if (r.sigma() >= 0.0 && r.sigma() <= Kw && r.tau() >= -eps) count += r.multiplicity;
        return static_cast<double>(count) / Kw;
    };

    std::vector<double> eps_sorted = eps_grid;
    std::sort(eps_sorted.begin(), eps_sorted.end());
    for (double e : eps_sorted) rep.eps_curve.push_back({e, nhat(e, K)});

    auto fit_exponent = [&](double Kw) {
        std::vector<double> lx, ly;
        for (double e : eps_sorted) {
            double nh = nhat(e, Kw);
            if (nh * Kw >= 10.0) {
                lx.push_back(std::log(e));
                ly.push_back(std::log(nh));
            }
        }
        if (lx.size() < 2)
            throw ValidationError("insufficient counts for the exponent fit; widen K or the eps range");
        return 2.0 * lsq_slope(lx, ly, nullptr);
    };
    rep.d_hat = fit_exponent(K);
    rep.d_hat_half = fit_exponent(K / 2.0);
    rep.stable = std::abs(rep.d_hat - rep.d_hat_half) <= 0.10 * std::max(std::abs(rep.d_hat), 1e-9);

    try {
        rep.weyl_slope = weyl_fit(resonances, K, total_length).slope;
    } catch (const ValidationError&) {
        rep.weyl_slope = 0.0;
    }
    return rep;
}

FinderResult resonances_in_strip(const SecularFunction& sf, double sigma_max, double tau_min,
                                 const FinderConfig& cfg) {
    SearchRegion region{cfg.k_floor, sigma_max, tau_min, cfg.tau_cap};
    return find_resonances(sf, region, cfg);
}

CountingReport n_eps_curve(const MetricGraph& g, double K, const std::vector<double>& eps_grid,
                           const FinderConfig& cfg) {
    double eps_max = *std::max_element(eps_grid.begin(), eps_grid.end());
    SecularFunction sf(g);
    FinderResult res = resonances_in_strip(sf, K, -1.05 * eps_max - 1e-4, cfg);
    return n_eps_from_list(res.resonances, K, eps_grid, g.total_length());
}

HEstimate estimate_h(const MetricGraph& g, int n_samples, double K, uint64_t seed,
                     const FinderConfig& cfg) {
    GraphInvariants inv = compute_invariants(g);
    if (inv.graph_type != GraphType::TypeII && g.num_edges() == 0) {
        HEstimate out;
        out.h_hat = std::numeric_limits<double>::infinity();
        return out; // no finite edges: no resonances at all
    }
    if (inv.graph_type == GraphType::TypeII)
        throw ValidationError("h(G) = 0 for type II graphs; estimate_h expects type I");
    if (n_samples < 1) throw ValidationError("estimate_h needs n_samples >= 1");

    Rng rng(seed);
    HEstimate out;
    out.h_hat = std::numeric_limits<double>::infinity();
    for (int s = 0; s < n_samples; ++s) {
        std::vector<double> len(g.num_edges());
        double sum = 0.0;
        for (auto& l : len) {
            l = 1.0 + rng.uniform();
            sum += l;
        }
        for (auto& l : len) l /= sum; // |L| = 1
        SecularFunction sf(g.with_lengths(len));
        FinderResult res;
        bool found = false;
        for (double depth : {2.0, 8.0}) {
            res = resonances_in_strip(sf, K, -depth, cfg);
            if (!res.resonances.empty()) { found = true; break; }
        }
        if (!found)
            throw NumericError("estimate_h found no resonances; increase K");
        double sample_min = std::numeric_limits<double>::infinity();
        for (const auto& r : res.resonances)
            sample_min = std::min(sample_min, -r.tau());
        out.per_sample.push_back(sample_min);
        out.h_hat = std::min(out.h_hat, sample_min);
    }
    auto [lo, hi] = std::minmax_element(out.per_sample.begin(), out.per_sample.end());
    out.spread = *hi - *lo;
    return out;
}

std::vector<std::pair<double, int>> compact_eigenvalues(const MetricGraph& g, double k_max,
                                                        const FinderConfig& cfg) {
    if (k_max <= cfg.k_floor) throw ValidationError("k_max must exceed k_floor");
    SecularFunction sf(g, /*include_leads=*/false);
    SearchRegion region{cfg.k_floor, k_max, -cfg.tau_cap, cfg.tau_cap};
    FinderResult res = find_resonances(sf, region, cfg);
    std::vector<std::pair<double, int>> out;
    for (const auto& r : res.resonances) out.push_back({r.sigma(), r.multiplicity});
    return out;
}

namespace {

// M(z) = Id - U (z)_2 for the compact graph at an arbitrary torus point.
Eigen::MatrixXcd compact_matrix_at(const BondScattering& bs, const std::vector<Complex>& z) {
    const int n = bs.n_edges;
    Eigen::VectorXcd d(2 * n);
    for (int e = 0; e < n; ++e) d(e) = d(n + e) = z[e];
    return Eigen::MatrixXcd::Identity(2 * n, 2 * n) -
           bs.U.cast<Complex>() * d.asDiagonal();
}

VanishingTest vanishing_core(const MetricGraph& g, const std::vector<Complex>& z) {
    VanishingTest out;
    const int n = g.num_edges();
    if (n == 0) return out;
    BondScattering bs = build_scattering(g, /*include_leads=*/false);
    Eigen::MatrixXcd M = compact_matrix_at(bs, z);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    double scale = std::max(1.0, sv(0));
    int dim = 0;
    for (int i = 0; i < 2 * n; ++i)
        if (sv(i) < 1e-8 * scale) ++dim;
    out.eigen_dim = dim;
    if (dim == 0) return out;

    Eigen::MatrixXcd basis = svd.matrixV().rightCols(dim);
    if (g.marked_vertices().empty()) { // no constraints: everything vanishes on V0
        out.vanishing_dim = dim;
        out.witness = basis.col(dim - 1);
        return out;
    }

    // vertex-value rows: u(v) = c_fwd + z c_bwd at an origin,
    // z c_fwd + c_bwd at a terminus (continuity makes the edge choice moot)
    const auto& v0 = g.marked_vertices();
    Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(static_cast<int>(v0.size()), 2 * n);
    for (size_t r = 0; r < v0.size(); ++r) {
        int v = v0[r];
        for (int e = 0; e < n; ++e) {
            if (g.edge(e).from == v) {
                C(r, e) = 1.0;
                C(r, n + e) = z[e];
                break;
            }
            if (g.edge(e).to == v) {
                C(r, e) = z[e];
                C(r, n + e) = 1.0;
                break;
            }
        }
    }
    Eigen::MatrixXcd CB = C * basis; // |V0| x dim
    Eigen::JacobiSVD<Eigen::MatrixXcd> csvd(CB, Eigen::ComputeFullV);
    const auto& csv = csvd.singularValues();
    double cscale = csv.size() ? std::max(1.0, csv(0)) : 1.0;
    int rank = 0;
    for (int i = 0; i < csv.size(); ++i)
        if (csv(i) > 1e-8 * cscale) ++rank;
    out.vanishing_dim = dim - rank;
    if (out.vanishing_dim >= 1)
        out.witness = basis * csvd.matrixV().col(dim - 1);
    return out;
}

} // namespace

VanishingTest vanishing_eigenfunction_test(const MetricGraph& g, double k) {
    std::vector<Complex> z;
    for (const auto& e : g.edges()) z.push_back(std::exp(Complex(0, 1) * (k * e.length)));
    return vanishing_core(g, z);
}

VanishingTest vanishing_at_torus_point(const MetricGraph& g, const std::vector<double>& alpha) {
    if (alpha.size() != static_cast<size_t>(g.num_edges()))
        throw ValidationError("torus point needs one angle per edge");
    std::vector<Complex> z;
    for (double a : alpha) z.push_back(std::exp(Complex(0, 1) * a));
    return vanishing_core(g, z);
}

namespace {

// Secular determinant (leads included) and its z-gradient at a torus point.
struct TorusDet {
    Complex f;
    std::vector<Complex> df_dz; // per edge
};

TorusDet torus_det(const BondScattering& bs, const std::vector<Complex>& z) {
    const int n = bs.n_edges;
    Eigen::VectorXcd d(2 * n);
    for (int e = 0; e < n; ++e) d(e) = d(n + e) = z[e];
    Eigen::MatrixXcd M = Eigen::MatrixXcd::Identity(2 * n, 2 * n) -
                         bs.U.cast<Complex>() * d.asDiagonal();
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(M);
    Complex det = static_cast<double>(lu.permutationP().determinant());
    for (int i = 0; i < 2 * n; ++i) det *= lu.matrixLU()(i, i);
    Eigen::MatrixXcd inv = lu.solve(Eigen::MatrixXcd::Identity(2 * n, 2 * n));
    TorusDet out;
    out.f = det;
    out.df_dz.resize(n);
    // d log det / d z_e = sum over the two bonds of e of (1 - M^{-1}_bb)/z_e
    for (int e = 0; e < n; ++e) {
        Complex s = (1.0 - inv(e, e)) / z[e] + (1.0 - inv(n + e, n + e)) / z[e];
        out.df_dz[e] = det * s;
    }
    return out;
}

double wrap_angle(double a) {
    a = std::fmod(a, 2.0 * M_PI);
    if (a < 0) a += 2.0 * M_PI;
    if (2.0 * M_PI - a < 1e-9) a = 0.0;
    return a;
}

// Newton in (beta, tau) for R(e^{i alpha - tau l}, e^{i beta - tau L}) = 0 at
// fixed alpha. This 2x2 system is transversally nondegenerate on the branch,
// unlike Newton on the torus itself (where W-points are tangential).
bool solve_branch_point(const BondScattering& bs, double l, double L, double alpha,
                        double beta0, double tau0, double* beta_out, double* tau_out) {
    double beta = beta0, tau = tau0;
    for (int it = 0; it < 60; ++it) {
        std::vector<Complex> z{std::exp(Complex(0, 1) * alpha - tau * l),
                               std::exp(Complex(0, 1) * beta - tau * L)};
        TorusDet td = torus_det(bs, z);
        Complex fb = td.df_dz[1] * Complex(0, 1) * z[1];
        Complex ft = -(td.df_dz[0] * (l * z[0]) + td.df_dz[1] * (L * z[1]));
        double J[2][2] = {{fb.real(), ft.real()}, {fb.imag(), ft.imag()}};
        double det = J[0][0] * J[1][1] - J[0][1] * J[1][0];
        if (!(std::abs(det) > 1e-14)) return false;
        double db = (-td.f.real() * J[1][1] + td.f.imag() * J[0][1]) / det;
        double dt = (-J[0][0] * td.f.imag() + J[1][0] * td.f.real()) / det;
        beta += db;
        tau += dt;
        if (std::hypot(db, dt) < 1e-13 * (1.0 + std::abs(beta) + std::abs(tau))) {
            *beta_out = beta;
            *tau_out = tau;
            return true;
        }
    }
    return false;
}

// Refine an approximate torus zero to the true W-point: the branch tau(alpha)
// attains its maximum (tau = 0) there, so locate the parabola vertex.
bool refine_w_point(const BondScattering& bs, double l, double L, double* a, double* b) {
    double beta = *b, tau = 0.0;
    for (double h : {1e-3, 1e-5, 5e-7}) {
        double b0, t0, bp, tp, bm, tm;
        if (!solve_branch_point(bs, l, L, *a, beta, tau, &b0, &t0)) return false;
        if (!solve_branch_point(bs, l, L, *a + h, b0, t0, &bp, &tp)) return false;
        if (!solve_branch_point(bs, l, L, *a - h, b0, t0, &bm, &tm)) return false;
        double curv = tp - 2.0 * t0 + tm;
        if (!(curv < 0.0)) return false; // tau must be concave at the top
        *a += 0.5 * h * (tm - tp) / curv;
        solve_branch_point(bs, l, L, *a, b0, t0, &beta, &tau);
    }
    double bf, tf;
    if (!solve_branch_point(bs, l, L, *a, beta, tau, &bf, &tf)) return false;
    if (std::abs(tf) > 1e-8) return false; // not actually a tangency with the torus
    *b = bf;
    return true;
}

} // namespace

std::vector<std::array<double, 2>> find_w_points(const MetricGraph& g, int grid) {
    if (g.num_edges() != 2)
        throw ValidationError("W-point scan implemented for 2-edge graphs only");
    BondScattering bs = build_scattering(g, /*include_leads=*/true);

    double l = g.edge(0).length, L = g.edge(1).length;
    // coarse complex Newton on the torus (linear near the tangential zero),
    // then the branch-vertex refinement for full accuracy
    auto polish = [&](double a, double b) -> std::optional<std::array<double, 2>> {
        for (int it = 0; it < 80; ++it) {
            std::vector<Complex> z{std::exp(Complex(0, 1) * a), std::exp(Complex(0, 1) * b)};
            TorusDet td = torus_det(bs, z);
            if (std::abs(td.f) < 1e-10) break;
            Complex fa = td.df_dz[0] * Complex(0, 1) * z[0];
            Complex fb = td.df_dz[1] * Complex(0, 1) * z[1];
            double J[2][2] = {{fa.real(), fb.real()}, {fa.imag(), fb.imag()}};
            double det = J[0][0] * J[1][1] - J[0][1] * J[1][0];
            if (std::abs(det) < 1e-14) return std::nullopt;
            double da = (-td.f.real() * J[1][1] + td.f.imag() * J[0][1]) / det;
            double db = (-J[0][0] * td.f.imag() + J[1][0] * td.f.real()) / det;
            a += da;
            b += db;
            if (it == 79) return std::nullopt;
            if (std::hypot(da, db) < 1e-11) break;
        }
        if (!refine_w_point(bs, l, L, &a, &b)) return std::nullopt;
        return std::array<double, 2>{wrap_angle(a), wrap_angle(b)};
    };

    std::vector<std::array<double, 2>> points;
    const double cell = 2.0 * M_PI / grid;
    for (int i = 0; i < grid; ++i)
        for (int j = 0; j < grid; ++j) {
            double a = (i + 0.5) * cell;
            double b = (j + 0.5) * cell;
            std::vector<Complex> z{std::exp(Complex(0, 1) * a), std::exp(Complex(0, 1) * b)};
            TorusDet td = torus_det(bs, z);
            double grad = std::hypot(std::abs(td.df_dz[0]), std::abs(td.df_dz[1]));
            if (std::abs(td.f) > 1.5 * cell * std::max(grad, 1e-6)) continue;
            auto p = polish(a, b);
            if (!p) continue;
            bool dup = false;
            for (auto& q : points) {
                double da = std::abs(wrap_angle((*p)[0] - q[0] + M_PI) - M_PI);
                double db = std::abs(wrap_angle((*p)[1] - q[1] + M_PI) - M_PI);
                if (da < 1e-6 && db < 1e-6) dup = true;
            }
            if (dup) continue;
            if (vanishing_at_torus_point(g, {(*p)[0], (*p)[1]}).vanishing_dim >= 1)
                points.push_back(*p);
        }
    std::sort(points.begin(), points.end());
    return points;
}

BranchTrace branch_trace(const MetricGraph& g, const std::array<double, 2>& w0, double u_max,
                         int n_steps) {
    if (g.num_edges() != 2)
        throw ValidationError("branch_trace expects a 2-edge graph");
    if (n_steps < 8) throw ValidationError("branch_trace needs n_steps >= 8");

    VanishingTest vt = vanishing_at_torus_point(g, {w0[0], w0[1]});
    if (vt.vanishing_dim < 1)
        throw ValidationError("w0 is not a W-point of the graph");

    BranchTrace out;
    out.alpha0 = w0;
    const int n = 2;
    for (int e = 0; e < n; ++e)
        out.m_weight[e] = std::norm(vt.witness(e)) + std::norm(vt.witness(n + e));

    BondScattering bs = build_scattering(g, /*include_leads=*/true);
    double l = g.edge(0).length, L = g.edge(1).length;

    double slope = -out.m_weight[0] / out.m_weight[1]; // d(beta)/d(alpha) at w0
    double du = u_max / n_steps;
    std::vector<std::array<double, 3>> samples; // (u, beta, tau)
    samples.push_back({0.0, w0[1], 0.0});
    for (int dir : {+1, -1}) {
        double beta = w0[1], tau = 0.0;
        for (int i = 1; i <= n_steps; ++i) {
            double u = dir * i * du;
            double beta_pred = (i == 1) ? w0[1] + slope * u : beta;
            if (!solve_branch_point(bs, l, L, w0[0] + u, beta_pred, tau, &beta, &tau))
                throw NumericError("branch trace Newton diverged");
            samples.push_back({u, beta, tau});
        }
    }
    std::sort(samples.begin(), samples.end(),
              [](const auto& x, const auto& y) { return x[0] < y[0]; });
    for (auto& s : samples) {
        out.u.push_back(s[0]);
        out.beta.push_back(s[1]);
        out.tau.push_back(s[2]);
    }

    // fit tau = s u - c u^2 + d u^3 on |u| <= 0.05
    std::vector<int> idx;
    for (size_t i = 0; i < out.u.size(); ++i)
        if (std::abs(out.u[i]) <= 0.05 && out.u[i] != 0.0) idx.push_back(static_cast<int>(i));
    if (idx.size() >= 4) {
        Eigen::MatrixXd A(idx.size(), 3);
        Eigen::VectorXd y(idx.size());
        for (size_t r = 0; r < idx.size(); ++r) {
            double u = out.u[idx[r]];
            A(r, 0) = u;
            A(r, 1) = u * u;
            A(r, 2) = u * u * u;
            y(r) = out.tau[idx[r]];
        }
        Eigen::Vector3d coef = (A.transpose() * A).ldlt().solve(A.transpose() * y);
        out.dtau_du0 = coef(0);
        out.c_fit = -coef(1);
    }
    return out;
}

std::vector<double> barra_gaspard_counts(const std::vector<BranchTrace>& traces,
                                         const std::vector<double>& lengths,
                                         const std::vector<double>& eps_grid) {
    if (lengths.size() != 2)
        throw ValidationError("Barra-Gaspard counts implemented for 2-edge graphs");
    double l = lengths[0], L = lengths[1];
    std::vector<double> out(eps_grid.size(), 0.0);
    for (const auto& tr : traces) {
        size_t m = tr.u.size();
        if (m < 3) continue;
        // density |l d(beta) - L d(alpha)| with alpha = alpha0 + u
        std::vector<double> rho(m);
        for (size_t i = 0; i < m; ++i) {
            double bp;
            if (i == 0)
                bp = (tr.beta[1] - tr.beta[0]) / (tr.u[1] - tr.u[0]);
            else if (i == m - 1)
                bp = (tr.beta[m - 1] - tr.beta[m - 2]) / (tr.u[m - 1] - tr.u[m - 2]);
            else
                bp = (tr.beta[i + 1] - tr.beta[i - 1]) / (tr.u[i + 1] - tr.u[i - 1]);
            rho[i] = std::abs(l * bp - L);
        }
        for (size_t q = 0; q < eps_grid.size(); ++q) {
            double eps = eps_grid[q];
            double acc = 0.0;
            for (size_t i = 0; i + 1 < m; ++i) {
                bool in0 = tr.tau[i] >= -eps, in1 = tr.tau[i + 1] >= -eps;
                double du = tr.u[i + 1] - tr.u[i];
                if (in0 && in1) {
                    acc += 0.5 * (rho[i] + rho[i + 1]) * du;
                } else if (in0 != in1) {
                    double t = (-eps - tr.tau[i]) / (tr.tau[i + 1] - tr.tau[i]);
                    double rho_x = rho[i] + t * (rho[i + 1] - rho[i]);
                    if (in0)
                        acc += 0.5 * (rho[i] + rho_x) * (t * du);
                    else
                        acc += 0.5 * (rho_x + rho[i + 1]) * ((1.0 - t) * du);
                }
            }
            out[q] += acc / (4.0 * M_PI * M_PI);
        }
    }
    return out;
}

} // namespace qg
