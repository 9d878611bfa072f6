// qgres: scattering resonances, secular polynomials and spectral statistics
// of metric graphs with leads.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "qg/acceptance.hpp"
#include "qg/analysis.hpp"
#include "qg/catalog.hpp"
#include "qg/graph_io.hpp"
#include "qg/secular_poly.hpp"

namespace {

using namespace qg;

std::string num(double x) {
    char buf[64];
    snprintf(buf, sizeof buf, "%.15g", x);
    return buf;
}

// minimal JSON writer with insertion order and %.15g numbers
class JsonOut {
public:
    void add(const std::string& k, double v) { fields_.push_back({k, num(v)}); }
    void add(const std::string& k, int v) { fields_.push_back({k, std::to_string(v)}); }
    void add(const std::string& k, const std::string& v) { fields_.push_back({k, "\"" + v + "\""}); }
    void add_raw(const std::string& k, const std::string& v) { fields_.push_back({k, v}); }
    std::string str() const {
        std::string s = "{\n";
        for (size_t i = 0; i < fields_.size(); ++i)
            s += "  \"" + fields_[i].first + "\": " + fields_[i].second +
                 (i + 1 < fields_.size() ? ",\n" : "\n");
        return s + "}\n";
    }

private:
    std::vector<std::pair<std::string, std::string>> fields_;
};

void write_out(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        return;
    }
    std::ofstream f(path);
    if (!f) throw ValidationError("cannot open output file \"" + path + "\"");
    f << content;
}

struct GraphArgs {
    std::string path;
    std::string catalog_name;
    std::vector<double> params;
    std::vector<double> lengths;

    MetricGraph resolve() const {
        if (!catalog_name.empty()) return catalog(catalog_name, params, lengths);
        if (path.empty())
            throw ValidationError("give a graph document path or --catalog NAME");
        MetricGraph g = load_graph_file(path);
        if (!lengths.empty()) return g.with_lengths(lengths);
        return g;
    }
};

void attach_graph_args(CLI::App* cmd, GraphArgs& ga) {
    cmd->add_option("graph", ga.path, "graph document (JSON)");
    cmd->add_option("--catalog", ga.catalog_name, "catalog graph name");
    cmd->add_option("--params", ga.params, "catalog parameters")->delimiter(',');
    cmd->add_option("--lengths", ga.lengths, "edge lengths override")->delimiter(',');
}

// band-depth heuristic: deepen the probe window until the count stops growing
double heuristic_tau_min(const SecularFunction& sf, double sigma_hi, const FinderConfig& cfg) {
    double hi = std::min(sigma_hi, 20.0);
    if (hi <= cfg.k_floor + 0.5) hi = cfg.k_floor + 0.5;
    double depth = 0.5;
    int prev = -1;
    for (int i = 0; i < 8; ++i, depth *= 2.0) {
        int c;
        try {
            c = count_zeros(sf, {cfg.k_floor, hi, -depth, cfg.tau_cap}, cfg);
        } catch (const BoundaryZeroError&) {
            c = count_zeros(sf, {cfg.k_floor, hi * 1.003, -depth * 1.01, cfg.tau_cap}, cfg);
        }
        if (c == prev) return -depth;
        prev = c;
    }
    return -depth;
}

std::string resonance_csv(const SecularFunction& sf, const FinderResult& res) {
    std::ostringstream os;
    os << "sigma,tau,residual,multiplicity,t_norm\n";
    for (const auto& r : res.resonances) {
        double tn = std::numeric_limits<double>::quiet_NaN();
        try {
            tn = std::sqrt(extract_state(sf, r.k, r.multiplicity).t_norm2());
        } catch (const NumericError&) {
        }
        os << num(r.sigma()) << "," << num(r.tau()) << "," << num(r.residual) << ","
           << r.multiplicity << "," << num(tn) << "\n";
    }
    return os.str();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"quantum-graph resonance toolkit"};
    app.require_subcommand(1);

    int threads = 0;
    app.add_option("--threads", threads, "worker threads (0 = hardware)");

    FinderConfig cfg;
    double sigma_min = -1.0, sigma_max = 10.0, tau_min = 0.0;
    bool tau_min_set = false, sigma_min_set = false;
    double tol = 0.0;
    std::string out_path;
    uint64_t seed = 1u;
    int samples = 20;
    double k_max = 10.0;
    double eps_min = 1e-3, eps_max = 1e-1;
    int eps_steps = 9;
    double u_max = 0.2;
    int steps = 400;
    std::vector<double> w0;

    auto add_common = [&](CLI::App* c) {
        c->add_option("--out", out_path, "output path (default stdout)");
        c->add_option("--tol", tol, "Newton tolerance override");
        c->add_option("--tau-cap", cfg.tau_cap, "upper tau edge of the search strip");
    };

    GraphArgs g_classify, g_poly, g_res, g_spec, g_weyl, g_neps, g_h, g_branch;

    auto* c_classify = app.add_subcommand("classify", "graph invariants as JSON");
    attach_graph_args(c_classify, g_classify);
    c_classify->add_option("--out", out_path, "output path");

    auto* c_poly = app.add_subcommand("secular-poly", "exact secular polynomial term list");
    attach_graph_args(c_poly, g_poly);
    c_poly->add_option("--out", out_path, "output path");

    auto* c_res = app.add_subcommand("resonances", "resonances in a rectangle (CSV)");
    attach_graph_args(c_res, g_res);
    add_common(c_res);
    c_res->add_option("--sigma-min", sigma_min, "left edge")->each([&](const std::string&) { sigma_min_set = true; });
    c_res->add_option("--sigma-max", sigma_max, "right edge");
    c_res->add_option("--tau-min", tau_min, "bottom edge (default: band-depth scan)")
        ->each([&](const std::string&) { tau_min_set = true; });

    auto* c_spec = app.add_subcommand("spectrum", "compact-graph eigenvalues (CSV)");
    attach_graph_args(c_spec, g_spec);
    add_common(c_spec);
    c_spec->add_option("--k-max", k_max, "upper edge of the eigenvalue window");

    auto* c_weyl = app.add_subcommand("weyl", "counting-function slope fit (JSON)");
    attach_graph_args(c_weyl, g_weyl);
    add_common(c_weyl);
    c_weyl->add_option("--sigma-max", sigma_max, "window K");
    c_weyl->add_option("--tau-min", tau_min, "strip depth (default: band-depth scan)")
        ->each([&](const std::string&) { tau_min_set = true; });

    auto* c_neps = app.add_subcommand("neps", "near-axis counting N(eps) (CSV + JSON summary)");
    attach_graph_args(c_neps, g_neps);
    add_common(c_neps);
    c_neps->add_option("--sigma-max", sigma_max, "window K");
    c_neps->add_option("--eps-min", eps_min, "smallest eps");
    c_neps->add_option("--eps-max", eps_max, "largest eps");
    c_neps->add_option("--eps-steps", eps_steps, "grid size");

    auto* c_h = app.add_subcommand("estimate-h", "resonance gap estimate for type I graphs");
    attach_graph_args(c_h, g_h);
    add_common(c_h);
    c_h->add_option("--samples", samples, "sampled length vectors");
    c_h->add_option("--seed", seed, "sampling seed");
    c_h->add_option("--sigma-max", sigma_max, "window K");

    auto* c_branch = app.add_subcommand("branch-trace", "resonance branch through a W-point");
    attach_graph_args(c_branch, g_branch);
    add_common(c_branch);
    c_branch->add_option("--w0", w0, "base point angles (default: first W-point)")->delimiter(',');
    c_branch->add_option("--u-max", u_max, "trace half-width");
    c_branch->add_option("--steps", steps, "samples per side");

    auto* c_verify = app.add_subcommand("verify", "run the acceptance suite");

    CLI11_PARSE(app, argc, argv);

    try {
        cfg.threads = threads;
        if (tol > 0.0) cfg.newton_tol = tol;

        if (c_classify->parsed()) {
            MetricGraph g = g_classify.resolve();
            GraphInvariants inv = compute_invariants(g);
            JsonOut j;
            j.add("type", inv.graph_type == GraphType::TypeI ? std::string("I") : std::string("II"));
            if (inv.g) j.add("g", *inv.g); else j.add("g", std::string("inf"));
            j.add("total_length", inv.total_length);
            j.add("v0_size", inv.v0_size);
            j.add("d_lower", inv.d_lower);
            if (inv.d_upper) j.add("d_upper", *inv.d_upper); else j.add("d_upper", std::string("inf"));
            if (inv.d_conjecture) j.add("d_conjecture", *inv.d_conjecture);
            write_out(out_path, j.str());
        } else if (c_poly->parsed()) {
            MetricGraph g = g_poly.resolve();
            SecularPolynomial sp = symbolic_secular(g);
            write_out(out_path, sp.poly.to_string() + "\n");
        } else if (c_res->parsed()) {
            MetricGraph g = g_res.resolve();
            SecularFunction sf(g);
            if (!sigma_min_set) sigma_min = cfg.k_floor;
            if (!tau_min_set) tau_min = heuristic_tau_min(sf, sigma_max, cfg);
            FinderResult res = find_resonances(sf, {sigma_min, sigma_max, tau_min, cfg.tau_cap}, cfg);
            write_out(out_path, resonance_csv(sf, res));
        } else if (c_spec->parsed()) {
            MetricGraph g = g_spec.resolve();
            auto eigs = compact_eigenvalues(g, k_max, cfg);
            std::ostringstream os;
            os << "k,multiplicity\n";
            for (auto& [k, m] : eigs) os << num(k) << "," << m << "\n";
            write_out(out_path, os.str());
        } else if (c_weyl->parsed()) {
            MetricGraph g = g_weyl.resolve();
            SecularFunction sf(g);
            if (!tau_min_set) tau_min = heuristic_tau_min(sf, sigma_max, cfg);
            FinderResult res = find_resonances(sf, {cfg.k_floor, sigma_max, tau_min, cfg.tau_cap}, cfg);
            WeylFit fit = weyl_fit(res.resonances, sigma_max, g.total_length());
            JsonOut j;
            j.add("K", sigma_max);
            j.add("tau_min", tau_min);
            j.add("slope", fit.slope);
            j.add("intercept", fit.intercept);
            j.add("l_over_pi", fit.l_over_pi);
            j.add("l_over_2pi", fit.l_over_2pi);
            j.add("n_resonances", fit.n_resonances);
            write_out(out_path, j.str());
        } else if (c_neps->parsed()) {
            MetricGraph g = g_neps.resolve();
            if (!(eps_min > 0.0) || !(eps_max > eps_min) || eps_steps < 2)
                throw ValidationError("need 0 < eps-min < eps-max and eps-steps >= 2");
            std::vector<double> eps;
            for (int i = 0; i < eps_steps; ++i)
                eps.push_back(eps_min * std::pow(eps_max / eps_min, double(i) / (eps_steps - 1)));
            CountingReport rep = n_eps_curve(g, sigma_max, eps, cfg);
            std::ostringstream os;
            os << "eps,n_hat\n";
            for (auto& [e, nh] : rep.eps_curve) os << num(e) << "," << num(nh) << "\n";
            write_out(out_path, os.str());
            JsonOut j;
            j.add("K", rep.K);
            j.add("d_hat", rep.d_hat);
            j.add("d_hat_half_window", rep.d_hat_half);
            j.add("stable", rep.stable ? std::string("true") : std::string("false"));
            j.add("weyl_slope", rep.weyl_slope);
            j.add("l_over_pi", rep.l_over_pi);
            j.add("l_over_2pi", rep.l_over_2pi);
            if (!out_path.empty() && out_path != "-") std::cout << j.str();
        } else if (c_h->parsed()) {
            MetricGraph g = g_h.resolve();
            HEstimate h = estimate_h(g, samples, sigma_max > 10.0 ? sigma_max : 12.0, seed, cfg);
            JsonOut j;
            j.add("h_hat", h.h_hat);
            j.add("spread", h.spread);
            j.add("samples", static_cast<int>(h.per_sample.size()));
            j.add("seed", static_cast<double>(seed));
            std::string arr = "[";
            for (size_t i = 0; i < h.per_sample.size(); ++i)
                arr += num(h.per_sample[i]) + (i + 1 < h.per_sample.size() ? ", " : "");
            j.add_raw("per_sample", arr + "]");
            write_out(out_path, j.str());
        } else if (c_branch->parsed()) {
            MetricGraph g = g_branch.resolve();
            std::array<double, 2> base{};
            if (w0.size() == 2) {
                base = {w0[0], w0[1]};
            } else {
                auto pts = find_w_points(g);
                if (pts.empty()) throw NumericError("no W-points found on the torus");
                base = pts.front();
            }
            BranchTrace tr = branch_trace(g, base, u_max, steps);
            std::ostringstream os;
            os << "u,beta,tau\n";
            for (size_t i = 0; i < tr.u.size(); ++i)
                os << num(tr.u[i]) << "," << num(tr.beta[i]) << "," << num(tr.tau[i]) << "\n";
            write_out(out_path, os.str());
            double l = g.edge(0).length, L = g.edge(1).length;
            JsonOut j;
            j.add("alpha0", tr.alpha0[0]);
            j.add("beta0", tr.alpha0[1]);
            j.add("c_fit", tr.c_fit);
            j.add("dtau_du_at_0", tr.dtau_du0);
            j.add("m_weight_1", tr.m_weight[0]);
            j.add("m_weight_2", tr.m_weight[1]);
            j.add("c_quarter_rule", 1.0 / (4.0 * (l + L)));
            j.add("c_fit_over_quarter_rule", tr.c_fit * 4.0 * (l + L));
            if (!out_path.empty() && out_path != "-") std::cout << j.str();
        } else if (c_verify->parsed()) {
            auto results = run_acceptance(&std::cout, threads);
            return all_passed(results) ? 0 : 1;
        }
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
