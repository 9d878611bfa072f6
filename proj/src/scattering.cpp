#include "qg/scattering.hpp"

#include <cmath>
#include <limits>

namespace qg {

Complex SecularValue::f_prime() const {
    Complex v = f();
    return v * log_deriv;
}

double SecularValue::log2_abs_f() const {
    double a = std::abs(mantissa);
    if (a == 0.0) return -std::numeric_limits<double>::infinity();
    return std::log2(a) + exp2;
}

BondScattering build_scattering(const MetricGraph& g, bool include_leads) {
    const int n = g.num_edges();
    const int N = include_leads ? g.num_leads() : 0;
    BondScattering bs;
    bs.n_edges = n;
    bs.n_leads = N;
    bs.edge_length = g.edge_lengths();
    bs.U = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    bs.R = Eigen::MatrixXd::Zero(N, N);
    bs.To = Eigen::MatrixXd::Zero(N, 2 * n);
    bs.Ti = Eigen::MatrixXd::Zero(2 * n, N);

    // bond b < n: forward (from -> to); bond n+b: backward
    std::vector<int> origin(2 * n), term(2 * n);
    for (int e = 0; e < n; ++e) {
        origin[e] = g.edge(e).from;
        term[e] = g.edge(e).to;
        origin[n + e] = g.edge(e).to;
        term[n + e] = g.edge(e).from;
    }
    auto rev = [n](int b) { return b < n ? b + n : b - n; };

    std::vector<double> deg(g.num_vertices());
    for (int v = 0; v < g.num_vertices(); ++v)
        deg[v] = g.edge_degree(v) + (include_leads ? g.lead_count(v) : 0);

    for (int o = 0; o < 2 * n; ++o)
        for (int i = 0; i < 2 * n; ++i)
            if (term[i] == origin[o])
                bs.U(o, i) = 2.0 / deg[origin[o]] - (o == rev(i) ? 1.0 : 0.0);

    if (N > 0) {
        std::vector<int> lead_vertex;
        for (int v : g.marked_vertices())
            for (int c = 0; c < g.lead_count(v); ++c) lead_vertex.push_back(v);
        for (int m = 0; m < N; ++m) {
            int v = lead_vertex[m];
            for (int m2 = 0; m2 < N; ++m2)
                if (lead_vertex[m2] == v)
                    bs.R(m, m2) = 2.0 / deg[v] - (m == m2 ? 1.0 : 0.0);
            for (int i = 0; i < 2 * n; ++i)
                if (term[i] == v) bs.To(m, i) = 2.0 / deg[v];
            for (int o = 0; o < 2 * n; ++o)
                if (origin[o] == v) bs.Ti(o, m) = 2.0 / deg[v];
        }
    }
    return bs;
}

Eigen::VectorXcd SecularFunction::phases(Complex k) const {
    const int n = bs_.n_edges;
    Eigen::VectorXcd d(2 * n);
    for (int e = 0; e < n; ++e) {
        Complex z = std::exp(Complex(0, 1) * k * bs_.edge_length[e]);
        d(e) = z;
        d(n + e) = z;
    }
    return d;
}

Eigen::MatrixXcd SecularFunction::matrix(Complex k) const {
    const int m = bs_.n_bonds();
    Eigen::VectorXcd d = phases(k);
    Eigen::MatrixXcd M = Eigen::MatrixXcd::Identity(m, m);
    M.noalias() -= bs_.U.cast<Complex>() * d.asDiagonal();
    return M;
}

SecularValue SecularFunction::det_and_logderiv(Complex k) const {
    const int m = bs_.n_bonds();
    SecularValue out;
    if (m == 0) { // no finite edges: f is identically 1
        out.mantissa = 1.0;
        return out;
    }
    Eigen::MatrixXcd M = matrix(k);
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(M);

    // scaled determinant from the LU diagonal
    Complex mant = static_cast<double>(lu.permutationP().determinant());
    int ex = 0;
    double min_piv = std::numeric_limits<double>::infinity();
    double max_piv = 0.0;
    for (int i = 0; i < m; ++i) {
        Complex p = lu.matrixLU()(i, i);
        double a = std::abs(p);
        min_piv = std::min(min_piv, a);
        max_piv = std::max(max_piv, a);
        mant *= p;
        double am = std::abs(mant);
        if (am != 0.0 && std::isfinite(am)) {
            int e2;
            std::frexp(am, &e2);
            if (e2 > 60 || e2 < -60) {
                mant = {std::ldexp(mant.real(), -e2), std::ldexp(mant.imag(), -e2)};
                ex += e2;
            }
        }
    }
    out.mantissa = mant;
    out.exp2 = ex;

    bool singular = !(min_piv > max_piv * 1e-15) || max_piv == 0.0;
    if (!singular) {
        // f'/f = sum_b i l_b (1 - (M^{-1})_bb), since M' = (M - Id) diag(i l)
        Eigen::MatrixXcd inv = lu.solve(Eigen::MatrixXcd::Identity(m, m));
        Complex acc = 0.0;
        for (int b = 0; b < m; ++b)
            acc += Complex(0, 1) * bs_.bond_length(b) * (1.0 - inv(b, b));
        out.log_deriv = acc;
    }
    out.fd_fallback = singular;
    return out;
}

SecularValue SecularFunction::evaluate(Complex k) const {
    SecularValue v = det_and_logderiv(k);
    if (v.fd_fallback && bs_.n_bonds() > 0) {
        // central finite difference for f' at a numerically singular M(k)
        double h = std::sqrt(std::numeric_limits<double>::epsilon()) * (1.0 + std::abs(k));
        SecularValue p = det_and_logderiv(k + h);
        SecularValue q = det_and_logderiv(k - h);
        int e = std::max(p.exp2, q.exp2);
        Complex dp = Complex(std::ldexp(p.mantissa.real(), p.exp2 - e),
                             std::ldexp(p.mantissa.imag(), p.exp2 - e));
        Complex dq = Complex(std::ldexp(q.mantissa.real(), q.exp2 - e),
                             std::ldexp(q.mantissa.imag(), q.exp2 - e));
        Complex der = (dp - dq) / (2.0 * h); // times 2^e
        // log_deriv = f'/f with common scale cancelled
        Complex fval = Complex(std::ldexp(v.mantissa.real(), v.exp2 - e),
                               std::ldexp(v.mantissa.imag(), v.exp2 - e));
        if (std::abs(fval) > 0)
            v.log_deriv = der / fval;
        else
            v.log_deriv = std::numeric_limits<double>::infinity();
    }
    return v;
}

double SecularFunction::total_length() const {
    double s = 0.0;
    for (double l : bs_.edge_length) s += l;
    return s;
}

double unitary_defect(const BondScattering& bs, double k) {
    const int n2 = bs.n_bonds();
    const int N = bs.n_leads;
    Eigen::VectorXcd d(n2);
    for (int b = 0; b < n2; ++b)
        d(b) = std::exp(Complex(0, 1) * k * bs.bond_length(b));
    Eigen::MatrixXcd S(N + n2, N + n2);
    S.topLeftCorner(N, N) = bs.R.cast<Complex>();
    S.topRightCorner(N, n2) = bs.To.cast<Complex>() * d.asDiagonal();
    S.bottomLeftCorner(n2, N) = bs.Ti.cast<Complex>();
    S.bottomRightCorner(n2, n2) = bs.U.cast<Complex>() * d.asDiagonal();
    Eigen::MatrixXcd defect = S * S.adjoint() - Eigen::MatrixXcd::Identity(N + n2, N + n2);
    return defect.cwiseAbs().maxCoeff();
}

} // namespace qg
