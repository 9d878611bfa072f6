#ifndef QG_SCATTERING_HPP
#define QG_SCATTERING_HPP

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "qg/graph.hpp"

namespace qg {

using Complex = std::complex<double>;

/// Determinant value in scaled form f = mantissa * 2^exp2, together with the
/// exact logarithmic derivative f'/f. Avoids overflow deep in the lower
/// half-plane where |e^{ikl}| is huge.
struct SecularValue {
    Complex mantissa{0.0, 0.0};
    int exp2 = 0;
    Complex log_deriv{0.0, 0.0}; // f'/f
    bool fd_fallback = false;    // f' came from a finite difference

    /// Materialized f; may overflow to inf for extreme exponents.
    Complex f() const { return {std::ldexp(mantissa.real(), exp2), std::ldexp(mantissa.imag(), exp2)}; }
    /// Materialized f' = f * (f'/f).
    Complex f_prime() const;
    double abs_f() const { return std::ldexp(std::abs(mantissa), exp2); }
    /// log2 |f|, safe at any scale (-inf when f == 0).
    double log2_abs_f() const;
};

/// The unitary bond-scattering data of a metric graph with leads:
/// k-independent real blocks U (bond->bond), R (lead->lead), To (bond->lead),
/// Ti (lead->bond), with all k-dependence in D(k) = diag(e^{ik l}) doubled
/// over the two directions of every edge. Directed bonds are ordered edge
/// forwards (input order) then edge backwards.
struct BondScattering {
    Eigen::MatrixXd U;  // 2n x 2n
    Eigen::MatrixXd R;  // N x N
    Eigen::MatrixXd To; // N x 2n
    Eigen::MatrixXd Ti; // 2n x N
    std::vector<double> edge_length; // n entries
    int n_edges = 0;
    int n_leads = 0;

    int n_bonds() const { return 2 * n_edges; }
    double bond_length(int b) const { return edge_length[b % n_edges]; }
};

/// Kirchhoff construction: every outgoing amplitude at a vertex of total
/// degree d equals sum over incoming arrivals of (2/d - delta_backscatter).
/// Degree-1 vertices reflect with +1 (Neumann). include_leads=false drops the
/// lead channels (compact-graph variant).
BondScattering build_scattering(const MetricGraph& g, bool include_leads = true);

/// Secular function f(k) = det(Id - U D(k)) and its exact k-derivative via
/// f'/f = tr(M^{-1} M') = sum_b i l_b (1 - (M^{-1})_bb).
class SecularFunction {
public:
    explicit SecularFunction(BondScattering bs) : bs_(std::move(bs)) {}
    SecularFunction(const MetricGraph& g, bool include_leads = true)
        : SecularFunction(build_scattering(g, include_leads)) {}

    SecularValue evaluate(Complex k) const;

    /// M(k) = Id - U D(k).
    Eigen::MatrixXcd matrix(Complex k) const;
    /// D(k) diagonal, as a vector over bonds.
    Eigen::VectorXcd phases(Complex k) const;

    const BondScattering& bonds() const { return bs_; }
    double total_length() const;

private:
    SecularValue det_and_logderiv(Complex k) const;
    BondScattering bs_;
};

/// Max-norm of S(k) S(k)* - Id for the assembled (N+2n) block matrix
/// S(k) = [[R, To D(k)], [Ti, U D(k)]]; k real.
double unitary_defect(const BondScattering& bs, double k);

} // namespace qg

#endif
