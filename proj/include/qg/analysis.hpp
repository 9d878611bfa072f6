#ifndef QG_ANALYSIS_HPP
#define QG_ANALYSIS_HPP

#include <array>
#include <cstdint>
#include <optional>

#include "qg/finder.hpp"
#include "qg/invariants.hpp"

namespace qg {

/// Deterministic, platform-independent uniform generator (splitmix64 core).
class Rng {
public:
    explicit Rng(uint64_t seed) : s_(seed) {}
    uint64_t next_u64();
    /// uniform in [0, 1)
    double uniform();

private:
    uint64_t s_;
};

/// L2 norm squared of a e^{ikx} + b e^{-ikx} over [0, l], k = sigma + i tau,
/// with the sigma -> 0 and tau -> 0 limits taken analytically.
double edge_norm2(Complex a, Complex b, Complex k, double l);

/// Norm of the resonant state over the finite part of the graph.
double state_norm2(const SecularFunction& sf, Complex k, const ResonantState& st);

/// Relative defect of the flux identity  -2 tau * ||u||^2 = sum |t_m|^2.
/// Throws ValidationError when sigma == 0 (the identity degenerates).
double energy_residual(const SecularFunction& sf, Complex k, const ResonantState& st);

struct WeylFit {
    double slope = 0.0;
    double intercept = 0.0;
    double l_over_pi = 0.0;   // |L|/pi reference
    double l_over_2pi = 0.0;  // |L|/2pi reference
    int n_resonances = 0;
};

/// Least-squares slope of #\{sigma_j <= x\} on x in [K/4, K].
/// Throws ValidationError with fewer than 20 resonances.
WeylFit weyl_fit(const std::vector<Resonance>& resonances, double K, double total_length);

struct CountingReport {
    double K = 0.0;
    double weyl_slope = 0.0;
    double l_over_pi = 0.0;
    double l_over_2pi = 0.0;
    std::vector<std::pair<double, double>> eps_curve; // (eps, Nhat)
    double d_hat = 0.0;      // 2 * slope of log Nhat vs log eps
    double d_hat_half = 0.0; // same at K/2
    bool stable = false;     // d_hat vs d_hat_half within 10%
    std::optional<double> h_hat;
};

/// Near-axis counting N̂(eps) = #{k_floor <= sigma <= K, -eps <= tau <= 0}/K
/// from an already complete resonance list (tau range must cover the largest
/// eps). The exponent fit uses the grid points with raw counts >= 10.
CountingReport n_eps_from_list(const std::vector<Resonance>& resonances, double K,
                               const std::vector<double>& eps_grid, double total_length);

/// Convenience wrapper: finds the resonances in the strip and counts them.
CountingReport n_eps_curve(const MetricGraph& g, double K, const std::vector<double>& eps_grid,
                           const FinderConfig& cfg = {});

/// Resonances with sigma in [k_floor, sigma_max], tau in [tau_min, tau_cap].
FinderResult resonances_in_strip(const SecularFunction& sf, double sigma_max, double tau_min,
                                 const FinderConfig& cfg = {});

struct HEstimate {
    double h_hat = 0.0; // min over samples and resonances of -tau |L|
    double spread = 0.0;
    std::vector<double> per_sample;
};

/// Empirical upper bound on the gap h(G) of a type I graph: sampled length
/// vectors 1 + U(0,1), rescaled to |L| = 1, resonances on sigma in
/// [k_floor, K]. Type II input is rejected. Returns +inf when the graph has
/// no finite edges (no resonances at all).
HEstimate estimate_h(const MetricGraph& g, int n_samples, double K, uint64_t seed,
                     const FinderConfig& cfg = {});

/// Real eigenvalues 0 < k <= k_max of the compact graph (leads dropped),
/// with winding multiplicities.
std::vector<std::pair<double, int>> compact_eigenvalues(const MetricGraph& g, double k_max,
                                                        const FinderConfig& cfg = {});

struct VanishingTest {
    int eigen_dim = 0;     // null-space dimension of the compact M
    int vanishing_dim = 0; // subspace additionally vanishing on V0
    Eigen::VectorXcd witness; // bond vector; empty when vanishing_dim == 0
};

/// Membership test for W_G / W_G^o at z_e = e^{i k l_e} (k real):
/// vanishing_dim >= 1 means W_G, == 1 means W_G^o.
VanishingTest vanishing_eigenfunction_test(const MetricGraph& g, double k);

/// Same test at an arbitrary torus point z_e = e^{i alpha_e}.
VanishingTest vanishing_at_torus_point(const MetricGraph& g, const std::vector<double>& alpha);

/// Zeros of the secular function on the torus (2-edge graphs) that carry a
/// compact eigenfunction vanishing on V0, i.e. the points of W_G.
std::vector<std::array<double, 2>> find_w_points(const MetricGraph& g, int grid = 96);

struct BranchTrace {
    std::array<double, 2> alpha0{};   // base point angles on the torus
    std::vector<double> u;            // alpha = alpha0[0] + u
    std::vector<double> beta;         // solved second angle
    std::vector<double> tau;          // solved imaginary part
    double c_fit = 0.0;               // tau ~ -c u^2
    double dtau_du0 = 0.0;            // fitted linear term at u = 0
    std::array<double, 2> m_weight{}; // |a_e|^2 + |b_e|^2 from the witness
};

/// Traces the resonance branch of a 2-edge graph through the W-point with
/// angles w0, by Newton continuation in (beta, tau) against u. The quadratic
/// fit uses |u| <= 0.05; samples reach |u| <= u_max.
BranchTrace branch_trace(const MetricGraph& g, const std::array<double, 2>& w0, double u_max,
                         int n_steps);

/// Barra-Gaspard crossing density: per eps, sum over traces of
/// (1/(2 pi)^2) * integral over {tau(u) >= -eps} of |l d(beta) - L d(alpha)|.
std::vector<double> barra_gaspard_counts(const std::vector<BranchTrace>& traces,
                                         const std::vector<double>& lengths,
                                         const std::vector<double>& eps_grid);

} // namespace qg

#endif
