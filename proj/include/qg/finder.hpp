#ifndef QG_FINDER_HPP
#define QG_FINDER_HPP

#include <optional>
#include <vector>

#include "qg/scattering.hpp"

namespace qg {

/// Rectangle sigma_min..sigma_max x tau_min..tau_max in the k-plane.
/// Regions straddling the origin are clipped to |sigma| >= k_floor by the
/// finder (the secular function may vanish trivially at k = 0).
struct SearchRegion {
    double sigma_min = 0.0;
    double sigma_max = 1.0;
    double tau_min = -1.0;
    double tau_max = 1e-6;

    double width() const { return sigma_max - sigma_min; }
    double height() const { return tau_max - tau_min; }
};

struct FinderConfig {
    double tau_cap = 1e-6;     // default upper tau edge for regions
    double k_floor = 1e-3;     // excluded disc around the origin
    double newton_tol = 1e-12; // |dk| < tol * (1 + |k|)
    int newton_max_iter = 60;
    double min_box = 1e-9; // no separation attempted below this size
    double dedup_tol = 1e-8;
    double residual_tol = 1e-9;  // relative distance-to-zero acceptance
    double winding_stab = 0.05;  // successive refinements must agree this well
    int max_winding_refine = 6;
    int max_jitter = 10;
    double jitter_rel = 1e-4; // of the box dimension
    int threads = 0;          // 0 = hardware concurrency, 1 = sequential
};

/// Boundary-zero suspicion: a zero of f appears to sit (numerically) on the
/// integration contour. find_resonances handles this by jittering boxes;
/// count_zeros propagates it to the caller.
class BoundaryZeroError : public NumericError {
public:
    using NumericError::NumericError;
};

struct Resonance {
    Complex k;
    double residual = 0.0;     // |f(k)|
    double rel_residual = 0.0; // |f/f'| / (1+|k|), distance-to-zero estimate
    int multiplicity = 1;
    bool degraded = false;   // Newton failed; k is the final box center
    bool degenerate = false; // winding multiplicity >= 2 at one point
    double sigma() const { return k.real(); }
    double tau() const { return k.imag(); }
};

struct FinderStats {
    long long evaluations = 0;
    int subdivisions = 0;       // accepted splits, each verified additive
    int additivity_retries = 0; // splits re-done after a count mismatch
    int boundary_jitters = 0;
    int root_count = 0; // winding of the whole (clipped) region
};

struct FinderResult {
    std::vector<Resonance> resonances; // sorted by (sigma, tau)
    FinderStats stats;
    int total_multiplicity() const;
    bool has_degraded() const;
};

/// Winding number of f around the rectangle boundary by adaptive
/// Gauss-Legendre quadrature of f'/f. Throws BoundaryZeroError on suspicion
/// of a boundary zero and NumericError if the winding never stabilizes to an
/// integer.
int count_zeros(const SecularFunction& sf, const SearchRegion& region,
                const FinderConfig& cfg = {});

/// All zeros of the secular function in the region: adaptive bisection until
/// each box holds at most one zero, Newton refinement from box centers,
/// deduplication, (sigma, tau) ordering. The sum of multiplicities equals the
/// region winding count; every subdivision is verified additive.
FinderResult find_resonances(const SecularFunction& sf, const SearchRegion& region,
                             const FinderConfig& cfg = {});

/// Resonant state at a (near-)zero k: null vector of M(k) from the SVD.
struct ResonantState {
    std::vector<Complex> a, b;       // wave coefficients per edge
    std::vector<Complex> t_out;      // outgoing lead amplitudes
    Eigen::VectorXcd bond_vector;    // the null vector itself
    double smallest_sv = 0.0;
    double second_sv = 0.0;
    bool lead_normalized = false; // sum |t|^2 = 1; otherwise ||(a,b)|| = 1
    bool degenerate = false;

    double t_norm2() const;
    double ab_norm2() const;
};

/// Throws NumericError when the smallest singular value of M(k) exceeds
/// sv_tol (k is not close enough to a zero).
ResonantState extract_state(const SecularFunction& sf, Complex k,
                            int winding_multiplicity = 1, double sv_tol = 1e-6);

} // namespace qg

#endif
