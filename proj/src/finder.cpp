#include "qg/finder.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <future>
#include <thread>

namespace qg {

namespace {

// 15-point Gauss-Legendre rule on [-1, 1]: center node plus mirrored pairs.
const double kGLNode[8] = {0.0,
                           0.2011940939974345, 0.3941513470775634, 0.5709721726085388,
                           0.7244177313601701, 0.8482065834104272, 0.9372733924007060,
                           0.9879925180204854};
const double kGLWeight[8] = {0.2025782419255613,
                             0.1984314853271116, 0.1861610000155622, 0.1662692058169939,
                             0.1395706779261543, 0.1071592204671719, 0.0703660474881081,
                             0.0307532419961173};

struct Box {
    double x0, x1, y0, y1;
    double w() const { return x1 - x0; }
    double h() const { return y1 - y0; }
    double dim() const { return std::max(w(), h()); }
    Complex center() const { return {0.5 * (x0 + x1), 0.5 * (y0 + y1)}; }
    bool contains(Complex k, double slack) const {
        return k.real() >= x0 - slack && k.real() <= x1 + slack &&
               k.imag() >= y0 - slack && k.imag() <= y1 + slack;
    }
};

// deterministic jitter sequence 0, +1, -1, +2, -2, ... (in units of the step)
double jitter_step(int j) {
    if (j == 0) return 0.0;
    int m = (j + 1) / 2;
    return (j % 2 == 1) ? m : -m;
}

class Winding {
public:
    Winding(const SecularFunction& sf, const FinderConfig& cfg, std::atomic<long long>& evals)
        : sf_(sf), cfg_(cfg), evals_(evals) {}

    // Contour integral of f'/f over the rectangle boundary divided by 2*pi*i.
    // seg_tol is the absolute tolerance per boundary segment (radians of
    // accumulated argument). Throws BoundaryZeroError when a zero sits on or
    // numerically too close to the contour.
    Complex raw(const Box& b, double seg_tol) const {
        double guard = 1e-9 * std::max(b.dim(), 1e-6);
        Complex c00(b.x0, b.y0), c10(b.x1, b.y0), c11(b.x1, b.y1), c01(b.x0, b.y1);
        Complex total = segment(c00, c10, seg_tol, guard) + segment(c10, c11, seg_tol, guard) +
                        segment(c11, c01, seg_tol, guard) + segment(c01, c00, seg_tol, guard);
        return total / Complex(0.0, 2.0 * M_PI);
    }

    // Winding as a verified integer: refine until successive estimates agree
    // within cfg.winding_stab and land within 0.25 of an integer.
    int integer(const Box& b) const {
        double prev = std::numeric_limits<double>::quiet_NaN();
        double seg_tol = 0.15;
        for (int level = 0; level <= cfg_.max_winding_refine; ++level, seg_tol *= 0.25) {
            Complex w = raw(b, seg_tol);
            double wi = w.real(); // the integral/(2 pi i) is real at a true winding
            double nearest = std::round(wi);
            bool near_int = std::abs(wi - nearest) <= 0.25 && std::abs(w.imag()) <= 0.25;
            bool stable = !std::isnan(prev) && std::abs(wi - prev) <= cfg_.winding_stab;
            if (near_int && (stable || std::abs(wi - nearest) <= 1e-3))
                return static_cast<int>(nearest);
            prev = wi;
        }
        throw NumericError("winding number failed to stabilize to an integer");
    }

private:
    Complex eval_logderiv(Complex k, double guard) const {
        evals_.fetch_add(1, std::memory_order_relaxed);
        SecularValue v = sf_.evaluate(k);
        double dist = 1.0 / std::abs(v.log_deriv); // distance-to-zero estimate
        if (!(dist > guard))
            throw BoundaryZeroError("zero of the secular function on or near the contour");
        return v.log_deriv;
    }

    Complex panel(Complex a, Complex b, double guard) const {
        Complex mid = 0.5 * (a + b), half = 0.5 * (b - a);
        Complex acc = kGLWeight[0] * eval_logderiv(mid, guard);
        for (int i = 1; i < 8; ++i)
            acc += kGLWeight[i] * (eval_logderiv(mid + kGLNode[i] * half, guard) +
                                   eval_logderiv(mid - kGLNode[i] * half, guard));
        return acc * half;
    }

    Complex adaptive(Complex a, Complex b, Complex whole, double tol, double guard,
                     int depth) const {
        Complex m = 0.5 * (a + b);
        Complex left = panel(a, m, guard), right = panel(m, b, guard);
        Complex sum = left + right;
        if (std::abs(sum - whole) <= tol || depth >= 48)
            return sum;
        return adaptive(a, m, left, 0.5 * tol, guard, depth + 1) +
               adaptive(m, b, right, 0.5 * tol, guard, depth + 1);
    }

    Complex segment(Complex a, Complex b, double tol, double guard) const {
        return adaptive(a, b, panel(a, b, guard), tol, guard, 0);
    }

    const SecularFunction& sf_;
    const FinderConfig& cfg_;
    std::atomic<long long>& evals_;
};

struct NewtonOut {
    Complex k;
    bool converged = false;
    double rel_res = 0.0;
    double abs_f = 0.0;
};

NewtonOut newton_refine(const SecularFunction& sf, Complex k0, int mult,
                        const FinderConfig& cfg, const Box& box,
                        std::atomic<long long>& evals) {
    NewtonOut out;
    Complex k = k0;
    double leash = 4.0 * std::max(box.dim(), 1e-12);
    for (int it = 0; it < cfg.newton_max_iter; ++it) {
        evals.fetch_add(1, std::memory_order_relaxed);
        SecularValue v = sf.evaluate(k);
        if (v.mantissa == Complex(0.0, 0.0)) { // hit an exact zero
            out.k = k;
            out.converged = true;
            return out;
        }
        Complex step = static_cast<double>(mult) / v.log_deriv;
        if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) return out;
        k -= step;
        if (std::abs(k - box.center()) > leash) return out; // wandered off
        if (std::abs(step) < cfg.newton_tol * (1.0 + std::abs(k))) {
            evals.fetch_add(1, std::memory_order_relaxed);
            SecularValue vf = sf.evaluate(k);
            out.k = k;
            out.converged = true;
            out.rel_res = mult / (std::abs(vf.log_deriv) * (1.0 + std::abs(k)));
            out.abs_f = vf.abs_f();
            return out;
        }
    }
    return out;
}

class Subdivider {
public:
    Subdivider(const SecularFunction& sf, const FinderConfig& cfg)
        : sf_(sf), cfg_(cfg), winding_(sf, cfg, evals_) {}

    // Region count with the boundary pushed outward until off every zero.
    // Expanding can only gain zeros below the axis; above the axis f has no
    // zeros, so growing past tau_cap is safe.
    int count_with_outward_jitter(Box& b, std::atomic<int>& jitters) const {
        double dx = cfg_.jitter_rel * b.dim();
        for (int j = 0; j < cfg_.max_jitter; ++j) {
            double d = j * dx;
            Box trial{b.x0 - d, b.x1 + d, b.y0 - d, b.y1 + d};
            try {
                int c = winding_.integer(trial);
                b = trial;
                return c;
            } catch (const BoundaryZeroError&) {
                jitters.fetch_add(1);
            }
        }
        throw NumericError("could not move the region boundary off a zero");
    }

    // All `count` zeros coincide at k (within dedup_tol)? Verified by the
    // winding of a small square around k.
    bool verify_point_multiplicity(Complex k, int count) const {
        double r = cfg_.dedup_tol;
        for (int attempt = 0; attempt < 5; ++attempt, r *= 1.618) {
            Box tiny{k.real() - r, k.real() + r, k.imag() - r, k.imag() + r};
            try {
                return winding_.integer(tiny) == count;
            } catch (const BoundaryZeroError&) {
            } catch (const NumericError&) {
                return false;
            }
        }
        return false;
    }

    void process(const Box& box, int count, std::vector<Resonance>& out) const {
        if (count == 0) return;
        // Newton first; a split costs two windings, Newton a handful of evals.
        NewtonOut nr = newton_refine(sf_, box.center(), count, cfg_, box, evals_);
        if (nr.converged && box.contains(nr.k, 1e-12 * (1.0 + std::abs(nr.k))) &&
            nr.rel_res < cfg_.residual_tol &&
            (count == 1 || verify_point_multiplicity(nr.k, count))) {
            Resonance r;
            r.k = nr.k;
            r.residual = nr.abs_f;
            r.rel_residual = nr.rel_res;
            r.multiplicity = count;
            r.degenerate = count >= 2;
            out.push_back(r);
            return;
        }
        if (box.dim() <= cfg_.min_box) {
            // unresolved cluster or stubborn Newton: report the box center
            evals_.fetch_add(1, std::memory_order_relaxed);
            SecularValue v = sf_.evaluate(box.center());
            Resonance r;
            r.k = box.center();
            r.residual = v.abs_f();
            r.rel_residual = 1.0 / (std::abs(v.log_deriv) * (1.0 + std::abs(r.k)));
            r.multiplicity = count;
            r.degraded = true;
            r.degenerate = count >= 2;
            out.push_back(r);
            return;
        }
        split(box, count, out);
    }

    void split(const Box& box, int count, std::vector<Resonance>& out) const {
        bool vertical = box.w() >= box.h(); // split the longer side
        double span = vertical ? box.w() : box.h();
        double dx = cfg_.jitter_rel * span;
        for (int j = 0; j < cfg_.max_jitter; ++j) {
            double mid = (vertical ? 0.5 * (box.x0 + box.x1) : 0.5 * (box.y0 + box.y1)) +
                         jitter_step(j) * dx;
            Box b1 = box, b2 = box;
            if (vertical) { b1.x1 = mid; b2.x0 = mid; }
            else          { b1.y1 = mid; b2.y0 = mid; }
            try {
                int c1 = winding_.integer(b1);
                int c2 = winding_.integer(b2);
                if (c1 + c2 != count) {
                    additivity_retries_.fetch_add(1);
                    continue; // quadrature artifact near the split: re-jitter
                }
                subdivisions_.fetch_add(1);
                process(b1, c1, out);
                process(b2, c2, out);
                return;
            } catch (const BoundaryZeroError&) {
                boundary_jitters_.fetch_add(1);
            }
        }
        throw NumericError("could not place a subdivision line off a zero");
    }

    const Winding& winding() const { return winding_; }
    long long evals() const { return evals_.load(); }
    int subdivisions() const { return subdivisions_.load(); }
    int additivity_retries() const { return additivity_retries_.load(); }
    int boundary_jitters() const { return boundary_jitters_.load(); }

private:
    const SecularFunction& sf_;
    const FinderConfig& cfg_;
    mutable std::atomic<long long> evals_{0};
    Winding winding_;
    mutable std::atomic<int> subdivisions_{0};
    mutable std::atomic<int> additivity_retries_{0};
    mutable std::atomic<int> boundary_jitters_{0};
};

void validate_region(const SearchRegion& r) {
    if (!std::isfinite(r.sigma_min) || !std::isfinite(r.sigma_max) ||
        !std::isfinite(r.tau_min) || !std::isfinite(r.tau_max))
        throw ValidationError("search region must be finite");
    if (!(r.sigma_min < r.sigma_max) || !(r.tau_min < r.tau_max))
        throw ValidationError("search region must satisfy sigma_min < sigma_max, tau_min < tau_max");
}

// Clip away the excluded band around the origin; yields 0, 1 or 2 boxes.
std::vector<Box> clip_origin(const SearchRegion& r, double k_floor) {
    Box b{r.sigma_min, r.sigma_max, r.tau_min, r.tau_max};
    bool tau_hits = (r.tau_min < k_floor && r.tau_max > -k_floor);
    if (!tau_hits || r.sigma_min >= k_floor || r.sigma_max <= -k_floor) return {b};
    std::vector<Box> parts;
    if (r.sigma_min < -k_floor)
        parts.push_back({r.sigma_min, -k_floor, r.tau_min, r.tau_max});
    if (r.sigma_max > k_floor)
        parts.push_back({k_floor, r.sigma_max, r.tau_min, r.tau_max});
    return parts;
}

FinderResult find_resonances_once(const SecularFunction& sf, const SearchRegion& region,
                                  const FinderConfig& cfg) {
    FinderResult result;
    Subdivider sub(sf, cfg);
    std::atomic<int> jitters{0};

    int root_count = 0;
    std::vector<std::pair<Box, int>> top;
    for (Box b : clip_origin(region, cfg.k_floor)) {
        int c = sub.count_with_outward_jitter(b, jitters);
        root_count += c;
        top.push_back({b, c});
    }
    result.stats.root_count = root_count;

    // First-level chunking of wide strips; chunk counts are verified against
    // the region count (this is the first, explicitly additive, subdivision).
    std::vector<std::pair<Box, int>> tasks;
    for (auto& [b, c] : top) {
        if (c == 0) continue;
        double chunk = std::max(6.0 * b.h(), 2.0);
        if (b.w() <= 2.0 * chunk) {
            tasks.push_back({b, c});
            continue;
        }
        const Winding& w = sub.winding();
        int parts = static_cast<int>(std::ceil(b.w() / chunk));
        int acc = 0;
        double x = b.x0;
        std::vector<std::pair<Box, int>> pieces;
        for (int i = 0; i < parts; ++i) {
            double x1 = (i == parts - 1) ? b.x1 : b.x0 + (i + 1) * b.w() / parts;
            Box piece{x, x1, b.y0, b.y1};
            double dx = cfg.jitter_rel * piece.w();
            int c_piece = -1;
            for (int j = 0; j < cfg.max_jitter && c_piece < 0; ++j) {
                Box trial = piece;
                if (i < parts - 1) trial.x1 = x1 + jitter_step(j) * dx;
                try {
                    c_piece = w.integer(trial);
                    piece = trial;
                } catch (const BoundaryZeroError&) {
                    jitters.fetch_add(1);
                }
            }
            if (c_piece < 0)
                throw NumericError("could not place a chunk boundary off a zero");
            acc += c_piece;
            if (c_piece > 0) pieces.push_back({piece, c_piece});
            x = piece.x1;
        }
        if (acc != c)
            throw NumericError("chunk windings do not sum to the region count");
        tasks.insert(tasks.end(), pieces.begin(), pieces.end());
    }

    unsigned hw = std::thread::hardware_concurrency();
    unsigned n_threads = cfg.threads > 0 ? static_cast<unsigned>(cfg.threads) : (hw ? hw : 1);
    std::vector<std::vector<Resonance>> found(tasks.size());
    if (n_threads <= 1 || tasks.size() <= 1) {
        for (size_t i = 0; i < tasks.size(); ++i)
            sub.process(tasks[i].first, tasks[i].second, found[i]);
    } else {
        std::atomic<size_t> next{0};
        auto worker = [&]() {
            for (size_t i = next.fetch_add(1); i < tasks.size(); i = next.fetch_add(1))
                sub.process(tasks[i].first, tasks[i].second, found[i]);
        };
        std::vector<std::future<void>> pool;
        unsigned n = std::min<unsigned>(n_threads, static_cast<unsigned>(tasks.size()));
        for (unsigned t = 0; t < n; ++t)
            pool.push_back(std::async(std::launch::async, worker));
        for (auto& f : pool) f.get(); // rethrows NumericError from workers
    }

    for (auto& v : found)
        result.resonances.insert(result.resonances.end(), v.begin(), v.end());

    std::sort(result.resonances.begin(), result.resonances.end(),
              [](const Resonance& a, const Resonance& b) {
                  return std::make_pair(a.sigma(), a.tau()) < std::make_pair(b.sigma(), b.tau());
              });

    // merge duplicates (the same zero reached from adjacent boxes)
    std::vector<Resonance> dedup;
    for (const auto& r : result.resonances) {
        if (!dedup.empty() && std::abs(dedup.back().k - r.k) < cfg.dedup_tol)
            dedup.back().multiplicity += r.multiplicity;
        else
            dedup.push_back(r);
    }
    result.resonances = std::move(dedup);

    result.stats.evaluations = sub.evals();
    result.stats.subdivisions = sub.subdivisions();
    result.stats.additivity_retries = sub.additivity_retries();
    result.stats.boundary_jitters = sub.boundary_jitters() + jitters.load();

    if (result.total_multiplicity() != root_count)
        throw NumericError("total multiplicity does not match the region winding count");
    return result;
}

} // namespace

int FinderResult::total_multiplicity() const {
    int s = 0;
    for (const auto& r : resonances) s += r.multiplicity;
    return s;
}

bool FinderResult::has_degraded() const {
    for (const auto& r : resonances)
        if (r.degraded) return true;
    return false;
}

int count_zeros(const SecularFunction& sf, const SearchRegion& region, const FinderConfig& cfg) {
    validate_region(region);
    if (sf.bonds().n_bonds() == 0) return 0;
    std::atomic<long long> evals{0};
    Winding w(sf, cfg, evals);
    int total = 0;
    for (const Box& b : clip_origin(region, cfg.k_floor)) total += w.integer(b);
    return total;
}

FinderResult find_resonances(const SecularFunction& sf, const SearchRegion& region,
                             const FinderConfig& cfg) {
    validate_region(region);
    if (sf.bonds().n_bonds() == 0) return {};
    try {
        return find_resonances_once(sf, region, cfg);
    } catch (const NumericError&) {
        // one retry on a different jitter lattice
        FinderConfig cfg2 = cfg;
        cfg2.jitter_rel *= 3.7;
        return find_resonances_once(sf, region, cfg2);
    }
}

ResonantState extract_state(const SecularFunction& sf, Complex k, int winding_multiplicity,
                            double sv_tol) {
    const BondScattering& bs = sf.bonds();
    const int m = bs.n_bonds();
    if (m == 0) throw NumericError("graph has no finite edges; no state to extract");

    Eigen::MatrixXcd M = sf.matrix(k);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    double scale = std::max(1.0, sv(0));
    if (!(sv(m - 1) < sv_tol * scale))
        throw NumericError("k is not close enough to a zero of the secular function");

    ResonantState st;
    st.smallest_sv = sv(m - 1);
    st.second_sv = m >= 2 ? sv(m - 2) : std::numeric_limits<double>::infinity();
    st.degenerate = winding_multiplicity >= 2 || st.second_sv < sv_tol * scale;
    st.bond_vector = svd.matrixV().col(m - 1);

    Eigen::VectorXcd d = sf.phases(k);
    const int n = bs.n_edges;
    st.a.resize(n);
    st.b.resize(n);
    for (int e = 0; e < n; ++e) {
        st.a[e] = st.bond_vector(e);
        st.b[e] = st.bond_vector(n + e) * d(n + e); // coefficient of e^{-ikx}
    }
    Eigen::VectorXcd t = bs.To.cast<Complex>() * (d.asDiagonal() * st.bond_vector);
    st.t_out.assign(t.data(), t.data() + t.size());

    double tn = std::sqrt(st.t_norm2());
    double ab = std::sqrt(st.ab_norm2());
    Complex s = (tn > 1e-8 * ab) ? Complex(1.0 / tn) : Complex(1.0 / ab);
    st.lead_normalized = tn > 1e-8 * ab;
    for (auto& x : st.a) x *= s;
    for (auto& x : st.b) x *= s;
    for (auto& x : st.t_out) x *= s;
    st.bond_vector *= s;
    return st;
}

double ResonantState::t_norm2() const {
    double s = 0.0;
    for (const auto& t : t_out) s += std::norm(t);
    return s;
}

double ResonantState::ab_norm2() const {
    double s = 0.0;
    for (const auto& x : a) s += std::norm(x);
    for (const auto& x : b) s += std::norm(x);
    return s;
}

} // namespace qg
