#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "prufer.hpp"

namespace ccbound {

/// Result of one mismatch evaluation at the matching point.
struct MismatchResult {
    double mu = 0.0;      // eigenvalue of Psi_L(c) - Psi_R(c) smallest in modulus
    double dmu = 0.0;     // d mu / dE via the eigenvector sandwich of Psi^(E)
    SymMatrix M;          // the matching matrix itself
    Vector v;             // unit eigenvector belonging to mu
    int c_index = 0;      // meshpoint index actually used
};

/// A located eigenvalue.
struct EigenResult {
    double E = 0.0;            // eigenvalue converged on the main mesh
    int k = 0;                 // requested index
    int multiplicity = 1;
    int newton_iters = 0;
    double bracket_lo = 0.0;   // index bracket handed to Newton
    double bracket_hi = 0.0;
    double mismatch_final = 0.0;
    double err_estimate = 0.0; // |E - E_reference|, filled by error_estimate
    bool err_estimate_ok = false;
    double E_best = 0.0;       // Richardson combination (4 E_ref - E) / 3
    double tol = 0.0;          // convergence tolerance used
    double E_max = 0.0;        // search ceiling used
};

/// One record of the per-iteration trace stream.
struct TraceRecord {
    const char* stage;   // "bracket" or "newton"
    int k;
    double E;
    double mu;           // NaN during bracketing
    long long index;     // -1 during Newton
};

/// Matching point: the right endpoint of the interval where the diagonalized
/// reference potential reaches its smallest value; ties break toward the
/// interval closest to the domain midpoint.  Returns the meshpoint index.
inline int choose_matching_index(const Mesh& m, const StepCache& cache) {
    const double mid = 0.5 * (m.a() + m.b());
    int best = 0;
    double best_val = std::numeric_limits<double>::infinity();
    double best_dist = std::numeric_limits<double>::infinity();
    for (int i = 0; i < cache.size(); ++i) {
        const double v = cache.basis(i)->eig.values(0);
        const double dist = std::abs(0.5 * (m.points[i] + m.points[i + 1]) - mid);
        if (v < best_val || (v == best_val && dist < best_dist)) {
            best = i;
            best_val = v;
            best_dist = dist;
        }
    }
    return best + 1;
}

inline double choose_matching_point(const Mesh& m, const StepCache& cache) {
    return m.points[choose_matching_index(m, cache)];
}

/// Two-sided shooting driver: owns the mesh, the per-interval diagonalization
/// cache and the matching point, and locates eigenvalues by index through the
/// phase-sum bracketing plus Newton iteration on the matching mismatch.
///
/// All query methods are const and share only immutable caches, so distinct
/// eigenvalue searches may run concurrently on one solver.
class ShootingSolver {
public:
    ShootingSolver(const ProblemDef& p, double mesh_tol)
        : ShootingSolver(p, build_mesh(p, mesh_tol), true) {}

    ShootingSolver(const ProblemDef& p, Mesh mesh, bool with_reference = true)
        : prob_(p), mesh_(std::move(mesh)), cache_(prob_, mesh_) {
        c_index_ = choose_matching_index(mesh_, cache_);
        e_floor_ = cache_.min_potential_eigenvalue() - 1.0;
        if (with_reference) {
            reference_ = std::make_unique<ShootingSolver>(prob_, reference_mesh(mesh_), false);
        }
    }

    const ProblemDef& problem() const { return prob_; }
    const Mesh& mesh() const { return mesh_; }
    const StepCache& cache() const { return cache_; }
    int matching_index() const { return c_index_; }
    double matching_point() const { return mesh_.points[c_index_]; }
    double energy_floor() const { return e_floor_; }
    bool has_reference() const { return reference_ != nullptr; }
    const ShootingSolver& reference() const {
        if (!reference_) throw domain_error("solver has no reference-mesh companion");
        return *reference_;
    }

    /// Optional per-iteration trace sink.
    std::function<void(const TraceRecord&)> trace;

    /// The indexing function I(E): number of eigenvalues below E.
    long long index_of(double E) const {
        const std::vector<CpStep> steps = cache_.steps_at(E);
        const int N = cache_.size();
        for (int attempt = 0; attempt <= 5; ++attempt) {
            const int c = shifted_c(attempt);
            RiccatiState L = init_left(prob_.A1, prob_.A2, mesh_.a());
            PhaseState phL = init_phase(L);
            for (int i = 0; i < c; ++i) {
                phL = phase_step(phL, L, steps[i]);
                L = step_left(L, steps[i]);
            }
            RiccatiState R = init_right(prob_.B1, prob_.B2, mesh_.b());
            PhaseState phR = init_phase(R);
            for (int i = N - 1; i >= c; --i) {
                phR = phase_step(phR, R, steps[i]);
                R = step_right(R, steps[i]);
            }
            try {
                return index_function(L, R, phL.S, phR.S, prob_.n).index_fn;
            } catch (const singular_extraction_error&) {
            } catch (const singular_matrix_error&) {
            }
        }
        throw singular_extraction_error("index_of: no usable matching point near c");
    }

    /// Mismatch mu(E) and its energy derivative at the matching point; shifts
    /// the matching point up to five meshpoints when extraction fails there.
    MismatchResult mismatch(double E) const {
        const std::vector<CpStep> steps = cache_.steps_at(E);
        for (int attempt = 0; attempt <= 5; ++attempt) {
            const int c = shifted_c(attempt);
            const RiccatiState L = left_state_at(steps, c);
            const RiccatiState R = right_state_at(steps, c);
            if (!L.extractable() || !R.extractable()) continue;
            return assemble_mismatch(L, R, c);
        }
        throw singular_extraction_error("mismatch: no usable matching point near c");
    }

    /// Locate the eigenvalue of index k below the search ceiling E_max.
    EigenResult locate_by_index(int k, double tol, double E_max) const {
        if (k < 0) throw domain_error("locate_by_index: index must be non-negative");
        if (!(tol > 0.0) || !std::isfinite(tol)) {
            throw domain_error("locate_by_index: tolerance must be positive");
        }

        // Search window: I(lo) <= k < I(hi).
        double lo = e_floor_;
        for (int guard = 0; index_of(lo) > k; ++guard) {
            if (guard > 60) throw index_out_of_range("locate_by_index: cannot find window floor");
            lo -= std::max(1.0, std::abs(lo));
        }
        double hi = std::max(E_max, lo + 1.0);
        double expand = std::max(1.0, std::abs(hi));
        for (int guard = 0; index_of(hi) <= k; ++guard) {
            if (guard > 60) {
                throw index_out_of_range("locate_by_index: index " + std::to_string(k) +
                                         " not found below expanded ceiling");
            }
            hi += expand;
            expand *= 2.0;
        }

        bisect(lo, hi, k, std::max(tol, 1e-3 * (1.0 + std::abs(lo))));

        EigenResult r;
        r.k = k;
        r.tol = tol;
        r.E_max = E_max;
        r.bracket_lo = lo;
        r.bracket_hi = hi;

        MismatchResult mm;
        refine_and_validate(lo, hi, k, tol, r, mm);
        return r;
    }

    /// Fill err_estimate and the Richardson value E_best by re-converging the
    /// eigenvalue on the reference mesh from the same bracket.
    void error_estimate(EigenResult& r) const {
        r.err_estimate_ok = false;
        r.E_best = r.E;
        if (!reference_) return;
        try {
            const double w = std::max(r.bracket_hi - r.bracket_lo,
                                      1e-3 * (1.0 + std::abs(r.E)));
            double lo = r.E - w;
            double hi = r.E + w;
            MismatchResult mm;
            int iters = 0;
            double e_ref = reference_->newton(r.E, lo, hi, r.tol, r.k, iters, mm);

            const double eps = 1e-6 * (1.0 + std::abs(e_ref));
            const long long kd = reference_->index_of(e_ref - eps);
            const int mult = static_cast<int>(null_space(mm.M, 1e-8).size());
            if (!(kd <= r.k && r.k < kd + std::max(mult, 1))) {
                const EigenResult full = reference_->locate_by_index(r.k, r.tol, r.E_max);
                e_ref = full.E;
            }
            r.err_estimate = std::abs(r.E - e_ref);
            r.E_best = (4.0 * e_ref - r.E) / 3.0;
            r.err_estimate_ok = true;
        } catch (const error&) {
            // estimate flagged unavailable; the main-mesh result stands
        }
    }

    /// Everything eigenfunction recovery needs at a converged energy: the pair
    /// states at every meshpoint on both sides of the matching point.
    struct MatchTrajectories {
        int c_index = 0;
        std::vector<RiccatiState> left;   // left[i] at x_i, i = 0..c
        std::vector<RiccatiState> right;  // right[j] at x_{c+j}, j = 0..N-c
        std::vector<CpStep> steps;
    };

    MatchTrajectories trajectories(double E) const {
        std::vector<CpStep> steps = cache_.steps_at(E);
        const int N = cache_.size();
        for (int attempt = 0; attempt <= 5; ++attempt) {
            const int c = shifted_c(attempt);
            MatchTrajectories t;
            t.c_index = c;
            t.left.reserve(c + 1);
            t.left.push_back(init_left(prob_.A1, prob_.A2, mesh_.a()));
            for (int i = 0; i < c; ++i) {
                t.left.push_back(step_left(t.left.back(), steps[i]));
            }
            t.right.reserve(N - c + 1);
            t.right.push_back(init_right(prob_.B1, prob_.B2, mesh_.b()));
            for (int i = N - 1; i >= c; --i) {
                t.right.push_back(step_right(t.right.back(), steps[i]));
            }
            std::reverse(t.right.begin(), t.right.end());
            if (!t.left.back().extractable() || !t.right.front().extractable()) continue;
            t.steps = std::move(steps);
            return t;
        }
        throw singular_extraction_error("trajectories: no usable matching point near c");
    }

private:
    int shifted_c(int attempt) const {
        const int N = cache_.size();
        const double xc = mesh_.points[c_index_];
        const int dir = (mesh_.b() - xc) >= (xc - mesh_.a()) ? 1 : -1;
        return std::clamp(c_index_ + dir * attempt, 1, N);
    }

    RiccatiState left_state_at(const std::vector<CpStep>& steps, int c) const {
        RiccatiState L = init_left(prob_.A1, prob_.A2, mesh_.a());
        for (int i = 0; i < c; ++i) L = step_left(L, steps[i]);
        return L;
    }

    RiccatiState right_state_at(const std::vector<CpStep>& steps, int c) const {
        RiccatiState R = init_right(prob_.B1, prob_.B2, mesh_.b());
        for (int i = static_cast<int>(steps.size()) - 1; i >= c; --i) {
            R = step_right(R, steps[i]);
        }
        return R;
    }

    MismatchResult assemble_mismatch(const RiccatiState& L, const RiccatiState& R,
                                     int c) const {
        MismatchResult out;
        out.c_index = c;
        out.M = SymMatrix(L.psi().mat() - R.psi().mat());
        const EigDecomp d = sym_eig(out.M);
        int jmin = 0;
        for (int j = 1; j < d.values.size(); ++j) {
            if (std::abs(d.values(j)) < std::abs(d.values(jmin))) jmin = j;
        }
        out.mu = d.values(jmin);
        out.v = d.vectors.col(jmin);
        const Matrix dM = L.psi_e().mat() - R.psi_e().mat();
        out.dmu = out.v.dot(dM * out.v);
        return out;
    }

    void bisect(double& lo, double& hi, int k, double width) const {
        while (hi - lo > width) {
            const double mid = 0.5 * (lo + hi);
            const long long idx = index_of(mid);
            if (trace) trace({"bracket", k, mid, std::nan(""), idx});
            (idx <= k ? lo : hi) = mid;
        }
    }

    /// Bracket-safeguarded Newton on mu(E), then a short polish toward
    /// roundoff so the null-space tolerance is meaningful at the returned E.
    double newton(double E0, double lo, double hi, double tol, int k, int& iters,
                  MismatchResult& mm) const {
        double E = E0;
        bool converged = false;
        for (iters = 1; iters <= 50; ++iters) {
            mm = mismatch(E);
            if (trace) trace({"newton", k, E, mm.mu, -1});
            if (mm.mu < 0.0) lo = std::max(lo, E);
            else if (mm.mu > 0.0) hi = std::min(hi, E);
            double e_new = (mm.dmu > 0.0) ? E - mm.mu / mm.dmu
                                          : std::numeric_limits<double>::quiet_NaN();
            if (!std::isfinite(e_new) || e_new <= lo || e_new >= hi) {
                e_new = 0.5 * (lo + hi);
            }
            const double moved = std::abs(e_new - E);
            E = e_new;
            if (moved <= tol * (1.0 + std::abs(E))) {
                converged = true;
                break;
            }
        }
        if (!converged) {
            throw convergence_error("newton: stagnation after 50 iterations near E = " +
                                    std::to_string(E));
        }
        for (int j = 0; j < 4; ++j) {
            mm = mismatch(E);
            if (!(mm.dmu > 0.0)) break;
            const double de = -mm.mu / mm.dmu;
            const double e_new = E + de;
            if (!std::isfinite(e_new) || e_new <= lo || e_new >= hi) break;
            E = e_new;
            if (std::abs(de) <= 1e-13 * (1.0 + std::abs(E))) break;
        }
        mm = mismatch(E);
        return E;
    }

    void refine_and_validate(double lo, double hi, int k, double tol, EigenResult& r,
                             MismatchResult& mm) const {
        for (int round = 0; round < 2; ++round) {
            int iters = 0;
            const double E = newton(0.5 * (lo + hi), lo, hi, tol, k, iters, mm);
            const int mult = static_cast<int>(null_space(mm.M, 1e-8).size());
            if (mult >= 1) {
                const double eps = 1e-6 * (1.0 + std::abs(E));
                const long long kd = index_of(E - eps);
                if (kd <= k && k < kd + mult) {
                    r.E = E;
                    r.multiplicity = mult;
                    r.newton_iters = iters;
                    r.mismatch_final = mm.mu;
                    return;
                }
            }
            // one retry from a much tighter index bracket
            if (round == 0) bisect(lo, hi, k, tol * (1.0 + std::abs(lo)));
        }
        throw convergence_error("locate_by_index: index validation failed for k = " +
                                std::to_string(k));
    }

    ProblemDef prob_;
    Mesh mesh_;
    StepCache cache_;
    int c_index_ = 1;
    double e_floor_ = 0.0;
    std::unique_ptr<ShootingSolver> reference_;
};

} // namespace ccbound
