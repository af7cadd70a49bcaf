#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "shooting.hpp"

namespace ccbound {

struct EfSample {
    double x;
    Vector y;
    Vector yp;
};

/// A normalized eigenfunction sampled at the mesh points.
struct Eigenfunction {
    double E = 0.0;
    int k = 0;
    int branch = 0;            // 0-based branch within a degenerate eigenspace
    std::vector<EfSample> samples;
    double norm_certificate = 0.0;  // int y^T y dx of the unscaled function
};

/// Coefficient vectors of the left and right solution families.  For each
/// null vector v of M = Psi_L(c) - Psi_R(c) the choice
///   w_L = Y_L'(c)^{-1} v,   w_R = Y_R'(c)^{-1} v
/// makes both y and y' continuous at c at once: y'_L(c) w_L = v = y'_R(c) w_R
/// and y_L(c) w_L = Psi_L v = Psi_R v = y_R(c) w_R.
inline std::vector<std::pair<Vector, Vector>> matching_vectors(const SymMatrix& M,
                                                               const Matrix& ypL_c,
                                                               const Matrix& ypR_c,
                                                               int multiplicity) {
    if (multiplicity < 1) {
        throw domain_error("matching_vectors: multiplicity must be at least 1");
    }
    const std::vector<Vector> vs = null_space(M, 1e-8);
    if (vs.empty()) {
        throw domain_error("matching_vectors: matching matrix has no zero eigenvalue "
                           "(E is not an eigenvalue)");
    }
    if (static_cast<int>(vs.size()) < multiplicity) {
        throw domain_error("matching_vectors: fewer null vectors than the multiplicity");
    }
    std::vector<std::pair<Vector, Vector>> out;
    out.reserve(multiplicity);
    for (int m = 0; m < multiplicity; ++m) {
        out.emplace_back(solve(ypL_c, vs[m]), solve(ypR_c, vs[m]));
    }
    return out;
}

namespace detail {

inline void fix_sign(std::vector<EfSample>& samples) {
    double peak = 0.0;
    for (const auto& s : samples) peak = std::max(peak, s.y.cwiseAbs().maxCoeff());
    if (peak == 0.0) return;
    for (const auto& s : samples) {
        for (int i = 0; i < s.y.size(); ++i) {
            if (std::abs(s.y(i)) > 1e-8 * peak) {
                if (s.y(i) < 0.0) {
                    for (auto& t : samples) {
                        t.y = -t.y;
                        t.yp = -t.yp;
                    }
                }
                return;
            }
        }
    }
}

} // namespace detail

/// Recover the normalized eigenfunction(s) belonging to a converged result.
/// Y' is propagated from both ends with the already-computed Psi trajectory,
/// samples are y = Psi Y' w per side, and the norm comes from the energy
/// derivative of Psi at the matching point:
///   ||y||^2 = v^T (Psi_L^(E)(c) - Psi_R^(E)(c)) v.
inline std::vector<Eigenfunction> recover_eigenfunctions(const ShootingSolver& solver,
                                                         const EigenResult& r) {
    const auto traj = solver.trajectories(r.E);
    const int c = traj.c_index;
    const int N = solver.mesh().intervals();
    const ProblemDef& p = solver.problem();

    std::vector<SymMatrix> psi_left(c + 1);
    for (int i = 0; i <= c; ++i) psi_left[i] = traj.left[i].psi();
    std::vector<SymMatrix> psi_right(N - c + 1);
    for (int j = 0; j <= N - c; ++j) psi_right[j] = traj.right[j].psi();

    std::vector<Matrix> ypL(c + 1), ypR(N - c + 1);
    ypL[0] = -p.A1;
    for (int i = 0; i < c; ++i) {
        ypL[i + 1] = propagate_yprime(ypL[i], psi_left[i], traj.steps[i]);
    }
    ypR[N - c] = -p.B1;
    for (int i = N - 1; i >= c; --i) {
        ypR[i - c] = propagate_yprime_back(ypR[i - c + 1], psi_right[i - c + 1],
                                           traj.steps[i]);
    }

    const SymMatrix M(psi_left[c].mat() - psi_right[0].mat());
    const auto pairs = matching_vectors(M, ypL[c], ypR[0], r.multiplicity);
    const Matrix dpsi = traj.left[c].psi_e().mat() - traj.right[0].psi_e().mat();

    std::vector<Eigenfunction> out;
    out.reserve(pairs.size());
    for (std::size_t branch = 0; branch < pairs.size(); ++branch) {
        const auto& [wL, wR] = pairs[branch];
        const Vector v = ypL[c] * wL;
        const double norm2 = v.dot(dpsi * v);
        if (!(norm2 > 0.0) || !std::isfinite(norm2)) {
            throw normalization_error("recover_eigenfunctions: non-positive norm "
                                      "(energy not converged or definiteness violated)");
        }
        const double scale = 1.0 / std::sqrt(norm2);

        Eigenfunction ef;
        ef.E = r.E;
        ef.k = r.k;
        ef.branch = static_cast<int>(branch);
        ef.norm_certificate = norm2;
        ef.samples.reserve(N + 1);
        for (int i = 0; i <= N; ++i) {
            EfSample s;
            s.x = solver.mesh().points[i];
            if (i < c) {
                s.yp = ypL[i] * wL;
                s.y = psi_left[i].mat() * s.yp;
            } else {
                s.yp = ypR[i - c] * wR;
                s.y = psi_right[i - c].mat() * s.yp;
            }
            s.y *= scale;
            s.yp *= scale;
            ef.samples.push_back(std::move(s));
        }
        detail::fix_sign(ef.samples);
        out.push_back(std::move(ef));
    }
    return out;
}

/// Insert `subdiv - 1` equally spaced interior points per mesh interval by
/// applying the constant-reference propagator of that interval to the
/// left-hand meshpoint sample.
inline std::vector<EfSample> dense_samples(const ShootingSolver& solver,
                                           const Eigenfunction& ef, int subdiv) {
    if (subdiv < 1) throw domain_error("dense_samples: subdiv must be >= 1");
    const int N = solver.mesh().intervals();
    std::vector<EfSample> out;
    out.reserve(static_cast<std::size_t>(N) * subdiv + 1);
    for (int i = 0; i < N; ++i) {
        const EfSample& base = ef.samples[i];
        out.push_back(base);
        const double h = solver.mesh().h(i);
        for (int s = 1; s < subdiv; ++s) {
            const double delta = h * s / subdiv;
            const CpStep cs = build_step(solver.cache().basis(i), ef.E, delta);
            EfSample mid;
            mid.x = base.x + delta;
            mid.y = cs.U * base.y + cs.W * base.yp;
            mid.yp = cs.Up * base.y + cs.Wp * base.yp;
            out.push_back(std::move(mid));
        }
    }
    out.push_back(ef.samples[N]);
    return out;
}

} // namespace ccbound
