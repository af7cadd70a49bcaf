#pragma once

#include <cmath>
#include <numbers>

#include "riccati.hpp"

namespace ccbound {

/// Fold the angle of the ray (x, y) into [0, pi), i.e. the principal value of
/// arctan(y/x) modulo pi.  A tiny |y| (relative to |x|) is snapped to zero so
/// that angles that are exact multiples of pi in exact arithmetic fold to 0.
inline double fold_angle(double y, double x) {
    if (std::abs(y) <= 1e-14 * std::max(1.0, std::abs(x))) return 0.0;
    double a = std::atan2(y, x);
    const double pi = std::numbers::pi;
    if (a < 0.0) a += pi;
    if (a >= pi) a -= pi;
    return a;
}

/// Principal angles of a symmetric matrix: each eigenvalue gamma maps to
/// rho = arctan(gamma) folded into [0, pi).
struct AngleSums {
    double sum = 0.0;
    Vector angles;
};

inline AngleSums principal_angles(const SymMatrix& M) {
    const EigDecomp d = sym_eig(M);
    AngleSums out;
    out.angles.resize(d.values.size());
    for (int j = 0; j < d.values.size(); ++j) {
        out.angles(j) = fold_angle(d.values(j), 1.0);
        out.sum += out.angles(j);
    }
    return out;
}

/// Principal angles of Psi = num * den^{-1} computed from the projective pair
/// via its generalized eigenstructure (QZ), so infinite eigenvalues of Psi
/// (singular den) fold to pi/2 through the two-argument arctangent.
inline AngleSums principal_angles_pair(const Matrix& num, const Matrix& den,
                                       double tol_imag = 1e-6) {
    Eigen::GeneralizedEigenSolver<Matrix> ges;
    ges.compute(num, den, false);
    if (ges.info() != Eigen::Success) {
        throw numeric_error("principal_angles_pair: QZ iteration failed");
    }
    AngleSums out;
    const auto& alphas = ges.alphas();
    const auto& betas = ges.betas();
    out.angles.resize(alphas.size());
    for (int j = 0; j < alphas.size(); ++j) {
        const double re = alphas(j).real();
        const double im = alphas(j).imag();
        const double be = betas(j);
        if (std::abs(im) > tol_imag * (std::abs(re) + std::abs(be))) {
            throw spectral_reality_error(
                "principal_angles_pair: complex generalized eigenvalue", re, im);
        }
        out.angles(j) = fold_angle(re, be);
        out.sum += out.angles(j);
    }
    return out;
}

/// Angles of Psi for a propagated state: the cheap symmetric path when den is
/// well conditioned, the pair path otherwise.
inline AngleSums principal_angles(const RiccatiState& s) {
    if (s.extractable()) return principal_angles(s.psi());
    return principal_angles_pair(s.num(), s.den());
}

/// Node-count bookkeeping of the decoupled constant-potential interval.  For
/// d_j = E - V0D_jj and width h, the scalar phase started from theta = 0
/// reaches theta_j = s_j pi + kappa_j with
///   s_j     = #integers strictly inside (0, sqrt(d_j) h / pi)  (0 if d_j <= 0),
///   kappa_j = fold of atan2(h eta0(-d_j h^2), xi(-d_j h^2)).
struct NodeCount {
    long long s_sum = 0;
    double kappa_sum = 0.0;
};

inline NodeCount interval_node_count(const Vector& d, double h) {
    const double pi = std::numbers::pi;
    NodeCount out;
    for (int j = 0; j < d.size(); ++j) {
        const KernelValues kv = eval_kernels(-d(j) * h * h);
        out.kappa_sum += fold_angle(h * kv.eta0, kv.xi);
        if (d(j) > 0.0) {
            const double t = std::sqrt(d(j)) * h / pi;
            long long s = static_cast<long long>(std::floor(t));
            if (static_cast<double>(s) == t) s -= 1; // endpoint node is not interior
            if (s > 0) out.s_sum += s;
        }
    }
    return out;
}

/// Accumulated phase sum S = sum_j phi_j of a propagated Psi, tracked
/// continuously (not modulo pi) from the boundary.  Left states accumulate a
/// non-decreasing pi-count as x grows; right states are handled through the
/// reflected problem x -> a + b - x, under which Psi -> -Psi_R and
/// phi -> pi - phi, so S decreases as x moves left.
struct PhaseState {
    double S = 0.0;
    double x = 0.0;
    Direction dir = Direction::left;
};

/// Initial phase sum at the boundary: angles folded into [0, pi) on the left,
/// into (0, pi] on the right.
inline PhaseState init_phase(const RiccatiState& state) {
    const AngleSums a = principal_angles(state);
    PhaseState ps{0.0, state.x(), state.direction()};
    const double pi = std::numbers::pi;
    for (int j = 0; j < a.angles.size(); ++j) {
        double v = a.angles(j);
        if (state.direction() == Direction::right && v == 0.0) v = pi;
        ps.S += v;
    }
    return ps;
}

namespace detail {

// Phase increment across one interval in the reflected-to-left picture.
// sign = +1 for a left state (psi as is), -1 for a right state (reflected).
inline double phase_increment(const RiccatiState& entry, const CpStep& step,
                              double sign, int depth) {
    const Matrix& Q = step.basis->eig.vectors;
    const Matrix nt = sign * (Q.transpose() * entry.num());
    const Matrix dt = Q.transpose() * entry.den();

    try {
        // Exit pair in the decomposition basis: diagonal transfer blocks.
        const auto xi = step.xi.asDiagonal();
        const Vector heta = step.h * step.eta0;
        Vector upd(step.Z.size());
        for (int k = 0; k < step.Z.size(); ++k) {
            upd(k) = (step.Z(k) / step.h) * step.eta0(k);
        }
        Matrix n_exit = step.xi.asDiagonal() * nt + heta.asDiagonal() * dt;
        Matrix d_exit = upd.asDiagonal() * nt + step.xi.asDiagonal() * dt;
        const double sc = std::max(n_exit.cwiseAbs().maxCoeff(), d_exit.cwiseAbs().maxCoeff());
        if (sc > 0.0 && std::isfinite(sc)) {
            n_exit /= sc;
            d_exit /= sc;
        }

        // rho: angles of Psi^D at the interval exit.
        AngleSums rho;
        {
            Eigen::PartialPivLU<Matrix> lu(d_exit);
            bool ok = true;
            for (int k = 0; k < d_exit.rows(); ++k) {
                if (lu.matrixLU()(k, k) == 0.0) ok = false;
            }
            if (ok && lu.rcond() >= 1e-12) {
                const Matrix inv = lu.solve(Matrix::Identity(d_exit.rows(), d_exit.cols()));
                rho = principal_angles(SymMatrix(n_exit * inv));
            } else {
                rho = principal_angles_pair(n_exit, d_exit);
            }
        }

        // tau: angles of Omega = [xi - h eta0 Psi^D]^{-1} [xi Psi^D + h eta0],
        // formed as the pencil (xi nt + h eta0 dt, xi dt - h eta0 nt) so a
        // singular entry pair or a pole of Omega needs no special case.
        const Matrix a_om = xi * nt + heta.asDiagonal() * dt;
        const Matrix b_om = xi * dt - heta.asDiagonal() * nt;
        const AngleSums tau = principal_angles_pair(a_om, b_om);

        // S(h xi^{-1} eta0): integer pi-count plus folded remainder.
        Vector d(step.Z.size());
        for (int k = 0; k < step.Z.size(); ++k) d(k) = -step.Z(k) / (step.h * step.h);
        const NodeCount nc = interval_node_count(d, step.h);

        return nc.kappa_sum + std::numbers::pi * static_cast<double>(nc.s_sum) +
               (rho.sum - tau.sum);
    } catch (const spectral_reality_error&) {
        // Re-site the intermediate Omega by splitting the interval; the
        // reference potential stays that of the whole interval.
        if (depth >= 8) {
            throw phase_step_error("phase_step: interval subdivision limit reached");
        }
        const CpStep half = build_step(step.basis, step.E, step.h / 2.0);
        RiccatiState mid = (entry.direction() == Direction::left) ? step_left(entry, half)
                                                                  : step_right(entry, half);
        return phase_increment(entry, half, sign, depth + 1) +
               phase_increment(mid, half, sign, depth + 1);
    }
}

} // namespace detail

/// Advance the phase sum across one interval.  The entry state must sit at
/// the interval's start (left states) or end (right states); the step's
/// decomposition provides the reference potential.
inline PhaseState phase_step(const PhaseState& phase, const RiccatiState& entry,
                             const CpStep& step) {
    if (phase.dir != entry.direction()) {
        throw domain_error("phase_step: phase and state directions disagree");
    }
    const double sign = (phase.dir == Direction::left) ? 1.0 : -1.0;
    const double delta = detail::phase_increment(entry, step, sign, 0);
    PhaseState out = phase;
    out.S += sign * delta;
    out.x += sign * step.h;
    return out;
}

/// Report of the indexing function at the matching point.
struct IndexReport {
    long long index_fn = 0;  // number of eigenvalues below E
    double omega_sum = 0.0;
    double phases_L = 0.0;
    double phases_R = 0.0;
};

/// Evaluate the indexing function
///   I(E) = (S_L(c) - S_R(c) - sum_j omega_j) / pi + n,
/// where tan(omega_j) are the eigenvalues of
/// [Psi_L - Psi_R][I + Psi_L Psi_R]^{-1} folded into [0, pi).  The
/// pre-rounding value must sit within 1e-6 of an integer.
inline IndexReport index_function(const RiccatiState& psiL, const RiccatiState& psiR,
                                  double SL, double SR, int n) {
    const SymMatrix pl = psiL.psi();
    const SymMatrix pr = psiR.psi();
    const Matrix diff = pl.mat() - pr.mat();
    const Matrix base = Matrix::Identity(n, n) + pl.mat() * pr.mat();
    const Vector w = pair_eigenvalues(diff, base, 1e-6);
    double omega = 0.0;
    for (int j = 0; j < w.size(); ++j) omega += fold_angle(w(j), 1.0);

    const double pi = std::numbers::pi;
    const double raw = (SL - SR - omega) / pi;
    const double rounded = std::round(raw);
    if (std::abs(raw - rounded) > 1e-6) {
        throw index_integrity_error(
            "index_function: phase residual " + std::to_string(raw - rounded) +
            " is not an integer (mesh too coarse or a missed pole)");
    }
    const long long idx = static_cast<long long>(rounded) + n;
    if (idx < 0) {
        throw index_integrity_error("index_function: negative index " + std::to_string(idx));
    }
    return {idx, omega, SL, SR};
}

} // namespace ccbound
