#pragma once

#include <cmath>
#include <limits>
#include <memory>
#include <vector>

#include "kernels.hpp"
#include "mesh.hpp"
#include "smallmat.hpp"

namespace ccbound {

/// Energy-independent data of one mesh interval: the averaged potential and
/// its orthogonal diagonalization V0 = Q diag(lambda) Q^T.  Computed once per
/// interval and reused for every trial energy.
struct IntervalBasis {
    double x_lo = 0.0;
    double x_hi = 0.0;
    SymMatrix V0;
    EigDecomp eig;
};

/// One-interval propagator of the constant-reference-potential method,
/// together with its derivatives with respect to E.  The transfer matrix
/// [U W; Up Wp] advances (Y, Y') across the interval and is exact when the
/// potential is constant there.
struct CpStep {
    double h = 0.0;
    double E = 0.0;
    std::shared_ptr<const IntervalBasis> basis;
    Vector Z, xi, eta0;          // per-channel kernel data in the decomp basis
    Matrix U, W, Up, Wp;         // transfer blocks, original basis
    Matrix dU, dW, dUp, dWp;     // d/dE of the blocks

    int n() const { return static_cast<int>(U.rows()); }
};

/// Interval average of the potential, V0 = (1/h) int V dx, by 3-point
/// Gauss-Legendre quadrature (exact for cubic variation).
inline SymMatrix average_potential(const ProblemDef& p, double x_lo, double x_hi) {
    if (!(x_lo < x_hi)) {
        throw domain_error("average_potential: need x_lo < x_hi");
    }
    const double mid = 0.5 * (x_lo + x_hi);
    const double half = 0.5 * (x_hi - x_lo);
    const double node = std::sqrt(0.6);
    Matrix acc = (5.0 / 18.0) * p.V(mid - half * node);
    acc += (8.0 / 18.0) * p.V(mid);
    acc += (5.0 / 18.0) * p.V(mid + half * node);
    return SymMatrix(acc);
}

inline std::shared_ptr<const IntervalBasis> make_interval_basis(const ProblemDef& p,
                                                                double x_lo, double x_hi) {
    auto basis = std::make_shared<IntervalBasis>();
    basis->x_lo = x_lo;
    basis->x_hi = x_hi;
    basis->V0 = average_potential(p, x_lo, x_hi);
    basis->eig = sym_eig(basis->V0);
    return basis;
}

namespace detail {

inline Matrix rotate_diag(const Matrix& Q, const Vector& d) {
    return Q * d.asDiagonal() * Q.transpose();
}

} // namespace detail

/// Assemble the propagator for step width h at energy E from a precomputed
/// diagonalization.  In the decomposition basis, with Z_k = (lambda_k - E) h^2:
///   U = xi(Z),  W = h eta0(Z),  U' = (Z/h) eta0(Z),  W' = xi(Z),
/// and with dZ/dE = -h^2 the energy derivatives follow by the chain rule.
inline CpStep build_step(std::shared_ptr<const IntervalBasis> basis, double E, double h) {
    if (!(h > 0.0)) throw domain_error("build_step: step width must be positive");
    const int n = basis->V0.n();
    const Matrix& Q = basis->eig.vectors;

    CpStep s;
    s.h = h;
    s.E = E;
    s.basis = basis;
    s.Z.resize(n);
    s.xi.resize(n);
    s.eta0.resize(n);
    Vector ud(n), wd(n), upd(n), wpd(n), dud(n), dwd(n), dupd(n), dwpd(n);
    for (int k = 0; k < n; ++k) {
        const double z = (basis->eig.values(k) - E) * h * h;
        const KernelValues kv = eval_kernels(z);
        s.Z(k) = z;
        s.xi(k) = kv.xi;
        s.eta0(k) = kv.eta0;
        ud(k) = kv.xi;
        wd(k) = h * kv.eta0;
        upd(k) = (z / h) * kv.eta0;
        wpd(k) = kv.xi;
        dud(k) = -0.5 * h * h * kv.eta0;
        dwd(k) = -0.5 * h * h * h * kv.eta1;
        dupd(k) = -h * (kv.eta0 + 0.5 * z * kv.eta1);
        dwpd(k) = -0.5 * h * h * kv.eta0;
    }
    s.U = detail::rotate_diag(Q, ud);
    s.W = detail::rotate_diag(Q, wd);
    s.Up = detail::rotate_diag(Q, upd);
    s.Wp = detail::rotate_diag(Q, wpd);
    s.dU = detail::rotate_diag(Q, dud);
    s.dW = detail::rotate_diag(Q, dwd);
    s.dUp = detail::rotate_diag(Q, dupd);
    s.dWp = detail::rotate_diag(Q, dwpd);
    return s;
}

/// Convenience overload with an ad-hoc diagonalization of V0.
inline CpStep build_step(const SymMatrix& V0, double E, double h) {
    auto basis = std::make_shared<IntervalBasis>();
    basis->x_lo = 0.0;
    basis->x_hi = h;
    basis->V0 = V0;
    basis->eig = sym_eig(V0);
    return build_step(basis, E, h);
}

/// Per-mesh cache of interval diagonalizations.  Construction is
/// single-threaded; afterwards the cache is read-only and may be shared
/// across concurrent propagations.
class StepCache {
public:
    StepCache() = default;

    StepCache(const ProblemDef& p, const Mesh& m) {
        bases_.reserve(m.intervals());
        for (int i = 0; i < m.intervals(); ++i) {
            bases_.push_back(make_interval_basis(p, m.points[i], m.points[i + 1]));
        }
    }

    int size() const { return static_cast<int>(bases_.size()); }
    const std::shared_ptr<const IntervalBasis>& basis(int i) const { return bases_[i]; }

    /// Propagators for every interval at trial energy E.
    std::vector<CpStep> steps_at(double E) const {
        std::vector<CpStep> out;
        out.reserve(bases_.size());
        for (const auto& b : bases_) {
            out.push_back(build_step(b, E, b->x_hi - b->x_lo));
        }
        return out;
    }

    /// Smallest eigenvalue of the averaged potential over all intervals.
    double min_potential_eigenvalue() const {
        double m = std::numeric_limits<double>::infinity();
        for (const auto& b : bases_) {
            m = std::min(m, b->eig.values(0));
        }
        return m;
    }

private:
    std::vector<std::shared_ptr<const IntervalBasis>> bases_;
};

} // namespace ccbound
