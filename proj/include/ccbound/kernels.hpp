#pragma once

#include <cmath>

#include "errors.hpp"

namespace ccbound {

/// Values of the constant-reference-potential kernels at z = (V0 - E) h^2.
///
///   xi(z)   = cos(sqrt(-z))            for z <= 0,   cosh(sqrt(z))        for z > 0
///   eta0(z) = sin(sqrt(-z))/sqrt(-z)   for z < 0,    sinh(sqrt(z))/sqrt(z) for z > 0
///   eta1(z) = (xi(z) - eta0(z)) / z,   eta1(0) = 1/3
///
/// eta1 feeds the energy derivative of eta0; all three satisfy
/// xi^2 - z*eta0^2 = 1.
struct KernelValues {
    double z;
    double xi;
    double eta0;
    double eta1;
};

namespace detail {

// Taylor series around z = 0, used below |z| = 0.1 to avoid the cancellation
// in (xi - eta0)/z.  Ten terms keep the truncation error below 1e-16 at the
// switch-over point.
inline KernelValues kernel_series(double z) {
    double xi = 0.0, eta0 = 0.0, eta1 = 0.0;
    double t_xi = 1.0;        // z^k / (2k)!
    double t_eta0 = 1.0;      // z^k / (2k+1)!
    double t_eta1 = 1.0 / 3.0; // z^k (2k+2)/(2k+3)!
    for (int k = 0; k < 10; ++k) {
        xi += t_xi;
        eta0 += t_eta0;
        eta1 += t_eta1;
        const double two_k = 2.0 * k;
        t_xi *= z / ((two_k + 1.0) * (two_k + 2.0));
        t_eta0 *= z / ((two_k + 2.0) * (two_k + 3.0));
        t_eta1 *= z / ((two_k + 2.0) * (two_k + 5.0));
    }
    return {z, xi, eta0, eta1};
}

} // namespace detail

/// Evaluate xi, eta0 and eta1 at z; stable through the sign change and near z = 0.
inline KernelValues eval_kernels(double z) {
    if (!std::isfinite(z)) {
        throw domain_error("eval_kernels: argument must be finite");
    }
    if (std::abs(z) < 0.1) {
        return detail::kernel_series(z);
    }
    if (z > 0.0) {
        const double s = std::sqrt(z);
        const double xi = std::cosh(s);
        const double eta0 = std::sinh(s) / s;
        return {z, xi, eta0, (xi - eta0) / z};
    }
    const double s = std::sqrt(-z);
    const double xi = std::cos(s);
    const double eta0 = std::sin(s) / s;
    return {z, xi, eta0, (xi - eta0) / z};
}

/// First derivatives with respect to z:  d xi/dz = eta0/2,  d eta0/dz = eta1/2.
struct KernelDerivatives {
    double dxi_dz;
    double deta0_dz;
};

inline KernelDerivatives eval_kernel_derivatives(double z) {
    const KernelValues k = eval_kernels(z);
    return {0.5 * k.eta0, 0.5 * k.eta1};
}

} // namespace ccbound
