#pragma once

#include <cmath>
#include <deque>
#include <vector>

#include "problems.hpp"

namespace ccbound {

/// Partition of [a, b] into strictly increasing mesh points x_0 = a ... x_N = b.
struct Mesh {
    std::vector<double> points;

    int intervals() const { return static_cast<int>(points.size()) - 1; }
    double h(int i) const { return points[i + 1] - points[i]; }
    double a() const { return points.front(); }
    double b() const { return points.back(); }
};

namespace detail {

// First Legendre coefficient of V on [lo, hi], estimated by 3-point
// Gauss-Legendre: c1 = (3/2) * sum w_t s_t V(x(s_t)) with s the scaled node.
inline double linear_trend_norm(const ProblemDef& p, double lo, double hi) {
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    const double node = std::sqrt(0.6);
    const Matrix vm = p.V(mid - half * node);
    const Matrix vp = p.V(mid + half * node);
    const Matrix c1 = (5.0 / 6.0) * node * (vp - vm);
    return inf_norm(c1);
}

} // namespace detail

/// Build the energy-independent main mesh: starting from 16 uniform intervals,
/// bisect until the local proxy ||Vbar1||_inf * h^2 <= tol on every interval.
inline Mesh build_mesh(const ProblemDef& p, double tol) {
    if (!(tol >= 1e-12 && tol <= 1e-2)) {
        throw domain_error("build_mesh: tol must lie in [1e-12, 1e-2]");
    }
    constexpr long max_intervals = 10'000'000;
    std::deque<std::pair<double, double>> pending;
    for (int i = 0; i < 16; ++i) {
        const double lo = p.a + (p.b - p.a) * i / 16.0;
        const double hi = p.a + (p.b - p.a) * (i + 1) / 16.0;
        pending.emplace_back(lo, hi);
    }
    std::vector<double> points;
    points.push_back(p.a);
    long budget = 16;
    while (!pending.empty()) {
        const auto [lo, hi] = pending.front();
        pending.pop_front();
        const double h = hi - lo;
        const double err = detail::linear_trend_norm(p, lo, hi) * h * h;
        if (err > tol) {
            budget += 1;
            if (budget > max_intervals) {
                throw tolerance_infeasible("build_mesh: interval budget exhausted");
            }
            const double mid = 0.5 * (lo + hi);
            pending.emplace_front(mid, hi);
            pending.emplace_front(lo, mid);
            continue;
        }
        points.push_back(hi);
    }
    return Mesh{std::move(points)};
}

/// Staggered reference mesh with steps
///   h1/4, h1/4, (h1+h2)/4, (h1+h2)/4, ..., (h_{N-1}+h_N)/4, (h_{N-1}+h_N)/4, hN/4, hN/4,
/// which telescopes to b - a and has roughly twice as many points.  A single
/// interval degenerates to four quarters.
inline Mesh reference_mesh(const Mesh& m) {
    const int N = m.intervals();
    std::vector<double> steps;
    if (N == 1) {
        const double q = m.h(0) / 4.0;
        steps = {q, q, q, q};
    } else {
        steps.push_back(m.h(0) / 4.0);
        steps.push_back(m.h(0) / 4.0);
        for (int i = 0; i + 1 < N; ++i) {
            const double s = (m.h(i) + m.h(i + 1)) / 4.0;
            steps.push_back(s);
            steps.push_back(s);
        }
        steps.push_back(m.h(N - 1) / 4.0);
        steps.push_back(m.h(N - 1) / 4.0);
    }
    std::vector<double> points;
    points.reserve(steps.size() + 1);
    points.push_back(m.a());
    double x = m.a();
    for (std::size_t i = 0; i + 1 < steps.size(); ++i) {
        x += steps[i];
        points.push_back(x);
    }
    points.push_back(m.b()); // exact endpoint alignment
    return Mesh{std::move(points)};
}

} // namespace ccbound
