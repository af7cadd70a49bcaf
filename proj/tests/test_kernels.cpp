#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "ccbound/kernels.hpp"
#include "oracles.hpp"

using namespace ccbound;
using Catch::Approx;

namespace {
constexpr double pi = std::numbers::pi;
}

TEST_CASE("kernel values at pinned points") {
    SECTION("z = 0 series limit") {
        const KernelValues k = eval_kernels(0.0);
        CHECK(k.xi == Approx(1.0).margin(1e-15));
        CHECK(k.eta0 == Approx(1.0).margin(1e-15));
        CHECK(k.eta1 == Approx(1.0 / 3.0).margin(1e-15));
    }
    SECTION("z = -pi^2 exact trigonometry") {
        const KernelValues k = eval_kernels(-pi * pi);
        CHECK(k.xi == Approx(-1.0).margin(1e-14));
        CHECK(k.eta0 == Approx(0.0).margin(1e-15));
    }
    SECTION("z = -pi^2/4 exact trigonometry") {
        const KernelValues k = eval_kernels(-pi * pi / 4.0);
        CHECK(k.eta0 == Approx(0.63661977236758134).epsilon(1e-14));
    }
    SECTION("z = 1 high-precision reference") {
        const KernelValues k = eval_kernels(1.0);
        CHECK(k.xi == Approx(1.5430806348152437).epsilon(1e-15));
        CHECK(k.eta0 == Approx(1.1752011936438014).epsilon(1e-15));
        CHECK(k.eta1 == Approx(0.36787944117144233).epsilon(1e-14));
    }
}

TEST_CASE("kernel derivatives at pinned points") {
    SECTION("z = 0") {
        const KernelDerivatives d = eval_kernel_derivatives(0.0);
        CHECK(d.dxi_dz == Approx(0.5).margin(1e-15));
        CHECK(d.deta0_dz == Approx(1.0 / 6.0).margin(1e-15));
    }
    SECTION("z = -pi^2 where eta0 vanishes") {
        const KernelDerivatives d = eval_kernel_derivatives(-pi * pi);
        CHECK(d.dxi_dz == Approx(0.0).margin(1e-15));
    }
    SECTION("z = 4 against a central difference") {
        const KernelDerivatives d = eval_kernel_derivatives(4.0);
        const double fd = oracle::central_diff(
            [](double z) { return eval_kernels(z).xi; }, 4.0, 1e-6);
        CHECK(d.dxi_dz == Approx(fd).epsilon(1e-8));
    }
}

TEST_CASE("hyperbolic/trigonometric identity xi^2 - z eta0^2 = 1") {
    for (int i = 0; i < 10000; ++i) {
        const double z = oracle::uniform(-100.0, 100.0);
        const KernelValues k = eval_kernels(z);
        const double res = k.xi * k.xi - z * k.eta0 * k.eta0 - 1.0;
        REQUIRE(std::abs(res) <= 1e-12 * std::max(1.0, k.xi * k.xi));
    }
}

TEST_CASE("continuity through z = 0") {
    const KernelValues kp = eval_kernels(1e-8);
    const KernelValues km = eval_kernels(-1e-8);
    CHECK(std::abs(kp.xi - 1.0) <= 1e-7);
    CHECK(std::abs(km.xi - 1.0) <= 1e-7);
    CHECK(std::abs(kp.eta0 - 1.0) <= 1e-7);
    CHECK(std::abs(km.eta0 - 1.0) <= 1e-7);
    CHECK(std::abs(kp.eta1 - 1.0 / 3.0) <= 1e-7);
    CHECK(std::abs(km.eta1 - 1.0 / 3.0) <= 1e-7);
}

TEST_CASE("series window matches the closed forms at its edges") {
    for (double z : {0.0999, -0.0999, 0.1001, -0.1001, 0.05, -0.05}) {
        const KernelValues k = eval_kernels(z);
        const double s = std::sqrt(std::abs(z));
        const double xi_ref = z > 0 ? std::cosh(s) : std::cos(s);
        const double eta0_ref = z > 0 ? std::sinh(s) / s : std::sin(s) / s;
        CHECK(k.xi == Approx(xi_ref).epsilon(1e-15));
        CHECK(k.eta0 == Approx(eta0_ref).epsilon(1e-15));
    }
}

TEST_CASE("derivatives match central finite differences") {
    for (int i = 0; i < 100; ++i) {
        const double z = oracle::uniform(-80.0, 80.0);
        const KernelDerivatives d = eval_kernel_derivatives(z);
        const double h = 1e-5 * std::max(1.0, std::abs(z));
        const double fd_xi = oracle::central_diff(
            [](double zz) { return eval_kernels(zz).xi; }, z, h);
        const double fd_eta0 = oracle::central_diff(
            [](double zz) { return eval_kernels(zz).eta0; }, z, h);
        REQUIRE(d.dxi_dz == Approx(fd_xi).epsilon(1e-6).margin(1e-9));
        REQUIRE(d.deta0_dz == Approx(fd_eta0).epsilon(1e-6).margin(1e-9));
    }
}

TEST_CASE("values stay finite over the representable range") {
    // cosh(sqrt(z)) overflows IEEE doubles just above z = (ln DBL_MAX)^2,
    // so the finite range is [-1e6, ~5.03e5].
    for (double z : {-1e6, -1e3, -1.0, 0.0, 1.0, 1e3, 5.0e5}) {
        const KernelValues k = eval_kernels(z);
        CHECK(std::isfinite(k.xi));
        CHECK(std::isfinite(k.eta0));
        CHECK(std::isfinite(k.eta1));
    }
}

TEST_CASE("non-finite argument is rejected") {
    CHECK_THROWS_AS(eval_kernels(std::nan("")), domain_error);
    CHECK_THROWS_AS(eval_kernels(std::numeric_limits<double>::infinity()), domain_error);
}
