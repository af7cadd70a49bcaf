#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "ccbound/cp_step.hpp"
#include "oracles.hpp"

using namespace ccbound;
using Catch::Approx;

namespace {

constexpr double pi = std::numbers::pi;

Matrix random_sym(int n, double scale) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) m(i, j) = m(j, i) = scale * oracle::uniform(-1.0, 1.0);
    return m;
}

// Wronskian defect relative to the block magnitudes (the products grow like
// cosh^2 for strongly closed channels, so the comparison must be relative).
double wronskian_defect(const CpStep& s) {
    const int n = s.n();
    const Matrix w =
        s.U.transpose() * s.Wp - s.Up.transpose() * s.W - Matrix::Identity(n, n);
    const double scale = std::max(1.0, inf_norm(s.U) * inf_norm(s.Wp) +
                                           inf_norm(s.Up) * inf_norm(s.W));
    return inf_norm(w) / scale;
}

// full 2n x 2n transfer matrix of a step
Matrix transfer(const CpStep& s) {
    const int n = s.n();
    Matrix t(2 * n, 2 * n);
    t << s.U, s.W, s.Up, s.Wp;
    return t;
}

} // namespace

TEST_CASE("average_potential") {
    SECTION("constant potential is reproduced exactly") {
        ProblemDef p;
        p.n = 2;
        p.a = 0.0;
        p.b = 1.0;
        Matrix v = random_sym(2, 2.0);
        p.V = [v](double) { return v; };
        const SymMatrix avg = average_potential(p, 0.2, 0.9);
        CHECK(inf_norm(avg.mat() - v) <= 1e-14);
    }
    SECTION("linear scalar potential averages to the midpoint value") {
        ProblemDef p;
        p.n = 1;
        p.a = 0.0;
        p.b = 1.0;
        p.V = [](double x) { return Matrix::Constant(1, 1, x); };
        CHECK(average_potential(p, 0.0, 1.0)(0, 0) == Approx(0.5).margin(1e-15));
    }
    SECTION("problem-1 potential against a dense Riemann sum") {
        const ProblemDef p = coupled_poschl_teller();
        const SymMatrix avg = average_potential(p, 0.0, 0.1);
        Matrix riemann = Matrix::Zero(2, 2);
        const int n = 100000;
        for (int i = 0; i < n; ++i) {
            riemann += p.V(0.1 * (i + 0.5) / n);
        }
        riemann /= n;
        CHECK((avg.mat() - riemann).cwiseAbs().maxCoeff() <= 1e-8);
    }
    SECTION("reversed interval is rejected") {
        const ProblemDef p = coupled_poschl_teller();
        CHECK_THROWS_AS(average_potential(p, 1.0, 1.0), domain_error);
    }
}

TEST_CASE("build_step reproduces the scalar trigonometric solution") {
    // y'' = -y over h = pi/2: U = cos, W = sin, U' = -sin, W' = cos
    const CpStep s = build_step(SymMatrix::zero(1), 1.0, pi / 2.0);
    CHECK(s.U(0, 0) == Approx(0.0).margin(1e-15));
    CHECK(s.W(0, 0) == Approx(1.0).margin(1e-15));
    CHECK(s.Up(0, 0) == Approx(-1.0).margin(1e-15));
    CHECK(s.Wp(0, 0) == Approx(0.0).margin(1e-15));
}

TEST_CASE("build_step at Z = 0 gives the free ramp") {
    const double h = 0.37;
    const CpStep s = build_step(SymMatrix(Matrix::Constant(1, 1, 2.5)), 2.5, h);
    CHECK(s.U(0, 0) == Approx(1.0).margin(1e-15));
    CHECK(s.W(0, 0) == Approx(h).margin(1e-15));
    CHECK(s.Up(0, 0) == Approx(0.0).margin(1e-15));
    CHECK(s.Wp(0, 0) == Approx(1.0).margin(1e-15));
}

TEST_CASE("coupled step: Wronskian identity and E-derivative") {
    Matrix v(2, 2);
    v << 2, 1, 1, 2;
    const CpStep s = build_step(SymMatrix(v), 0.0, 0.3);
    CHECK(wronskian_defect(s) <= 1e-12);

    const double de = 1e-6;
    const CpStep sp = build_step(SymMatrix(v), de, 0.3);
    const CpStep sm = build_step(SymMatrix(v), -de, 0.3);
    const Matrix fd = (sp.U - sm.U) / (2.0 * de);
    CHECK(inf_norm(s.dU - fd) <= 1e-6 * std::max(1.0, inf_norm(fd)));
}

TEST_CASE("Wronskian identity holds over random steps") {
    for (int t = 0; t < 100; ++t) {
        const int n = 1 + static_cast<int>(oracle::uniform(0.0, 3.999));
        const SymMatrix v(random_sym(n, 20.0));
        const double e = oracle::uniform(-30.0, 30.0);
        const double h = oracle::uniform(0.01, 1.5);
        const CpStep s = build_step(v, e, h);
        REQUIRE(wronskian_defect(s) <= 1e-10);
    }
}

TEST_CASE("all E-derivative blocks match central finite differences") {
    for (int t = 0; t < 40; ++t) {
        const int n = 2;
        const SymMatrix v(random_sym(n, 10.0));
        const double e = oracle::uniform(-20.0, 20.0);
        const double h = oracle::uniform(0.05, 1.0);
        const double de = 1e-6 * std::max(1.0, std::abs(e));
        const CpStep s = build_step(v, e, h);
        const CpStep sp = build_step(v, e + de, h);
        const CpStep sm = build_step(v, e - de, h);
        auto check_block = [&](const Matrix& d, const Matrix& bp, const Matrix& bm) {
            const Matrix fd = (bp - bm) / (2.0 * de);
            REQUIRE(inf_norm(d - fd) <= 1e-5 * std::max(1.0, inf_norm(fd)));
        };
        check_block(s.dU, sp.U, sm.U);
        check_block(s.dW, sp.W, sm.W);
        check_block(s.dUp, sp.Up, sm.Up);
        check_block(s.dWp, sp.Wp, sm.Wp);
    }
}

TEST_CASE("constant potential: steps compose exactly (semigroup property)") {
    const SymMatrix v(random_sym(3, 5.0));
    const double e = -2.0;
    const CpStep whole = build_step(v, e, 0.8);
    const CpStep h1 = build_step(v, e, 0.3);
    const CpStep h2 = build_step(v, e, 0.5);
    const Matrix composed = transfer(h2) * transfer(h1);
    CHECK(inf_norm(transfer(whole) - composed) <=
          1e-12 * std::max(1.0, inf_norm(composed)));
}

TEST_CASE("second-order convergence on a non-constant potential") {
    // One step with the interval average vs. the composition of two half
    // steps with their own averages: local error drops ~8x when h halves.
    ProblemDef p;
    p.n = 1;
    p.a = 0.0;
    p.b = 2.0;
    p.V = [](double x) { return Matrix::Constant(1, 1, -5.0 * std::cos(1.3 * x)); };
    const double e = 1.0;

    auto local_error = [&](double h) {
        auto fine = [&](double lo, double hi, int parts) {
            Matrix t = Matrix::Identity(2, 2);
            for (int i = 0; i < parts; ++i) {
                const double l = lo + (hi - lo) * i / parts;
                const double r = lo + (hi - lo) * (i + 1) / parts;
                t = transfer(build_step(average_potential(p, l, r), e, r - l)) * t;
            }
            return t;
        };
        const Matrix coarse =
            transfer(build_step(average_potential(p, 0.4, 0.4 + h), e, h));
        const Matrix ref = fine(0.4, 0.4 + h, 256);
        return inf_norm(coarse - ref);
    };

    const double e1 = local_error(0.2);
    const double e2 = local_error(0.1);
    const double ratio = e1 / e2;
    CHECK(ratio > 5.0);
    CHECK(ratio < 12.0);
}

TEST_CASE("step cache reuses the energy-independent diagonalization") {
    const ProblemDef p = coupled_poschl_teller();
    const Mesh m = build_mesh(p, 1e-3);
    const StepCache cache(p, m);
    REQUIRE(cache.size() == m.intervals());
    const auto s1 = cache.steps_at(-10.0);
    const auto s2 = cache.steps_at(-20.0);
    REQUIRE(static_cast<int>(s1.size()) == m.intervals());
    // same basis object shared across energies
    CHECK(s1[0].basis.get() == s2[0].basis.get());
    // min potential eigenvalue is near the well bottom 0.5*(-90 - 39/...) at 0
    CHECK(cache.min_potential_eigenvalue() < -80.0);
    CHECK(cache.min_potential_eigenvalue() > -95.0);
}

TEST_CASE("build_step rejects non-positive widths") {
    CHECK_THROWS_AS(build_step(SymMatrix::zero(1), 0.0, 0.0), domain_error);
}
