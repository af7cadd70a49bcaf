#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "ccbound/problems.hpp"
#include "oracles.hpp"

using namespace ccbound;
using Catch::Approx;

TEST_CASE("coupled Poeschl-Teller potential values") {
    const ProblemDef p = coupled_poschl_teller();
    REQUIRE(p.n == 2);
    CHECK(p.a == 0.0);
    CHECK(p.b == 30.0);

    const Matrix v0 = p.V(0.0);
    CHECK(v0(0, 0) == Approx(-64.5).margin(1e-12));
    CHECK(v0(1, 1) == Approx(-64.5).margin(1e-12));
    CHECK(v0(0, 1) == Approx(-25.5).margin(1e-12));

    const Matrix vend = p.V(30.0);
    CHECK(inf_norm(vend) < 1e-10);
}

TEST_CASE("Poeschl-Teller channels decouple into the two scalar wells") {
    const ProblemDef p = coupled_poschl_teller();
    for (double x : {0.0, 0.3, 1.0, 2.5, 6.0}) {
        const Matrix v = p.V(x);
        const double sum_channel = v(0, 0) + v(0, 1);
        const double diff_channel = v(0, 0) - v(0, 1);
        const double c1 = std::cosh(x);
        const double c2 = std::cosh(x / 2.0);
        REQUIRE(sum_channel == Approx(-90.0 / (c1 * c1)).margin(1e-12));
        REQUIRE(diff_channel == Approx(-39.0 / (c2 * c2)).margin(1e-12));
    }
}

TEST_CASE("exact spectrum of the decoupled wells reproduces the reference set") {
    // -90/cosh^2(x), Dirichlet at 0: odd states of s = 9 -> -(9-m)^2, m odd
    // -39/cosh^2(x/2), Dirichlet at 0: odd states of s = 12 -> -((12-m)/2)^2, m odd
    std::vector<double> spectrum;
    for (int m = 1; m < 9; m += 2) spectrum.push_back(-(9.0 - m) * (9.0 - m));
    for (int m = 1; m < 12; m += 2) {
        const double q = (12.0 - m) / 2.0;
        spectrum.push_back(-q * q);
    }
    std::sort(spectrum.begin(), spectrum.end());
    const std::vector<double> expected = {-64.0,  -36.0, -30.25, -20.25, -16.0,
                                          -12.25, -6.25, -4.0,   -2.25,  -0.25};
    REQUIRE(spectrum.size() == expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) {
        CHECK(spectrum[i] == Approx(expected[i]).margin(1e-14));
    }
}

TEST_CASE("Woods-Saxon scalar profile") {
    CHECK(woods_saxon_vbar(7.0) == Approx(-25.0 / 6.0).margin(1e-12));
    CHECK(woods_saxon_vbar(0.0) == Approx(-50.0).epsilon(1e-4));
    CHECK(std::abs(woods_saxon_vbar(15.0)) < 1e-3);
}

TEST_CASE("Woods-Saxon coupling matrix against the analytic integrals") {
    // For n = 4 the basis is {(2pi)^{-1/2}, sin(t)/sqrt(pi), cos(t)/sqrt(pi),
    // sin(2t)/sqrt(pi)} and the cosine-series integrals evaluate in closed form.
    const Matrix q = woods_saxon_coupling(4);
    Matrix expected(4, 4);
    const double r2 = 1.0 / (2.0 * std::sqrt(2.0));
    expected << 1.0, 0.0, r2, 0.0,
                0.0, 0.875, 0.0, 0.1875,
                r2, 0.0, 1.125, 0.0,
                0.0, 0.1875, 0.0, 0.96875;
    CHECK(inf_norm(q - expected) <= 1e-12);
    CHECK(inf_norm(q - q.transpose()) <= 1e-12);
}

TEST_CASE("Woods-Saxon basis orthonormality on the quadrature grid") {
    const double pi = std::numbers::pi;
    const int m = 4096;
    for (int i = 0; i < 5; ++i) {
        for (int j = i; j < 5; ++j) {
            double acc = 0.0;
            for (int t = 0; t < m; ++t) {
                const double th = 2.0 * pi * t / m;
                acc += detail::ws_phi(i, th) * detail::ws_phi(j, th);
            }
            acc *= 2.0 * pi / m;
            REQUIRE(acc == Approx(i == j ? 1.0 : 0.0).margin(1e-12));
        }
    }
}

TEST_CASE("built-in problems pass their own validation") {
    CHECK_NOTHROW(validate_problem(coupled_poschl_teller()));
    CHECK_NOTHROW(validate_problem(coupled_woods_saxon(4)));
    CHECK_NOTHROW(validate_problem(coupled_woods_saxon(1)));
    CHECK_THROWS_AS(coupled_woods_saxon(0), domain_error);
    CHECK_THROWS_AS(coupled_woods_saxon(64), domain_error);
}

TEST_CASE("builtin lookup by name") {
    CHECK(builtin_problem("poschl_teller_2ch").n == 2);
    CHECK(builtin_problem("woods_saxon_8ch").n == 8);
    CHECK_THROWS_AS(builtin_problem("nope"), config_error);
}

TEST_CASE("load_problem reads a builtin reference") {
    std::istringstream cfg(R"(
[problem]
n = 2
a = 0
b = 30

[bc]
A1 = 1 0 0 1
A2 = 0 0 0 0
B1 = 1 0 0 1
B2 = 0 0 0 0

[potential]
type = builtin
name = poschl_teller_2ch
)");
    const ProblemDef p = load_problem(cfg);
    const ProblemDef ref = coupled_poschl_teller();
    for (double x : {0.0, 1.0, 7.5}) {
        REQUIRE(inf_norm(p.V(x) - ref.V(x)) <= 1e-14);
    }
}

TEST_CASE("load_problem reads a tabulated potential with linear interpolation") {
    std::istringstream cfg(R"(
[problem]
n = 2
a = 0
b = 2

[bc]
A1 = 1 0 0 1
A2 = 0 0 0 0
B1 = 1 0 0 1
B2 = 0 0 0 0

[potential]
type = table
0.0  1.0 0.0 2.0
1.0  3.0 0.5 2.0
2.0  3.0 0.5 4.0
)");
    const ProblemDef p = load_problem(cfg);
    CHECK(p.V(0.5)(0, 0) == Approx(2.0).margin(1e-14));
    CHECK(p.V(0.5)(0, 1) == Approx(0.25).margin(1e-14));
    CHECK(p.V(1.5)(1, 1) == Approx(3.0).margin(1e-14));
    CHECK(p.V(1.0)(0, 0) == Approx(3.0).margin(1e-14));
}

TEST_CASE("load_problem rejects a rank-deficient boundary pair") {
    std::istringstream cfg(R"(
[problem]
n = 2
a = 0
b = 1
[bc]
A1 = 1 0 0 0
A2 = 0 0 0 0
B1 = 1 0 0 1
B2 = 0 0 0 0
[potential]
type = table
0 0 0 0
1 0 0 0
)");
    try {
        load_problem(cfg);
        FAIL("expected invalid_boundary_condition");
    } catch (const invalid_boundary_condition& e) {
        CHECK(std::string(e.what()).find("rank") != std::string::npos);
    }
}

TEST_CASE("load_problem rejects malformed input") {
    std::istringstream missing(R"(
[problem]
n = 2
a = 0
)");
    CHECK_THROWS_AS(load_problem(missing), config_error);

    std::istringstream junk(R"(
[problem]
n = two
)");
    CHECK_THROWS_AS(load_problem(junk), config_error);
}
