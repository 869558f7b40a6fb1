#include <doctest.h>

#include <cmath>

#include "lavlab/func_model.hpp"
#include "lavlab/quadrature.hpp"
#include "oracles.hpp"

using namespace lavlab;

namespace {
// Frozen from the graded Riemann oracle (and the closed form
// e^{-2} - 2 E_1(2)); re-derived below with a smaller oracle.
constexpr double kExpNeg2OverX = 0.037534261820490571;
}

TEST_CASE("integrate_log constants and polynomials") {
    auto r = integrate_log([](double) { return 0.0; }, 0.0, 1.0, 1e-8);
    CHECK(r.value.log_mag == doctest::Approx(0.0).epsilon(1e-12));

    // log-integrand log x => integrand x, integral 1/2.
    auto half = integrate_log([](double x) { return std::log(x); }, 0.0, 1.0, 1e-8,
                              SingularEnds{true, false});
    CHECK(half.value.log_mag == doctest::Approx(std::log(0.5)).epsilon(1e-10));
}

TEST_CASE("integrate_log weight-style singularity against the graded oracle") {
    auto r = integrate_log([](double x) { return -2.0 / x; }, 0.0, 1.0, 1e-8,
                           SingularEnds{true, false});
    const double oracle =
        oracles::riemann_graded([](double x) { return std::exp(-2.0 / x); }, 0.0, 1.0, 2'000'000);
    CHECK(oracle == doctest::Approx(kExpNeg2OverX).epsilon(1e-9));
    CHECK(std::exp(r.value.log_mag) == doctest::Approx(oracle).epsilon(1e-7));
}

TEST_CASE("integrate_log additivity and shift invariants") {
    auto lf = [](double x) { return -2.0 / x; };
    const double rel = 1e-8;
    auto whole = integrate_log(lf, 0.0, 1.0, rel, SingularEnds{true, false});
    auto left = integrate_log(lf, 0.0, 0.37, rel, SingularEnds{true, false});
    auto right = integrate_log(lf, 0.37, 1.0, rel);
    CHECK(log_add(left.value.log_mag, right.value.log_mag) ==
          doctest::Approx(whole.value.log_mag).epsilon(10 * rel));

    const double shift = 1000.0;  // linear value e^1000 overflows; log domain must not care
    auto shifted = integrate_log([&](double x) { return lf(x) + shift; }, 0.0, 1.0, rel,
                                 SingularEnds{true, false});
    CHECK(std::fabs(shifted.value.log_mag - whole.value.log_mag - shift) < 1e-13 * shift);
}

TEST_CASE("integrate_log error contract and determinism") {
    auto lf = [](double x) { return std::sin(3.0 * x) - 2.0 / (1.0 - x); };
    auto a = integrate_log(lf, 0.0, 1.0, 1e-8, SingularEnds{false, true});
    auto b = integrate_log(lf, 0.0, 1.0, 1e-8, SingularEnds{false, true});
    CHECK(a.value.log_mag == b.value.log_mag);  // bit-identical
    CHECK(a.panel_count == b.panel_count);
    CHECK(a.abs_error_log <= std::log(1e-8) + std::max(a.value.log_mag, kFloorLog) + 1e-9);
}

TEST_CASE("integrate_log deep below float range") {
    // Integrand e^{-100000} * x: the result must keep full log precision.
    auto r = integrate_log([](double x) { return std::log(x) - 100000.0; }, 0.0, 1.0, 1e-8,
                           SingularEnds{true, false});
    CHECK(r.value.log_mag == doctest::Approx(std::log(0.5) - 100000.0).epsilon(1e-12));
}

TEST_CASE("integrate_log failure carries partial result") {
    QuadratureConfig cfg;
    cfg.panel_budget = 3;
    CHECK_THROWS_AS(integrate_log([](double x) { return -2.0 / x; }, 0.0, 1.0, 1e-12,
                                  SingularEnds{true, false}, cfg),
                    QuadratureError);
    try {
        integrate_log([](double x) { return -2.0 / x; }, 0.0, 1.0, 1e-12,
                      SingularEnds{true, false}, cfg);
    } catch (const QuadratureError& err) {
        CHECK(err.partial.panel_count >= 2);
        CHECK(err.worst_panel_hi >= err.worst_panel_lo);
    }
}

TEST_CASE("integrate_signed basics") {
    CHECK(integrate_signed([](double) { return 1.0; }, 0.0, 1.0, 1e-10) == doctest::Approx(1.0));
    CHECK(integrate_signed([](double x) { return 2.0 * x - 1.0; }, 0.0, 1.0, 1e-10) ==
          doctest::Approx(0.0).epsilon(1e-12));
    // Integrable endpoint singularity: antiderivative sqrt(x).
    CHECK(integrate_signed([](double x) { return 0.5 / std::sqrt(x); }, 0.0, 1.0, 1e-8) ==
          doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("integrate_signed flags divergent integrands") {
    CHECK_THROWS_AS(integrate_signed([](double x) { return 1.0 / x; }, 0.0, 1.0, 1e-8),
                    QuadratureError);
}

TEST_CASE("antiderivative table") {
    AntiderivativeTable t([](double) { return 0.0; }, 16);
    CHECK(t(0.7) == 0.0);

    AntiderivativeTable lin([](double x) { return 2.0 * x; }, 64);
    CHECK(lin(0.5) == doctest::Approx(0.25).epsilon(1e-4));  // O(grid^-2) interpolation
    CHECK(lin(1.0) == doctest::Approx(1.0).epsilon(1e-10));

    // Monotone between nodes when f keeps a sign.
    AntiderivativeTable mono([](double x) { return 1.0 + x; }, 32);
    double prev = mono(0.0);
    for (int i = 1; i <= 200; ++i) {
        const double cur = mono(i / 200.0);
        CHECK(cur >= prev);
        prev = cur;
    }
}

TEST_CASE("exact antiderivative of a step function") {
    const StepFunction three = StepFunction::constant(Rational(3));
    const PiecewiseLinear f = antiderivative_exact(three);
    CHECK(f(0.25) == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(f(1.0) == 3.0);

    const StepFunction two_cells({Rational(0), Rational(1, 2), Rational(1)},
                                 {Rational(1), Rational(-1)});
    const PiecewiseLinear g = antiderivative_exact(two_cells, 1.0);
    CHECK(g(0.5) == 1.5);
    CHECK(g(1.0) == 1.0);
}

TEST_CASE("gauss-legendre nodes") {
    std::vector<double> x, w;
    gauss_legendre(64, x, w);
    double mass = 0.0, second = 0.0;
    for (int i = 0; i < 64; ++i) {
        mass += w[i];
        second += w[i] * x[i] * x[i];
    }
    CHECK(mass == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(second == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    for (int i = 0; i + 1 < 64; ++i) CHECK(x[i] < x[i + 1]);
    // Symmetry is exact so odd integrands cancel bitwise.
    for (int i = 0; i < 32; ++i) {
        CHECK(x[i] == -x[63 - i]);
        CHECK(w[i] == w[63 - i]);
    }
}

TEST_CASE("bisection root finder") {
    const double root = bisect_root([](double x) { return std::sqrt(x) - 0.5; }, 0.0, 1.0);
    CHECK(root == doctest::Approx(0.25).epsilon(1e-12));
    CHECK_THROWS_AS(bisect_root([](double x) { return x * x + 1.0; }, -1.0, 1.0),
                    std::invalid_argument);
}
