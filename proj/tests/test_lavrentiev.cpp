#include <doctest.h>

#include <cmath>

#include "lavlab/lavrentiev.hpp"
#include "oracles.hpp"

using namespace lavlab;

TEST_CASE("p_map values") {
    CHECK(p_map(0.0) == 0.0);
    CHECK(p_map(1.0) == doctest::Approx(13.9282032302755).epsilon(1e-12));
    CHECK_THROWS_AS(p_map(-1.0), std::invalid_argument);
}

TEST_CASE("tangent second intersection matches the closed-form ratio") {
    CHECK(tangent_second_intersection(1.0) ==
          doctest::Approx(13.9282032302755).epsilon(1e-10));
    CHECK(tangent_second_intersection(0.25) == doctest::Approx(3.48205080756888).epsilon(1e-10));
    CHECK(tangent_second_intersection(0.5) == doctest::Approx(p_map(0.5)).epsilon(1e-10));
    // Scaling symmetry of sqrt: the ratio is constant.
    const double r1 = tangent_second_intersection(0.1) / 0.1;
    const double r2 = tangent_second_intersection(0.5) / 0.5;
    const double r3 = tangent_second_intersection(2.0) / 2.0;
    CHECK(r1 == doctest::Approx(r2).epsilon(1e-10));
    CHECK(r2 == doctest::Approx(r3).epsilon(1e-10));
}

TEST_CASE("x_n recursion") {
    CHECK(xn_sequence(1) == std::vector<double>{0.5});
    auto xs = xn_sequence(4);
    // Conjugate closed form: 1/(7+4 sqrt 3) = 7 - 4 sqrt 3.
    const double x2 = 0.5 * (7.0 - 4.0 * std::sqrt(3.0));
    CHECK(xs[1] == doctest::Approx(x2).epsilon(1e-13));
    CHECK(xs[2] / xs[1] == doctest::Approx(xs[1] / xs[0]).epsilon(1e-12));
    for (std::size_t i = 1; i < xs.size(); ++i) CHECK(xs[i] < xs[i - 1]);
    // p maps each term back to its predecessor.
    CHECK(p_map(xs[2]) == doctest::Approx(xs[1]).epsilon(1e-14));
}

TEST_CASE("lagrangian spec invariants") {
    auto spec = LagrangianSpec::lavrentiev();
    // The weight vanishes on the parabola and f(0) = 1.
    for (double x : {0.04, 0.25, 0.81}) CHECK(spec.log_weight(x, std::sqrt(x)) == kNegInf);
    CHECK(spec.log_f(0.0) == 0.0);
    CHECK(spec.log_weight(0.25, 0.75) == doctest::Approx(-2.0 / (0.25 * 0.25)));
    CHECK_FALSE(spec.dfdy_bound.has_value());
    CHECK(LagrangianSpec::bounded_test().dfdy_bound.has_value());
}

TEST_CASE("energy under a trivial spec") {
    auto spec = LagrangianSpec::f_only([](double xi) { return std::log(xi * xi); });
    const LogScalar f = energy(make_line(0.0, 1.0), spec);
    CHECK(f.log_mag == doctest::Approx(0.0).epsilon(1e-10));  // F = 1
}

TEST_CASE("energy of the straight line under the default spec") {
    // log F = 2048 + log int e^{-2/(x - sqrt x)^2}; the weight integral comes
    // from the independent graded oracle.
    const double weight_integral = oracles::riemann_graded(
        [](double x) {
            const double d = x - std::sqrt(x);
            return d == 0.0 ? 0.0 : std::exp(-2.0 / (d * d));
        },
        0.0, 1.0, 2'000'000);
    const LogScalar f = energy(make_line(0.0, 1.0), LagrangianSpec::lavrentiev());
    CHECK(f.log_mag == doctest::Approx(2048.0 + std::log(weight_integral)).epsilon(1e-8));
    CHECK(f.log_mag > 2010.0);
    CHECK(f.log_mag < 2016.0);
}

TEST_CASE("energy collapse along the minimizing sequence") {
    auto spec = LagrangianSpec::lavrentiev();
    auto u = minimizing_sequence_member(100);
    const LogScalar f = energy(u, spec);
    CHECK(f.log_mag < -1e4);
    // Independent bound: log F <= max over a dense grid of the log-integrand.
    const double bound = oracles::grid_max(
        [&](double x) {
            const double d = u(x) - std::sqrt(x);
            const double lw = d == 0.0 ? -1e308 : -2.0 / (d * d);
            const double xi = u.deriv(x);
            return lw + 2048.0 * xi * xi;
        },
        0.0, 1.0);
    CHECK(f.log_mag <= bound + 1e-6);
}

TEST_CASE("minimizing-sequence energy matches a log-domain Riemann oracle") {
    auto spec = LagrangianSpec::lavrentiev();
    auto u = minimizing_sequence_member(64);
    // 1e-8 sits above the double noise floor |log F| * eps of this integrand.
    const double quad = energy(u, spec, 1e-8).log_mag;
    const double oracle = oracles::riemann_graded_log(
        [&](double x) {
            const double d = u(x) - std::sqrt(x);
            if (d == 0.0) return -std::numeric_limits<double>::infinity();
            const double xi = u.deriv(x);
            return -2.0 / (d * d) + 2048.0 * xi * xi;
        },
        0.0, 1.0, 2'000'000);
    CHECK(quad == doctest::Approx(oracle).epsilon(1e-7));
}

TEST_CASE("corpus candidate energy matches a log-domain Riemann oracle") {
    auto spec = LagrangianSpec::lavrentiev();
    for (std::uint64_t seed : {3ULL, 8ULL}) {
        auto pl = random_lipschitz_candidate(seed, 5, 6.0);
        auto u = from_piecewise_linear(pl);
        const double quad = energy(u, spec, 1e-10).log_mag;
        // Oracle integrates per knot segment so the grading resolves the
        // weight's essential zeros at the segment ends.
        double oracle = -std::numeric_limits<double>::infinity();
        {
            double running_max = oracle;
            double running_sum = 0.0;
            const auto& knots = pl.knots();
            for (std::size_t s = 0; s + 1 < knots.size(); ++s) {
                const double part = oracles::riemann_graded_log(
                    [&](double x) {
                        const double d = u(x) - std::sqrt(x);
                        if (d == 0.0) return -std::numeric_limits<double>::infinity();
                        return -2.0 / (d * d) + 2048.0 * u.deriv(x) * u.deriv(x);
                    },
                    knots[s], knots[s + 1], 500'000);
                if (part == -std::numeric_limits<double>::infinity()) continue;
                if (part > running_max) {
                    running_sum = running_sum * std::exp(running_max - part) + 1.0;
                    running_max = part;
                } else {
                    running_sum += std::exp(part - running_max);
                }
            }
            oracle = running_max + std::log(running_sum);
        }
        CHECK(quad == doctest::Approx(oracle).epsilon(1e-6));
    }
}

TEST_CASE("energy of sqrt itself vanishes: the weight dies on the parabola") {
    const LogScalar f = energy(make_sqrt(), LagrangianSpec::lavrentiev());
    CHECK(f.sign == 0);
}

TEST_CASE("jensen line bound") {
    auto logf = [](double xi) { return 2048.0 * xi * xi; };
    CHECK(jensen_line_bound(logf, 0.0, 1.0, 0.0, 1.0).log_mag ==
          doctest::Approx(2048.0).epsilon(1e-12));
    CHECK(jensen_line_bound(logf, 0.0, 1.0, 0.3, 0.3).log_mag ==
          doctest::Approx(0.0).epsilon(1e-12));
    CHECK(jensen_line_bound(logf, 0.0, 0.5, 0.0, 0.5).log_mag ==
          doctest::Approx(std::log(0.5) + 2048.0).epsilon(1e-12));
}

TEST_CASE("jensen bound underestimates the f-only energy of every candidate") {
    auto spec = LagrangianSpec::f_only([](double xi) { return 2048.0 * xi * xi; });
    for (std::uint64_t seed : {3ULL, 17ULL, 23ULL}) {
        auto pl = random_lipschitz_candidate(seed, 6, 4.0);
        auto u = from_piecewise_linear(pl);
        const LogScalar e = energy(u, spec);
        const LogScalar j = jensen_line_bound(spec.log_f, 0.0, 1.0, 0.0, 1.0);
        CHECK(j.log_mag <= e.log_mag + 1e-7);
    }
}

TEST_CASE("crossing points of the identity") {
    auto [a, b] = crossing_points(make_line(0.0, 1.0));
    CHECK(a == doctest::Approx(1.0 / 16.0).epsilon(1e-9));
    CHECK(b == doctest::Approx(0.25).epsilon(1e-9));

    PiecewiseLinear straight({0.0, 1.0}, {0.0, 1.0});
    auto [a2, b2] = crossing_points(from_piecewise_linear(straight));
    CHECK(a2 == doctest::Approx(1.0 / 16.0).epsilon(1e-9));
    CHECK(b2 == doctest::Approx(0.25).epsilon(1e-9));
}

TEST_CASE("crossing points of x^2 against the bisection oracle") {
    RealFunc sq;
    sq.kind = FuncKind::closed_form;
    sq.form_id = "square";
    sq.eval_fn = [](double x) { return x * x; };
    sq.deriv_fn = [](double x) { return 2.0 * x; };
    sq.boundary_left = 0.0;
    sq.boundary_right = 1.0;
    sq.lipschitz_bound = 2.0;
    auto [a, b] = crossing_points(sq);
    const double a_oracle =
        oracles::bisect([](double x) { return x * x - 0.25 * std::sqrt(x); }, 0.1, 1.0);
    const double b_oracle =
        oracles::bisect([](double x) { return x * x - 0.5 * std::sqrt(x); }, 0.45, 1.0);
    CHECK(a == doctest::Approx(a_oracle).epsilon(1e-9));
    CHECK(b == doctest::Approx(b_oracle).epsilon(1e-9));
    CHECK(a == doctest::Approx(std::pow(4.0, -2.0 / 3.0)).epsilon(1e-9));
    CHECK(b == doctest::Approx(std::pow(2.0, -2.0 / 3.0)).epsilon(1e-9));
}

TEST_CASE("crossing points rejects inadmissible candidates") {
    CHECK_THROWS_AS(crossing_points(make_line(0.0, 0.7)), std::invalid_argument);
    RealFunc no_lip = make_sqrt();
    no_lip.lipschitz_bound.reset();
    CHECK_THROWS_AS(crossing_points(no_lip), std::invalid_argument);
}

TEST_CASE("case 1 chain margin") {
    // Independent reconstruction of the three links at (0.3, 0.5).
    const double a = 0.3, b = 0.5;
    const double x_big = 8.0 * a / ((b - a) * (b - a));
    const double y_big = 8.0 / a;
    const double m1 = std::log(2.0 - std::exp(y_big - x_big));
    const double m2 = x_big - 1.0 / (b - a);
    const double m3 = std::log(b - a) + 1.0 / (b - a) - 1.0;
    CHECK(m2 == doctest::Approx(55.0).epsilon(1e-12));
    CHECK(m1 > 0.0);
    CHECK(m3 > 0.0);
    CHECK(case1_chain_margin(a, b) == doctest::Approx(std::min({m1, m2, m3})).epsilon(1e-14));

    // Young absorption becomes tight as b -> 2a.
    const double tight = case1_chain_margin(0.3, 0.6 - 1e-9);
    CHECK(tight > 0.0);
    CHECK(tight < 1e-5);

    CHECK_THROWS_AS(case1_chain_margin(0.2, 0.5), std::invalid_argument);  // b = 2.5 a
    CHECK_THROWS_AS(case1_chain_margin(0.6, 0.5), std::invalid_argument);
}

TEST_CASE("case 1 slope margin") {
    CHECK(case1_slope_margin(0.3, 0.3) == doctest::Approx(1.0 / 16.0).epsilon(1e-12));
    const double at_double = std::sqrt(2.0) / 2.0 - 0.25 - 3.0 / 16.0;
    CHECK(case1_slope_margin(0.4, 0.8) == doctest::Approx(at_double).epsilon(1e-12));
    CHECK(at_double == doctest::Approx(0.26961).epsilon(1e-4));
    CHECK_THROWS_AS(case1_slope_margin(0.3, 0.7), std::invalid_argument);
}

TEST_CASE("case 2 chain margin") {
    const double c = 128.0 * (3.0 - 2.0 * std::sqrt(2.0)) - 8.0;
    CHECK(case2_chain_margin(1.0) == doctest::Approx(c - 1.0).epsilon(1e-13));
    CHECK(case2_chain_margin(0.01) == doctest::Approx(std::log(0.01) + 100.0 * c - 1.0).epsilon(1e-12));
    CHECK(case2_chain_margin(0.01) > 0.0);
    CHECK_THROWS_AS(case2_chain_margin(0.0), std::invalid_argument);
    CHECK_THROWS_AS(case2_chain_margin(1.5), std::invalid_argument);
}

TEST_CASE("case margins stay nonnegative across the sweep grids") {
    SweepGrids grids{120, 2000};  // smaller grids here; acceptance runs the full ones
    auto m = sweep_case_margins(grids);
    CHECK(m.case1_chain_min >= 0.0);
    CHECK(m.case1_slope_min >= 0.0);
    CHECK(m.case2_min >= 0.0);
    // Slope margin minimum sits near b -> a where the ratio tends to 1/4.
    CHECK(m.case1_slope_min < 1.0 / 16.0 + 0.05);
    // Case 2 margin is smallest at a = 1.
    CHECK(m.case2_argmin == doctest::Approx(1.0));
}

TEST_CASE("conditions pass for the shipped growth function") {
    auto report = check_conditions(LagrangianSpec::lavrentiev());
    CHECK(report.all_pass());
    // (II) attains its minimum at the region corner a = 1/2, p0 = 1.
    const double corner = std::log(0.5) + 256.0 - 8.0 * std::sqrt(2.0);
    CHECK(report[1].worst_margin == doctest::Approx(corner).epsilon(1e-9));
    CHECK(report[1].witness[0] == doctest::Approx(0.5));
    CHECK(report[1].witness[1] == doctest::Approx(1.0));
    // (III) is tightest at x = 1.
    CHECK(report[2].witness[0] == doctest::Approx(1.0));
    CHECK(report[2].worst_margin == doctest::Approx(0.27573).epsilon(1e-3));
    // (V): the sign factor 2c - 1/(1+t^2) bottoms out near 4095.
    CHECK(report[4].worst_margin == doctest::Approx(4095.0).epsilon(1e-6));
}

TEST_CASE("conditions fail for degenerate growth functions") {
    auto flat = check_conditions(LagrangianSpec::lavrentiev(0.0));
    CHECK_FALSE(flat[1].pass);           // (II): objective <= 1/2 < e^{8 sqrt 2}
    CHECK(flat[1].witness.size() == 2);  // witness reported
    CHECK_FALSE(flat.all_pass());
    // A failing witness must violate the inequality when re-evaluated
    // directly: (p0-a) f(q/(p0-a)) with f == 1 stays under e^{8 sqrt 2}.
    const double a = flat[1].witness[0], p0 = flat[1].witness[1];
    CHECK(std::log(p0 - a) + 0.0 < 8.0 * std::sqrt(2.0));
    CHECK(flat[1].worst_margin < 0.0);

    auto concave = check_conditions(LagrangianSpec::lavrentiev(-1.0));
    CHECK_FALSE(concave[0].pass);  // (I): f'' < 0 at the origin
    const double xi = concave[0].witness[0];
    CHECK(2.0 * -1.0 + 4.0 * 1.0 * xi * xi <= 0.0);
}

TEST_CASE("check_conditions requires the closed-form family") {
    auto spec = LagrangianSpec::f_only([](double) { return 0.0; });
    CHECK_THROWS_AS(check_conditions(spec), std::invalid_argument);
}

TEST_CASE("energy is invariant under collinear knot insertion") {
    PiecewiseLinear base({0.0, 0.5, 1.0}, {0.0, 0.2, 1.0});
    PiecewiseLinear refined({0.0, 0.25, 0.5, 1.0}, {0.0, 0.1, 0.2, 1.0});
    const double rel = 1e-8;
    auto spec = LagrangianSpec::lavrentiev();
    const LogScalar e1 = energy(from_piecewise_linear(base), spec, rel);
    const LogScalar e2 = energy(from_piecewise_linear(refined), spec, rel);
    CHECK(std::fabs(e1.log_mag - e2.log_mag) <= 10.0 * rel * std::max(1.0, std::fabs(e1.log_mag)));
}

TEST_CASE("restricted energy over the crossing interval clears e") {
    auto spec = LagrangianSpec::lavrentiev();
    for (std::uint64_t seed : {2ULL, 5ULL, 11ULL, 29ULL}) {
        auto u = from_piecewise_linear(random_lipschitz_candidate(seed, 6, 8.0));
        auto [a, b] = crossing_points(u);
        CHECK(a < b);
        const LogScalar restricted = energy_restricted(u, spec, a, b);
        CHECK(restricted.log_mag >= 1.0 - 1e-6);
        // The integrand is nonnegative, so the full energy dominates.
        const LogScalar full = energy(u, spec);
        CHECK(full.log_mag >= restricted.log_mag - 1e-6);
    }
}

TEST_CASE("crossing interval properties across a slope-cap-10 corpus") {
    // The sandwich holds strictly inside (a, b) with equality at the ends,
    // for a spread of random candidates at the acceptance corpus settings.
    for (std::uint64_t seed = 100; seed < 140; ++seed) {
        auto u = from_piecewise_linear(
            random_lipschitz_candidate(seed, 2 + static_cast<int>(seed % 10), 10.0));
        auto [a, b] = crossing_points(u);
        REQUIRE(0.0 < a);
        REQUIRE(a < b);
        REQUIRE(b <= 1.0);
        CHECK(std::fabs(u(a) - 0.25 * std::sqrt(a)) < 1e-9);
        CHECK(std::fabs(u(b) - 0.5 * std::sqrt(b)) < 1e-9);
        for (int i = 1; i < 40; ++i) {
            const double x = a + (b - a) * i / 40.0;
            CHECK(u(x) > 0.25 * std::sqrt(x) - 1e-9);
            CHECK(u(x) < 0.5 * std::sqrt(x) + 1e-9);
        }
    }
}

TEST_CASE("gap demo assembles rows, corpus and sweeps") {
    CorpusSpec corpus;
    corpus.count = 20;
    corpus.seed = 99;
    corpus.slope_cap = 10.0;
    SweepGrids grids{60, 500};
    auto report = gap_demo({100, 64}, corpus, 1e-8, grids);
    REQUIRE(report.rows.size() == 2);
    CHECK(report.rows[0].n == 64);  // sorted by n
    CHECK(report.rows[0].log_energy > report.rows[1].log_energy);
    CHECK(report.rows[1].log_energy < -1e4);
    CHECK(report.corpus_min_energy_log >= 1.0);
    CHECK(report.corpus_energies_log.size() == 20);
    CHECK(report.case_sweep_worst_margins.case1_chain_min >= 0.0);

    auto empty = gap_demo({}, corpus, 1e-8, grids);
    CHECK(empty.rows.empty());
    CHECK(empty.corpus_min_energy_log >= 1.0);
}

TEST_CASE("gap demo records per-row quadrature failures and continues") {
    CorpusSpec corpus;
    corpus.count = 0;
    SweepGrids grids{20, 50};
    // 1e-14 is below the noise floor for |log F| ~ 1.3e5, so the n = 200 row
    // fails; the report carries the failure instead of throwing.
    auto report = gap_demo({200}, corpus, 1e-14, grids);
    REQUIRE(report.rows.size() == 1);
    CHECK(report.rows[0].failed);
    CHECK_FALSE(report.rows[0].note.empty());
    CHECK(report.corpus_energies_log.empty());
}
