// The gap machinery: the weighted variational energy in log domain, the
// tangent-line geometry behind p(x), the x_n recursion, conditions (I)-(V)
// on the growth function, the straight-line (Jensen) lower bound, crossing
// detection against the two parabolas, and the two case chains that force
// every Lipschitz candidate's energy above e.
#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lavlab/func_model.hpp"
#include "lavlab/log_scalar.hpp"
#include "lavlab/quadrature.hpp"

namespace lavlab {

struct LagrangianSpec {
    // log of the weight factor at (x, u(x)); may return -inf where the
    // weight vanishes (u touching sqrt(x)).
    std::function<double(double, double)> log_weight;
    // log of the growth factor at xi = u'(x).
    std::function<double(double)> log_f;
    // Parameter c of the built-in family f_c(xi) = e^{c xi^2}; NaN when the
    // spec does not belong to the family (condition checks then refuse).
    double family_c = std::numeric_limits<double>::quiet_NaN();
    std::optional<double> dfdy_bound;  // M with |df/dy| < M, when finite

    bool in_family() const { return !std::isnan(family_c); }

    // The weighted spec with f(xi) = e^{c xi^2}; c = 2048 reproduces
    // e^{8*256 xi^2}.
    static LagrangianSpec lavrentiev(double c = 2048.0);
    // Unweighted spec over a custom log f.
    static LagrangianSpec f_only(std::function<double(double)> log_f,
                                 std::optional<double> dfdy_bound = 0.0);
    // Unweighted capped-parabola spec f(xi) = min(1 + xi^2, cap): bounded
    // df/dy and finite energy for sqrt-like candidates; the pipeline's
    // certified test bed.
    static LagrangianSpec bounded_test(double cap = 101.0);
};

// --- geometry -------------------------------------------------------------

// p(x) = (7 + 4 sqrt(3)) x: abscissa of the second intersection of the
// tangent to y = sqrt(x)/4 at x with y = sqrt(x)/2.
double p_map(double x);

// Same point found numerically by bracketing the tangent/parabola crossing;
// agrees with p_map to 1e-10 relative.
double tangent_second_intersection(double x0);

// x_1 = 1/2, p(x_{n+1}) = x_n; strictly decreasing to 0.
std::vector<double> xn_sequence(int count);

// --- energy ---------------------------------------------------------------

// log F(u) = log int_0^1 w(x, u(x)) f(u'(x)) dx, evaluated fully in log
// domain; integration is split at derivative breakpoints and endpoints where
// u touches sqrt(x) are treated as singular.
LogScalar energy(const RealFunc& u, const LagrangianSpec& spec, double rel_tol = 1e-8);

// log[(b-a) f((ub-ua)/(b-a))]: the straight-line lower bound for convex f.
LogScalar jensen_line_bound(const std::function<double(double)>& log_f, double a, double b,
                            double ua, double ub);

// Restriction of the energy to [a,b] (used for the crossing-interval bound).
LogScalar energy_restricted(const RealFunc& u, const LagrangianSpec& spec, double a, double b,
                            double rel_tol = 1e-8);

// --- crossing interval ----------------------------------------------------

struct CrossingConfig {
    double scan_step = 1e-4;
    double bisect_tol = 1e-12;
};

// Endpoints (a,b) of a maximal interval with sqrt(x)/4 < u < sqrt(x)/2
// strictly inside and equality at the ends: b is the first up-crossing of
// the upper parabola, a the last down-crossing of the lower one before b.
// Throws with a diagnostic if u is not admissible or no bracket is found at
// the configured scan resolution.
std::pair<double, double> crossing_points(const RealFunc& u, const CrossingConfig& cfg = {});

// --- case chains ----------------------------------------------------------

// min of the three Case-1 links (Young absorption, exponent comparison,
// x e^{1/x} >= e), each as a log-scale margin; valid iff >= 0.
// Requires 0 < a < b < 2a, b <= 1.
double case1_chain_margin(double a, double b);

// Margin of the mean-slope estimate (1/2 sqrt(b) - 1/4 sqrt(a))/sqrt(a)
// over 3/16. Requires 0 < a <= b <= 2a, b <= 1 (b = a taken as the limit).
double case1_slope_margin(double a, double b);

// log[a e^{(128(3-2 sqrt 2)-8)/a}] - 1 with the constant computed, not
// hard-coded. Requires 0 < a <= 1.
double case2_chain_margin(double a);

// --- conditions (I)-(V) ---------------------------------------------------

struct ConditionEntry {
    std::string name;
    bool pass = false;
    double worst_margin = 0.0;  // log scale where applicable
    std::vector<double> witness;
    std::string grid_spec;
};

struct ConditionReport {
    std::array<ConditionEntry, 5> entries;  // I, II, III, IV, V
    bool all_pass() const {
        for (auto& e : entries)
            if (!e.pass) return false;
        return true;
    }
    const ConditionEntry& operator[](int i) const { return entries[i]; }
};

struct ConditionGrids {
    int pointwise = 2048;   // log-spaced points for (III)/(IV)
    int region = 512;       // per axis for the (II) region
    double x_min = 1e-8;    // lower end of the log-spaced grids
    double edge = 1e-6;     // distance kept from open region edges
};

// Grid verdicts for the five growth conditions of the family f_c. A pass is
// a pass at the stated resolution, not a proof.
ConditionReport check_conditions(const LagrangianSpec& spec, const ConditionGrids& grids = {});

// --- gap report -------------------------------------------------------------

struct CorpusSpec {
    int count = 1000;
    std::uint64_t seed = 20260808;
    double slope_cap = 10.0;
    int min_knots = 2;
    int max_knots = 12;
};

struct SweepGrids {
    int case1 = 500;   // per axis over {0 < a < b < 2a, b <= 1}
    int case2 = 10000; // points over (0, 1]
};

struct GapRow {
    int n = 0;
    double log_energy = 0.0;
    bool failed = false;
    std::string note;
};

struct CaseSweepMargins {
    double case1_chain_min = 0.0;
    std::array<double, 2> case1_chain_argmin{};
    double case1_slope_min = 0.0;
    std::array<double, 2> case1_slope_argmin{};
    double case2_min = 0.0;
    double case2_argmin = 0.0;
};

struct GapReport {
    std::vector<GapRow> rows;  // sorted by n
    double corpus_min_energy_log = 0.0;
    int corpus_min_index = -1;
    std::vector<double> corpus_energies_log;
    CaseSweepMargins case_sweep_worst_margins;
};

CaseSweepMargins sweep_case_margins(const SweepGrids& grids = {});

// Energies of u_n over n_list, the corpus minimum, and the case sweeps.
// Quadrature failures are recorded per row; other rows continue.
GapReport gap_demo(const std::vector<int>& n_list, const CorpusSpec& corpus,
                   double rel_tol = 1e-8, const SweepGrids& grids = {},
                   const LagrangianSpec& spec = LagrangianSpec::lavrentiev());

}  // namespace lavlab
