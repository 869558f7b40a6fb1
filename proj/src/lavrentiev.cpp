#include "lavlab/lavrentiev.hpp"

#include <algorithm>
#include <cmath>

#include "lavlab/rng.hpp"

namespace lavlab {

namespace {
const double kSqrt3 = std::sqrt(3.0);
const double kPRatio = 7.0 + 4.0 * kSqrt3;
}  // namespace

LagrangianSpec LagrangianSpec::lavrentiev(double c) {
    LagrangianSpec s;
    s.log_weight = [](double x, double y) {
        const double d = y - std::sqrt(x);
        if (d == 0.0) return kNegInf;
        return -2.0 / (d * d);
    };
    s.log_f = [c](double xi) { return c * xi * xi; };
    s.family_c = c;
    return s;
}

LagrangianSpec LagrangianSpec::f_only(std::function<double(double)> log_f,
                                      std::optional<double> dfdy_bound) {
    LagrangianSpec s;
    s.log_weight = [](double, double) { return 0.0; };
    s.log_f = std::move(log_f);
    s.dfdy_bound = dfdy_bound;
    return s;
}

LagrangianSpec LagrangianSpec::bounded_test(double cap) {
    return f_only([cap](double xi) { return std::log(std::min(1.0 + xi * xi, cap)); }, 0.0);
}

double p_map(double x) {
    if (x < 0.0) throw std::invalid_argument("p_map: x >= 0");
    return kPRatio * x;
}

double tangent_second_intersection(double x0) {
    if (!(x0 > 0.0)) throw std::invalid_argument("tangent_second_intersection: x0 > 0");
    const double sqrt_x0 = std::sqrt(x0);
    // Tangent to y = sqrt(x)/4 at x0, against y = sqrt(x)/2. The difference
    // is positive at x0 and negative far right; the larger root is bracketed
    // by [x0, 100 x0].
    auto diff = [&](double x) {
        const double tangent = 0.25 * sqrt_x0 + (x - x0) / (8.0 * sqrt_x0);
        return 0.5 * std::sqrt(x) - tangent;
    };
    return bisect_root(diff, x0, 100.0 * x0, 1e-13);
}

std::vector<double> xn_sequence(int count) {
    if (count < 1) throw std::invalid_argument("xn_sequence: count >= 1");
    std::vector<double> xs(count);
    xs[0] = 0.5;
    for (int i = 1; i < count; ++i) xs[i] = xs[i - 1] / kPRatio;
    return xs;
}

namespace {

// Split points for the energy integral: derivative breakpoints of u plus the
// domain ends; endpoints where u touches sqrt(x) are flagged singular.
std::vector<double> energy_cuts(const RealFunc& u, double a, double b) {
    std::vector<double> cuts{a, b};
    for (double x : u.deriv_undefined_at)
        if (x > a && x < b) cuts.push_back(x);
    if (u.pl)
        for (double k : u.pl->knots())
            if (k > a && k < b) cuts.push_back(k);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    return cuts;
}

bool touches_parabola(const RealFunc& u, double x) {
    return u(x) == std::sqrt(x);
}

LogScalar energy_over(const RealFunc& u, const LagrangianSpec& spec, double a, double b,
                      double rel_tol) {
    auto log_integrand = [&](double x) {
        const double lw = spec.log_weight(x, u(x));
        if (lw == kNegInf) return kNegInf;
        return lw + spec.log_f(u.deriv(x));
    };
    // One global call: the stop criterion is relative to the whole energy,
    // so segments hugging the parabola (negligible mass, extreme logs) do
    // not dictate the refinement. Knots seed panel boundaries.
    auto cuts = energy_cuts(u, a, b);
    SingularEnds ends{touches_parabola(u, a), touches_parabola(u, b)};
    std::vector<double> interior(cuts.begin() + 1, cuts.end() - 1);
    auto r = integrate_log(log_integrand, a, b, rel_tol, ends, {}, interior);
    return r.value;
}

}  // namespace

LogScalar energy(const RealFunc& u, const LagrangianSpec& spec, double rel_tol) {
    return energy_over(u, spec, 0.0, 1.0, rel_tol);
}

LogScalar energy_restricted(const RealFunc& u, const LagrangianSpec& spec, double a, double b,
                            double rel_tol) {
    if (!(0.0 <= a && a < b && b <= 1.0))
        throw std::invalid_argument("energy_restricted: need 0 <= a < b <= 1");
    return energy_over(u, spec, a, b, rel_tol);
}

LogScalar jensen_line_bound(const std::function<double(double)>& log_f, double a, double b,
                            double ua, double ub) {
    if (!(a < b)) throw std::invalid_argument("jensen_line_bound: a < b");
    return LogScalar::from_log(std::log(b - a) + log_f((ub - ua) / (b - a)));
}

std::pair<double, double> crossing_points(const RealFunc& u, const CrossingConfig& cfg) {
    if (std::fabs(u.boundary_left) > 1e-12 || std::fabs(u.boundary_right - 1.0) > 1e-12)
        throw std::invalid_argument("crossing_points: candidate must satisfy u(0)=0, u(1)=1");
    if (!u.lipschitz_bound)
        throw std::invalid_argument("crossing_points: candidate needs a Lipschitz bound");

    auto upper = [&](double x) { return u(x) - 0.5 * std::sqrt(x); };
    auto lower = [&](double x) { return u(x) - 0.25 * std::sqrt(x); };

    // First up-crossing of the upper parabola, scanning from 0.
    const double h = cfg.scan_step;
    if (upper(h) >= 0.0)
        throw std::runtime_error(
            "crossing_points: u already above sqrt(x)/2 at the first scan point; "
            "decrease scan_step (current " + std::to_string(h) + ")");
    double b = -1.0;
    for (double x = h; x < 1.0 + h; x += h) {
        const double xc = std::min(x, 1.0);
        if (upper(xc) >= 0.0) {
            b = bisect_root(upper, xc - h, xc, cfg.bisect_tol);
            break;
        }
        if (xc >= 1.0) break;
    }
    if (b < 0.0)
        throw std::runtime_error("crossing_points: no crossing of sqrt(x)/2 found on the scan grid");

    // Last down-crossing of the lower parabola before b.
    double a = -1.0;
    for (double x = b - h; x > 0.0; x -= h) {
        if (lower(x) <= 0.0) {
            a = bisect_root(lower, x, x + h, cfg.bisect_tol);
            break;
        }
    }
    if (a < 0.0)
        throw std::runtime_error(
            "crossing_points: u stays above sqrt(x)/4 on the whole scan grid before b; "
            "decrease scan_step (current " + std::to_string(h) + ")");
    return {a, b};
}

double case1_chain_margin(double a, double b) {
    if (!(0.0 < a && a < b && b < 2.0 * a && b <= 1.0))
        throw std::invalid_argument("case1_chain_margin: requires 0 < a < b < 2a, b <= 1");
    const double gap = b - a;
    const double x_big = 8.0 * a / (gap * gap);  // exponent of the Young-absorbed term
    const double y_big = 8.0 / a;                // exponent of the subtracted term
    // Link 1: (b-a)(2 e^X - e^Y) >= (b-a) e^X, i.e. log(2 - e^{Y-X}) >= 0.
    const double m1 = std::log(2.0 - std::exp(y_big - x_big));
    // Link 2: e^X >= e^{1/(b-a)}.
    const double m2 = x_big - 1.0 / gap;
    // Link 3: (b-a) e^{1/(b-a)} >= e.
    const double m3 = std::log(gap) + 1.0 / gap - 1.0;
    return std::min({m1, m2, m3});
}

double case1_slope_margin(double a, double b) {
    if (!(0.0 < a && a <= b && b <= 2.0 * a && b <= 1.0))
        throw std::invalid_argument("case1_slope_margin: requires 0 < a <= b <= 2a, b <= 1");
    // ((sqrt(b)/2 - sqrt(a)/4)/(b-a)) * (b-a)/sqrt(a) with the (b-a) cancelled,
    // so the b = a limit is evaluable directly.
    return (0.5 * std::sqrt(b) - 0.25 * std::sqrt(a)) / std::sqrt(a) - 3.0 / 16.0;
}

double case2_chain_margin(double a) {
    if (!(0.0 < a && a <= 1.0)) throw std::invalid_argument("case2_chain_margin: requires 0 < a <= 1");
    const double c = 128.0 * (3.0 - 2.0 * std::sqrt(2.0)) - 8.0;
    return std::log(a) + c / a - 1.0;
}

namespace {

std::vector<double> log_spaced(double lo, double hi, int count) {
    std::vector<double> xs(count);
    const double llo = std::log(lo), lhi = std::log(hi);
    for (int i = 0; i < count; ++i)
        xs[i] = std::exp(llo + (lhi - llo) * i / (count - 1));
    xs.back() = hi;
    return xs;
}

}  // namespace

ConditionReport check_conditions(const LagrangianSpec& spec, const ConditionGrids& grids) {
    if (!spec.in_family())
        throw std::invalid_argument("check_conditions: needs the e^{c xi^2} family (closed-form f', f'')");
    const double c = spec.family_c;
    ConditionReport report;

    // (I): f'' > 0 everywhere and f(0) >= 1. For the family,
    // f''(xi) = (2c + 4 c^2 xi^2) f(xi), so the sign factor is 2c + 4 c^2 xi^2.
    {
        ConditionEntry e;
        e.name = "I";
        e.grid_spec = "symmetric grid of " + std::to_string(grids.pointwise) + " points on [-8, 8]";
        double worst = std::numeric_limits<double>::infinity();
        double at = 0.0;
        for (int i = 0; i < grids.pointwise; ++i) {
            const double xi = -8.0 + 16.0 * i / (grids.pointwise - 1);
            const double factor = 2.0 * c + 4.0 * c * c * xi * xi;
            if (factor < worst) {
                worst = factor;
                at = xi;
            }
        }
        const double f0_log = spec.log_f(0.0);
        e.pass = worst > 0.0 && f0_log >= 0.0;
        e.worst_margin = std::min(worst, f0_log);
        e.witness = {at};
        report.entries[0] = e;
    }

    // (II): inf over 1/2 <= a < 1, p0 in (a, 1] of (p0-a) f(q/(p0-a)) versus
    // e^{8 sqrt 2}, with q = sqrt(1/2)/4; all on the log scale.
    {
        ConditionEntry e;
        e.name = "II";
        e.grid_spec = std::to_string(grids.region) + "x" + std::to_string(grids.region) +
                      " grid on [1/2,1)x(a,1]";
        const double q = 0.25 * std::sqrt(0.5);
        const double threshold = 8.0 * std::sqrt(2.0);
        double worst = std::numeric_limits<double>::infinity();
        std::vector<double> at{0.0, 0.0};
        for (int i = 0; i < grids.region; ++i) {
            const double a = 0.5 + (0.5 - grids.edge) * i / (grids.region - 1);
            for (int j = 1; j <= grids.region; ++j) {
                const double p0 = a + (1.0 - a) * j / grids.region;
                const double s = p0 - a;
                const double log_obj = std::log(s) + spec.log_f(q / s);
                if (log_obj - threshold < worst) {
                    worst = log_obj - threshold;
                    at = {a, p0};
                }
            }
        }
        e.pass = worst > 0.0;
        e.worst_margin = worst;
        e.witness = at;
        report.entries[1] = e;
    }

    // (III): e^{-8/sqrt x} (p(x)-x) f(.25 (sqrt p(x) - sqrt x)/(p(x)-x)) > 1
    // on (0, 1].
    {
        ConditionEntry e;
        e.name = "III";
        e.grid_spec = std::to_string(grids.pointwise) + " log-spaced points on [" +
                      std::to_string(grids.x_min) + ", 1]";
        double worst = std::numeric_limits<double>::infinity();
        double at = 0.0;
        for (double x : log_spaced(grids.x_min, 1.0, grids.pointwise)) {
            const double p = p_map(x);
            const double xi = 0.25 * (std::sqrt(p) - std::sqrt(x)) / (p - x);
            const double lhs_log = -8.0 / std::sqrt(x) + std::log(p - x) + spec.log_f(xi);
            if (lhs_log < worst) {
                worst = lhs_log;
                at = x;
            }
        }
        e.pass = worst > 0.0;
        e.worst_margin = worst;
        e.witness = {at};
        report.entries[2] = e;
    }

    // (IV): (e^{-8/sqrt x}/4) sqrt(x) f(1/(8 sqrt x)) / sqrt(1 + 1/(64x)) > 1
    // on (0, 1).
    {
        ConditionEntry e;
        e.name = "IV";
        e.grid_spec = std::to_string(grids.pointwise) + " log-spaced points on [" +
                      std::to_string(grids.x_min) + ", 1)";
        double worst = std::numeric_limits<double>::infinity();
        double at = 0.0;
        for (double x : log_spaced(grids.x_min, 1.0 - grids.edge, grids.pointwise)) {
            const double xi = 1.0 / (8.0 * std::sqrt(x));
            const double lhs_log = -8.0 / std::sqrt(x) + std::log(0.25 * std::sqrt(x)) +
                                   spec.log_f(xi) - 0.5 * std::log1p(xi * xi);
            if (lhs_log < worst) {
                worst = lhs_log;
                at = x;
            }
        }
        e.pass = worst > 0.0;
        e.worst_margin = worst;
        e.witness = {at};
        report.entries[3] = e;
    }

    // (V): d/dt [f(t)/sqrt(1+t^2)] > 0 for t > 0. For the family the sign
    // factor is 2c - 1/(1+t^2).
    {
        ConditionEntry e;
        e.name = "V";
        e.grid_spec = std::to_string(grids.pointwise) + " log-spaced points on [" +
                      std::to_string(grids.x_min) + ", 1e8]";
        double worst = std::numeric_limits<double>::infinity();
        double at = 0.0;
        for (double t : log_spaced(grids.x_min, 1e8, grids.pointwise)) {
            const double factor = 2.0 * c - 1.0 / (1.0 + t * t);
            if (factor < worst) {
                worst = factor;
                at = t;
            }
        }
        e.pass = worst > 0.0;
        e.worst_margin = worst;
        e.witness = {at};
        report.entries[4] = e;
    }
    return report;
}

CaseSweepMargins sweep_case_margins(const SweepGrids& grids) {
    CaseSweepMargins m;
    m.case1_chain_min = std::numeric_limits<double>::infinity();
    m.case1_slope_min = std::numeric_limits<double>::infinity();
    m.case2_min = std::numeric_limits<double>::infinity();
    const int n = grids.case1;
    for (int i = 1; i <= n; ++i) {
        const double a = static_cast<double>(i) / n;
        const double b_hi = std::min(2.0 * a, 1.0);
        if (!(b_hi > a)) continue;
        for (int j = 1; j <= n; ++j) {
            // Chain grid stays strictly inside b < 2a; slope grid may reach 2a.
            const double b_chain = a + (b_hi - a) * j / (n + 1);
            const double b_slope = a + (b_hi - a) * j / n;
            if (b_chain < 2.0 * a) {
                const double mc = case1_chain_margin(a, b_chain);
                if (mc < m.case1_chain_min) {
                    m.case1_chain_min = mc;
                    m.case1_chain_argmin = {a, b_chain};
                }
            }
            const double ms = case1_slope_margin(a, b_slope);
            if (ms < m.case1_slope_min) {
                m.case1_slope_min = ms;
                m.case1_slope_argmin = {a, b_slope};
            }
        }
    }
    for (int i = 1; i <= grids.case2; ++i) {
        const double a = static_cast<double>(i) / grids.case2;
        const double mc = case2_chain_margin(a);
        if (mc < m.case2_min) {
            m.case2_min = mc;
            m.case2_argmin = a;
        }
    }
    return m;
}

GapReport gap_demo(const std::vector<int>& n_list, const CorpusSpec& corpus, double rel_tol,
                   const SweepGrids& grids, const LagrangianSpec& spec) {
    GapReport report;
    std::vector<int> ns = n_list;
    std::sort(ns.begin(), ns.end());
    for (int n : ns) {
        GapRow row;
        row.n = n;
        try {
            row.log_energy = energy(minimizing_sequence_member(n), spec, rel_tol).log_mag;
        } catch (const QuadratureError& err) {
            row.failed = true;
            row.note = err.what();
        }
        report.rows.push_back(std::move(row));
    }

    if (corpus.count < 0 || corpus.min_knots < 2 || corpus.max_knots < corpus.min_knots)
        throw std::invalid_argument("gap_demo: invalid corpus spec");
    report.corpus_min_energy_log = std::numeric_limits<double>::infinity();
    for (int i = 0; i < corpus.count; ++i) {
        SplitMix64 pick(corpus.seed + 0x9e3779b9ULL * static_cast<std::uint64_t>(i));
        const int knots = corpus.min_knots +
                          static_cast<int>(pick.next_below(corpus.max_knots - corpus.min_knots + 1));
        auto candidate = from_piecewise_linear(
            random_lipschitz_candidate(pick.next_u64(), knots, corpus.slope_cap));
        const double log_e = energy(candidate, spec, rel_tol).log_mag;
        report.corpus_energies_log.push_back(log_e);
        if (log_e < report.corpus_min_energy_log) {
            report.corpus_min_energy_log = log_e;
            report.corpus_min_index = i;
        }
    }
    report.case_sweep_worst_margins = sweep_case_margins(grids);
    return report;
}

}  // namespace lavlab
