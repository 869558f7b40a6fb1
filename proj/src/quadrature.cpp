#include "lavlab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>

namespace lavlab {
namespace {

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK dqk15).
constexpr int kK = 15;
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

// Node layout: index 7 is the center; pairs (j, 14-j) mirror each other.
void panel_nodes(double a, double b, double* x) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    x[7] = mid;
    for (int j = 0; j < 7; ++j) {
        x[j] = mid - half * kXgk[j];
        x[14 - j] = mid + half * kXgk[j];
    }
}

int kron_index(int i) { return i < 8 ? i : 14 - i; }

double kronrod_weight(int i) { return kWgk[kron_index(i)]; }

// The embedded Gauss-7 nodes are the odd Kronrod indices plus the center.
double gauss_weight(int i) {
    switch (kron_index(i)) {
        case 1: return kWg[0];
        case 3: return kWg[1];
        case 5: return kWg[2];
        case 7: return kWg[3];
        default: return 0.0;
    }
}

// ---------------- log-domain panels --------------------------------------

struct LogPanel {
    double a = 0.0, b = 0.0;
    int depth = 0;
    double log_value = kNegInf;  // log of the K15 estimate over [a,b]
    double log_error = kNegInf;  // log |K15 - G7|
    bool improvable = false;
};

LogPanel eval_log_panel(const std::function<double(double)>& lf, double a, double b, int depth,
                        int max_depth) {
    double x[kK], l[kK];
    panel_nodes(a, b, x);
    LogPanel p;
    p.a = a;
    p.b = b;
    p.depth = depth;
    bool has_neg_inf = false;
    double max_sample = kNegInf;
    for (int i = 0; i < kK; ++i) {
        l[i] = lf(x[i]);
        if (std::isnan(l[i])) throw std::domain_error("integrate_log: integrand returned NaN");
        if (l[i] == kNegInf) has_neg_inf = true;
        else max_sample = std::max(max_sample, l[i]);
    }
    if (max_sample == kNegInf) return p;                       // identically zero on samples
    if (has_neg_inf && max_sample < kFloorLog) return p;       // vanishing tail at a touch point
    double sk = 0.0, sg = 0.0;
    for (int i = 0; i < kK; ++i) {
        if (l[i] == kNegInf) continue;
        const double e = std::exp(l[i] - max_sample);
        sk += kronrod_weight(i) * e;
        sg += gauss_weight(i) * e;
    }
    const double half = 0.5 * (b - a);
    p.log_value = max_sample + std::log(half * sk);
    const double diff = half * std::fabs(sk - sg);
    p.log_error = diff > 0.0 ? max_sample + std::log(diff) : kNegInf;
    p.improvable = depth < max_depth && p.log_error > kNegInf;
    return p;
}

// Heap ordering: worst (largest) error first; position breaks ties so the
// refinement order is a total order and runs are bit-reproducible.
struct WorstFirst {
    bool operator()(const LogPanel& x, const LogPanel& y) const {
        if (x.log_error != y.log_error) return x.log_error < y.log_error;
        if (x.a != y.a) return x.a > y.a;
        return x.b > y.b;
    }
};

// Factored accumulator: keeps sum of e^{term - anchor} with a running anchor,
// supporting removal. Removal cancellation only loosens the refinement
// heuristic; final sums are recomputed cleanly from the panel list.
class FactoredSum {
public:
    void add(double log_term) {
        if (log_term == kNegInf) return;
        if (log_term > anchor_) {
            const double scale = std::exp(anchor_ - log_term);
            sum_ *= scale;
            anchor_ = log_term;
        }
        sum_ += std::exp(log_term - anchor_);
    }
    void remove(double log_term) {
        if (log_term == kNegInf || anchor_ == kNegInf) return;
        sum_ -= std::exp(log_term - anchor_);
        if (sum_ < 0.0) sum_ = 0.0;
    }
    // log of the current total; -inf when empty.
    double log_total() const {
        return sum_ <= 0.0 || anchor_ == kNegInf ? kNegInf : anchor_ + std::log(sum_);
    }

private:
    double anchor_ = kNegInf;
    double sum_ = 0.0;
};

// ---------------- linear-domain panels ------------------------------------

struct LinPanel {
    double a = 0.0, b = 0.0;
    int depth = 0;
    double value = 0.0;
    double abs_value = 0.0;
    double error = 0.0;
    bool improvable = false;
};

LinPanel eval_lin_panel(const std::function<double(double)>& f, double a, double b, int depth,
                        int max_depth) {
    double x[kK];
    panel_nodes(a, b, x);
    double sk = 0.0, sg = 0.0, sa = 0.0;
    for (int i = 0; i < kK; ++i) {
        const double v = f(x[i]);
        if (std::isnan(v)) throw std::domain_error("integrate_signed: integrand returned NaN");
        sk += kronrod_weight(i) * v;
        sa += kronrod_weight(i) * std::fabs(v);
        sg += gauss_weight(i) * v;
    }
    const double half = 0.5 * (b - a);
    LinPanel p;
    p.a = a;
    p.b = b;
    p.depth = depth;
    p.value = half * sk;
    p.abs_value = half * sa;
    p.error = half * std::fabs(sk - sg);
    p.improvable = depth < max_depth && p.error > 0.0;
    return p;
}

struct WorstFirstLin {
    bool operator()(const LinPanel& x, const LinPanel& y) const {
        if (x.error != y.error) return x.error < y.error;
        if (x.a != y.a) return x.a > y.a;
        return x.b > y.b;
    }
};

std::vector<std::pair<double, double>> seed_segments(double a, double b, SingularEnds singular,
                                                     const std::vector<double>& breakpoints = {}) {
    // Declared singular endpoints get a geometric sliver split off, so the
    // graded cascade starts concentrated at the endpoint.
    std::vector<std::pair<double, double>> segments;
    double lo = a, hi = b;
    if (singular.left) {
        const double w = (b - a) * 0x1.0p-16;
        segments.emplace_back(a, a + w);
        lo = a + w;
    }
    if (singular.right) {
        const double w = (b - a) * 0x1.0p-16;
        segments.emplace_back(hi - w, hi);
        hi = hi - w;
    }
    std::vector<double> cuts{lo};
    for (double c : breakpoints)
        if (c > lo && c < hi) cuts.push_back(c);
    cuts.push_back(hi);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        if (cuts[i] < cuts[i + 1]) segments.emplace_back(cuts[i], cuts[i + 1]);
    std::sort(segments.begin(), segments.end());
    return segments;
}

}  // namespace

QuadratureResult integrate_log(const std::function<double(double)>& log_integrand,
                               double a, double b, double rel_tol,
                               SingularEnds singular, const QuadratureConfig& cfg,
                               const std::vector<double>& interior_breakpoints) {
    if (!(a < b)) throw std::invalid_argument("integrate_log: requires a < b");
    if (!(rel_tol > 0.0)) throw std::invalid_argument("integrate_log: rel_tol must be positive");

    std::vector<LogPanel> final_panels;
    std::vector<LogPanel> active;  // heap via std::push_heap, iterable for rebuilds
    const WorstFirst cmp{};
    FactoredSum value, error;
    std::int64_t panels = 0;
    std::int64_t ops_since_rebuild = 0;

    auto admit = [&](double lo, double hi, int depth) {
        ++panels;
        LogPanel p = eval_log_panel(log_integrand, lo, hi, depth, cfg.max_depth);
        value.add(p.log_value);
        error.add(p.log_error);
        if (p.improvable) {
            active.push_back(p);
            std::push_heap(active.begin(), active.end(), cmp);
        } else {
            final_panels.push_back(p);
        }
    };

    // Removal leaves rounding residue at the anchor scale in the factored
    // sums; rebuilding them exactly from the panel lists keeps tight
    // tolerances reachable.
    auto rebuild_sums = [&]() {
        value = FactoredSum{};
        error = FactoredSum{};
        for (auto& p : final_panels) {
            value.add(p.log_value);
            error.add(p.log_error);
        }
        for (auto& p : active) {
            value.add(p.log_value);
            error.add(p.log_error);
        }
        ops_since_rebuild = 0;
    };

    for (auto& [sa, sb] : seed_segments(a, b, singular, interior_breakpoints)) admit(sa, sb, 0);

    const double log_rel_tol = std::log(rel_tol);
    auto finish = [&]() {
        // Clean final pass in fixed spatial order.
        final_panels.insert(final_panels.end(), active.begin(), active.end());
        active.clear();
        std::sort(final_panels.begin(), final_panels.end(),
                  [](const LogPanel& x, const LogPanel& y) { return x.a < y.a; });
        LogAccumulator v, e;
        for (auto& p : final_panels) {
            v.add(p.log_value);
            e.add(p.log_error);
        }
        return QuadratureResult{LogScalar::from_log(v.log_total()), e.log_total(), panels};
    };
    auto done = [&]() {
        // Purely relative: integrals like e^{-10^6} must still resolve their
        // log to rel_tol, so the e^{kFloorLog} escape of the formal contract
        // is never taken here.
        const double lv = value.log_total();
        const double le = error.log_total();
        if (le == kNegInf || le <= log_rel_tol + lv) return true;
        if (ops_since_rebuild > std::max<std::int64_t>(64, 2 * std::ssize(active))) {
            rebuild_sums();
            const double lv2 = value.log_total();
            const double le2 = error.log_total();
            return le2 == kNegInf || le2 <= log_rel_tol + lv2;
        }
        return false;
    };
    // A log magnitude of L leaves samples with ~L*eps absolute noise, so a
    // relative tolerance below that cannot be certified in doubles.
    auto below_noise_floor = [&]() {
        if (panels < 512) return false;  // let the seeds refine before judging the scale
        const double lv = value.log_total();
        if (lv == kNegInf) return false;
        return rel_tol < 2.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::fabs(lv));
    };

    while (!done()) {
        if (below_noise_floor()) {
            QuadratureResult partial = finish();
            throw QuadratureError(
                "integrate_log: requested tolerance is below the double-precision noise floor "
                "for an integrand of this log magnitude",
                partial, a, b);
        }
        if (active.empty()) {
            QuadratureResult partial = finish();
            throw QuadratureError(
                "integrate_log: no convergence at the depth cap (divergent integrand?)", partial,
                a, b);
        }
        if (panels + 2 > cfg.panel_budget) {
            const LogPanel worst = active.front();
            QuadratureResult partial = finish();
            throw QuadratureError("integrate_log: panel budget exhausted", partial, worst.a,
                                  worst.b);
        }
        std::pop_heap(active.begin(), active.end(), cmp);
        LogPanel worst = active.back();
        active.pop_back();
        value.remove(worst.log_value);
        error.remove(worst.log_error);
        ++ops_since_rebuild;
        const double mid = 0.5 * (worst.a + worst.b);
        admit(worst.a, mid, worst.depth + 1);
        admit(mid, worst.b, worst.depth + 1);
    }
    return finish();
}

namespace {

double integrate_lin_core(const std::function<double(double)>& f, double a, double b,
                          double rel_tol, SingularEnds singular, const QuadratureConfig& cfg) {
    std::vector<LinPanel> final_panels;
    std::vector<LinPanel> active;
    const WorstFirstLin cmp{};
    double value = 0.0, abs_value = 0.0, error = 0.0;
    std::int64_t panels = 0;
    std::int64_t ops_since_rebuild = 0;

    auto admit = [&](double lo, double hi, int depth) {
        ++panels;
        LinPanel p = eval_lin_panel(f, lo, hi, depth, cfg.max_depth);
        value += p.value;
        abs_value += p.abs_value;
        error += p.error;
        if (p.improvable) {
            active.push_back(p);
            std::push_heap(active.begin(), active.end(), cmp);
        } else {
            final_panels.push_back(p);
        }
    };

    auto rebuild_sums = [&]() {
        value = abs_value = error = 0.0;
        for (auto& p : final_panels) {
            value += p.value;
            abs_value += p.abs_value;
            error += p.error;
        }
        for (auto& p : active) {
            value += p.value;
            abs_value += p.abs_value;
            error += p.error;
        }
        ops_since_rebuild = 0;
    };

    for (auto& [sa, sb] : seed_segments(a, b, singular)) admit(sa, sb, 0);

    auto finish = [&]() {
        final_panels.insert(final_panels.end(), active.begin(), active.end());
        active.clear();
        std::sort(final_panels.begin(), final_panels.end(),
                  [](const LinPanel& x, const LinPanel& y) { return x.a < y.a; });
        double v = 0.0;
        for (auto& p : final_panels) v += p.value;
        return v;
    };
    auto done = [&]() {
        if (error <= rel_tol * std::max(abs_value, 1e-300)) return true;
        if (ops_since_rebuild > std::max<std::int64_t>(64, 2 * std::ssize(active))) {
            rebuild_sums();
            return error <= rel_tol * std::max(abs_value, 1e-300);
        }
        return false;
    };

    while (!done()) {
        if (active.empty())
            throw QuadratureError(
                "integrate_signed: no convergence at the depth cap (divergent integrand?)",
                QuadratureResult{LogScalar::from_real(finish()), kNegInf, panels}, a, b);
        if (panels + 2 > cfg.panel_budget) {
            const LinPanel worst = active.front();
            throw QuadratureError("integrate_signed: panel budget exhausted",
                                  QuadratureResult{LogScalar::from_real(finish()), kNegInf, panels},
                                  worst.a, worst.b);
        }
        std::pop_heap(active.begin(), active.end(), cmp);
        LinPanel worst = active.back();
        active.pop_back();
        value -= worst.value;
        abs_value -= worst.abs_value;
        error -= worst.error;
        if (abs_value < 0.0) abs_value = 0.0;
        if (error < 0.0) error = 0.0;
        ++ops_since_rebuild;
        const double mid = 0.5 * (worst.a + worst.b);
        admit(worst.a, mid, worst.depth + 1);
        admit(mid, worst.b, worst.depth + 1);
    }
    return finish();
}

}  // namespace

double integrate_signed(const std::function<double(double)>& f,
                        double a, double b, double rel_tol, const QuadratureConfig& cfg) {
    if (!(a < b)) throw std::invalid_argument("integrate_signed: requires a < b");
    if (!(rel_tol > 0.0)) throw std::invalid_argument("integrate_signed: rel_tol must be positive");
    return integrate_lin_core(f, a, b, rel_tol, SingularEnds{}, cfg);
}

double integrate_signed_split(const std::function<double(double)>& f,
                              double a, double b, double rel_tol,
                              const std::vector<double>& breakpoints,
                              const QuadratureConfig& cfg) {
    std::vector<double> cuts{a};
    for (double c : breakpoints)
        if (c > a && c < b) cuts.push_back(c);
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        total += integrate_signed(f, cuts[i], cuts[i + 1], rel_tol, cfg);
    return total;
}

AntiderivativeTable::AntiderivativeTable(const std::function<double(double)>& f,
                                         int grid_size, double f0, double rel_tol) {
    if (grid_size < 2) throw std::invalid_argument("AntiderivativeTable: grid_size >= 2");
    values_.resize(grid_size + 1);
    values_[0] = f0;
    for (int i = 0; i < grid_size; ++i) {
        const double x0 = static_cast<double>(i) / grid_size;
        const double x1 = static_cast<double>(i + 1) / grid_size;
        values_[i + 1] = values_[i] + integrate_signed(f, x0, x1, rel_tol);
    }
}

double AntiderivativeTable::operator()(double x) const {
    const int n = grid_size();
    if (x <= 0.0) return values_[0];
    if (x >= 1.0) return values_[n];
    const double t = x * n;
    const int i = std::min(static_cast<int>(t), n - 1);
    const double frac = t - i;
    return values_[i] + frac * (values_[i + 1] - values_[i]);
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.assign(n, 0.0);
    weights.assign(n, 0.0);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            const double dx = p0 / pp;
            x -= dx;
            if (std::fabs(dx) < 1e-15) break;
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
        weights[n - 1 - i] = weights[i];
    }
}

double bisect_root(const std::function<double(double)>& f, double lo, double hi,
                   double x_tol_rel, int max_iter) {
    double flo = f(lo), fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo < 0.0) == (fhi < 0.0))
        throw std::invalid_argument("bisect_root: no sign change on the bracket");
    const double scale = std::max({std::fabs(lo), std::fabs(hi), 1.0});
    for (int i = 0; i < max_iter; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm == 0.0 || hi - lo < x_tol_rel * scale) return mid;
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace lavlab
