#include "lavlab/func_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lavlab/rng.hpp"

namespace lavlab {

StepFunction::StepFunction(std::vector<Rational> breakpoints, std::vector<Rational> values)
    : breakpoints_(std::move(breakpoints)), values_(std::move(values)) {
    if (breakpoints_.size() != values_.size() + 1 || values_.empty())
        throw std::invalid_argument("StepFunction: need m+1 breakpoints for m cells");
    if (breakpoints_.front() != Rational(0) || breakpoints_.back() != Rational(1))
        throw std::invalid_argument("StepFunction: breakpoints must span [0,1]");
    for (std::size_t i = 0; i + 1 < breakpoints_.size(); ++i)
        if (!(breakpoints_[i] < breakpoints_[i + 1]))
            throw std::invalid_argument("StepFunction: breakpoints must increase strictly");
    bp_d_.reserve(breakpoints_.size());
    for (auto& b : breakpoints_) bp_d_.push_back(b.to_double());
    val_d_.reserve(values_.size());
    for (auto& v : values_) val_d_.push_back(v.to_double());
}

StepFunction StepFunction::from_doubles(const std::vector<double>& breakpoints,
                                        const std::vector<double>& values) {
    std::vector<Rational> bp, vs;
    bp.reserve(breakpoints.size());
    vs.reserve(values.size());
    for (double b : breakpoints) bp.push_back(Rational::from_double(b));
    for (double v : values) vs.push_back(Rational::from_double(v));
    return StepFunction(std::move(bp), std::move(vs));
}

StepFunction StepFunction::constant(const Rational& value) {
    return StepFunction({Rational(0), Rational(1)}, {value});
}

double StepFunction::operator()(double x) const {
    if (x >= bp_d_[val_d_.size() - 1]) return val_d_.back();  // last cell closed
    auto it = std::upper_bound(bp_d_.begin(), bp_d_.end(), x);
    std::size_t i = it == bp_d_.begin() ? 0 : (it - bp_d_.begin()) - 1;
    return val_d_[std::min(i, val_d_.size() - 1)];
}

Rational StepFunction::value_at(const Rational& x) const {
    for (std::size_t i = 0; i + 1 < values_.size(); ++i)
        if (x >= breakpoints_[i] && x < breakpoints_[i + 1]) return values_[i];
    return values_.back();
}

Rational StepFunction::integral(const Rational& a, const Rational& b) const {
    Rational total(0);
    for (std::size_t i = 0; i < values_.size(); ++i) {
        Rational lo = Rational::max(a, breakpoints_[i]);
        Rational hi = Rational::min(b, breakpoints_[i + 1]);
        if (lo < hi) total = total + values_[i] * (hi - lo);
    }
    return total;
}

double StepFunction::integral(double a, double b) const {
    // Plain double path: the rational overload is for exact inputs whose
    // products stay within int64.
    double total = 0.0;
    for (std::size_t i = 0; i < val_d_.size(); ++i) {
        const double lo = std::max(a, bp_d_[i]);
        const double hi = std::min(b, bp_d_[i + 1]);
        if (lo < hi) total += val_d_[i] * (hi - lo);
    }
    return total;
}

double StepFunction::min_value() const {
    return *std::min_element(val_d_.begin(), val_d_.end());
}

double StepFunction::max_value() const {
    return *std::max_element(val_d_.begin(), val_d_.end());
}

PiecewiseLinear::PiecewiseLinear(std::vector<double> knots, std::vector<double> values)
    : knots_(std::move(knots)), values_(std::move(values)) {
    if (knots_.size() != values_.size() || knots_.size() < 2)
        throw std::invalid_argument("PiecewiseLinear: need matching knots/values, at least 2");
    if (knots_.front() != 0.0 || knots_.back() != 1.0)
        throw std::invalid_argument("PiecewiseLinear: knots must span [0,1]");
    for (std::size_t i = 0; i + 1 < knots_.size(); ++i)
        if (!(knots_[i] < knots_[i + 1]))
            throw std::invalid_argument("PiecewiseLinear: knots must increase strictly");
}

std::size_t PiecewiseLinear::segment_of(double x) const {
    auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
    std::size_t i = it == knots_.begin() ? 0 : (it - knots_.begin()) - 1;
    return std::min(i, knots_.size() - 2);
}

double PiecewiseLinear::operator()(double x) const {
    auto it = std::lower_bound(knots_.begin(), knots_.end(), x);
    if (it != knots_.end() && *it == x) return values_[it - knots_.begin()];
    const std::size_t i = segment_of(x);
    const double t = (x - knots_[i]) / (knots_[i + 1] - knots_[i]);
    return values_[i] + t * (values_[i + 1] - values_[i]);
}

double PiecewiseLinear::deriv(double x) const {
    const std::size_t i = x >= 1.0 ? knots_.size() - 2 : segment_of(x);
    return (values_[i + 1] - values_[i]) / (knots_[i + 1] - knots_[i]);
}

std::vector<double> PiecewiseLinear::slopes() const {
    std::vector<double> s(knots_.size() - 1);
    for (std::size_t i = 0; i + 1 < knots_.size(); ++i)
        s[i] = (values_[i + 1] - values_[i]) / (knots_[i + 1] - knots_[i]);
    return s;
}

double PiecewiseLinear::max_abs_slope() const {
    double m = 0.0;
    for (double s : slopes()) m = std::max(m, std::fabs(s));
    return m;
}

StepFunction PiecewiseLinear::deriv_step() const {
    std::vector<Rational> bp, vs;
    for (double k : knots_) bp.push_back(Rational::from_double(k));
    for (double s : slopes()) vs.push_back(Rational::from_double(s));
    return StepFunction(std::move(bp), std::move(vs));
}

const char* to_string(FuncKind k) {
    switch (k) {
        case FuncKind::closed_form: return "closed-form";
        case FuncKind::piecewise_linear: return "piecewise-linear";
        case FuncKind::antiderivative: return "antiderivative";
        case FuncKind::mollified: return "mollified";
    }
    return "?";
}

std::pair<RealFunc, RealFunc> make_sqrt_quarter_half() {
    RealFunc quarter;
    quarter.kind = FuncKind::closed_form;
    quarter.form_id = "sqrt_quarter";
    quarter.eval_fn = [](double x) { return 0.25 * std::sqrt(x); };
    quarter.deriv_fn = [](double x) { return 1.0 / (8.0 * std::sqrt(x)); };
    quarter.boundary_left = 0.0;
    quarter.boundary_right = 0.25;
    quarter.deriv_undefined_at = {0.0};

    RealFunc half;
    half.kind = FuncKind::closed_form;
    half.form_id = "sqrt_half";
    half.eval_fn = [](double x) { return 0.5 * std::sqrt(x); };
    half.deriv_fn = [](double x) { return 1.0 / (4.0 * std::sqrt(x)); };
    half.boundary_left = 0.0;
    half.boundary_right = 0.5;
    half.deriv_undefined_at = {0.0};
    return {quarter, half};
}

RealFunc make_sqrt() {
    RealFunc f;
    f.kind = FuncKind::closed_form;
    f.form_id = "sqrt";
    f.eval_fn = [](double x) { return std::sqrt(x); };
    f.deriv_fn = [](double x) { return 1.0 / (2.0 * std::sqrt(x)); };
    f.boundary_left = 0.0;
    f.boundary_right = 1.0;
    f.deriv_undefined_at = {0.0};
    return f;
}

RealFunc make_line(double a_val, double b_val) {
    RealFunc f;
    f.kind = FuncKind::closed_form;
    f.form_id = "line";
    f.params = {a_val, b_val};
    const double slope = b_val - a_val;
    f.eval_fn = [a_val, slope](double x) { return a_val + slope * x; };
    f.deriv_fn = [slope](double) { return slope; };
    f.boundary_left = a_val;
    f.boundary_right = b_val;
    f.lipschitz_bound = std::fabs(slope);
    return f;
}

RealFunc minimizing_sequence_member(int n) {
    if (n < 1) throw std::invalid_argument("minimizing_sequence_member: n >= 1");
    RealFunc f;
    f.kind = FuncKind::closed_form;
    f.form_id = "u_n";
    f.params = {static_cast<double>(n)};
    const double inv_n = 1.0 / n;
    f.eval_fn = [inv_n](double x) { return std::sqrt(x) + x * (x - 1.0) * inv_n; };
    f.deriv_fn = [inv_n](double x) { return 0.5 / std::sqrt(x) + (2.0 * x - 1.0) * inv_n; };
    f.boundary_left = 0.0;
    f.boundary_right = 1.0;
    f.deriv_undefined_at = {0.0};
    return f;
}

RealFunc from_piecewise_linear(PiecewiseLinear p) {
    auto shared = std::make_shared<const PiecewiseLinear>(std::move(p));
    RealFunc f;
    f.kind = FuncKind::piecewise_linear;
    f.eval_fn = [shared](double x) { return (*shared)(x); };
    f.deriv_fn = [shared](double x) { return shared->deriv(x); };
    f.boundary_left = shared->values().front();
    f.boundary_right = shared->values().back();
    f.lipschitz_bound = shared->max_abs_slope();
    f.deriv_undefined_at.assign(shared->knots().begin() + 1, shared->knots().end() - 1);
    f.pl = shared;
    return f;
}

PiecewiseLinear random_lipschitz_candidate(std::uint64_t seed, int knot_count,
                                           double slope_cap) {
    if (knot_count < 2) throw std::invalid_argument("random_lipschitz_candidate: knot_count >= 2");
    if (!(slope_cap > 0.0)) throw std::invalid_argument("random_lipschitz_candidate: slope_cap > 0");
    if (slope_cap < 1.0)
        throw std::invalid_argument(
            "random_lipschitz_candidate: slope_cap < 1 makes the endpoint constraint unreachable");
    SplitMix64 rng(seed);
    std::vector<double> knots;
    for (int attempt = 0; attempt < 64; ++attempt) {
        knots.assign(1, 0.0);
        for (int i = 0; i < knot_count - 2; ++i) knots.push_back(rng.next_in(0.0, 1.0));
        knots.push_back(1.0);
        std::sort(knots.begin(), knots.end());
        bool distinct = true;
        for (std::size_t i = 0; i + 1 < knots.size(); ++i)
            if (knots[i + 1] - knots[i] < 1e-9) distinct = false;
        if (distinct) break;
        knots.clear();
    }
    if (knots.empty()) throw std::runtime_error("random_lipschitz_candidate: knot draw failed");

    // Interior values drawn uniformly inside the forward-backward feasible
    // band, so every slope stays within the cap and (1,1) stays reachable.
    std::vector<double> values(knots.size());
    values.front() = 0.0;
    values.back() = 1.0;
    for (std::size_t i = 1; i + 1 < knots.size(); ++i) {
        const double dt = knots[i] - knots[i - 1];
        const double remaining = 1.0 - knots[i];
        const double lo = std::max(values[i - 1] - slope_cap * dt, 1.0 - slope_cap * remaining);
        const double hi = std::min(values[i - 1] + slope_cap * dt, 1.0 + slope_cap * remaining);
        values[i] = rng.next_in(lo, hi);
    }
    return PiecewiseLinear(std::move(knots), std::move(values));
}

PiecewiseLinear antiderivative_exact(const StepFunction& f, double f0) {
    std::vector<double> knots, values;
    knots.reserve(f.breakpoints().size());
    for (auto& b : f.breakpoints()) knots.push_back(b.to_double());
    values.resize(knots.size());
    values[0] = f0;
    const auto& vals = f.values();
    for (std::size_t i = 0; i < vals.size(); ++i)
        values[i + 1] = values[i] + vals[i].to_double() * (knots[i + 1] - knots[i]);
    return PiecewiseLinear(std::move(knots), std::move(values));
}

RealFunc parse_named_func(const std::string& text) {
    auto paren = text.find('(');
    const std::string id = paren == std::string::npos ? text : text.substr(0, paren);
    std::vector<double> args;
    if (paren != std::string::npos) {
        auto close = text.rfind(')');
        if (close == std::string::npos || close < paren)
            throw std::invalid_argument("parse_named_func: unbalanced parentheses in " + text);
        std::string inner = text.substr(paren + 1, close - paren - 1);
        std::size_t pos = 0;
        while (pos < inner.size()) {
            auto comma = inner.find(',', pos);
            auto piece = inner.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
            args.push_back(std::stod(piece));
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
    }
    if (id == "sqrt") return make_sqrt();
    if (id == "sqrt_quarter") return make_sqrt_quarter_half().first;
    if (id == "sqrt_half") return make_sqrt_quarter_half().second;
    if (id == "u_n") {
        if (args.size() != 1) throw std::invalid_argument("u_n requires one parameter");
        return minimizing_sequence_member(static_cast<int>(args[0]));
    }
    if (id == "line") {
        if (args.size() != 2) throw std::invalid_argument("line requires two parameters");
        return make_line(args[0], args[1]);
    }
    throw std::invalid_argument("parse_named_func: unknown id " + id);
}

}  // namespace lavlab
