// Function representations on [0,1]: exact piecewise-linear and step
// functions, plus a closure-based RealFunc for closed forms, tabulated
// antiderivatives and mollified functions.
#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lavlab/rational.hpp"

namespace lavlab {

// Step function on [0,1]: cells [b_i, b_{i+1}) with the last cell closed.
// Breakpoints and plateau values are kept as exact rationals so level-set
// preimages downstream are exact; doubles are cached for quadrature.
class StepFunction {
public:
    StepFunction(std::vector<Rational> breakpoints, std::vector<Rational> values);
    static StepFunction from_doubles(const std::vector<double>& breakpoints,
                                     const std::vector<double>& values);
    static StepFunction constant(const Rational& value);

    std::size_t cell_count() const { return values_.size(); }
    const std::vector<Rational>& breakpoints() const { return breakpoints_; }
    const std::vector<Rational>& values() const { return values_; }

    double operator()(double x) const;
    Rational value_at(const Rational& x) const;

    // Exact integral over [a,b] within [0,1].
    Rational integral(const Rational& a, const Rational& b) const;
    double integral(double a, double b) const;

    double min_value() const;
    double max_value() const;

private:
    std::vector<Rational> breakpoints_;  // size m+1, first 0, last 1, strictly increasing
    std::vector<Rational> values_;       // size m
    std::vector<double> bp_d_, val_d_;
};

// Piecewise-linear function with knots[0] = 0 and knots.back() = 1.
class PiecewiseLinear {
public:
    PiecewiseLinear(std::vector<double> knots, std::vector<double> values);

    const std::vector<double>& knots() const { return knots_; }
    const std::vector<double>& values() const { return values_; }

    double operator()(double x) const;
    // Right-hand slope at knots; left-hand slope at x = 1.
    double deriv(double x) const;
    std::vector<double> slopes() const;
    double max_abs_slope() const;
    StepFunction deriv_step() const;

private:
    std::size_t segment_of(double x) const;
    std::vector<double> knots_, values_;
};

enum class FuncKind { closed_form, piecewise_linear, antiderivative, mollified };

const char* to_string(FuncKind k);

// Immutable function value: evaluation, a.e. derivative, boundary values,
// optional Lipschitz bound, and (for exact kinds) the underlying payload.
struct RealFunc {
    FuncKind kind = FuncKind::closed_form;
    std::string form_id;                  // "sqrt", "sqrt_quarter", "sqrt_half", "u_n", "line", ...
    std::vector<double> params;
    std::function<double(double)> eval_fn;
    std::function<double(double)> deriv_fn;
    double boundary_left = 0.0;
    double boundary_right = 0.0;
    std::optional<double> lipschitz_bound;
    std::vector<double> deriv_undefined_at;
    std::shared_ptr<const PiecewiseLinear> pl;  // set when kind == piecewise_linear

    double operator()(double x) const { return eval_fn(x); }
    double deriv(double x) const { return deriv_fn(x); }
};

// x -> sqrt(x)/4 and x -> sqrt(x)/2, with exact derivatives (undefined at 0).
std::pair<RealFunc, RealFunc> make_sqrt_quarter_half();

// x -> sqrt(x).
RealFunc make_sqrt();

// x -> A + (B - A) x.
RealFunc make_line(double a_val, double b_val);

// u_n(x) = sqrt(x) + x(x-1)/n, the energy-collapsing sequence.
RealFunc minimizing_sequence_member(int n);

RealFunc from_piecewise_linear(PiecewiseLinear p);

// Admissible random candidate: values(0) = 0, values(1) = 1, all slopes in
// [-slope_cap, slope_cap]. Deterministic in seed. slope_cap < 1 is rejected
// (total rise 1 is then unreachable).
PiecewiseLinear random_lipschitz_candidate(std::uint64_t seed, int knot_count,
                                           double slope_cap);

// Exact antiderivative of a step function: piecewise linear with matching
// slopes, F(0) = f0.
PiecewiseLinear antiderivative_exact(const StepFunction& f, double f0 = 0.0);

// Parses the named ids exposed externally: "sqrt", "sqrt_quarter",
// "sqrt_half", "u_n(n)", "line(A,B)".
RealFunc parse_named_func(const std::string& text);

}  // namespace lavlab
