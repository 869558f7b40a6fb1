// Deterministic adaptive Gauss-Kronrod quadrature on [a,b], with a
// log-domain variant whose accumulation never leaves the log scale.
#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "lavlab/log_scalar.hpp"

namespace lavlab {

struct QuadratureResult {
    LogScalar value;
    double abs_error_log = kNegInf;  // log of estimated absolute error
    std::int64_t panel_count = 0;
};

struct SingularEnds {
    bool left = false;
    bool right = false;
};

struct QuadratureConfig {
    double rel_tol = 1e-8;
    int max_depth = 60;                      // bisection cascade limit per endpoint
    std::int64_t panel_budget = 1 << 20;
};

class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& what, QuadratureResult partial,
                    double worst_lo, double worst_hi)
        : std::runtime_error(what), partial(partial), worst_panel_lo(worst_lo),
          worst_panel_hi(worst_hi) {}
    QuadratureResult partial;
    double worst_panel_lo;
    double worst_panel_hi;
};

// Integrates e^{log_integrand} over [a,b]; integrand nonnegative by contract.
// Result satisfies |e^L - I| <= rel_tol * max(I, e^{kFloorLog}); the
// refinement itself stops only at rel_tol * I, so the log of the result is
// accurate even when I is far below float range. Endpoints flagged singular
// are approached by the bisection cascade and are never sampled (the Kronrod
// nodes are interior anyway). Interior breakpoints become seed boundaries so
// panels never straddle known kinks of the integrand.
QuadratureResult integrate_log(const std::function<double(double)>& log_integrand,
                               double a, double b, double rel_tol,
                               SingularEnds singular = {},
                               const QuadratureConfig& cfg = {},
                               const std::vector<double>& interior_breakpoints = {});

// Linear-domain adaptive quadrature for signed, moderate-magnitude integrands.
double integrate_signed(const std::function<double(double)>& f,
                        double a, double b, double rel_tol,
                        const QuadratureConfig& cfg = {});

// As above but the integration is split at the given interior breakpoints
// (discontinuities of f), which keeps panels away from the kinks.
double integrate_signed_split(const std::function<double(double)>& f,
                              double a, double b, double rel_tol,
                              const std::vector<double>& breakpoints,
                              const QuadratureConfig& cfg = {});

// Tabulated antiderivative F(x) = F0 + int_0^x f. Nodes are exact to the
// quadrature tolerance; between nodes F is linear, so the interpolation error
// is O(grid_size^-2) for Lipschitz f and F is monotone wherever f keeps a
// sign across a cell.
class AntiderivativeTable {
public:
    AntiderivativeTable(const std::function<double(double)>& f, int grid_size,
                        double f0 = 0.0, double rel_tol = 1e-10);
    double operator()(double x) const;
    int grid_size() const { return static_cast<int>(values_.size()) - 1; }

private:
    std::vector<double> values_;  // F at i/grid_size
};

// Nodes and weights of the n-point Gauss-Legendre rule on [-1,1],
// computed once by Newton iteration on the Legendre recurrence.
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

// Bisection root finder; requires a sign change on [lo, hi].
// Refines until the bracket width is below x_tol_rel * max(|lo|,|hi|,1).
double bisect_root(const std::function<double(double)>& f, double lo, double hi,
                   double x_tol_rel = 1e-14, int max_iter = 200);

}  // namespace lavlab
