// The constructive AC -> C-infinity pipeline: derivative truncation,
// mollification with the standard bump kernel, boundary correction, and
// machine-checkable closeness certificates.
#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lavlab/func_model.hpp"
#include "lavlab/lavrentiev.hpp"

namespace lavlab {

// Standard mollifier eta(x) = e^{-1/(1-x^2)} / Z on (-1,1). Z comes from
// adaptive quadrature; the fixed 64-node Gauss rule used for convolutions is
// renormalized so that its discrete kernel mass is exactly 1 (constants then
// mollify to themselves bit-for-bit).
class MollifierKernel {
public:
    MollifierKernel();

    double eta(double x) const;
    double eta_deriv(double x) const;
    double normalization() const { return z_; }

    // (u * eta_{1/n})(x) with u already extended beyond [0,1].
    double convolve(const std::function<double(double)>& u_ext, double x, int n) const;
    // d/dx of the above, with the derivative moved onto the kernel.
    double convolve_deriv(const std::function<double(double)>& u_ext, double x, int n) const;

private:
    double z_ = 0.0;
    double discrete_scale_ = 1.0;  // 1 / (sum w_i eta(t_i))
    std::vector<double> nodes_, weights_;
};

struct Certificate {
    double epsilon_target = 0.0;
    double sup_distance = 0.0;          // grid estimate + Lipschitz pad
    double boundary_residual_left = 0.0;
    double boundary_residual_right = 0.0;
    double energy_u_log = 0.0;          // log F(u)
    double energy_phi_log = 0.0;        // log F(phi)
    double energy_gap = 0.0;            // |F(u) - F(phi)| when representable
    bool energy_gap_representable = false;
    std::optional<double> l1_deriv_distance;
    bool l3_vacated = false;            // no finite df/dy bound in the spec
    bool range_warning = false;         // u left [0,1] at some sample
    int k_used = 0;
    long n_used = 0;
    std::string sampling_spec;
    bool pass = false;
};

struct TruncationResult {
    std::function<double(double)> v_k;  // u' where |u'| < k, else 0
    RealFunc u_k;                       // antiderivative, u_k(0) = u(0), Lipschitz k
};

// Stage 1. Exact closed forms for sqrt-like and piecewise-linear candidates;
// the tabulated antiderivative otherwise.
TruncationResult truncate_derivative(const RealFunc& u, double k);

// Stage 2. Constant extension outside [0,1], then convolution against
// eta_{1/n}; the result carries Lipschitz bound k.
RealFunc mollify(const RealFunc& u_k, int n, const MollifierKernel& kernel);

// Stage 3. phi(x) = A + (u(x) - u(0)) + x [(B - A) - (u(1) - u(0))]:
// endpoints exact, derivative shifted by a constant.
RealFunc boundary_correct(const RealFunc& u_kn, double a_val, double b_val);

struct ApproximationSchedule {
    double k0 = 2.0;
    int max_doublings = 14;
    // n for a given k; defaults to ceil(k^2 / epsilon) so both the 1/(2k)
    // and k/n stage bounds shrink together.
    std::function<long(double, double)> n_for_k;
};

struct ApproximationResult {
    RealFunc phi;
    Certificate certificate;
};

class ScheduleExhausted : public std::runtime_error {
public:
    ScheduleExhausted(const std::string& what, Certificate best)
        : std::runtime_error(what), best_certificate(std::move(best)) {}
    Certificate best_certificate;
};

struct VerifyConfig {
    int grid = 10000;
    double rel_tol = 1e-8;
    bool check_l4 = true;
};

// Distances between u and phi for the (L1)-(L4) conditions. The sup estimate
// uses a quadratically graded grid near 0 (where sqrt-kind candidates have
// unbounded slope) plus a modulus pad from the available Lipschitz bounds.
Certificate verify_certificate(const RealFunc& u, const RealFunc& phi,
                               const LagrangianSpec& spec, double epsilon,
                               const VerifyConfig& cfg = {});

// Runs the schedule until a certificate passes; throws ScheduleExhausted
// carrying the best certificate otherwise. Specs without a finite df/dy
// bound are allowed but mark the certificate's L3 guarantee as vacated.
ApproximationResult approximate(const RealFunc& u, const LagrangianSpec& spec, double epsilon,
                                const ApproximationSchedule& schedule = {},
                                const VerifyConfig& cfg = {});

}  // namespace lavlab
