#include "lavlab/smoothing.hpp"

#include <algorithm>
#include <cmath>

#include "lavlab/quadrature.hpp"

namespace lavlab {

namespace {

double bump(double x) {
    const double s = 1.0 - x * x;
    if (s <= 0.0) return 0.0;
    return std::exp(-1.0 / s);
}

double bump_deriv(double x) {
    const double s = 1.0 - x * x;
    if (s <= 0.0) return 0.0;
    return std::exp(-1.0 / s) * (-2.0 * x) / (s * s);
}

}  // namespace

MollifierKernel::MollifierKernel() {
    z_ = integrate_signed(bump, -1.0, 1.0, 1e-13);
    gauss_legendre(64, nodes_, weights_);
    double mass = 0.0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) mass += weights_[i] * bump(nodes_[i]) / z_;
    discrete_scale_ = 1.0 / mass;
}

double MollifierKernel::eta(double x) const { return bump(x) / z_; }

double MollifierKernel::eta_deriv(double x) const { return bump_deriv(x) / z_; }

double MollifierKernel::convolve(const std::function<double(double)>& u_ext, double x,
                                 int n) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const double t = nodes_[i];
        acc += weights_[i] * eta(t) * u_ext(x - t / n);
    }
    return acc * discrete_scale_;
}

double MollifierKernel::convolve_deriv(const std::function<double(double)>& u_ext, double x,
                                       int n) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const double t = nodes_[i];
        acc += weights_[i] * eta_deriv(t) * u_ext(x - t / n);
    }
    return acc * discrete_scale_ * n;
}

TruncationResult truncate_derivative(const RealFunc& u, double k) {
    if (!(k > 0.0)) throw std::invalid_argument("truncate_derivative: k > 0");
    TruncationResult out;
    out.v_k = [u, k](double x) {
        const double d = u.deriv(x);
        return std::fabs(d) < k ? d : 0.0;
    };

    if (u.kind == FuncKind::piecewise_linear && u.pl) {
        // Exact: zero out the over-threshold slopes and rebuild the values.
        const auto& knots = u.pl->knots();
        auto slopes = u.pl->slopes();
        std::vector<double> values(knots.size());
        values[0] = u.pl->values().front();
        for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
            const double s = std::fabs(slopes[i]) < k ? slopes[i] : 0.0;
            values[i + 1] = values[i] + s * (knots[i + 1] - knots[i]);
        }
        out.u_k = from_piecewise_linear(PiecewiseLinear(knots, std::move(values)));
        out.u_k.kind = FuncKind::antiderivative;
        out.u_k.lipschitz_bound = k;
        return out;
    }

    if (u.form_id == "sqrt") {
        // |u'| = 1/(2 sqrt x) >= k exactly on (0, 1/(4k^2)]; the antiderivative
        // is flat there and sqrt(x) - 1/(2k) beyond.
        const double x_k = 1.0 / (4.0 * k * k);
        RealFunc uk;
        uk.kind = FuncKind::antiderivative;
        uk.form_id = "sqrt_truncated";
        uk.params = {k};
        if (x_k >= 1.0) {
            uk.eval_fn = [](double) { return 0.0; };
            uk.deriv_fn = [](double) { return 0.0; };
            uk.boundary_right = 0.0;
        } else {
            uk.eval_fn = [x_k, k](double x) { return x <= x_k ? 0.0 : std::sqrt(x) - 0.5 / k; };
            uk.deriv_fn = [x_k](double x) { return x <= x_k ? 0.0 : 0.5 / std::sqrt(x); };
            uk.boundary_right = 1.0 - 0.5 / k;
        }
        uk.boundary_left = 0.0;
        uk.lipschitz_bound = k;
        uk.deriv_undefined_at = {x_k};
        out.u_k = std::move(uk);
        return out;
    }

    if (u.form_id == "line") {
        const double slope = u.params[1] - u.params[0];
        out.u_k = std::fabs(slope) < k ? u : make_line(u.params[0], u.params[0]);
        out.u_k.kind = FuncKind::antiderivative;
        out.u_k.lipschitz_bound = std::min(std::fabs(slope), k);
        return out;
    }

    // Generic path: tabulated antiderivative of the truncated derivative.
    auto table = std::make_shared<AntiderivativeTable>(out.v_k, 4096, u.boundary_left, 1e-12);
    RealFunc uk;
    uk.kind = FuncKind::antiderivative;
    uk.eval_fn = [table](double x) { return (*table)(x); };
    uk.deriv_fn = out.v_k;
    uk.boundary_left = u.boundary_left;
    uk.boundary_right = (*table)(1.0);
    uk.lipschitz_bound = k;
    out.u_k = std::move(uk);
    return out;
}

RealFunc mollify(const RealFunc& u_k, int n, const MollifierKernel& kernel) {
    if (n < 1) throw std::invalid_argument("mollify: n >= 1");
    if (!u_k.lipschitz_bound) throw std::invalid_argument("mollify: u_k needs a Lipschitz bound");
    auto inner = u_k;  // value copy shared by the closures
    auto u_ext = [inner](double t) {
        if (t <= 0.0) return inner.boundary_left;
        if (t >= 1.0) return inner.boundary_right;
        return inner(t);
    };
    // The returned closures own a copy of the kernel; they must outlive the
    // caller's instance.
    auto ker = std::make_shared<const MollifierKernel>(kernel);
    RealFunc f;
    f.kind = FuncKind::mollified;
    f.eval_fn = [u_ext, ker, n](double x) { return ker->convolve(u_ext, x, n); };
    f.deriv_fn = [u_ext, ker, n](double x) { return ker->convolve_deriv(u_ext, x, n); };
    f.boundary_left = f.eval_fn(0.0);
    f.boundary_right = f.eval_fn(1.0);
    f.lipschitz_bound = u_k.lipschitz_bound;
    return f;
}

RealFunc boundary_correct(const RealFunc& u_kn, double a_val, double b_val) {
    const double u0 = u_kn(0.0);
    const double u1 = u_kn(1.0);
    const double tilt = (b_val - a_val) - (u1 - u0);
    auto inner = u_kn;
    RealFunc f;
    f.kind = u_kn.kind;
    f.eval_fn = [inner, a_val, u0, tilt](double x) { return a_val + (inner(x) - u0) + x * tilt; };
    f.deriv_fn = [inner, tilt](double x) { return inner.deriv(x) + tilt; };
    f.boundary_left = a_val;
    f.boundary_right = b_val;
    if (u_kn.lipschitz_bound) f.lipschitz_bound = *u_kn.lipschitz_bound + std::fabs(tilt);
    return f;
}

namespace {

// Sample grid for sup-norm checks: quadratically graded toward 0 so the
// sqrt-type modulus between neighbors stays O(1/grid) even at the origin.
std::vector<double> graded_grid(int count) {
    std::vector<double> xs(count + 1);
    for (int i = 0; i <= count; ++i) {
        const double s = static_cast<double>(i) / count;
        xs[i] = s * s;
    }
    xs.back() = 1.0;
    return xs;
}

// Worst-case growth of |u| between grid neighbors [x0, x1]: Lipschitz part
// plus the sqrt modulus when the candidate has a sqrt-type branch.
double cell_modulus(const RealFunc& u, double x0, double x1) {
    const double h = x1 - x0;
    double pad = 0.0;
    if (u.lipschitz_bound) pad += *u.lipschitz_bound * h;
    const bool sqrt_kind = u.form_id == "sqrt" || u.form_id == "sqrt_truncated" ||
                           u.form_id == "u_n" || u.form_id == "sqrt_quarter" ||
                           u.form_id == "sqrt_half";
    if (sqrt_kind) pad += std::sqrt(x1) - std::sqrt(x0);
    return pad;
}

}  // namespace

Certificate verify_certificate(const RealFunc& u, const RealFunc& phi,
                               const LagrangianSpec& spec, double epsilon,
                               const VerifyConfig& cfg) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("verify_certificate: epsilon > 0");
    Certificate cert;
    cert.epsilon_target = epsilon;
    cert.l3_vacated = !spec.dfdy_bound.has_value();
    // The Lipschitz pad scales like (L_u + L_phi) / grid while the schedule
    // pushes L_phi ~ 1/epsilon; the grid must grow like 1/epsilon^2 for the
    // padded sup estimate to resolve the target.
    const int cells = std::max<int>(cfg.grid, static_cast<int>(std::ceil(8.0 / (epsilon * epsilon))));
    cert.sampling_spec = "quadratically graded grid, " + std::to_string(cells) + " cells";

    const auto grid = graded_grid(cells);
    double sup = 0.0, pad = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double x = grid[i];
        const double d = std::fabs(u(x) - phi(x));
        sup = std::max(sup, d);
        if (u(x) < -1e-12 || u(x) > 1.0 + 1e-12) cert.range_warning = true;
        if (i + 1 < grid.size())
            pad = std::max(pad, 0.5 * (cell_modulus(u, x, grid[i + 1]) +
                                       cell_modulus(phi, x, grid[i + 1])));
    }
    cert.sup_distance = sup + pad;
    cert.boundary_residual_left = std::fabs(u.boundary_left - phi(0.0));
    cert.boundary_residual_right = std::fabs(u.boundary_right - phi(1.0));

    const LogScalar eu = energy(u, spec, cfg.rel_tol);
    const LogScalar ep = energy(phi, spec, cfg.rel_tol);
    cert.energy_u_log = eu.log_mag;
    cert.energy_phi_log = ep.log_mag;
    if (eu.representable() && ep.representable()) {
        cert.energy_gap = std::fabs(eu.to_real() - ep.to_real());
        cert.energy_gap_representable = true;
    } else {
        // Reported as a log-scale gap; such a spec cannot certify (L3).
        cert.energy_gap = std::fabs(eu.log_mag - ep.log_mag);
        cert.energy_gap_representable = false;
    }

    if (cfg.check_l4) {
        std::vector<double> splits = u.deriv_undefined_at;
        splits.insert(splits.end(), phi.deriv_undefined_at.begin(), phi.deriv_undefined_at.end());
        auto abs_diff = [&](double x) { return std::fabs(u.deriv(x) - phi.deriv(x)); };
        cert.l1_deriv_distance =
            integrate_signed_split(abs_diff, 0.0, 1.0, cfg.rel_tol, splits);
    }

    const bool sup_ok = cert.sup_distance < epsilon;
    const bool boundary_ok =
        cert.boundary_residual_left < 1e-10 && cert.boundary_residual_right < 1e-10;
    const bool gap_ok = cert.energy_gap_representable && cert.energy_gap < epsilon;
    const bool l4_ok = !cfg.check_l4 || *cert.l1_deriv_distance < epsilon;
    cert.pass = sup_ok && boundary_ok && gap_ok && l4_ok;
    return cert;
}

ApproximationResult approximate(const RealFunc& u, const LagrangianSpec& spec, double epsilon,
                                const ApproximationSchedule& schedule, const VerifyConfig& cfg) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("approximate: epsilon > 0");
    try {
        energy(u, spec, cfg.rel_tol);
    } catch (const QuadratureError& err) {
        throw std::invalid_argument(std::string("approximate: energy of u does not converge (") +
                                    err.what() + ")");
    }

    const MollifierKernel kernel;
    std::optional<Certificate> best;
    double k = schedule.k0;
    for (int step = 0; step < schedule.max_doublings; ++step, k *= 2.0) {
        const long n = schedule.n_for_k
                           ? schedule.n_for_k(k, epsilon)
                           : static_cast<long>(std::ceil(k * k / epsilon));
        auto stage1 = truncate_derivative(u, k);
        auto u_kn = mollify(stage1.u_k, static_cast<int>(std::min<long>(n, 1L << 30)), kernel);
        auto phi = boundary_correct(u_kn, u.boundary_left, u.boundary_right);
        Certificate cert = verify_certificate(u, phi, spec, epsilon, cfg);
        cert.k_used = static_cast<int>(k);
        cert.n_used = n;
        if (cert.pass) return {std::move(phi), std::move(cert)};
        if (!best || cert.sup_distance < best->sup_distance) best = cert;
    }
    throw ScheduleExhausted("approximate: schedule exhausted without a passing certificate",
                            best.value_or(Certificate{}));
}

}  // namespace lavlab
