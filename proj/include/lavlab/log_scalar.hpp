// Signed log-magnitude scalars. Energies here range from e^{-10^6} to
// e^{+10^5}, so every accumulation stays on the log scale; nothing is
// flushed to zero until a caller explicitly asks for a linear value.
#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

namespace lavlab {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Smallest magnitude the final linear reports may distinguish from zero.
inline constexpr double kFloorLog = -745.0;

struct LogScalar {
    int sign = 0;               // -1, 0, +1
    double log_mag = kNegInf;   // -inf iff sign == 0

    static LogScalar zero() { return {0, kNegInf}; }

    static LogScalar from_log(double lm, int s = +1) {
        if (lm == kNegInf || s == 0) return zero();
        return {s, lm};
    }

    static LogScalar from_real(double v) {
        if (v == 0.0) return zero();
        if (!std::isfinite(v)) throw std::invalid_argument("LogScalar::from_real: non-finite");
        return {v > 0 ? +1 : -1, std::log(std::fabs(v))};
    }

    double to_real() const {
        if (sign == 0) return 0.0;
        return sign * std::exp(log_mag);
    }

    bool is_zero() const { return sign == 0; }
    bool representable() const { return sign == 0 || std::fabs(log_mag) < 700.0; }

    friend LogScalar operator*(const LogScalar& a, const LogScalar& b) {
        if (a.sign == 0 || b.sign == 0) return zero();
        return {a.sign * b.sign, a.log_mag + b.log_mag};
    }

    // a < b compares signed values without leaving the log domain.
    friend bool operator<(const LogScalar& a, const LogScalar& b) {
        if (a.sign != b.sign) return a.sign < b.sign;
        if (a.sign == 0) return false;
        return a.sign > 0 ? a.log_mag < b.log_mag : a.log_mag > b.log_mag;
    }
    friend bool operator>(const LogScalar& a, const LogScalar& b) { return b < a; }
};

// log(e^a + e^b), stable: the larger exponent is factored out.
inline double log_add(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    if (a < b) std::swap(a, b);
    return a + std::log1p(std::exp(b - a));
}

// log(e^a - e^b) for a >= b; -inf when equal.
inline double log_sub(double a, double b) {
    if (b == kNegInf) return a;
    if (a < b) throw std::domain_error("log_sub: negative result");
    if (a == b) return kNegInf;
    return a + std::log1p(-std::exp(b - a));
}

// Sum of two same- or mixed-sign LogScalars.
inline LogScalar log_add(const LogScalar& a, const LogScalar& b) {
    if (a.sign == 0) return b;
    if (b.sign == 0) return a;
    if (a.sign == b.sign) return {a.sign, log_add(a.log_mag, b.log_mag)};
    if (a.log_mag == b.log_mag) return LogScalar::zero();
    return a.log_mag > b.log_mag ? LogScalar{a.sign, log_sub(a.log_mag, b.log_mag)}
                                 : LogScalar{b.sign, log_sub(b.log_mag, a.log_mag)};
}

// Streaming log-sum-exp accumulator for nonnegative terms, deterministic
// in the order of add() calls.
class LogAccumulator {
public:
    void add(double log_term) {
        if (log_term == kNegInf) return;
        if (max_ == kNegInf) {
            max_ = log_term;
            sum_ = 1.0;
            return;
        }
        if (log_term > max_) {
            sum_ = sum_ * std::exp(max_ - log_term) + 1.0;
            max_ = log_term;
        } else {
            sum_ += std::exp(log_term - max_);
        }
    }

    double log_total() const { return max_ == kNegInf ? kNegInf : max_ + std::log(sum_); }
    bool empty() const { return max_ == kNegInf; }

private:
    double max_ = kNegInf;
    double sum_ = 0.0;
};

}  // namespace lavlab
