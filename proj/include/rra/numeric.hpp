#pragma once

#include <cmath>
#include <limits>

namespace rra::numeric {

inline constexpr double neg_inf = -std::numeric_limits<double>::infinity();

/// Streaming log-sum-exp accumulator. Rescales on a new maximum so a single
/// pass suffices; -inf terms contribute no mass.
class LogSumExp {
public:
    void add(double log_value) noexcept {
        if (log_value == neg_inf) {
            return;
        }
        if (log_value <= max_) {
            sum_ += std::exp(log_value - max_);
        } else {
            sum_ = sum_ * std::exp(max_ - log_value) + 1.0;
            max_ = log_value;
        }
    }

    [[nodiscard]] double value() const noexcept {
        return max_ == neg_inf ? neg_inf : max_ + std::log(sum_);
    }

private:
    double max_ = neg_inf;
    double sum_ = 0.0;
};

/// log(exp(a) - exp(b)) for b <= a. Returns -inf when the difference is not
/// positive after rounding.
inline double log_diff_exp(double log_a, double log_b) noexcept {
    if (log_b == neg_inf) {
        return log_a;
    }
    if (!(log_b < log_a)) {
        return neg_inf;
    }
    const double x = log_b - log_a;
    // log1p(-exp(x)) loses accuracy near 0 unless we switch to log(-expm1(x)).
    const double tail = x > -0.6931471805599453 ? std::log(-std::expm1(x)) : std::log1p(-std::exp(x));
    return log_a + tail;
}

/// x^alpha in log space with the convention 0^0 = 1.
inline double scale_log(double log_x, double alpha) noexcept {
    return alpha == 0.0 ? 0.0 : alpha * log_x;
}

/// Neumaier compensated summation.
class CompensatedSum {
public:
    void add(double x) noexcept {
        const double t = sum_ + x;
        if (std::fabs(sum_) >= std::fabs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }

    [[nodiscard]] double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/// A residual r with r + base == value in double arithmetic when one exists
/// near value - base, otherwise the closest candidate found. Round-half-even
/// can leave some values unreachable from a given base.
inline double residual(double value, double base) noexcept {
    const double start = value - base;
    double best = start;
    double best_err = std::fabs((start + base) - value);
    for (int dir : {1, -1}) {
        double r = start;
        for (int step = 0; step < 4 && best_err != 0.0; ++step) {
            r = std::nextafter(r, dir * HUGE_VAL);
            const double err = std::fabs((r + base) - value);
            if (err < best_err) {
                best = r;
                best_err = err;
            }
        }
    }
    return best;
}

} // namespace rra::numeric
