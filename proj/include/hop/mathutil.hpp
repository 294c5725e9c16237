#pragma once

// Small numeric utilities: log-sum-exp, regularized incomplete gamma and the
// chi-square survival function built on it, and a mean/std aggregate.

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "hop/common.hpp"

namespace hop {

inline constexpr double kPi = 3.14159265358979323846;

inline double log_sum_exp(std::span<const double> xs) {
    double mx = -std::numeric_limits<double>::infinity();
    for (double x : xs) mx = std::max(mx, x);
    if (!std::isfinite(mx)) return mx;  // all -inf (or a stray +inf propagates)
    double s = 0.0;
    for (double x : xs) s += std::exp(x - mx);
    return mx + std::log(s);
}

namespace detail {

// Lower regularized incomplete gamma P(a,x) by series; converges for x < a+1.
inline double gamma_p_series(double a, double x) {
    double ap = a, sum = 1.0 / a, del = sum;
    for (int n = 0; n < 500; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Upper regularized incomplete gamma Q(a,x) by Lentz continued fraction;
// converges for x > a+1.
inline double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
    for (int i = 1; i <= 500; ++i) {
        double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-16) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace detail

/// Upper regularized incomplete gamma Q(a, x) = 1 - P(a, x), a > 0, x >= 0.
inline double gamma_q(double a, double x) {
    if (!(a > 0.0) || x < 0.0) throw DomainError("gamma_q: a > 0 and x >= 0 required");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - detail::gamma_p_series(a, x);
    return detail::gamma_q_cf(a, x);
}

/// Chi-square survival function (p-value of statistic x at df degrees).
inline double chi2_sf(double x, double df) { return gamma_q(df / 2.0, x / 2.0); }

struct MeanStd {
    double mean = 0.0;
    double std = 0.0;  // population standard deviation
};

inline MeanStd mean_std(std::span<const double> xs) {
    if (xs.empty()) throw DomainError("mean_std of empty span");
    double s = 0.0;
    for (double x : xs) s += x;
    double mean = s / static_cast<double>(xs.size());
    double v = 0.0;
    for (double x : xs) v += (x - mean) * (x - mean);
    return {mean, std::sqrt(v / static_cast<double>(xs.size()))};
}

}  // namespace hop
