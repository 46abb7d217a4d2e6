#pragma once
// One-sided tail probabilities, quantiles, and concentration bounds for
// counting statistics: exact binomial tails, multiplicative Chernoff bounds
// in both directions (expected -> observed and observed -> expected), and a
// closed-form hypergeometric lower count. These are the primitives every
// finite-size estimate in the library is built on.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include <boost/math/special_functions/beta.hpp>

namespace snsrate {

inline double clamp01(double v) {
    if (v < 0.0) return 0.0;
    if (v > 1.0) return 1.0;
    return v;
}

struct BinomialSpec {
    std::int64_t trials = 0;
    double success_prob = 0.0;
};

namespace detail {

inline void check_binomial(const BinomialSpec& b) {
    if (b.trials < 0) throw std::invalid_argument("binomial: negative trial count");
    if (!(b.success_prob >= 0.0) || !(b.success_prob <= 1.0))
        throw std::invalid_argument("binomial: success probability outside [0,1]");
}

inline void check_eps(double eps) {
    if (!(eps > 0.0) || !(eps < 1.0))
        throw std::invalid_argument("failure probability must lie in (0,1)");
}

// Compensated sum of exp(logs[i] - logmax), largest terms first.
inline double sum_shifted_descending(std::vector<double>& logs, double logmax) {
    std::sort(logs.begin(), logs.end(), std::greater<double>());
    double sum = 0.0, comp = 0.0;
    for (double lg : logs) {
        double t = std::exp(lg - logmax);
        double s = sum + t;
        comp += (std::abs(sum) >= std::abs(t)) ? (sum - s) + t : (t - s) + sum;
        sum = s;
    }
    return sum + comp;
}

// Direct log-space sum of binomial pmf over l in [lo, hi]; exact for small
// trial counts where ranges stay short.
inline double binom_pmf_sum_direct(std::int64_t lo, std::int64_t hi, std::int64_t m, double p) {
    const double logp = std::log(p);
    const double logq = std::log1p(-p);
    const double lgm = std::lgamma(static_cast<double>(m) + 1.0);
    std::vector<double> logs;
    logs.reserve(static_cast<std::size_t>(hi - lo + 1));
    double logmax = -std::numeric_limits<double>::infinity();
    for (std::int64_t l = lo; l <= hi; ++l) {
        double lg = lgm - std::lgamma(static_cast<double>(l) + 1.0)
                        - std::lgamma(static_cast<double>(m - l) + 1.0)
                  + static_cast<double>(l) * logp
                  + static_cast<double>(m - l) * logq;
        logs.push_back(lg);
        logmax = std::max(logmax, lg);
    }
    if (!std::isfinite(logmax)) return 0.0;
    double scaled = sum_shifted_descending(logs, logmax);
    double r = std::exp(logmax) * scaled;
    return clamp01(r);
}

// Above this trial count the regularized incomplete beta form is used; below,
// the direct compensated sum is both exact enough and faster.
constexpr std::int64_t kDirectSumTrials = 512;

} // namespace detail

// P[X < x_below] for X ~ B(trials, p). Empty sum when x_below == 0.
inline double binom_tail_below(std::int64_t x_below, const BinomialSpec& b) {
    detail::check_binomial(b);
    if (x_below < 0) throw std::invalid_argument("binom_tail_below: negative threshold");
    if (x_below == 0) return 0.0;
    if (x_below > b.trials) return 1.0;
    const double p = b.success_prob;
    if (p <= 0.0) return 1.0;  // mass is all at zero, and x_below >= 1
    if (p >= 1.0) return 0.0;  // mass is all at trials, and x_below <= trials
    if (b.trials <= detail::kDirectSumTrials)
        return detail::binom_pmf_sum_direct(0, x_below - 1, b.trials, p);
    // P[X <= x-1] = I_{1-p}(trials - x + 1, x)
    double r = boost::math::ibeta(static_cast<double>(b.trials - x_below + 1),
                                  static_cast<double>(x_below), 1.0 - p);
    return clamp01(r);
}

// P[X > m_bar] for X ~ B(trials, p).
inline double binom_tail_above(std::int64_t m_bar, const BinomialSpec& b) {
    detail::check_binomial(b);
    if (m_bar < 0) return 1.0;
    if (m_bar >= b.trials) return 0.0;
    const double p = b.success_prob;
    if (p <= 0.0) return 0.0;
    if (p >= 1.0) return 1.0;  // m_bar < trials here
    if (b.trials <= detail::kDirectSumTrials)
        return detail::binom_pmf_sum_direct(m_bar + 1, b.trials, b.trials, p);
    // P[X > m] = I_p(m + 1, trials - m)
    double r = boost::math::ibeta(static_cast<double>(m_bar + 1),
                                  static_cast<double>(b.trials - m_bar), p);
    return clamp01(r);
}

// Smallest m_bar >= 0 with P[X > m_bar] <= eps.
inline std::int64_t binom_upper_quantile(const BinomialSpec& b, double eps) {
    detail::check_binomial(b);
    detail::check_eps(eps);
    std::int64_t lo = 0, hi = b.trials;  // tail above trials is 0 <= eps
    while (lo < hi) {
        std::int64_t mid = lo + (hi - lo) / 2;
        if (binom_tail_above(mid, b) <= eps)
            hi = mid;
        else
            lo = mid + 1;
    }
    return hi;
}

namespace detail {

// Solves f(x) = target on [lo, hi] for strictly decreasing f with
// f(lo) >= target >= f(hi). Relative tolerance on the root.
template <class F>
inline double bisect_decreasing(F f, double lo, double hi, double target) {
    for (int it = 0; it < 500 && (hi - lo) > 1e-14 * std::max(hi, 1e-300); ++it) {
        double mid = 0.5 * (lo + hi);
        if (f(mid) >= target)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

// exponent functions of the multiplicative concentration bounds
inline double chern_lower_exp(double d) { return -d - (1.0 - d) * std::log1p(-d); }
inline double chern_upper_exp(double d) { return d - (1.0 + d) * std::log1p(d); }
// same bounds reparameterized by the observed count (observed = (1 +/- d) E)
inline double chern_obs_upper_exp(double d) { return d / (1.0 + d) - std::log1p(d); }
inline double chern_obs_lower_exp(double d) { return -d / (1.0 - d) - std::log1p(-d); }

constexpr double kDeltaMax = 1.0 - 1e-15;

} // namespace detail

// P[X >= threshold] bound for a sum of independent indicators with mean
// `expected`, valid for threshold >= expected.
inline double chernoff_upper_tail(double expected, double threshold) {
    if (!(expected >= 0.0)) throw std::invalid_argument("chernoff_upper_tail: negative mean");
    if (threshold <= expected) return 1.0;
    if (expected == 0.0) return 0.0;
    double d = threshold / expected - 1.0;
    return clamp01(std::exp(expected * detail::chern_upper_exp(d)));
}

// P[X <= threshold] bound, valid for threshold <= expected.
inline double chernoff_lower_tail(double expected, double threshold) {
    if (!(expected >= 0.0)) throw std::invalid_argument("chernoff_lower_tail: negative mean");
    if (threshold >= expected) return 1.0;
    if (threshold < 0.0) return 0.0;
    double d = 1.0 - threshold / expected;
    return clamp01(std::exp(expected * detail::chern_lower_exp(d)));
}

// Largest count x with P[X <= x] <= xi when E[X] = expected: returns
// (1 - delta) * expected where exp(expected * g(delta)) = xi. Returns 0 when
// even the full deviation cannot reach xi (xi < e^{-expected}).
inline double chernoff_lower_from_expected(double expected, double xi) {
    if (!(expected >= 0.0))
        throw std::invalid_argument("chernoff_lower_from_expected: negative mean");
    detail::check_eps(xi);
    if (expected == 0.0) return 0.0;
    const double target = std::log(xi) / expected;
    if (target <= detail::chern_lower_exp(detail::kDeltaMax)) return 0.0;
    double d = detail::bisect_decreasing(detail::chern_lower_exp, 0.0, detail::kDeltaMax, target);
    return std::max(0.0, (1.0 - d) * expected);
}

// Smallest count x with P[X >= x] <= xi when E[X] = expected: returns
// (1 + delta) * expected solving exp(expected * h(delta)) = xi. A mean of
// exactly zero keeps the conventional cap 2 ln(1/xi).
inline double chernoff_upper_from_expected(double expected, double xi) {
    if (!(expected >= 0.0))
        throw std::invalid_argument("chernoff_upper_from_expected: negative mean");
    detail::check_eps(xi);
    if (expected < 1e-300) return 2.0 * std::log(1.0 / xi);
    const double target = std::log(xi) / expected;
    double hi = 1.0;
    while (detail::chern_upper_exp(hi) > target) hi *= 2.0;
    double lo = hi * 0.5 >= 1.0 ? hi * 0.5 : 0.0;
    double d = detail::bisect_decreasing(detail::chern_upper_exp, lo, hi, target);
    return (1.0 + d) * expected;
}

struct ExpectedBounds {
    double lower = 0.0;
    double upper = 0.0;
};

// Two-sided bound on the mean given one observation: the largest mean E_hi
// whose lower tail at `observed` is still xi, and the smallest mean E_lo
// whose upper tail at `observed` is still xi.
inline ExpectedBounds chernoff_expected_bounds_from_observed(double observed, double xi) {
    if (!(observed >= 0.0))
        throw std::invalid_argument("chernoff_expected_bounds_from_observed: negative count");
    detail::check_eps(xi);
    ExpectedBounds out;
    if (observed == 0.0) {
        out.lower = 0.0;
        out.upper = std::log(1.0 / xi);
        return out;
    }
    const double target = std::log(xi) / observed;
    // lower: observed = (1 + d) E
    {
        double hi = 1.0;
        while (detail::chern_obs_upper_exp(hi) > target) hi *= 2.0;
        double lo = hi * 0.5 >= 1.0 ? hi * 0.5 : 0.0;
        double d = detail::bisect_decreasing(detail::chern_obs_upper_exp, lo, hi, target);
        out.lower = observed / (1.0 + d);
    }
    // upper: observed = (1 - d) E
    {
        if (target <= detail::chern_obs_lower_exp(detail::kDeltaMax)) {
            // bracket saturated; only possible for sub-unit observations
            out.upper = std::max(observed / (1.0 - detail::kDeltaMax), std::log(1.0 / xi));
        } else {
            double d = detail::bisect_decreasing(detail::chern_obs_lower_exp, 0.0,
                                                 detail::kDeltaMax, target);
            out.upper = observed / (1.0 - d);
        }
    }
    return out;
}

// Lower bound on the number of successes drawn without replacement:
// draws * (K/N - sqrt(ln(1/xi)/draws)). Not clamped at zero; callers clamp
// where a negative bound is meaningful.
inline double hypergeom_lower_count(std::int64_t success_count, std::int64_t population,
                                    std::int64_t draws, double xi) {
    if (population < 0 || success_count < 0 || success_count > population)
        throw std::invalid_argument("hypergeom_lower_count: bad population");
    if (draws <= 0 || draws > population)
        throw std::invalid_argument("hypergeom_lower_count: bad draw count");
    detail::check_eps(xi);
    double frac = static_cast<double>(success_count) / static_cast<double>(population);
    double dev = std::sqrt(-std::log(xi) / static_cast<double>(draws));
    return static_cast<double>(draws) * (frac - dev);
}

} // namespace snsrate
