#pragma once
// Statistics of uniformly random perfect pairings of a two-colored ball set:
// the exact distribution of mixed-color pair counts, the induced same-color
// distribution, deficiency probabilities, and computable upper bounds on them
// that survive when only a bound on the color composition is known.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include <snsrate/rng.hpp>
#include <snsrate/tail_bounds.hpp>

namespace snsrate {

enum class PairKind { white_white, white_black };

namespace detail {

inline void check_ball_set(std::int64_t whites, std::int64_t total) {
    if (total <= 0 || total % 2 != 0)
        throw std::invalid_argument("pairing: total ball count must be positive and even");
    if (whites < 0 || whites > total)
        throw std::invalid_argument("pairing: white count outside [0, total]");
}

inline long double lchoose(std::int64_t a, std::int64_t b) {
    if (b < 0 || b > a) return -std::numeric_limits<long double>::infinity();
    return std::lgammal(static_cast<long double>(a) + 1) -
           std::lgammal(static_cast<long double>(b) + 1) -
           std::lgammal(static_cast<long double>(a - b) + 1);
}

// One white added to an even composition 2k: mixed-pair parity flips odd.
// newP(2l+1) = [(2n-2k-2l) P(2l) + (2l+2) P(2l+2)] / (2n-2k)
inline std::vector<double> step_add_white_to_even(const std::vector<double>& p,
                                                  std::int64_t k, std::int64_t n) {
    const double denom = static_cast<double>(2 * n - 2 * k);
    std::vector<double> out(static_cast<std::size_t>(2 * k + 2), 0.0);
    auto at = [&](std::int64_t j) -> double {
        return (j >= 0 && j < static_cast<std::int64_t>(p.size())) ? p[j] : 0.0;
    };
    for (std::int64_t l = 0; l <= k; ++l) {
        double v = (static_cast<double>(2 * n - 2 * k - 2 * l) * at(2 * l) +
                    static_cast<double>(2 * l + 2) * at(2 * l + 2)) /
                   denom;
        out[static_cast<std::size_t>(2 * l + 1)] = v;
    }
    return out;
}

// One white added to an odd composition 2k+1: parity flips back to even.
// newP(2l) = [(2n-(2k+1)-(2l-1)) P(2l-1) + (2l+1) P(2l+1)] / (2n-(2k+1))
inline std::vector<double> step_add_white_to_odd(const std::vector<double>& p,
                                                 std::int64_t k, std::int64_t n) {
    const double denom = static_cast<double>(2 * n - (2 * k + 1));
    std::vector<double> out(static_cast<std::size_t>(2 * k + 3), 0.0);
    auto at = [&](std::int64_t j) -> double {
        return (j >= 0 && j < static_cast<std::int64_t>(p.size())) ? p[j] : 0.0;
    };
    for (std::int64_t l = 0; l <= k + 1; ++l) {
        double v = (static_cast<double>(2 * n - (2 * k + 1) - (2 * l - 1)) * at(2 * l - 1) +
                    static_cast<double>(2 * l + 1) * at(2 * l + 1)) /
                   denom;
        out[static_cast<std::size_t>(2 * l)] = v;
    }
    return out;
}

// Closed form for an even white count 2k among 2n balls:
// P(2l) = C(n, k-l) C(n-(k-l), 2l) (2k)! (2n-2k)! 2^{2l} / (2n)!
inline std::vector<double> closed_even_distribution(std::int64_t k, std::int64_t n) {
    const long double base = std::lgammal(static_cast<long double>(2 * k) + 1) +
                             std::lgammal(static_cast<long double>(2 * n - 2 * k) + 1) -
                             std::lgammal(static_cast<long double>(2 * n) + 1);
    const long double ln2 = 0.6931471805599453094172321214581766L;
    std::vector<double> out(static_cast<std::size_t>(2 * k + 1), 0.0);
    for (std::int64_t l = 0; l <= k; ++l) {
        long double lg = lchoose(n, k - l) + lchoose(n - (k - l), 2 * l) + base +
                         static_cast<long double>(2 * l) * ln2;
        if (std::isfinite((double)lg)) out[static_cast<std::size_t>(2 * l)] = (double)std::exp(lg);
    }
    return out;
}

} // namespace detail

// Distribution of the mixed-color pair count after a uniformly random perfect
// pairing of `total` balls of which `whites` are white. Index j holds
// P[count = j]; entries with the wrong parity are zero.
inline std::vector<double> exact_wb_distribution(std::int64_t whites, std::int64_t total) {
    detail::check_ball_set(whites, total);
    const std::int64_t n = total / 2;
    if (whites % 2 == 0) return detail::closed_even_distribution(whites / 2, n);
    auto even = detail::closed_even_distribution((whites - 1) / 2, n);
    return detail::step_add_white_to_even(even, (whites - 1) / 2, n);
}

// Same distribution built purely by the add-one-white recursion from the
// all-black composition. Kept separate as an independent route.
inline std::vector<double> exact_wb_distribution_recursive(std::int64_t whites,
                                                           std::int64_t total) {
    detail::check_ball_set(whites, total);
    const std::int64_t n = total / 2;
    std::vector<double> p{1.0};
    for (std::int64_t w = 0; w < whites; ++w) {
        if (w % 2 == 0)
            p = detail::step_add_white_to_even(p, w / 2, n);
        else
            p = detail::step_add_white_to_odd(p, (w - 1) / 2, n);
    }
    return p;
}

// White-white pair count distribution induced by a mixed-pair distribution:
// a composition with w whites and j mixed pairs has (w - j) / 2 white pairs.
inline std::vector<double> ww_distribution_from_wb(const std::vector<double>& wb,
                                                   std::int64_t whites) {
    if (whites < 0 || static_cast<std::int64_t>(wb.size()) > whites + 1)
        throw std::invalid_argument("ww_distribution_from_wb: inconsistent sizes");
    std::vector<double> out(static_cast<std::size_t>(whites / 2 + 1), 0.0);
    for (std::int64_t j = 0; j < static_cast<std::int64_t>(wb.size()); ++j) {
        if (wb[j] == 0.0) continue;
        if ((whites - j) < 0 || (whites - j) % 2 != 0)
            throw std::domain_error("ww_distribution_from_wb: mass on parity-violating count");
        out[static_cast<std::size_t>((whites - j) / 2)] += wb[j];
    }
    return out;
}

// Probability that a random pairing of the fixed composition produces fewer
// than n_lower pairs of the requested kind.
inline double eps_pairs(std::int64_t n_lower, PairKind kind, std::int64_t whites,
                        std::int64_t total) {
    auto wb = exact_wb_distribution(whites, total);
    double sum = 0.0;
    if (kind == PairKind::white_black) {
        for (std::int64_t j = 0; j < std::min<std::int64_t>(n_lower, wb.size()); ++j)
            sum += wb[j];
    } else {
        // white-white count (whites - j)/2 < n_lower  <=>  j > whites - 2 n_lower
        for (std::int64_t j = whites - 2 * n_lower + 1; j < static_cast<std::int64_t>(wb.size());
             ++j)
            if (j >= 0) sum += wb[j];
    }
    return clamp01(sum);
}

// Deficiency probability when each ball is independently white with p_white:
// exact mixture over compositions. Exponential-free but O(total^2); intended
// for small sets.
inline double eps_pairs_iid_mixture(std::int64_t n_lower, PairKind kind, double p_white,
                                    std::int64_t total) {
    if (!(p_white >= 0.0) || !(p_white <= 1.0))
        throw std::invalid_argument("eps_pairs_iid_mixture: probability outside [0,1]");
    if (total <= 0 || total % 2 != 0 || total > 64)
        throw std::invalid_argument("eps_pairs_iid_mixture: total must be even and <= 64");
    double sum = 0.0;
    for (std::int64_t m = 0; m <= total; ++m) {
        double w;
        if (p_white == 0.0)
            w = (m == 0) ? 1.0 : 0.0;
        else if (p_white == 1.0)
            w = (m == total) ? 1.0 : 0.0;
        else
            w = std::exp((double)detail::lchoose(total, m) + m * std::log(p_white) +
                         (total - m) * std::log1p(-p_white));
        if (w > 0.0) sum += w * eps_pairs(n_lower, kind, m, total);
    }
    return clamp01(sum);
}

// Identical quantity through the pair-level view: under independent colors the
// total/2 pairs have independent compositions, so the count of either kind is
// binomial. Valid for any set size.
inline double iid_pair_tail(std::int64_t n_lower, PairKind kind, double p_white,
                            std::int64_t total) {
    if (total <= 0 || total % 2 != 0)
        throw std::invalid_argument("iid_pair_tail: total must be positive and even");
    double p = (kind == PairKind::white_white) ? p_white * p_white
                                               : 2.0 * p_white * (1.0 - p_white);
    return binom_tail_below(n_lower, {total / 2, p});
}

// Upper bound on eps_pairs(n_lower, white_white, whites, total) in closed
// binomial form with a factor-two overhead.
inline double ww_deficit_bound(std::int64_t n_lower, std::int64_t whites, std::int64_t total) {
    detail::check_ball_set(whites, total);
    double p = static_cast<double>(whites) / static_cast<double>(total);
    return clamp01(2.0 * binom_tail_below(n_lower, {total / 2, p * p}));
}

// Upper bound on eps_pairs(n_lower, white_black, whites, total); requires the
// white fraction at or below one half, where mixed pairs grow with whites.
inline double wb_deficit_bound(std::int64_t n_lower, std::int64_t whites, std::int64_t total) {
    detail::check_ball_set(whites, total);
    if (2 * whites > total)
        throw std::invalid_argument("wb_deficit_bound: white count above half the set");
    double p = static_cast<double>(whites) / static_cast<double>(total);
    return clamp01(2.0 * binom_tail_below(n_lower + 1, {total / 2, 2.0 * p * (1.0 - p)}));
}

// Bounds valid for every composition with at least k_lower whites, built from
// an auxiliary independent-color model with white probability p_aux. The
// divisor is the aux-model probability of landing at or below k_lower.
inline double ww_deficit_bound_via_iid(std::int64_t k_lower, std::int64_t total, double p_aux,
                                       std::int64_t n_lower) {
    detail::check_ball_set(k_lower, total);
    double gamma = binom_tail_below(k_lower + 1, {total, p_aux});
    if (gamma <= 0.0) return 1.0;
    return clamp01(iid_pair_tail(n_lower, PairKind::white_white, p_aux, total) / gamma);
}

inline double wb_deficit_bound_via_iid(std::int64_t k_lower, std::int64_t total, double p_aux,
                                       std::int64_t n_lower) {
    detail::check_ball_set(k_lower, total);
    if (2 * k_lower > total)
        throw std::invalid_argument("wb_deficit_bound_via_iid: white bound above half the set");
    double gamma = binom_tail_below(k_lower + 1, {total, p_aux});
    if (gamma <= 0.0) return 1.0;
    return clamp01(iid_pair_tail(n_lower + 1, PairKind::white_black, p_aux, total) / gamma);
}

// Monte Carlo sampler: shuffles the colored set (Fisher-Yates) and pairs
// adjacent positions, returning a histogram of mixed-pair counts over all
// trials. Deterministic in (seed).
inline std::vector<std::int64_t> mc_random_pairing(std::int64_t whites, std::int64_t total,
                                                   std::int64_t trials, std::uint64_t seed) {
    detail::check_ball_set(whites, total);
    if (trials <= 0) throw std::invalid_argument("mc_random_pairing: trials must be positive");
    std::vector<std::uint8_t> balls(static_cast<std::size_t>(total));
    std::vector<std::int64_t> hist(static_cast<std::size_t>(whites + 1), 0);
    Philox rng(seed, /*stream=*/0);
    for (std::int64_t t = 0; t < trials; ++t) {
        for (std::int64_t i = 0; i < total; ++i) balls[i] = i < whites ? 1 : 0;
        for (std::int64_t i = total - 1; i >= 1; --i) {
            std::uint64_t j = rng.next_below(static_cast<std::uint64_t>(i + 1));
            std::swap(balls[i], balls[j]);
        }
        std::int64_t wb = 0;
        for (std::int64_t i = 0; i + 1 < total; i += 2)
            wb += (balls[i] != balls[i + 1]) ? 1 : 0;
        ++hist[static_cast<std::size_t>(wb)];
    }
    return hist;
}

} // namespace snsrate
