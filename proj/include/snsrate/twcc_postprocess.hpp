#pragma once
// Error-rejection post-processing on the sifted signal string. The string is
// randomly paired; announced pair parities decide what survives. Three
// flavors are covered: keeping even-parity pairs (the classic two-way
// procedure), keeping odd-parity pairs, and active pairing of complementary
// bits before the parity exchange. All surviving-count bounds come from the
// pairing statistics module; every failure probability lands on the ledger.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>

#include <snsrate/channel_model.hpp>
#include <snsrate/decoy_estimator.hpp>
#include <snsrate/eps_ledger.hpp>
#include <snsrate/pairing_stats.hpp>
#include <snsrate/tail_bounds.hpp>

namespace snsrate {

namespace detail {

// largest integer t in [0, t_max] with bound(t) <= budget; bound must be
// non-decreasing and bound(0) must qualify
template <class F>
inline std::int64_t largest_within_budget(F bound, std::int64_t t_max, double budget) {
    if (!(bound(0) <= budget)) return -1;
    std::int64_t lo = 0, hi = t_max + 1;  // invariant: bound(lo) ok, hi not (or past end)
    while (lo + 1 < hi) {
        std::int64_t mid = lo + (hi - lo) / 2;
        if (bound(mid) <= budget)
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

inline double floor_even(double v) {
    double f = std::floor(v);
    return (static_cast<std::int64_t>(f) % 2 == 0) ? f : f - 1.0;
}

} // namespace detail

enum class TwccMode { strict, paired };

// Survivors of the parity comparison on a randomly paired string, split by
// the surviving bit pattern, with the error rate inside each class.
struct ParityClasses {
    double n_pairs = 0.0;
    double n_kept = 0.0;
    double n_t1 = 0.0, n_t2 = 0.0, n_t3 = 0.0;
    double e_1 = 0.0, e_2 = 0.0, e_3 = 0.0;
};

inline ParityClasses parity_classes(const ObservedStats& st) {
    detail::require_observed(st, "parity_classes");
    ParityClasses out;
    out.n_pairs = detail::floor_even(st.n_t) / 2.0;
    const double q11 = st.q11, q10 = st.q10, q01 = st.q01, q00 = st.q00;
    out.n_t1 = out.n_pairs * 2.0 * (q11 * q00 + q10 * q01);
    out.n_t2 = out.n_pairs * (q01 * q01 + q00 * q00);
    out.n_t3 = out.n_pairs * (q10 * q10 + q11 * q11);
    out.e_1 = (q11 * q00 + q10 * q01) > 0.0 ? q11 * q00 / (q11 * q00 + q10 * q01) : 0.0;
    out.e_2 = (q01 * q01 + q00 * q00) > 0.0 ? q00 * q00 / (q01 * q01 + q00 * q00) : 0.0;
    out.e_3 = (q10 * q10 + q11 * q11) > 0.0 ? q11 * q11 / (q10 * q10 + q11 * q11) : 0.0;
    out.n_kept = out.n_t1 + out.n_t2 + out.n_t3;
    return out;
}

// Untagged bits are never parity errors, so pairs of them always survive the
// comparison; their count is bounded through the random-pairing deficiency.
// One count-chain term.
struct UntaggedPairBound {
    std::int64_t n_uu_lower = 0;
    double eps_realized = 0.0;
};

inline UntaggedPairBound untagged_pair_bound(const ObservedStats& st,
                                             const UntaggedCounts& counts, double xi_c,
                                             EpsLedger& ledger) {
    detail::require_observed(st, "untagged_pair_bound");
    detail::check_eps(xi_c);
    UntaggedPairBound out;
    const std::int64_t balls = static_cast<std::int64_t>(detail::floor_even(st.n_t));
    const std::int64_t whites =
        std::min<std::int64_t>(static_cast<std::int64_t>(std::floor(counts.n1_lower)), balls);
    if (balls >= 2 && whites >= 2) {
        auto bound = [&](std::int64_t t) { return ww_deficit_bound(t, whites, balls); };
        std::int64_t t = detail::largest_within_budget(bound, balls / 2, xi_c);
        out.n_uu_lower = std::max<std::int64_t>(t, 0);
        out.eps_realized = bound(out.n_uu_lower);
    }
    ledger.log("untagged pair deficiency", EpsChain::count, xi_c);
    return out;
}

struct TwccResult {
    double n_pairs = 0.0;   // formed pairs
    double n_kept = 0.0;    // pairs surviving the parity comparison
    double n_t1 = 0.0, n_t2 = 0.0, n_t3 = 0.0;  // kept pairs by bit pattern
    double e_1 = 0.0, e_2 = 0.0, e_3 = 0.0;     // error rates within each class
    std::int64_t n_uu_lower = 0;                // both-untagged pairs, lower bound
    double eps_twcc_realized = 0.0;
    double m_ve_upper = 0.0;    // phase-error count bound among the 2 n_uu bits
    double n_ie_upper = 0.0;    // after the mode-dependent pair cancellation
    double e_ph_final = 1.0;    // phase error rate per surviving untagged pair
};

// Even-parity rejection. Consumes one count-chain term (the pair-deficiency
// budget) and three phase-chain terms through the phase-error estimate.
inline TwccResult standard_twcc(const ObservedStats& st, const ProtocolParams& prot,
                                const DecoyRates& rates, const UntaggedCounts& counts,
                                double xi_c, double xi, TwccMode mode, EpsLedger& ledger,
                                double n_ee = 0.0) {
    detail::require_observed(st, "standard_twcc");
    detail::check_eps(xi_c);
    if (!(n_ee >= 0.0)) throw std::invalid_argument("standard_twcc: negative pair-error count");

    TwccResult out;
    auto classes = parity_classes(st);
    out.n_pairs = classes.n_pairs;
    out.n_kept = classes.n_kept;
    out.n_t1 = classes.n_t1;
    out.n_t2 = classes.n_t2;
    out.n_t3 = classes.n_t3;
    out.e_1 = classes.e_1;
    out.e_2 = classes.e_2;
    out.e_3 = classes.e_3;

    auto pair = untagged_pair_bound(st, counts, xi_c, ledger);
    out.n_uu_lower = pair.n_uu_lower;
    out.eps_twcc_realized = pair.eps_realized;

    auto phase = phase_error_upper(st, prot, rates.mean_s1_lower,
                                   2.0 * static_cast<double>(out.n_uu_lower), xi, ledger);
    out.m_ve_upper = phase.m_e_upper;
    out.n_ie_upper = (mode == TwccMode::strict)
                         ? out.m_ve_upper
                         : std::max(0.0, out.m_ve_upper - 2.0 * n_ee);
    out.e_ph_final = out.n_uu_lower > 0
                         ? out.n_ie_upper / static_cast<double>(out.n_uu_lower)
                         : 1.0;
    return out;
}

struct OperCounts {
    double n01_prime = 0.0;  // bits of the vacuum-send kind inside the pair set
    double n10_prime = 0.0;  // bits of the send-vacuum kind inside the pair set
    double n_min = 0.0;
    std::int64_t n_oper_lower = 0;  // surviving odd-parity untagged pairs
    double eps_oper_realized = 0.0;
};

// Odd-parity rejection applied to the untagged pair set: splits the surviving
// 2 n_uu untagged bits by origin (without-replacement bounds), then bounds
// how many pairs mix the two kinds. Three count-chain terms.
inline OperCounts oper_counts(std::int64_t n_uu_lower, const UntaggedCounts& counts,
                              double xi_h, double xi_c, EpsLedger& ledger) {
    if (n_uu_lower < 0) throw std::invalid_argument("oper_counts: negative pair count");
    OperCounts out;
    const std::int64_t draws = 2 * n_uu_lower;
    const std::int64_t population = static_cast<std::int64_t>(std::floor(counts.n1_lower));
    const std::int64_t k01 = std::min<std::int64_t>(
        static_cast<std::int64_t>(std::floor(counts.n01_lower)), population);
    const std::int64_t k10 = std::min<std::int64_t>(
        static_cast<std::int64_t>(std::floor(counts.n10_lower)), population);

    if (draws > 0 && population >= draws) {
        out.n01_prime = std::max(0.0, hypergeom_lower_count(k01, population, draws, xi_h));
        out.n10_prime = std::max(0.0, hypergeom_lower_count(k10, population, draws, xi_h));
    }
    ledger.log("pair-set split lower: b-side kind", EpsChain::count, xi_h);
    ledger.log("pair-set split lower: a-side kind", EpsChain::count, xi_h);
    out.n_min = std::min(out.n01_prime, out.n10_prime);

    if (n_uu_lower > 0 && out.n_min > 0.0) {
        const double frac = out.n_min / (2.0 * static_cast<double>(n_uu_lower));
        const double p_mixed = clamp01(2.0 * frac * (1.0 - frac));
        auto bound = [&](std::int64_t t) {
            return clamp01(2.0 * binom_tail_below(t, {n_uu_lower, p_mixed}));
        };
        std::int64_t t = detail::largest_within_budget(bound, n_uu_lower, xi_c);
        out.n_oper_lower = std::max<std::int64_t>(t, 0);
        out.eps_oper_realized = bound(out.n_oper_lower);
    }
    ledger.log("mixed-pair deficiency in pair set", EpsChain::count, xi_c);
    return out;
}

struct ZigzagResult {
    double p_e = 0.0;        // per-bit phase error rate after trimming
    std::int64_t m_s_upper = 0;
    double m_odd_upper = 0.0;  // bound on pairs carrying an odd phase error
    double eps4 = 0.0;         // doubled estimate-stage failure
    double eps6 = 0.0;         // quantile-stage failure
};

// Converts a phase-error count bound on a bit set into a bound on the number
// of pairs with an odd error count, through a trimmed binomial comparison.
// The phase estimate backing m_e_upper arrives as its own ledger; its atoms
// are charged twice, the exchange slack three times, the quantile once.
inline ZigzagResult zigzag_phase_bound(double m_bits, double r, double m_e_upper,
                                       const EpsLedger& estimate_atoms, double eps2,
                                       double eps5, EpsLedger& ledger) {
    if (!(m_bits > 0.0)) throw std::invalid_argument("zigzag_phase_bound: empty bit set");
    if (!(r >= 0.0) || r >= m_bits)
        throw std::invalid_argument("zigzag_phase_bound: trim count must lie in [0, bits)");
    if (!(m_e_upper >= 0.0)) throw std::invalid_argument("zigzag_phase_bound: negative errors");
    detail::check_eps(eps2);
    detail::check_eps(eps5);
    if (estimate_atoms.has_unassigned())
        throw std::invalid_argument("zigzag_phase_bound: estimate ledger has unassigned terms");

    ZigzagResult out;
    out.p_e = clamp01(m_e_upper / (m_bits - r));
    const std::int64_t trials = static_cast<std::int64_t>(std::floor((m_bits - r) / 2.0));
    const double p_pair = clamp01(2.0 * out.p_e * (1.0 - out.p_e));
    out.m_s_upper = binom_upper_quantile({trials, p_pair}, eps5);
    out.m_odd_upper = static_cast<double>(out.m_s_upper) + r;

    double eps1 = 0.0;
    for (const auto& e : estimate_atoms.entries()) {
        eps1 += e.value * e.multiplicity;
        ledger.log(e.label + " [odd-error stage]", EpsChain::phase, e.value,
                   2 * e.multiplicity);
    }
    ledger.log("pairing exchange slack", EpsChain::phase, eps2, 3);
    ledger.log("odd-error quantile", EpsChain::phase, eps5);
    out.eps4 = 2.0 * (eps1 + eps2);
    out.eps6 = eps5 + eps2;
    return out;
}

struct AoppPlan {
    double n_zero = 0.0, n_one = 0.0;  // sifted bits by value
    double pairs_formed = 0.0;         // complementary pairs Alice forms
    double pairs_kept = 0.0;           // equivalent surviving-pair budget
    double instance_bits = 0.0;        // size of the equivalent rejection run
};

// Survival bookkeeping for active complementary pairing: the equivalent
// post-selection size that reproduces the pairing's untagged-mix expectation.
inline double aopp_pair_survival(double pairs_formed, double n_t, double n_zero, double n_one) {
    if (!(n_zero > 0.0) || !(n_one > 0.0))
        throw std::invalid_argument("aopp_pair_survival: empty bit class");
    return std::min(pairs_formed * n_t * n_t / (2.0 * n_zero * n_one), n_t);
}

inline AoppPlan aopp_plan(const ObservedStats& st) {
    detail::require_observed(st, "aopp_plan");
    AoppPlan out;
    out.n_one = st.n_t * (st.q11 + st.q10);
    out.n_zero = st.n_t * (st.q01 + st.q00);
    if (!(out.n_zero > 0.0) || !(out.n_one > 0.0)) return out;
    out.pairs_formed = detail::floor_even(std::min(out.n_zero, out.n_one)) / 2.0;
    out.pairs_kept = aopp_pair_survival(out.pairs_formed, st.n_t, out.n_zero, out.n_one);
    out.instance_bits = 2.0 * out.pairs_kept;
    return out;
}

} // namespace snsrate
