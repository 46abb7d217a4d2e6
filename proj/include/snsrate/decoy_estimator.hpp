#pragma once
// Finite-size decoy analysis: turns observed offline counting rates into a
// lower bound on the single-photon yields, propagates them to the number of
// single-photon signal events, and bounds their phase error rate. Every
// concentration step logs its failure probability to the ledger.

#include <cmath>
#include <stdexcept>

#include <snsrate/channel_model.hpp>
#include <snsrate/eps_ledger.hpp>
#include <snsrate/tail_bounds.hpp>

namespace snsrate {

// Hard gate on the send-probability/intensity matching condition; everything
// downstream assumes the two single-photon emission paths are blind to which
// side sent.
inline void check_security_constraint(const ProtocolParams& p) {
    if (security_constraint_residual(p) > 1e-9)
        throw std::invalid_argument("security constraint violated: intensity and send "
                                    "probabilities are inconsistent");
}

struct DecoyRates {
    double s01_lower = 0.0;     // yield lower bound: one photon from the b side
    double s10_lower = 0.0;     // yield lower bound: one photon from the a side
    double mean_s1_lower = 0.0; // intensity-weighted single-photon yield
    bool clamped_s01 = false;
    bool clamped_s10 = false;
};

namespace detail {

inline void require_observed(const ObservedStats& st, const char* who) {
    if (st.kind != StatsKind::observed_counts)
        throw std::logic_error(std::string(who) + ": statistics not yet tagged as observed");
}

// rate bound from an observed (rate, pair-count) cell, one ledger entry
inline double rate_lower(double rate, double pairs, double xi, EpsLedger& ledger,
                         EpsChain chain, const char* label) {
    if (!(pairs > 0.0)) throw std::invalid_argument("rate bound: empty cell");
    double bound = chernoff_expected_bounds_from_observed(rate * pairs, xi).lower / pairs;
    ledger.log(label, chain, xi);
    return bound;
}

inline double rate_upper(double rate, double pairs, double xi, EpsLedger& ledger,
                         EpsChain chain, const char* label) {
    if (!(pairs > 0.0)) throw std::invalid_argument("rate bound: empty cell");
    double bound = chernoff_expected_bounds_from_observed(rate * pairs, xi).upper / pairs;
    ledger.log(label, chain, xi);
    return bound;
}

// three-point decoy inversion for the single-photon yield of one side
inline double one_photon_yield_lower(double s_v1_lower, double s_v2_upper, double s_vv_upper,
                                     double mu1, double mu2, bool& clamped) {
    double num = mu2 * mu2 * std::exp(mu1) * s_v1_lower -
                 mu1 * mu1 * std::exp(mu2) * s_v2_upper -
                 (mu2 * mu2 - mu1 * mu1) * s_vv_upper;
    double den = mu2 * mu1 * (mu2 - mu1);
    double y = num / den;
    clamped = y < 0.0;
    return clamped ? 0.0 : y;
}

} // namespace detail

// Lower-bounds the single-photon yields from the five offline rate cells.
// Consumes six ledger terms on the count chain (the both-vacuum cell is used
// once per side).
inline DecoyRates s01_s10_lower(const ObservedStats& st, const ProtocolParams& p,
                                double xi, EpsLedger& ledger) {
    detail::require_observed(st, "s01_s10_lower");
    if (!(p.mu_b2 > p.mu_b1) || !(p.mu_a2 > p.mu_a1))
        throw std::invalid_argument("s01_s10_lower: second intensity must exceed the first");
    if (!(p.mu_a1 > 0.0) || !(p.mu_b1 > 0.0))
        throw std::invalid_argument("s01_s10_lower: first intensity must be positive");

    DecoyRates out;
    {
        double lo = detail::rate_lower(st.s_ox, st.pairs_ox, xi, ledger, EpsChain::count,
                                       "rate lower: vacuum + first (b side)");
        double u2 = detail::rate_upper(st.s_oy, st.pairs_oy, xi, ledger, EpsChain::count,
                                       "rate upper: vacuum + second (b side)");
        double uv = detail::rate_upper(st.s_oo, st.pairs_oo, xi, ledger, EpsChain::count,
                                       "rate upper: both vacuum (b-side use)");
        out.s01_lower =
            detail::one_photon_yield_lower(lo, u2, uv, p.mu_b1, p.mu_b2, out.clamped_s01);
    }
    {
        double lo = detail::rate_lower(st.s_xo, st.pairs_xo, xi, ledger, EpsChain::count,
                                       "rate lower: first + vacuum (a side)");
        double u2 = detail::rate_upper(st.s_yo, st.pairs_yo, xi, ledger, EpsChain::count,
                                       "rate upper: second + vacuum (a side)");
        double uv = detail::rate_upper(st.s_oo, st.pairs_oo, xi, ledger, EpsChain::count,
                                       "rate upper: both vacuum (a-side use)");
        out.s10_lower =
            detail::one_photon_yield_lower(lo, u2, uv, p.mu_a1, p.mu_a2, out.clamped_s10);
    }
    out.mean_s1_lower =
        (p.mu_a1 * out.s10_lower + p.mu_b1 * out.s01_lower) / (p.mu_a1 + p.mu_b1);
    return out;
}

struct UntaggedCounts {
    double mean_n01 = 0.0, mean_n10 = 0.0, mean_n1 = 0.0;
    double n01_lower = 0.0, n10_lower = 0.0, n1_lower = 0.0;
};

// Expected and lower-bounded counts of signal-window events caused by exactly
// one photon, split by which side sent it. Two ledger terms (count chain).
inline UntaggedCounts untagged_counts(const ProtocolParams& p, const DecoyRates& rates,
                                      double xi, EpsLedger& ledger) {
    check_security_constraint(p);
    const double pairs_z = p.n_total * p.p_z * p.p_z;
    const double coef_a = p.eps_a * (1.0 - p.eps_b) * p.mu_az * std::exp(-p.mu_az);
    const double coef_b = p.eps_b * (1.0 - p.eps_a) * p.mu_bz * std::exp(-p.mu_bz);

    UntaggedCounts out;
    out.mean_n10 = pairs_z * coef_a * rates.s10_lower;
    out.mean_n01 = pairs_z * coef_b * rates.s01_lower;
    out.mean_n1 = pairs_z * (coef_a + coef_b) * rates.mean_s1_lower;

    out.n10_lower = chernoff_lower_from_expected(out.mean_n10, xi);
    ledger.log("untagged count lower: a-side photon", EpsChain::count, xi);
    out.n01_lower = chernoff_lower_from_expected(out.mean_n01, xi);
    ledger.log("untagged count lower: b-side photon", EpsChain::count, xi);
    out.n1_lower = out.n10_lower + out.n01_lower;
    return out;
}

struct PhaseErrorBound {
    double t_x_upper = 0.0;       // slice error rate, upper
    double e1_mean_upper = 0.0;   // phase error rate of single-photon events, upper
    double m_e_upper = 0.0;       // phase-error count bound for the stated subset
    double subset_size = 0.0;
};

// Upper-bounds the single-photon phase error rate from the slice error sample
// and converts it to an error-count bound on a subset of that size. Three
// ledger terms (phase chain).
inline PhaseErrorBound phase_error_upper(const ObservedStats& st, const ProtocolParams& p,
                                         double mean_s1_lower, double subset_size, double xi,
                                         EpsLedger& ledger) {
    detail::require_observed(st, "phase_error_upper");
    if (!(subset_size >= 0.0))
        throw std::invalid_argument("phase_error_upper: negative subset size");

    PhaseErrorBound out;
    out.subset_size = subset_size;
    out.t_x_upper = detail::rate_upper(st.t_x, st.pairs_slice, xi, ledger, EpsChain::phase,
                                       "slice error rate upper");
    double s_vv_lower = detail::rate_lower(st.s_oo, st.pairs_oo, xi, ledger, EpsChain::phase,
                                           "rate lower: both vacuum (phase use)");

    const double atten = std::exp(-p.mu_a1 - p.mu_b1);
    const double denom = atten * (p.mu_a1 + p.mu_b1) * mean_s1_lower;
    if (denom <= 0.0) {
        out.e1_mean_upper = 1.0;
    } else {
        double num = out.t_x_upper - 0.5 * atten * s_vv_lower;
        out.e1_mean_upper = clamp01(num / denom);
    }

    out.m_e_upper = chernoff_upper_from_expected(subset_size * out.e1_mean_upper, xi);
    ledger.log("phase-error count upper for subset", EpsChain::phase, xi);
    return out;
}

} // namespace snsrate
