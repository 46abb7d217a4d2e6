#pragma once
// End-to-end evaluation of one parameter point: simulated observations in,
// priced key-rate report out. Each pipeline owns its ledger layout; the
// term counts here are what the security levels are built from, so the
// layouts are locked by tests and must not drift casually.

#include <cmath>
#include <string>

#include <snsrate/channel_model.hpp>
#include <snsrate/config.hpp>
#include <snsrate/decoy_estimator.hpp>
#include <snsrate/eps_ledger.hpp>
#include <snsrate/key_rate.hpp>
#include <snsrate/twcc_postprocess.hpp>

namespace snsrate {

struct PipelineOutcome {
    KeyRateReport report;
    EpsLedger ledger;
    std::string reason;  // empty on success; short code for zero-rate rows
    std::int64_t n_uu_lower = 0;
};

namespace detail {

struct EstimatorStage {
    DecoyRates rates;
    UntaggedCounts counts;
};

// the shared opening moves: six yield terms, two count conversions
inline EstimatorStage open_estimators(const ObservedStats& st, const ProtocolParams& prot,
                                      double xi, EpsLedger& ledger) {
    EstimatorStage s;
    s.rates = s01_s10_lower(st, prot, xi, ledger);
    s.counts = untagged_counts(prot, s.rates, xi, ledger);
    return s;
}

inline double definetti_trim(double budget_r, double m_bits) {
    double r = budget_r > 0.0 ? budget_r : std::ceil(std::sqrt(m_bits));
    // the trim must leave something to estimate on
    return std::min(r, m_bits - 1.0);
}

} // namespace detail

// Plain string, no error rejection: eleven terms (eight count, three phase).
inline PipelineOutcome run_plain(const ObservedStats& st, const ProtocolParams& prot,
                                 const Budgets& bud, const RateParams& rp) {
    PipelineOutcome out;
    auto est = detail::open_estimators(st, prot, bud.xi_chain, out.ledger);
    auto phase = phase_error_upper(st, prot, est.rates.mean_s1_lower, est.counts.n1_lower,
                                   bud.xi_chain, out.ledger);
    auto sec = security_epsilon(out.ledger, rp.eps_hat, rp.eps_pa, rp.eps_cor);
    out.report = rate_plain_sns(est.counts.n1_lower, phase.m_e_upper, st.n_t, st.e_z, sec, rp,
                                prot.n_total);
    out.n_uu_lower = static_cast<std::int64_t>(est.counts.n1_lower);
    if (out.report.rate == 0.0)
        out.reason = est.counts.n1_lower <= 0.0 ? "no-untagged" : "clamped";
    return out;
}

// Even-parity rejection: twelve terms (nine count, three phase).
inline PipelineOutcome run_standard(const ObservedStats& st, const ProtocolParams& prot,
                                    const Budgets& bud, const RateParams& rp, TwccMode mode,
                                    double n_ee = 0.0) {
    PipelineOutcome out;
    auto est = detail::open_estimators(st, prot, bud.xi_chain, out.ledger);
    auto twcc = standard_twcc(st, prot, est.rates, est.counts, bud.xi_c, bud.xi_chain, mode,
                              out.ledger, n_ee);
    auto sec = security_epsilon(out.ledger, rp.eps_hat, rp.eps_pa, rp.eps_cor);
    out.report = rate_standard_twcc(twcc, sec, rp, prot.n_total);
    out.n_uu_lower = twcc.n_uu_lower;
    if (out.report.rate == 0.0)
        out.reason = twcc.n_uu_lower <= 0 ? "no-untagged-pairs" : "clamped";
    return out;
}

namespace detail {

// Odd-parity rejection core, reusable at a scaled instance size. The count
// side charges twelve terms; the phase side re-estimates from scratch (nine
// atoms, charged twice by the odd-error conversion) plus the exchange slack
// three times and the quantile once: twenty-two. Total thirty-four.
inline PipelineOutcome run_oper_scaled(const ObservedStats& st, const ProtocolParams& prot,
                                       const Budgets& bud, const RateParams& rp, double scale,
                                       double n_tol) {
    PipelineOutcome out;
    auto est = open_estimators(st, prot, bud.xi_chain, out.ledger);
    est.counts.mean_n01 *= scale;
    est.counts.mean_n10 *= scale;
    est.counts.mean_n1 *= scale;
    est.counts.n01_lower *= scale;
    est.counts.n10_lower *= scale;
    est.counts.n1_lower *= scale;
    ObservedStats view = st;
    view.n_t *= scale;

    auto pair = untagged_pair_bound(view, est.counts, bud.xi_c, out.ledger);
    auto oper = oper_counts(pair.n_uu_lower, est.counts, bud.xi_h, bud.xi_c, out.ledger);
    out.n_uu_lower = pair.n_uu_lower;

    const double m_bits = 2.0 * static_cast<double>(pair.n_uu_lower);
    if (pair.n_uu_lower <= 0 || oper.n_oper_lower <= 0) {
        // still price what was consumed so the report carries a real level
        auto sec = security_epsilon(out.ledger, rp.eps_hat, rp.eps_pa, rp.eps_cor);
        out.report = rate_oper(0.0, 0.0, 0.0, 0.0, sec, rp, n_tol);
        out.reason = "no-surviving-pairs";
        return out;
    }

    EpsLedger estimate_atoms;
    auto fresh = s01_s10_lower(st, prot, bud.xi_chain, estimate_atoms);
    auto phase = phase_error_upper(st, prot, fresh.mean_s1_lower, m_bits, bud.xi_chain,
                                   estimate_atoms);
    const double r = definetti_trim(bud.definetti_r, m_bits);
    auto zig = zigzag_phase_bound(m_bits, r, phase.m_e_upper, estimate_atoms, bud.eps_2,
                                  bud.eps_5, out.ledger);

    auto classes = parity_classes(view);
    auto sec = security_epsilon(out.ledger, rp.eps_hat, rp.eps_pa, rp.eps_cor);
    out.report = rate_oper(static_cast<double>(oper.n_oper_lower), zig.m_odd_upper,
                           classes.n_t1, classes.e_1, sec, rp, n_tol);
    if (out.report.rate == 0.0) out.reason = "clamped";
    return out;
}

} // namespace detail

inline PipelineOutcome run_oper(const ObservedStats& st, const ProtocolParams& prot,
                                const Budgets& bud, const RateParams& rp) {
    return detail::run_oper_scaled(st, prot, bud, rp, 1.0, prot.n_total);
}

// Active complementary pairing: two equivalent odd-parity instances, each
// with its own full ledger; the correctness budget is charged once.
inline PipelineOutcome run_aopp(const ObservedStats& st, const ProtocolParams& prot,
                                const Budgets& bud, const RateParams& rp) {
    PipelineOutcome out;
    auto plan = aopp_plan(st);
    if (!(plan.instance_bits > 0.0)) {
        out.report.pipeline = Pipeline::aopp;
        out.reason = "empty-pairing-stock";
        return out;
    }
    const double scale = plan.instance_bits / st.n_t;
    auto sub_a = detail::run_oper_scaled(st, prot, bud, rp, scale, prot.n_total);
    auto sub_b = detail::run_oper_scaled(st, prot, bud, rp, scale, prot.n_total);
    out.report = rate_aopp(sub_a.report, sub_b.report, rp.eps_cor);
    out.ledger = sub_a.ledger;
    out.ledger.merge(sub_b.ledger);
    out.n_uu_lower = sub_a.n_uu_lower + sub_b.n_uu_lower;
    if (!sub_a.reason.empty()) out.reason = sub_a.reason;
    return out;
}

inline PipelineOutcome run_pipeline(Pipeline which, const ObservedStats& st,
                                    const ProtocolParams& prot, const Budgets& bud,
                                    const RateParams& rp, TwccMode mode) {
    switch (which) {
        case Pipeline::plain_sns: return run_plain(st, prot, bud, rp);
        case Pipeline::standard_twcc: return run_standard(st, prot, bud, rp, mode);
        case Pipeline::oper: return run_oper(st, prot, bud, rp);
        case Pipeline::aopp: return run_aopp(st, prot, bud, rp);
    }
    throw std::logic_error("run_pipeline: unknown pipeline tag");
}

// convenience: simulate then evaluate
inline PipelineOutcome evaluate_point(Pipeline which, const DeviceParams& dev,
                                      const ProtocolParams& prot, const Budgets& bud,
                                      const RateParams& rp, TwccMode mode) {
    auto st = as_observed(simulate_observed(dev, prot));
    return run_pipeline(which, st, prot, bud, rp, mode);
}

} // namespace snsrate
