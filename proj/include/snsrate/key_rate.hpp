#pragma once
// Final extraction-rate formulas, the failure-probability composition that
// prices every ledger term into one security level, and the repeaterless
// capacity references the sweep is judged against.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <snsrate/eps_ledger.hpp>
#include <snsrate/twcc_postprocess.hpp>

namespace snsrate {

enum class Pipeline { plain_sns, standard_twcc, oper, aopp };

inline const char* pipeline_name(Pipeline p) {
    switch (p) {
        case Pipeline::plain_sns: return "plain";
        case Pipeline::standard_twcc: return "twcc";
        case Pipeline::oper: return "oper";
        case Pipeline::aopp: return "aopp";
    }
    throw std::logic_error("pipeline_name: unknown tag");
}

// argument clamped to [0, 1/2]: rates past one half carry no extractable key
// and the function is symmetric about it
inline double binary_entropy(double x) {
    x = std::clamp(x, 0.0, 0.5);
    if (x == 0.0) return 0.0;
    return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

struct RateParams {
    double f_ec = 1.1;       // error-correction inefficiency
    double eps_hat = 1e-20;  // smoothing parameter of the entropy bound
    double eps_pa = 1e-20;   // privacy-amplification failure
    double eps_cor = 1e-20;  // correctness failure
};

inline void validate(const RateParams& rp) {
    if (!(rp.f_ec >= 1.0)) throw std::invalid_argument("rate params: f must be >= 1");
    detail::check_eps(rp.eps_hat);
    detail::check_eps(rp.eps_pa);
    detail::check_eps(rp.eps_cor);
}

struct SecurityEps {
    double eps_e = 0.0;    // phase-estimation chain total
    double eps_n1 = 0.0;   // count-estimation chain total
    double eps_sec = 0.0;
    double eps_cor = 0.0;
    double eps_tol = 0.0;
    int term_count = 0;
};

// Prices the ledger: every fluctuation term must sit on a named chain, the
// two chains are summed and composed into the security level.
inline SecurityEps security_epsilon(const EpsLedger& ledger, double eps_hat, double eps_pa,
                                    double eps_cor) {
    if (ledger.has_unassigned())
        throw std::logic_error("security_epsilon: ledger entry not assigned to a chain");
    if (!(eps_hat >= 0.0) || !(eps_pa >= 0.0) || !(eps_cor >= 0.0))
        throw std::invalid_argument("security_epsilon: negative failure budget");

    SecurityEps out;
    out.eps_e = ledger.total(EpsChain::phase);
    out.eps_n1 = ledger.total(EpsChain::count);
    out.eps_sec = 2.0 * eps_hat + eps_pa + 4.0 * std::sqrt(out.eps_e + out.eps_n1);
    out.eps_cor = eps_cor;
    out.eps_tol = eps_cor + out.eps_sec;
    out.term_count = ledger.term_count();
    return out;
}

struct KeyRateReport {
    Pipeline pipeline = Pipeline::plain_sns;
    double rate = 0.0;             // per pulse pair sent
    bool zero_clamped = false;
    bool phase_saturated = false;  // phase error rate reached one half

    double n_signal = 0.0;         // bits entering extraction
    double e_ph = 1.0;             // their phase error rate bound
    double extract_bits = 0.0;     // n_signal * (1 - H(e_ph))
    double ec_cost = 0.0;          // f * sum of class costs
    double tail_cost = 0.0;        // composition + privacy-amplification tails
    double eps_sec = 0.0, eps_cor = 0.0, eps_tol = 0.0;
    int term_count = 0;
};

namespace detail {

inline KeyRateReport rate_from_terms(Pipeline tag, double n_signal, double e_ph,
                                     double ec_cost, const SecurityEps& sec,
                                     const RateParams& rp, double n_tol) {
    validate(rp);
    if (!(n_tol > 0.0)) throw std::invalid_argument("key rate: pulse-pair count must be positive");
    if (!(n_signal >= 0.0) || !(ec_cost >= 0.0))
        throw std::invalid_argument("key rate: negative count input");
    if (!(sec.eps_sec > 0.0)) throw std::invalid_argument("key rate: security level missing");

    KeyRateReport rep;
    rep.pipeline = tag;
    rep.n_signal = n_signal;
    rep.e_ph = e_ph;
    rep.phase_saturated = e_ph >= 0.5;
    rep.extract_bits = n_signal * (1.0 - binary_entropy(e_ph));
    rep.ec_cost = ec_cost;
    rep.tail_cost = std::log2(2.0 / sec.eps_sec) +
                    2.0 * std::log2(1.0 / (std::sqrt(2.0) * rp.eps_pa * rp.eps_hat));
    rep.eps_sec = sec.eps_sec;
    rep.eps_cor = sec.eps_cor;
    rep.eps_tol = sec.eps_tol;
    rep.term_count = sec.term_count;

    const double bits = rep.extract_bits - rep.ec_cost - rep.tail_cost;
    rep.zero_clamped = bits <= 0.0;
    rep.rate = std::max(bits, 0.0) / n_tol;
    return rep;
}

} // namespace detail

inline KeyRateReport rate_standard_twcc(const TwccResult& twcc, const SecurityEps& sec,
                                        const RateParams& rp, double n_tol) {
    const double ec = rp.f_ec * (twcc.n_t1 * binary_entropy(twcc.e_1) +
                                 twcc.n_t2 * binary_entropy(twcc.e_2) +
                                 twcc.n_t3 * binary_entropy(twcc.e_3));
    return detail::rate_from_terms(Pipeline::standard_twcc,
                                   static_cast<double>(twcc.n_uu_lower), twcc.e_ph_final,
                                   ec, sec, rp, n_tol);
}

inline KeyRateReport rate_oper(double n_oper_lower, double m_odd_upper, double n_ot,
                               double e_oz, const SecurityEps& sec, const RateParams& rp,
                               double n_tol) {
    const double e_ph = n_oper_lower > 0.0 ? m_odd_upper / n_oper_lower : 1.0;
    const double ec = rp.f_ec * n_ot * binary_entropy(e_oz);
    return detail::rate_from_terms(Pipeline::oper, n_oper_lower, e_ph, ec, sec, rp, n_tol);
}

inline KeyRateReport rate_plain_sns(double n1_lower, double m_e_upper, double n_t, double e_z,
                                    const SecurityEps& sec, const RateParams& rp,
                                    double n_tol) {
    const double e_ph = n1_lower > 0.0 ? m_e_upper / n1_lower : 1.0;
    const double ec = rp.f_ec * n_t * binary_entropy(e_z);
    return detail::rate_from_terms(Pipeline::plain_sns, n1_lower, e_ph, ec, sec, rp, n_tol);
}

// Two independent halves, each priced by its own ledger; the correctness
// budget is shared, everything else doubles.
inline KeyRateReport rate_aopp(const KeyRateReport& sub_a, const KeyRateReport& sub_b,
                               double eps_cor) {
    if (!(eps_cor >= 0.0)) throw std::invalid_argument("rate_aopp: negative correctness budget");
    KeyRateReport rep;
    rep.pipeline = Pipeline::aopp;
    rep.rate = sub_a.rate + sub_b.rate;
    rep.zero_clamped = sub_a.zero_clamped && sub_b.zero_clamped;
    rep.phase_saturated = sub_a.phase_saturated || sub_b.phase_saturated;
    rep.n_signal = sub_a.n_signal + sub_b.n_signal;
    rep.e_ph = std::max(sub_a.e_ph, sub_b.e_ph);
    rep.extract_bits = sub_a.extract_bits + sub_b.extract_bits;
    rep.ec_cost = sub_a.ec_cost + sub_b.ec_cost;
    rep.tail_cost = sub_a.tail_cost + sub_b.tail_cost;
    rep.eps_sec = sub_a.eps_sec + sub_b.eps_sec;
    rep.eps_cor = eps_cor;
    rep.eps_tol = eps_cor + rep.eps_sec;
    rep.term_count = sub_a.term_count + sub_b.term_count;
    return rep;
}

// Repeaterless capacity references. The bound diverges as channel loss
// vanishes; reports are capped at a finite ceiling so zero-distance rows
// stay printable.
inline constexpr double kPlobCeiling = 64.0;

struct PlobBounds {
    double absolute = 0.0;  // ideal devices
    double relative = 0.0;  // detector efficiency charged to the channel
};

inline PlobBounds plob_bounds(double distance_km, double fiber_loss_db_km, double detector_eff) {
    if (!(distance_km >= 0.0)) throw std::invalid_argument("plob_bounds: negative distance");
    if (!(fiber_loss_db_km > 0.0) || !(detector_eff > 0.0) || detector_eff > 1.0)
        throw std::invalid_argument("plob_bounds: bad channel parameters");
    const double eta_ch = std::pow(10.0, -fiber_loss_db_km * distance_km / 10.0);
    auto cap = [](double eta) {
        if (eta >= 1.0) return kPlobCeiling;
        return std::min(-std::log2(1.0 - eta), kPlobCeiling);
    };
    return {cap(eta_ch), cap(eta_ch * detector_eff * detector_eff)};
}

} // namespace snsrate
