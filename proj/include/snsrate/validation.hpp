#pragma once
// Bound-validation runs behind the `validate` verb: an exhaustive
// bound-vs-exact comparison over small ball sets, plus seeded Monte Carlo
// frequency checks of the survivor thresholds at working sizes.

#include <cstdint>
#include <string>
#include <vector>

#include <snsrate/pairing_stats.hpp>
#include <snsrate/twcc_postprocess.hpp>

namespace snsrate {

struct DominanceRow {
    std::int64_t total = 0;
    std::int64_t whites = 0;
    std::int64_t threshold = 0;
    PairKind kind = PairKind::white_white;
    double exact_eps = 0.0;
    double bound = 0.0;
    bool dominated = false;
};

// Every composition and threshold up to max_total: the closed-form bounds
// must sit on or above the exact random-pairing failure probability.
inline std::vector<DominanceRow> dominance_table(std::int64_t max_total) {
    std::vector<DominanceRow> rows;
    for (std::int64_t total = 2; total <= max_total; total += 2) {
        for (std::int64_t whites = 0; whites <= total; ++whites) {
            for (std::int64_t t = 0; t <= whites / 2 + 1; ++t) {
                DominanceRow r;
                r.total = total;
                r.whites = whites;
                r.threshold = t;
                r.kind = PairKind::white_white;
                r.exact_eps = eps_pairs(t, PairKind::white_white, whites, total);
                r.bound = ww_deficit_bound(t, whites, total);
                r.dominated = r.bound >= r.exact_eps - 1e-12;
                rows.push_back(r);
            }
            if (2 * whites <= total) {
                for (std::int64_t t = 0; t <= whites + 1; ++t) {
                    DominanceRow r;
                    r.total = total;
                    r.whites = whites;
                    r.threshold = t;
                    r.kind = PairKind::white_black;
                    r.exact_eps = eps_pairs(t, PairKind::white_black, whites, total);
                    r.bound = wb_deficit_bound(t, whites, total);
                    r.dominated = r.bound >= r.exact_eps - 1e-12;
                    rows.push_back(r);
                }
            }
        }
    }
    return rows;
}

struct McRow {
    std::string quantity;      // which surviving count was thresholded
    std::int64_t total = 0;
    std::int64_t whites = 0;
    double eps_target = 0.0;
    std::int64_t trials = 0;
    std::int64_t threshold = 0;
    double violation_freq = 0.0;
    bool pass = false;
};

// Seeded pairing experiments: the observed frequency of falling below the
// budget-derived threshold must not exceed the budget itself.
inline std::vector<McRow> mc_threshold_checks(std::int64_t total, std::int64_t whites,
                                              std::int64_t trials, std::uint64_t seed,
                                              const std::vector<double>& eps_targets) {
    auto hist = mc_random_pairing(whites, total, trials, seed);  // indexed by mixed pairs
    std::vector<McRow> rows;
    for (double eps : eps_targets) {
        {
            // same-kind survivors: count = (whites - mixed) / 2
            auto bound = [&](std::int64_t t) { return ww_deficit_bound(t, whites, total); };
            std::int64_t t = detail::largest_within_budget(bound, total / 2, eps);
            std::int64_t hits = 0;
            for (std::size_t j = 0; j < hist.size(); ++j)
                if ((whites - static_cast<std::int64_t>(j)) / 2 < t) hits += hist[j];
            McRow r;
            r.quantity = "same-kind pairs";
            r.total = total;
            r.whites = whites;
            r.eps_target = eps;
            r.trials = trials;
            r.threshold = t;
            r.violation_freq = static_cast<double>(hits) / static_cast<double>(trials);
            r.pass = r.violation_freq <= eps;
            rows.push_back(r);
        }
        {
            // mixed survivors thresholded by the direct binomial-form bound
            const double frac = static_cast<double>(whites) / static_cast<double>(total);
            const double p_mixed = clamp01(2.0 * frac * (1.0 - frac));
            auto bound = [&](std::int64_t t) {
                return clamp01(2.0 * binom_tail_below(t, {total / 2, p_mixed}));
            };
            std::int64_t t = detail::largest_within_budget(bound, total / 2, eps);
            std::int64_t hits = 0;
            for (std::size_t j = 0; j < hist.size(); ++j)
                if (static_cast<std::int64_t>(j) < t) hits += hist[j];
            McRow r;
            r.quantity = "mixed pairs";
            r.total = total;
            r.whites = whites;
            r.eps_target = eps;
            r.trials = trials;
            r.threshold = t;
            r.violation_freq = static_cast<double>(hits) / static_cast<double>(trials);
            r.pass = r.violation_freq <= eps;
            rows.push_back(r);
        }
    }
    return rows;
}

struct ValidationReport {
    std::vector<DominanceRow> dominance;
    std::vector<McRow> mc;
    bool all_pass = false;
};

inline ValidationReport run_validation(std::int64_t max_total, std::int64_t mc_total,
                                       std::int64_t mc_whites, std::int64_t mc_trials,
                                       std::uint64_t seed) {
    ValidationReport rep;
    if (max_total >= 2) rep.dominance = dominance_table(max_total);
    if (mc_total > 0)
        rep.mc = mc_threshold_checks(mc_total, mc_whites, mc_trials, seed, {1e-2, 1e-3});
    rep.all_pass = true;
    for (const auto& r : rep.dominance)
        if (!r.dominated) rep.all_pass = false;
    for (const auto& r : rep.mc)
        if (!r.pass) rep.all_pass = false;
    return rep;
}

inline std::string dominance_to_csv(const std::vector<DominanceRow>& rows) {
    std::string out = "N,k,threshold,kind,exact_eps,bound,dominated?\n";
    char buf[160];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%lld,%lld,%lld,%s,%.12g,%.12g,%s\n",
                      static_cast<long long>(r.total), static_cast<long long>(r.whites),
                      static_cast<long long>(r.threshold),
                      r.kind == PairKind::white_white ? "ww" : "wb", r.exact_eps, r.bound,
                      r.dominated ? "yes" : "no");
        out += buf;
    }
    return out;
}

} // namespace snsrate
