#pragma once
// Derivative-free source-parameter search: coordinate descent on the key
// rate with multiplicative steps that shrink on stagnation, restarted from
// a warm start, the config defaults, and a seeded perturbation of the warm
// start. Symmetric parameter sets satisfy the single-photon matching
// condition identically, so the search space never leaves it.

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>

#include <snsrate/config.hpp>
#include <snsrate/pipeline.hpp>
#include <snsrate/rng.hpp>

namespace snsrate {

struct SourcePoint {
    double mu_1 = 0.1, mu_2 = 0.5, mu_z = 0.48;
    double eps_send = 0.10, p_z = 0.70;
    double p_1 = 0.25, p_2 = 0.15;
    double lambda_slice = 0.12;
};

inline SourcePoint config_start(const RunConfig& cfg) {
    return {cfg.mu_1, cfg.mu_2, cfg.mu_z, cfg.eps_send, cfg.p_z,
            cfg.p_1,  cfg.p_2,  cfg.lambda_slice};
}

inline ProtocolParams symmetric_protocol(const SourcePoint& sp, double n_total) {
    ProtocolParams p;
    p.mu_az = p.mu_bz = sp.mu_z;
    p.eps_a = p.eps_b = sp.eps_send;
    p.p_z = sp.p_z;
    p.mu_a1 = p.mu_b1 = sp.mu_1;
    p.mu_a2 = p.mu_b2 = sp.mu_2;
    p.p_a1 = p.p_b1 = sp.p_1;
    p.p_a2 = p.p_b2 = sp.p_2;
    p.lambda_slice = sp.lambda_slice;
    p.n_total = n_total;
    return p;
}

namespace detail {

constexpr int kDims = 8;

inline std::array<double, kDims> to_array(const SourcePoint& s) {
    return {s.mu_1, s.mu_2, s.mu_z, s.eps_send, s.p_z, s.p_1, s.p_2, s.lambda_slice};
}

inline SourcePoint from_array(const std::array<double, kDims>& a) {
    return {a[0], a[1], a[2], a[3], a[4], a[5], a[6], a[7]};
}

inline constexpr std::array<double, kDims> kLo = {1e-4, 1e-3, 1e-3, 5e-3,
                                                  0.01, 1e-3, 1e-3, 1e-3};
inline constexpr std::array<double, kDims> kHi = {0.9, 2.0, 2.0, 0.9,
                                                  0.99, 0.7, 0.7, 0.5};

inline bool feasible(const std::array<double, kDims>& a) {
    for (int i = 0; i < kDims; ++i)
        if (a[i] < kLo[i] || a[i] > kHi[i]) return false;
    if (!(a[0] < 0.999 * a[1])) return false;   // decoy intensities must separate
    if (!(a[5] + a[6] < 0.999)) return false;   // leave room for the vacuum slot
    return true;
}

inline std::array<double, kDims> repair(std::array<double, kDims> a) {
    for (int i = 0; i < kDims; ++i) a[i] = std::clamp(a[i], kLo[i], kHi[i]);
    if (!(a[0] < 0.999 * a[1])) a[0] = 0.5 * a[1];
    if (!(a[5] + a[6] < 0.999)) {
        double s = 0.9 / (a[5] + a[6]);
        a[5] *= s;
        a[6] *= s;
    }
    return a;
}

} // namespace detail

struct OptimizeResult {
    SourcePoint params;
    PipelineOutcome outcome;
    double rate = 0.0;
    int evaluations = 0;
};

// Maximizes the rate of one pipeline at one distance. Deterministic given
// (seed, stream): the perturbed restart is the only random ingredient.
inline OptimizeResult optimize_point(Pipeline which, const DeviceParams& dev,
                                     const RunConfig& cfg, const SourcePoint& warm,
                                     std::uint64_t stream) {
    const auto& os = cfg.optimizer;
    int evals = 0;

    auto evaluate = [&](const std::array<double, detail::kDims>& a) -> double {
        ++evals;
        try {
            auto prot = symmetric_protocol(detail::from_array(a), cfg.n_total);
            return evaluate_point(which, dev, prot, cfg.budgets, cfg.rate_params, cfg.mode)
                .report.rate;
        } catch (const std::invalid_argument&) {
            return -1.0;  // infeasible corner; never beats a real evaluation
        }
    };

    auto descend = [&](std::array<double, detail::kDims> x) {
        double best = evaluate(x);
        double step = os.init_step;
        for (int pass = 0; pass < os.max_passes; ++pass) {
            const double pass_start = best;
            for (int i = 0; i < detail::kDims; ++i) {
                for (double dir : {1.0, -1.0}) {
                    auto cand = x;
                    cand[i] = std::clamp(cand[i] * (1.0 + dir * step), detail::kLo[i],
                                         detail::kHi[i]);
                    if (!detail::feasible(cand)) continue;
                    double r = evaluate(cand);
                    if (r > best) {
                        best = r;
                        x = cand;
                    }
                }
            }
            const bool stalled =
                best <= pass_start + os.rel_tol * std::max(std::abs(pass_start), 1e-300);
            if (stalled) {
                step *= 0.5;
                if (step < 1e-3) break;
            }
        }
        return std::pair{x, best};
    };

    auto warm_a = detail::repair(detail::to_array(warm));
    auto cold_a = detail::repair(detail::to_array(config_start(cfg)));
    Philox rng(cfg.seed, stream);

    auto perturbed = [&]() {
        auto a = warm_a;
        for (auto& v : a) v *= 0.85 + 0.3 * rng.next_double();
        return detail::repair(a);
    };

    std::array<double, detail::kDims> bx = warm_a;
    double br = -2.0;
    for (int r = 0; r < os.restarts; ++r) {
        std::array<double, detail::kDims> start;
        if (r == 0) start = warm_a;
        else if (r == 1 && cold_a != warm_a) start = cold_a;
        else start = perturbed();
        auto [x, rate] = descend(start);
        if (rate > br) {
            br = rate;
            bx = x;
        }
    }

    OptimizeResult out;
    out.params = detail::from_array(bx);
    auto prot = symmetric_protocol(out.params, cfg.n_total);
    out.outcome = evaluate_point(which, dev, prot, cfg.budgets, cfg.rate_params, cfg.mode);
    out.rate = out.outcome.report.rate;
    out.evaluations = evals;
    return out;
}

} // namespace snsrate
