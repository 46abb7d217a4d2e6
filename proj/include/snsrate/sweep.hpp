#pragma once
// Distance sweeps: per pipeline, march the grid with warm-started
// optimization (or fixed parameters), then emit rows in grid order. Output
// is plain text built with fixed formatting so identical configs produce
// identical bytes.

#include <cstdio>
#include <string>
#include <vector>

#include <json.hpp>

#include <snsrate/config.hpp>
#include <snsrate/key_rate.hpp>
#include <snsrate/optimizer.hpp>
#include <snsrate/pipeline.hpp>
#include <snsrate/report_json.hpp>

namespace snsrate {

struct SweepRow {
    double distance_km = 0.0;
    Pipeline pipeline = Pipeline::plain_sns;
    KeyRateReport report;
    std::string reason;
    std::int64_t n_uu_lower = 0;
    SourcePoint params;
    PlobBounds plob;
};

struct SweepTable {
    std::vector<SweepRow> rows;
};

inline std::vector<double> distance_grid(const RunConfig& cfg) {
    std::vector<double> grid;
    for (double d = cfg.distance_start_km; d <= cfg.distance_stop_km + 1e-9;
         d += cfg.distance_step_km)
        grid.push_back(d);
    return grid;
}

inline SweepTable run_sweep(const RunConfig& cfg) {
    const auto grid = distance_grid(cfg);
    // pipeline-major evaluation to keep each warm chain intact
    std::vector<std::vector<SweepRow>> per_pipeline(cfg.pipelines.size());
    for (std::size_t pi = 0; pi < cfg.pipelines.size(); ++pi) {
        Pipeline which = cfg.pipelines[pi];
        SourcePoint warm = config_start(cfg);
        for (std::size_t gi = 0; gi < grid.size(); ++gi) {
            DeviceParams dev = cfg.device;
            dev.distance_km = grid[gi];
            SweepRow row;
            row.distance_km = grid[gi];
            row.pipeline = which;
            row.plob = plob_bounds(grid[gi], dev.fiber_loss_db_km, dev.detector_eff);
            if (cfg.optimizer.enabled) {
                auto best = optimize_point(which, dev, cfg, warm,
                                           pi * 1000003ULL + gi);
                row.report = best.outcome.report;
                row.reason = best.outcome.reason;
                row.n_uu_lower = best.outcome.n_uu_lower;
                row.params = best.params;
                if (best.rate > 0.0) warm = best.params;
            } else {
                row.params = config_start(cfg);
                auto prot = symmetric_protocol(row.params, cfg.n_total);
                auto out = evaluate_point(which, dev, prot, cfg.budgets, cfg.rate_params,
                                          cfg.mode);
                row.report = out.report;
                row.reason = out.reason;
                row.n_uu_lower = out.n_uu_lower;
            }
            per_pipeline[pi].push_back(row);
        }
    }

    SweepTable table;
    for (std::size_t gi = 0; gi < grid.size(); ++gi)
        for (std::size_t pi = 0; pi < cfg.pipelines.size(); ++pi)
            table.rows.push_back(per_pipeline[pi][gi]);
    return table;
}

// Smallest grid-marched distance at which the pipeline's optimized rate
// stays zero for `patience` consecutive steps; returns the last positive
// distance. Used for range comparisons between pipelines.
inline double max_positive_distance(Pipeline which, const RunConfig& cfg, double march_start,
                                    double step, int patience = 3,
                                    double hard_stop_km = 1200.0) {
    SourcePoint warm = config_start(cfg);
    double last_positive = -1.0;
    int zeros = 0;
    std::uint64_t gi = 0;
    for (double d = march_start; d <= hard_stop_km; d += step, ++gi) {
        DeviceParams dev = cfg.device;
        dev.distance_km = d;
        auto best = optimize_point(which, dev, cfg, warm, 7777777ULL + gi);
        if (best.rate > 0.0) {
            last_positive = d;
            zeros = 0;
            warm = best.params;
        } else if (last_positive >= 0.0 && ++zeros >= patience) {
            break;
        }
    }
    return last_positive;
}

namespace detail {

inline std::string fmt_g(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

} // namespace detail

inline constexpr const char* kSweepCsvHeader =
    "distance_km,pipeline,rate,n_uu_lower,e_ph_upper,eps_tol,eps_sec,eps_cor,term_count,"
    "extract_bits,ec_cost,tail_cost,plob_absolute,plob_relative,mu_1,mu_2,mu_z,eps_send,"
    "p_z,p_1,p_2,lambda_slice,reason";

inline std::string to_csv(const SweepTable& table) {
    std::string out = kSweepCsvHeader;
    out += '\n';
    for (const auto& r : table.rows) {
        using detail::fmt_g;
        out += fmt_g(r.distance_km);
        out += ',';
        out += pipeline_name(r.pipeline);
        out += ',';
        out += fmt_g(r.report.rate);
        out += ',';
        out += std::to_string(r.n_uu_lower);
        out += ',';
        out += fmt_g(r.report.e_ph);
        out += ',';
        out += fmt_g(r.report.eps_tol);
        out += ',';
        out += fmt_g(r.report.eps_sec);
        out += ',';
        out += fmt_g(r.report.eps_cor);
        out += ',';
        out += std::to_string(r.report.term_count);
        out += ',';
        out += fmt_g(r.report.extract_bits);
        out += ',';
        out += fmt_g(r.report.ec_cost);
        out += ',';
        out += fmt_g(r.report.tail_cost);
        out += ',';
        out += fmt_g(r.plob.absolute);
        out += ',';
        out += fmt_g(r.plob.relative);
        out += ',';
        out += fmt_g(r.params.mu_1);
        out += ',';
        out += fmt_g(r.params.mu_2);
        out += ',';
        out += fmt_g(r.params.mu_z);
        out += ',';
        out += fmt_g(r.params.eps_send);
        out += ',';
        out += fmt_g(r.params.p_z);
        out += ',';
        out += fmt_g(r.params.p_1);
        out += ',';
        out += fmt_g(r.params.p_2);
        out += ',';
        out += fmt_g(r.params.lambda_slice);
        out += ',';
        out += r.reason;
        out += '\n';
    }
    return out;
}

inline constexpr const char* kSweepSchema = "snsrate-sweep/1";

inline std::string to_json_text(const SweepTable& table, const RunConfig& cfg) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : table.rows) {
        nlohmann::json row{{"distance_km", r.distance_km},
                           {"pipeline", pipeline_name(r.pipeline)},
                           {"report", report_to_json(r.report)},
                           {"n_uu_lower", r.n_uu_lower},
                           {"reason", r.reason},
                           {"plob_absolute", r.plob.absolute},
                           {"plob_relative", r.plob.relative},
                           {"params",
                            {{"mu_1", r.params.mu_1},
                             {"mu_2", r.params.mu_2},
                             {"mu_z", r.params.mu_z},
                             {"eps_send", r.params.eps_send},
                             {"p_z", r.params.p_z},
                             {"p_1", r.params.p_1},
                             {"p_2", r.params.p_2},
                             {"lambda_slice", r.params.lambda_slice}}}};
        rows.push_back(std::move(row));
    }
    nlohmann::json doc{{"schema", kSweepSchema}, {"seed", cfg.seed}, {"rows", std::move(rows)}};
    return doc.dump(2) + "\n";
}

} // namespace snsrate
