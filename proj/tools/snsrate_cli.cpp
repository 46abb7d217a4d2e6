// Command-line front end: `sweep` produces rate tables over a distance
// grid, `validate` exercises the pairing bounds against exact and sampled
// failure probabilities, `report` dumps one fixed-parameter evaluation in
// full detail. Exit codes: 0 success, 2 configuration problem, 3 validation
// failure.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include <snsrate/config.hpp>
#include <snsrate/pipeline.hpp>
#include <snsrate/report_json.hpp>
#include <snsrate/sweep.hpp>
#include <snsrate/validation.hpp>

namespace {

using namespace snsrate;

void write_output(const std::string& path, const std::string& text) {
    if (path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open output path '" + path + "'");
    out << text;
}

const char* chain_name(EpsChain c) {
    switch (c) {
        case EpsChain::count: return "count";
        case EpsChain::phase: return "phase";
        case EpsChain::unassigned: return "unassigned";
    }
    return "unknown";
}

nlohmann::json ledger_to_json(const EpsLedger& ledger) {
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& e : ledger.entries())
        entries.push_back({{"label", e.label},
                           {"chain", chain_name(e.chain)},
                           {"value", e.value},
                           {"multiplicity", e.multiplicity}});
    return entries;
}

struct CommonFlags {
    std::string config_path;
    std::string out_path;
    std::string pipelines;
    std::string format;
    std::uint64_t seed = 0;
    bool seed_given = false;
};

RunConfig assemble_config(const CommonFlags& fl) {
    RunConfig cfg = fl.config_path.empty() ? RunConfig{} : load_config(fl.config_path);
    if (!fl.out_path.empty()) cfg.out_path = fl.out_path;
    if (!fl.pipelines.empty()) cfg.pipelines = parse_pipelines(fl.pipelines);
    if (!fl.format.empty()) {
        if (fl.format == "csv") cfg.format = OutputFormat::csv;
        else if (fl.format == "json") cfg.format = OutputFormat::json;
        else throw ConfigError("format must be csv or json, got '" + fl.format + "'");
    }
    if (fl.seed_given) cfg.seed = fl.seed;
    validate(cfg);
    return cfg;
}

int cmd_sweep(const CommonFlags& fl) {
    RunConfig cfg = assemble_config(fl);
    auto table = run_sweep(cfg);
    write_output(cfg.out_path, cfg.format == OutputFormat::csv ? to_csv(table)
                                                               : to_json_text(table, cfg));
    return 0;
}

int cmd_validate(const CommonFlags& fl, std::int64_t max_total, std::int64_t mc_total,
                 std::int64_t mc_whites, std::int64_t mc_trials) {
    RunConfig cfg = assemble_config(fl);
    auto rep = run_validation(max_total, mc_total, mc_whites, mc_trials, cfg.seed);
    write_output(cfg.out_path, dominance_to_csv(rep.dominance));

    std::int64_t violations = 0;
    for (const auto& r : rep.dominance)
        if (!r.dominated) ++violations;
    std::cerr << "dominance rows: " << rep.dominance.size() << ", violations: " << violations
              << "\n";
    for (const auto& m : rep.mc)
        std::cerr << "mc " << m.quantity << " N=" << m.total << " k=" << m.whites
                  << " eps=" << m.eps_target << " threshold=" << m.threshold
                  << " freq=" << m.violation_freq << " " << (m.pass ? "ok" : "VIOLATED")
                  << "\n";
    return rep.all_pass ? 0 : 3;
}

int cmd_report(const CommonFlags& fl, double distance_km) {
    RunConfig cfg = assemble_config(fl);
    DeviceParams dev = cfg.device;
    dev.distance_km = distance_km;
    auto prot = symmetric_protocol(config_start(cfg), cfg.n_total);

    nlohmann::json reports = nlohmann::json::array();
    for (Pipeline p : cfg.pipelines) {
        auto out = evaluate_point(p, dev, prot, cfg.budgets, cfg.rate_params, cfg.mode);
        nlohmann::json entry{{"report", report_to_json(out.report)},
                             {"reason", out.reason},
                             {"n_uu_lower", out.n_uu_lower},
                             {"ledger", ledger_to_json(out.ledger)}};
        reports.push_back(std::move(entry));
    }
    auto plob = plob_bounds(distance_km, dev.fiber_loss_db_km, dev.detector_eff);
    nlohmann::json doc{{"schema", "snsrate-report/1"},
                       {"distance_km", distance_km},
                       {"plob_absolute", plob.absolute},
                       {"plob_relative", plob.relative},
                       {"pipelines", std::move(reports)}};
    write_output(cfg.out_path, doc.dump(2) + "\n");
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"finite-size key-rate engine with two-way error rejection"};
    app.require_subcommand(1);

    CommonFlags fl;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", fl.config_path, "key = value configuration file");
        sub->add_option("--out", fl.out_path, "output path ('-' for stdout)");
        sub->add_option("--pipelines", fl.pipelines,
                        "comma list from: plain,twcc,oper,aopp");
        sub->add_option("--format", fl.format, "csv or json");
        sub->add_option("--seed", fl.seed, "RNG seed")->each([&](const std::string&) {
            fl.seed_given = true;
        });
    };

    auto* sweep = app.add_subcommand("sweep", "rate table over the distance grid");
    add_common(sweep);

    std::int64_t max_total = 24, mc_total = 2000, mc_whites = 1000, mc_trials = 20000;
    auto* validate = app.add_subcommand("validate", "bound-vs-exact and sampled checks");
    add_common(validate);
    validate->add_option("--max-total", max_total, "largest exhaustive ball-set size");
    validate->add_option("--mc-total", mc_total, "sampled pairing set size");
    validate->add_option("--mc-whites", mc_whites, "whites in the sampled set");
    validate->add_option("--mc-trials", mc_trials, "sampled pairing trials");

    double distance_km = 100.0;
    auto* report = app.add_subcommand("report", "single-point fixed-parameter detail");
    add_common(report);
    report->add_option("--distance", distance_km, "link length in km");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (sweep->parsed()) return cmd_sweep(fl);
        if (validate->parsed())
            return cmd_validate(fl, max_total, mc_total, mc_whites, mc_trials);
        if (report->parsed()) return cmd_report(fl, distance_km);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
