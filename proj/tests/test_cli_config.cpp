// Configuration parsing, sweep assembly, and validation-table checks.
// The sweep checks here run with the optimizer disabled so they stay fast;
// optimizer behaviour gets its own (still small) section at the end.

#include <catch2/catch_amalgamated.hpp>

#include <cstdint>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include <snsrate/config.hpp>
#include <snsrate/optimizer.hpp>
#include <snsrate/report_json.hpp>
#include <snsrate/sweep.hpp>
#include <snsrate/validation.hpp>

using namespace snsrate;

namespace {

RunConfig tiny_fixed_config() {
    RunConfig cfg;
    cfg.distance_start_km = 50.0;
    cfg.distance_stop_km = 70.0;
    cfg.distance_step_km = 10.0;
    cfg.optimizer.enabled = false;
    return cfg;
}

} // namespace

TEST_CASE("config text parsing") {
    SECTION("defaults survive an empty document") {
        RunConfig cfg = parse_config_text("");
        CHECK(cfg.distance_stop_km == 500.0);
        CHECK(cfg.n_total == 1e12);
        CHECK(cfg.pipelines.size() == 4);
        CHECK(cfg.optimizer.enabled);
        CHECK(cfg.format == OutputFormat::csv);
        // default device is the reference bench, not an ideal detector
        CHECK(cfg.device.dark_count_prob == 1e-8);
        CHECK(cfg.device.misalignment == 0.03);
        CHECK(cfg.device.detector_eff == 0.30);
        CHECK(cfg.device.fiber_loss_db_km == 0.2);
    }

    SECTION("comments, blank lines, and spacing are tolerated") {
        RunConfig cfg = parse_config_text(
            "# fibre test bench\n"
            "\n"
            "  distance_stop_km =  120  # short span\n"
            "mu_z=0.42\n"
            "twcc_mode = paired\n"
            "optimize = false\n"
            "seed = 99\n"
            "format = json\n");
        CHECK(cfg.distance_stop_km == 120.0);
        CHECK(cfg.mu_z == 0.42);
        CHECK(cfg.mode == TwccMode::paired);
        CHECK_FALSE(cfg.optimizer.enabled);
        CHECK(cfg.seed == 99);
        CHECK(cfg.format == OutputFormat::json);
    }

    SECTION("every documented key is accepted") {
        const char* doc =
            "distance_start_km = 10\n"
            "distance_stop_km = 20\n"
            "distance_step_km = 5\n"
            "dark_count_prob = 1e-8\n"
            "misalignment = 0.03\n"
            "detector_eff = 0.3\n"
            "fiber_loss_db_km = 0.2\n"
            "n_total = 1e11\n"
            "mu_1 = 0.09\n"
            "mu_2 = 0.45\n"
            "mu_z = 0.40\n"
            "eps_send = 0.08\n"
            "p_z = 0.72\n"
            "p_1 = 0.24\n"
            "p_2 = 0.14\n"
            "lambda_slice = 0.10\n"
            "xi_chain = 1e-20\n"
            "xi_c = 1e-20\n"
            "xi_h = 1e-20\n"
            "eps_2 = 1e-20\n"
            "eps_5 = 1e-20\n"
            "definetti_r = 0\n"
            "eps_hat = 1e-20\n"
            "eps_pa = 1e-20\n"
            "eps_cor = 1e-20\n"
            "f_ec = 1.1\n"
            "twcc_mode = strict\n"
            "pipelines = twcc,oper\n"
            "optimize = true\n"
            "optimizer_restarts = 2\n"
            "optimizer_max_passes = 30\n"
            "optimizer_rel_tol = 1e-4\n"
            "optimizer_init_step = 0.2\n"
            "seed = 7\n"
            "format = csv\n"
            "out = -\n";
        RunConfig cfg = parse_config_text(doc);
        CHECK_NOTHROW(validate(cfg));
        CHECK(cfg.pipelines == std::vector<Pipeline>{Pipeline::standard_twcc, Pipeline::oper});
        CHECK(cfg.optimizer.restarts == 2);
    }

    SECTION("rejections") {
        CHECK_THROWS_AS(parse_config_text("no_such_key = 1\n"), ConfigError);
        CHECK_THROWS_AS(parse_config_text("mu_z = fast\n"), ConfigError);
        CHECK_THROWS_AS(parse_config_text("mu_z = 0.4 extra\n"), ConfigError);
        CHECK_THROWS_AS(parse_config_text("optimize = maybe\n"), ConfigError);
        CHECK_THROWS_AS(parse_config_text("just a line without equals\n"), ConfigError);
        CHECK_THROWS_AS(parse_config_text("= 3\n"), ConfigError);
        CHECK_THROWS_AS(parse_config_text("twcc_mode = loose\n"), ConfigError);
        CHECK_THROWS_AS(parse_config_text("format = yaml\n"), ConfigError);
        CHECK_THROWS_AS(parse_config_text("pipelines = plain,warp\n"), ConfigError);
    }
}

TEST_CASE("pipeline list parsing") {
    CHECK(parse_pipelines("plain").size() == 1);
    CHECK(parse_pipelines("aopp, twcc") ==
          std::vector<Pipeline>{Pipeline::aopp, Pipeline::standard_twcc});
    SECTION("duplicates collapse, order of first sight kept") {
        auto v = parse_pipelines("oper,plain,oper,plain");
        REQUIRE(v.size() == 2);
        CHECK(v[0] == Pipeline::oper);
        CHECK(v[1] == Pipeline::plain_sns);
    }
    CHECK(parse_pipelines("").empty());
    CHECK(parse_pipelines(" , ,").empty());
    CHECK_THROWS_AS(parse_pipelines("twincc"), ConfigError);
}

TEST_CASE("run configuration validation") {
    RunConfig good = tiny_fixed_config();
    CHECK_NOTHROW(validate(good));

    SECTION("grid shape") {
        RunConfig c = good;
        c.distance_step_km = 0.0;
        CHECK_THROWS_AS(validate(c), ConfigError);
        c = good;
        c.distance_stop_km = c.distance_start_km - 1.0;
        CHECK_THROWS_AS(validate(c), ConfigError);
    }
    SECTION("budget ranges") {
        RunConfig c = good;
        c.budgets.xi_c = 0.0;
        CHECK_THROWS_AS(validate(c), ConfigError);
        c = good;
        c.rate_params.eps_pa = 1.0;
        CHECK_THROWS_AS(validate(c), ConfigError);
    }
    SECTION("optimizer bounds") {
        RunConfig c = good;
        c.optimizer.restarts = 0;
        CHECK_THROWS_AS(validate(c), ConfigError);
        c = good;
        c.optimizer.restarts = 17;
        CHECK_THROWS_AS(validate(c), ConfigError);
        c = good;
        c.optimizer.init_step = 1.0;
        CHECK_THROWS_AS(validate(c), ConfigError);
    }
    SECTION("device and source errors surface as config errors") {
        RunConfig c = good;
        c.device.detector_eff = 1.5;
        CHECK_THROWS_AS(validate(c), ConfigError);
        c = good;
        c.mu_1 = 0.9; // must stay below mu_2
        CHECK_THROWS_AS(validate(c), ConfigError);
        c = good;
        c.p_1 = 0.6;
        c.p_2 = 0.5; // decoy probabilities sum past one
        CHECK_THROWS_AS(validate(c), ConfigError);
    }
}

TEST_CASE("sweep table assembly") {
    RunConfig cfg = tiny_fixed_config();
    auto table = run_sweep(cfg);

    SECTION("rows come out grid-major, pipelines in configured order") {
        REQUIRE(table.rows.size() == 3 * 4);
        std::size_t i = 0;
        for (double d : {50.0, 60.0, 70.0})
            for (Pipeline p :
                 {Pipeline::plain_sns, Pipeline::standard_twcc, Pipeline::oper, Pipeline::aopp}) {
                CHECK(table.rows[i].distance_km == d);
                CHECK(table.rows[i].report.pipeline == p);
                ++i;
            }
    }

    SECTION("csv header matches the documented column list") {
        std::string csv = to_csv(table);
        std::string first = csv.substr(0, csv.find('\n'));
        CHECK(first == std::string(kSweepCsvHeader));
        CHECK(first.rfind("distance_km,pipeline,rate,n_uu_lower,e_ph_upper,eps_tol", 0) == 0);
        // one data line per row, plus the header
        CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 12);
    }

    SECTION("byte-identical across repeated runs") {
        auto again = run_sweep(cfg);
        CHECK(to_csv(table) == to_csv(again));
        CHECK(to_json_text(table, cfg) == to_json_text(again, cfg));
    }

    SECTION("json document carries schema, seed, and parseable rows") {
        auto doc = nlohmann::json::parse(to_json_text(table, cfg));
        CHECK(doc["schema"] == "snsrate-sweep/1");
        CHECK(doc["seed"] == 1);
        REQUIRE(doc["rows"].size() == 12);
        CHECK(doc["rows"][0]["distance_km"] == 50.0);
        CHECK(doc["rows"][0]["pipeline"] == "plain");
    }

    SECTION("empty pipeline selection yields a header-only table") {
        RunConfig none = cfg;
        none.pipelines.clear();
        auto t = run_sweep(none);
        CHECK(t.rows.empty());
        CHECK(to_csv(t) == std::string(kSweepCsvHeader) + "\n");
    }

    SECTION("distance grid endpoints are inclusive") {
        auto grid = distance_grid(cfg);
        REQUIRE(grid.size() == 3);
        CHECK(grid.front() == 50.0);
        CHECK(grid.back() == 70.0);
    }
}

TEST_CASE("single report serialization") {
    RunConfig cfg = tiny_fixed_config();
    DeviceParams dev = cfg.device;
    dev.distance_km = 60.0;
    auto prot = symmetric_protocol(cfg);
    auto out = evaluate_point(Pipeline::standard_twcc, dev, prot, cfg.budgets, cfg.rate_params,
                              cfg.mode);
    auto j = report_to_json(out.report);
    CHECK(j["schema"] == "keyratereport/1");
    CHECK(j["pipeline"] == "twcc");
    CHECK(j["rate"].get<double>() == out.report.rate);
    CHECK(j["term_count"].get<int>() == 12);
}

TEST_CASE("bound validation tables") {
    SECTION("exhaustive dominance holds at small sizes") {
        auto rows = dominance_table(16);
        REQUIRE(!rows.empty());
        for (const auto& r : rows) {
            INFO("N=" << r.total << " k=" << r.whites << " t=" << r.threshold << " "
                      << (r.kind == PairKind::white_white ? "ww" : "wb"));
            CHECK(r.dominated);
            CHECK(r.bound >= 0.0);
            CHECK(r.exact_eps >= 0.0);
            CHECK(r.exact_eps <= 1.0 + 1e-12);
        }
    }

    SECTION("csv shape") {
        auto rows = dominance_table(6);
        std::string csv = dominance_to_csv(rows);
        CHECK(csv.rfind("N,k,threshold,kind,exact_eps,bound,dominated?\n", 0) == 0);
        CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + static_cast<long>(rows.size()));
        // every data line has exactly six commas
        std::stringstream ss(csv);
        std::string line;
        std::getline(ss, line);
        while (std::getline(ss, line))
            CHECK(std::count(line.begin(), line.end(), ',') == 6);
    }

    SECTION("sampled pairing stays under both thresholds at modest size") {
        auto rep = run_validation(10, 400, 200, 4000, 17);
        CHECK(rep.all_pass);
        REQUIRE(rep.mc.size() == 4); // two quantities, two budgets
        for (const auto& m : rep.mc) {
            INFO(m.quantity << " eps=" << m.eps_target);
            CHECK(m.pass);
            CHECK(m.violation_freq <= m.eps_target);
        }
    }
}

TEST_CASE("source optimizer") {
    RunConfig cfg = tiny_fixed_config();
    cfg.optimizer.enabled = true;
    cfg.optimizer.max_passes = 25;
    DeviceParams dev = cfg.device;
    dev.distance_km = 250.0;

    SECTION("optimized point beats the fixed defaults and stays feasible") {
        SourcePoint warm = config_start(cfg);
        auto fixed = evaluate_point(Pipeline::oper, dev,
                                    symmetric_protocol(warm, cfg.n_total), cfg.budgets,
                                    cfg.rate_params, cfg.mode);
        auto best = optimize_point(Pipeline::oper, dev, cfg, warm, 5);
        CHECK(best.rate >= fixed.report.rate);
        CHECK(best.rate > 0.0);
        CHECK(best.evaluations > 0);
        const auto& p = best.params;
        CHECK(p.mu_1 < p.mu_2);
        CHECK(p.p_1 + p.p_2 < 1.0);
        CHECK(p.eps_send > 0.0);
        CHECK(p.eps_send < 1.0);
        CHECK(p.p_z > 0.0);
        CHECK(p.p_z < 1.0);
    }

    SECTION("deterministic for a fixed seed and stream") {
        auto a = optimize_point(Pipeline::standard_twcc, dev, cfg, config_start(cfg), 11);
        auto b = optimize_point(Pipeline::standard_twcc, dev, cfg, config_start(cfg), 11);
        CHECK(a.rate == b.rate);
        CHECK(a.evaluations == b.evaluations);
        CHECK(a.params.mu_z == b.params.mu_z);
    }
}
