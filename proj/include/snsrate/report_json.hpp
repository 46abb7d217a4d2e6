#pragma once
// JSON form of the key-rate report; the schema string is bumped whenever a
// field is added, renamed, or changes meaning.

#include <json.hpp>

#include <snsrate/key_rate.hpp>

namespace snsrate {

inline constexpr const char* kReportSchema = "keyratereport/1";

inline nlohmann::json report_to_json(const KeyRateReport& r) {
    return nlohmann::json{{"schema", kReportSchema},
                          {"pipeline", pipeline_name(r.pipeline)},
                          {"rate", r.rate},
                          {"zero_clamped", r.zero_clamped},
                          {"phase_saturated", r.phase_saturated},
                          {"n_signal", r.n_signal},
                          {"e_ph", r.e_ph},
                          {"extract_bits", r.extract_bits},
                          {"ec_cost", r.ec_cost},
                          {"tail_cost", r.tail_cost},
                          {"eps_sec", r.eps_sec},
                          {"eps_cor", r.eps_cor},
                          {"eps_tol", r.eps_tol},
                          {"term_count", r.term_count}};
}

} // namespace snsrate
