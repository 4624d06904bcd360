#pragma once

#include <cstdint>
#include <string>

#include "siolab/config.hpp"
#include "siolab/harness.hpp"

namespace siolab::detail {

/// What a scenario body gets: the config, the effective seed and the report
/// to fill with tables and verdicts.
struct ScenarioContext {
    const Config& cfg;
    std::uint64_t seed;
    ScenarioReport& report;

    /// Records a verdict; comparison is one of "<=", ">=", "==", "info".
    void check(const std::string& criterion, double value, const std::string& comparison, double threshold);
    CsvTable& table(const std::string& name, std::vector<std::string> header);
};

void scenario_kernel_validation(ScenarioContext& ctx);
void scenario_cone_separation(ScenarioContext& ctx);
void scenario_lemma_l2(ScenarioContext& ctx);
void scenario_separated_boundedness(ScenarioContext& ctx);
void scenario_pv_convergence(ScenarioContext& ctx);
void scenario_weak_pairing(ScenarioContext& ctx);
void scenario_cantor_growth(ScenarioContext& ctx);
void scenario_carleson(ScenarioContext& ctx);
void scenario_double_truncated(ScenarioContext& ctx);

/// Parameter box from [section] box_lo / box_hi (scalar or one value per axis).
ParamBox box_from_config(const Config& cfg, const std::string& section, int param_dim, double lo, double hi);

}  // namespace siolab::detail
