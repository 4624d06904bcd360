#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "siolab/config.hpp"
#include "siolab/csv.hpp"
#include "siolab/geometry.hpp"
#include "siolab/kernel.hpp"
#include "siolab/measure.hpp"
#include "siolab/rng.hpp"
#include "siolab/simple_function.hpp"

namespace siolab {

inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitConfig = 2;

/// One pass/fail decision. The metric and threshold are written to the
/// verdicts CSV, so every verdict can be recomputed from the files.
struct Verdict {
    std::string criterion;
    double value = 0.0;
    std::string comparison;  // "<=", ">=", "==", "info"
    double threshold = 0.0;
    bool pass = true;
};

struct ScenarioReport {
    std::string scenario;
    std::uint64_t seed = 0;
    std::vector<CsvTable> tables;
    std::vector<Verdict> verdicts;
    double runtime_seconds = 0.0;
    std::string config_echo;
    std::string error;  // set when the run aborted
    int exit_code = kExitPass;

    bool passed() const;
    CsvTable verdict_table() const;
    /// Human-readable summary: config echo, verdicts, runtime.
    std::string text() const;
};

struct RunOptions {
    std::optional<std::uint64_t> seed;  // overrides [scenario] seed
    int threads = 0;                      // 0 keeps the current worker count
    std::string out_dir;                  // empty: no files are written
};

/// Scenario tags accepted in `[scenario] name`.
std::vector<std::string> scenario_names();

/// Runs the scenario named in the config. Never throws: configuration
/// problems (including resolution-floor violations) yield exit code 2, failed
/// verdicts exit code 1. Writes <prefix>_<table>.csv, <prefix>_verdicts.csv
/// and <prefix>_report.txt when out_dir is set; runtime only appears in the
/// report text, never in a CSV.
ScenarioReport run_scenario(const Config& cfg, const RunOptions& opts = {});

/// Writes the report files; returns the paths written.
std::vector<std::string> write_report(const ScenarioReport& report, const std::string& out_dir,
                                      const std::string& prefix);

// Builders shared by the scenarios, the CLI and the python module.
// Each reads keys from one config section.

/// [section] dim, profile = affine|sawtooth|cone|bump, slope, offset,
/// amplitude, period, width, angle (rotation in the (0, n-1) plane), shift.
LipschitzGraph graph_from_config(const Config& cfg, const std::string& section = "graph",
                                 const std::string& profile_override = "", int dim_override = 0);

/// [section] family = riesz|odd, dim, axis, exponents, c0, c1.
Kernel kernel_from_config(const Config& cfg, const std::string& section = "kernel", int default_dim = 2);

/// [section] family = graph|cantor|uniform|slab, with family specific keys
/// (cells, box_lo, box_hi, offset, thickness, below, generation, shape,
/// center, radius, half_widths, density). Graph based families read the
/// graph from `graph_section`.
MeasureSpec measure_spec_from_config(const Config& cfg, const std::string& section = "measure",
                                     const std::string& graph_section = "graph");

/// Random simple function: 1 to 5 terms, shapes inside the box [lo, hi],
/// coefficients uniform in [-1, 1].
SimpleFunction random_simple_function(Rng& rng, SimpleSpace space, const Point& lo, const Point& hi);

}  // namespace siolab
