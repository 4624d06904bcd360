#include "siolab/harness.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "scenarios.hpp"
#include "siolab/parallel.hpp"

namespace siolab {

namespace {

using ScenarioFn = void (*)(detail::ScenarioContext&);

const std::map<std::string, ScenarioFn>& registry() {
    static const std::map<std::string, ScenarioFn> r = {
        {"KernelValidation", detail::scenario_kernel_validation},
        {"ConeSeparation", detail::scenario_cone_separation},
        {"LemmaL2Check", detail::scenario_lemma_l2},
        {"SeparatedBoundedness", detail::scenario_separated_boundedness},
        {"PVConvergence", detail::scenario_pv_convergence},
        {"WeakPairing", detail::scenario_weak_pairing},
        {"CantorGrowth", detail::scenario_cantor_growth},
        {"CarlesonEmbedding", detail::scenario_carleson},
        {"DoubleTruncated", detail::scenario_double_truncated},
    };
    return r;
}

std::string lowercase_tag(const std::string& tag) {
    // CamelCase to snake_case; acronym runs stay together ("PVConvergence" -> "pv_convergence")
    std::string out;
    for (std::size_t i = 0; i < tag.size(); ++i) {
        const auto c = static_cast<unsigned char>(tag[i]);
        if (std::isupper(c) && i > 0) {
            const auto prev = static_cast<unsigned char>(tag[i - 1]);
            const bool next_lower = i + 1 < tag.size() && std::islower(static_cast<unsigned char>(tag[i + 1]));
            if (std::islower(prev) || std::isdigit(prev) || (std::isupper(prev) && next_lower)) out += '_';
        }
        out += static_cast<char>(std::tolower(c));
    }
    return out;
}

Point point_from(const std::vector<double>& v, int n, const std::string& key) {
    if (v.size() != static_cast<std::size_t>(n))
        throw ConfigError("config: '" + key + "' needs " + std::to_string(n) + " coordinates");
    return v;
}

}  // namespace

bool ScenarioReport::passed() const {
    if (!error.empty()) return false;
    for (const auto& v : verdicts)
        if (!v.pass) return false;
    return true;
}

CsvTable ScenarioReport::verdict_table() const {
    CsvTable t;
    t.name = "verdicts";
    t.header = {"criterion", "value", "comparison", "threshold", "pass"};
    for (const auto& v : verdicts)
        t.add_row({v.criterion, v.value, v.comparison, v.threshold, std::string(v.pass ? "pass" : "fail")});
    return t;
}

std::string ScenarioReport::text() const {
    std::ostringstream os;
    os << "scenario: " << scenario << "\n";
    os << "seed: " << seed << "\n";
    os << "result: " << (passed() ? "PASS" : "FAIL") << " (exit " << exit_code << ")\n";
    if (!error.empty()) os << "error: " << error << "\n";
    os << "runtime_seconds: " << format_double(runtime_seconds) << "\n\n";
    os << "verdicts:\n";
    for (const auto& v : verdicts)
        os << "  [" << (v.pass ? "pass" : "FAIL") << "] " << v.criterion << ": " << format_double(v.value) << " "
           << v.comparison << " " << format_double(v.threshold) << "\n";
    os << "\ntables:";
    for (const auto& t : tables) os << " " << t.name << "(" << t.rows.size() << " rows)";
    os << "\n\neffective config:\n" << config_echo;
    return os.str();
}

std::vector<std::string> scenario_names() {
    std::vector<std::string> out;
    for (const auto& [k, v] : registry()) out.push_back(k);
    return out;
}

std::vector<std::string> write_report(const ScenarioReport& report, const std::string& out_dir,
                                      const std::string& prefix) {
    std::filesystem::create_directories(out_dir);
    std::vector<std::string> paths;
    auto emit = [&](const std::string& file, const std::string& content) {
        const std::string path = (std::filesystem::path(out_dir) / file).string();
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + path);
        out << content;
        paths.push_back(path);
    };
    for (const auto& t : report.tables) emit(prefix + "_" + t.name + ".csv", t.to_string());
    emit(prefix + "_verdicts.csv", report.verdict_table().to_string());
    emit(prefix + "_report.txt", report.text());
    return paths;
}

ScenarioReport run_scenario(const Config& input, const RunOptions& opts) {
    ScenarioReport report;
    Config cfg = input;
    if (opts.seed) cfg.set("scenario.seed", std::to_string(*opts.seed));
    const auto start = std::chrono::steady_clock::now();
    std::string prefix;
    try {
        if (opts.threads > 0) set_worker_count(opts.threads);
        report.scenario = cfg.get_string("scenario.name");
        const auto it = registry().find(report.scenario);
        if (it == registry().end()) throw ConfigError("config: unknown scenario '" + report.scenario + "'");
        report.seed = cfg.get_u64("scenario.seed", 20240601);
        prefix = cfg.get_string("output.prefix", lowercase_tag(report.scenario));
        detail::ScenarioContext ctx{cfg, report.seed, report};
        it->second(ctx);
        const auto unused = cfg.unused_keys();
        if (!unused.empty()) {
            std::string list;
            for (const auto& k : unused) list += (list.empty() ? "" : ", ") + k;
            throw ConfigError("config: unrecognized keys: " + list);
        }
        report.exit_code = report.passed() ? kExitPass : kExitFail;
    } catch (const ConfigError& e) {
        report.error = e.what();
        report.exit_code = kExitConfig;
    } catch (const std::invalid_argument& e) {
        report.error = e.what();
        report.exit_code = kExitConfig;
    } catch (const std::length_error& e) {
        report.error = e.what();
        report.exit_code = kExitConfig;
    } catch (const std::exception& e) {
        report.error = e.what();
        report.exit_code = kExitFail;
    }
    report.config_echo = cfg.echo();
    report.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!opts.out_dir.empty()) {
        if (prefix.empty()) prefix = "scenario";
        write_report(report, opts.out_dir, prefix);
    }
    return report;
}

LipschitzGraph graph_from_config(const Config& cfg, const std::string& section, const std::string& profile_override,
                                 int dim_override) {
    const std::string s = section + ".";
    const int n = dim_override > 0 ? dim_override : static_cast<int>(cfg.get_int(s + "dim", 2));
    check_dim(n);
    const auto m = static_cast<std::size_t>(n - 1);
    const std::string name = profile_override.empty() ? cfg.get_string(s + "profile", "sawtooth") : profile_override;
    Profile profile;
    if (name == "affine" || name == "flat") {
        auto slope = cfg.get_doubles(s + "slope", std::vector<double>(m, 0.0));
        if (slope.size() == 1 && m > 1) slope.assign(m, slope[0]);
        if (slope.size() != m) throw ConfigError("config: '" + s + "slope' needs n-1 entries");
        profile = AffineProfile{slope, cfg.get_double(s + "offset", 0.0)};
    } else if (name == "sawtooth") {
        profile = SawtoothProfile{cfg.get_double(s + "amplitude", 0.25), cfg.get_double(s + "period", 0.5)};
    } else if (name == "cone") {
        profile = ConeProfile{cfg.get_double(s + "cone_slope", 1.0)};
    } else if (name == "bump") {
        profile = SmoothBumpProfile{cfg.get_double(s + "amplitude", 0.5), cfg.get_double(s + "width", 0.5)};
    } else {
        throw ConfigError("config: unknown graph profile '" + name + "'");
    }
    const double angle = cfg.get_double(s + "angle", 0.0);
    Rotation rot = angle == 0.0 ? Rotation{} : Rotation::givens(n, 0, n - 1, angle);
    return LipschitzGraph(n, std::move(profile), std::move(rot), cfg.get_double(s + "shift", 0.0));
}

Kernel kernel_from_config(const Config& cfg, const std::string& section, int default_dim) {
    const std::string s = section + ".";
    const int n = static_cast<int>(cfg.get_int(s + "dim", default_dim));
    check_dim(n);
    const std::string family = cfg.get_string(s + "family", "riesz");
    if (family == "riesz") {
        const Kernel def = Kernel::riesz(n, 0);
        const int axis = static_cast<int>(cfg.get_int(s + "axis", 0));
        return Kernel::riesz(n, axis, cfg.get_double(s + "c0", def.c0()), cfg.get_double(s + "c1", def.c1()));
    }
    if (family == "odd") {
        std::vector<int> exps;
        for (long long e : cfg.get_ints(s + "exponents", {})) exps.push_back(static_cast<int>(e));
        return Kernel::odd_homogeneous(n, exps, cfg.get_double(s + "c0"), cfg.get_double(s + "c1"));
    }
    throw ConfigError("config: unknown kernel family '" + family + "'");
}

namespace detail {

ParamBox box_from_config(const Config& cfg, const std::string& section, int param_dim, double lo, double hi) {
    const auto m = static_cast<std::size_t>(param_dim);
    auto read = [&](const std::string& key, double def) {
        auto v = cfg.get_doubles(section + "." + key, {def});
        if (v.size() == 1) v.assign(m, v[0]);
        if (v.size() != m) throw ConfigError("config: '" + section + "." + key + "' needs 1 or n-1 entries");
        return v;
    };
    ParamBox box{read("box_lo", lo), read("box_hi", hi)};
    for (std::size_t k = 0; k < m; ++k)
        if (!(box.hi[k] > box.lo[k])) throw ConfigError("config: empty parameter box in [" + section + "]");
    return box;
}

}  // namespace detail

MeasureSpec measure_spec_from_config(const Config& cfg, const std::string& section, const std::string& graph_section) {
    const std::string s = section + ".";
    const std::string family = cfg.get_string(s + "family");
    if (family == "cantor") return CantorSpec{static_cast<int>(cfg.get_int(s + "generation", 4))};
    if (family == "graph" || family == "slab") {
        LipschitzGraph graph = graph_from_config(cfg, graph_section);
        const ParamBox box = detail::box_from_config(cfg, section, graph.dim() - 1, -1.0, 1.0);
        const int cells = static_cast<int>(cfg.get_int(s + "cells", 64));
        if (family == "graph") return GraphMeasureSpec{graph, box, cells, cfg.get_double(s + "offset", 0.0)};
        return SlabSpec{graph, box, cfg.get_double(s + "thickness", 0.25), cells, cfg.get_bool(s + "below", false)};
    }
    if (family == "uniform") {
        const int n = static_cast<int>(cfg.get_int(s + "dim", 2));
        check_dim(n);
        const std::string kind = cfg.get_string(s + "shape", "ball");
        const Point center = point_from(cfg.get_doubles(s + "center", Point(static_cast<std::size_t>(n), 0.0)), n,
                                        s + "center");
        const int cells = static_cast<int>(cfg.get_int(s + "cells", 32));
        const double density = cfg.get_double(s + "density", 1.0);
        if (kind == "ball") return UniformOnShapeSpec{Shape::ball(center, cfg.get_double(s + "radius", 1.0)), cells, density};
        if (kind == "rectangle") {
            const Point hw = point_from(cfg.get_doubles(s + "half_widths", Point(static_cast<std::size_t>(n), 1.0)), n,
                                        s + "half_widths");
            const double angle = cfg.get_double(s + "angle", 0.0);
            return UniformOnShapeSpec{
                Shape::rectangle(center, hw, angle == 0.0 ? Rotation{} : Rotation::givens(n, 0, 1, angle)), cells,
                density};
        }
        throw ConfigError("config: unknown shape '" + kind + "'");
    }
    throw ConfigError("config: unknown measure family '" + family + "'");
}

SimpleFunction random_simple_function(Rng& rng, SimpleSpace space, const Point& lo, const Point& hi) {
    const std::size_t n = lo.size();
    double diag = 0.0;
    for (std::size_t k = 0; k < n; ++k) diag += (hi[k] - lo[k]) * (hi[k] - lo[k]);
    diag = std::sqrt(diag);
    if (!(diag > 0)) diag = 1.0;
    const auto terms = 1 + static_cast<std::size_t>(rng.below(5));
    std::vector<SimpleFunction::Term> out;
    for (std::size_t t = 0; t < terms; ++t) {
        Point c(n);
        for (std::size_t k = 0; k < n; ++k) c[k] = rng.uniform(lo[k], hi[k]);
        const double coeff = rng.uniform(-1.0, 1.0);
        if (space == SimpleSpace::Balls) {
            out.push_back({coeff, Shape::ball(c, diag * rng.uniform(0.05, 0.35))});
        } else {
            std::vector<double> hw(n);
            for (auto& w : hw) w = diag * rng.uniform(0.05, 0.35);
            const double angle = rng.uniform(0.0, 3.141592653589793);
            out.push_back({coeff, Shape::rectangle(c, hw, Rotation::givens(static_cast<int>(n), 0, 1, angle))});
        }
    }
    return SimpleFunction(space, std::move(out));
}

}  // namespace siolab
