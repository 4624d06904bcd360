// siolab command line: runs configured scenarios and the standalone tools.
//
//   siolab run <config>                      scenario named in [scenario] name
//   siolab validate-kernel <config>          kernel checks on [kernel]
//   siolab build-measure <config> --out <f>  writes the [measure] atoms
//   siolab pv <config>                       principal value study at [pv] point
//
// Exit codes: 0 pass, 1 fail, 2 configuration error.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>

#include "siolab/config.hpp"
#include "siolab/csv.hpp"
#include "siolab/harness.hpp"
#include "siolab/operators.hpp"
#include "siolab/parallel.hpp"

namespace {

struct Common {
    std::string config_path;
    std::uint64_t seed = 0;
    bool seed_given = false;
    int threads = 0;
    std::string out_dir;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("config", c.config_path, "configuration file")->required()->check(CLI::ExistingFile);
    cmd->add_option("--seed", c.seed, "64-bit seed overriding [scenario] seed");
    cmd->add_option("--threads", c.threads, "worker threads (default: all cores)")->check(CLI::PositiveNumber);
    cmd->add_option("--out-dir", c.out_dir, "output directory (default: $SIOLAB_OUT or ./siolab_out)");
}

std::string resolve_out_dir(const Common& c) {
    if (!c.out_dir.empty()) return c.out_dir;
    if (const char* env = std::getenv("SIOLAB_OUT"); env && *env) return env;
    return "siolab_out";
}

siolab::RunOptions options(const Common& c, CLI::App* cmd) {
    siolab::RunOptions o;
    if (cmd->count("--seed")) o.seed = c.seed;
    o.threads = c.threads;
    o.out_dir = resolve_out_dir(c);
    return o;
}

int report_and_exit(const siolab::ScenarioReport& r, const std::string& out_dir) {
    for (const auto& v : r.verdicts)
        std::cout << (v.pass ? "pass  " : "FAIL  ") << v.criterion << " = " << siolab::format_double(v.value) << " "
                  << v.comparison << " " << siolab::format_double(v.threshold) << "\n";
    if (!r.error.empty()) std::cerr << "error: " << r.error << "\n";
    std::cout << r.scenario << ": " << (r.exit_code == 0 ? "PASS" : r.exit_code == 1 ? "FAIL" : "CONFIG ERROR")
              << " (outputs in " << out_dir << ")\n";
    return r.exit_code;
}

int cmd_pv(const siolab::Config& cfg, const Common& c, CLI::App* cmd) {
    using namespace siolab;
    if (c.threads > 0) set_worker_count(c.threads);
    const DiscreteMeasure nu = build(measure_spec_from_config(cfg, "measure", "graph"));
    const Kernel k = kernel_from_config(cfg, "kernel", nu.dim());
    if (k.dim() != nu.dim()) throw ConfigError("pv: kernel and measure dimensions differ");
    Point x = cfg.get_doubles("pv.point", Point(static_cast<std::size_t>(nu.dim()), 0.0));
    if (x.size() != static_cast<std::size_t>(nu.dim())) throw ConfigError("pv: 'pv.point' needs n coordinates");
    if (cfg.get_bool("pv.snap_to_atom", true) && !nu.empty()) {
        std::size_t best = 0;
        double bd = std::numeric_limits<double>::infinity();
        for (std::size_t a = 0; a < nu.size(); ++a) {
            const double d = distance(nu.position(a), x);
            if (d < bd) {
                bd = d;
                best = a;
            }
        }
        x.assign(nu.position(best).begin(), nu.position(best).end());
    }
    const double floor = cfg.get_double("pv.floor_factor", 4.0);
    const double eps_min = cfg.get_double("pv.eps_min", floor * nu.resolution());
    const PVSchedule sched{cfg.get_double("pv.eps_start", nu.support_diameter() / 4.0), eps_min,
                           cfg.get_double("pv.ratio", 0.5)};
    const PVResult r = pv_estimate(nu, k, x, sched, cfg.get_double("pv.rel_tol", 1e-3), floor);
    (void)cmd;

    CsvTable t;
    t.name = "pv";
    t.header = {"eps", "value"};
    for (const auto& [e, v] : r.estimates) t.add_row({e, v});
    const std::string dir = resolve_out_dir(c);
    std::filesystem::create_directories(dir);
    const std::string prefix = cfg.get_string("output.prefix", "pv");
    std::ofstream(std::filesystem::path(dir) / (prefix + "_estimates.csv"), std::ios::binary) << t.to_string();
    std::ofstream(std::filesystem::path(dir) / (prefix + "_config.txt"), std::ios::binary) << cfg.echo();
    std::cout << "limit_estimate = " << format_double(r.limit_estimate) << "\n"
              << "tail = " << format_double(r.tail) << "  scale = " << format_double(r.scale) << "\n"
              << (r.converged ? "converged" : "not converged") << "\n";
    return r.converged ? 0 : 1;
}

int cmd_build_measure(const siolab::Config& cfg, const std::string& out) {
    const siolab::DiscreteMeasure mu = siolab::build(siolab::measure_spec_from_config(cfg, "measure", "graph"));
    std::ofstream os(out, std::ios::binary);
    if (!os) throw siolab::ConfigError("cannot write " + out);
    mu.write_text(os);
    std::cout << "wrote " << mu.size() << " atoms to " << out << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"siolab: truncated and maximal singular integrals on discrete measures"};
    app.require_subcommand(1);
    Common run_c, kv_c, bm_c, pv_c;
    std::string measure_out;
    auto* run = app.add_subcommand("run", "run the scenario named in the config");
    add_common(run, run_c);
    auto* kv = app.add_subcommand("validate-kernel", "validate the [kernel] section");
    add_common(kv, kv_c);
    auto* bm = app.add_subcommand("build-measure", "build the [measure] section and write its atoms");
    add_common(bm, bm_c);
    bm->add_option("--out", measure_out, "output file")->required();
    auto* pv = app.add_subcommand("pv", "principal value estimate at [pv] point");
    add_common(pv, pv_c);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : siolab::kExitConfig;
    }

    try {
        if (run->parsed()) {
            const auto cfg = siolab::Config::load(run_c.config_path);
            const auto opts = options(run_c, run);
            return report_and_exit(siolab::run_scenario(cfg, opts), opts.out_dir);
        }
        if (kv->parsed()) {
            auto cfg = siolab::Config::load(kv_c.config_path);
            cfg.set("scenario.name", "KernelValidation");
            const auto opts = options(kv_c, kv);
            return report_and_exit(siolab::run_scenario(cfg, opts), opts.out_dir);
        }
        if (bm->parsed()) return cmd_build_measure(siolab::Config::load(bm_c.config_path), measure_out);
        if (pv->parsed()) return cmd_pv(siolab::Config::load(pv_c.config_path), pv_c, pv);
    } catch (const siolab::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return siolab::kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return siolab::kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return siolab::kExitFail;
    }
    return siolab::kExitConfig;
}
