// Acceptance run: executes every shipped config three times (1 worker, 1
// worker again, 8 workers), then judges the ten acceptance criteria from the
// CSV files alone, with thresholds restated here rather than taken from the
// scenario verdicts. Criterion 3 runs its own brute-force oracle.
//
//   acceptance <config-dir> <work-dir>
//
// Prints one PASS/FAIL line per criterion; exit 0 only if all pass.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "siolab/config.hpp"
#include "siolab/harness.hpp"
#include "siolab/operators.hpp"
#include "siolab/parallel.hpp"
#include "siolab/rng.hpp"

namespace fs = std::filesystem;
using namespace siolab;

namespace {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t col(const std::string& name) const {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) throw std::runtime_error("missing column " + name);
        return static_cast<std::size_t>(it - header.begin());
    }
    double num(std::size_t r, const std::string& name) const { return std::stod(rows[r][col(name)]); }
    const std::string& str(std::size_t r, const std::string& name) const { return rows[r][col(name)]; }
};

std::vector<std::string> split_record(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

Table read_csv(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + p.string());
    Table t;
    std::string line;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (t.header.empty())
            t.header = split_record(line);
        else
            t.rows.push_back(split_record(line));
    }
    return t;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct SuiteRun {
    fs::path dir;
    std::map<std::string, ScenarioReport> reports;  // keyed by config file stem
};

SuiteRun run_suite(const std::vector<fs::path>& configs, const fs::path& dir, int threads) {
    SuiteRun out;
    out.dir = dir;
    fs::remove_all(dir);
    fs::create_directories(dir);
    for (const auto& c : configs) {
        RunOptions o;
        o.threads = threads;
        o.out_dir = dir.string();
        ScenarioReport r = run_scenario(Config::load(c.string()), o);
        std::printf("  [%d worker%s] %-28s exit %d  %.1f s\n", threads, threads == 1 ? "" : "s",
                    c.filename().string().c_str(), r.exit_code, r.runtime_seconds);
        std::fflush(stdout);
        out.reports.emplace(c.stem().string(), std::move(r));
    }
    return out;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

// 1 and 2: the pairing sweep table.
Outcome sweep_check(const fs::path& dir, bool fubini) {
    const Table t = read_csv(dir / "weak_pairing_sweep.csv");
    std::set<std::string> configs;
    double worst = 0.0;
    std::size_t bad = 0, too_big = 0;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        configs.insert(t.str(r, "config"));
        if (t.num(r, "atoms") > 1e4) ++too_big;
        const double v = fubini ? t.num(r, "fubini_residual") : std::fabs(t.num(r, "i1"));
        const double b = fubini ? t.num(r, "fubini_bound") : t.num(r, "cancellation_bound");
        if (!(v <= b)) ++bad;
        if (b > 0) worst = std::max(worst, v / b);
    }
    const bool ok = configs.size() >= 100 && bad == 0 && too_big == 0;
    return {ok, std::to_string(configs.size()) + " configs, " + std::to_string(t.rows.size()) + " (config, eps) rows, " +
                    std::to_string(bad) + " over bound, worst ratio " + fmt(worst)};
}

// 3: maximal() against the sup of T^eps over a grid containing every atom
// distance and a point below the smallest one.
Outcome breakpoint_oracle() {
    const auto start = std::chrono::steady_clock::now();
    Rng rng(0xACCE97);
    double worst = 0.0;
    std::size_t bad = 0;
    const int configs = 1000;
    for (int c = 0; c < configs; ++c) {
        const int n = 2 + static_cast<int>(rng.below(3));
        const std::size_t atoms = 1 + rng.below(200);
        DiscreteMeasure nu(n, 1e-9);
        Point p(static_cast<std::size_t>(n));
        for (std::size_t a = 0; a < atoms; ++a) {
            for (auto& v : p) v = rng.uniform(-1, 1);
            // occasional repeated distances
            if (a > 0 && rng.uniform() < 0.1)
                for (auto& v : p) v = -v;
            nu.add_atom(p, rng.uniform(0.01, 1.0));
        }
        const Kernel k = Kernel::riesz(n, static_cast<int>(rng.below(static_cast<std::uint64_t>(n))));
        std::vector<double> g(atoms);
        for (auto& v : g) v = rng.uniform(-1, 1);
        Point x(static_cast<std::size_t>(n));
        if (c % 4 == 0) {
            x.assign(nu.position(0).begin(), nu.position(0).end());
        } else {
            for (auto& v : x) v = 0.0;
        }

        std::vector<double> dist(atoms), term(atoms);
        Point d(static_cast<std::size_t>(n));
        for (std::size_t a = 0; a < atoms; ++a) {
            for (std::size_t j = 0; j < d.size(); ++j) d[j] = x[j] - nu.position(a)[j];
            dist[a] = norm(d);
            term[a] = dist[a] > 0 ? k(d) * nu.weight(a) * g[a] : 0.0;
        }
        std::vector<double> grid(dist);
        grid.push_back(0.0);
        long double sup = 0, scale = 0;
        for (std::size_t a = 0; a < atoms; ++a) scale += std::fabs(term[a]);
        for (double e : grid) {
            long double s = 0;
            for (std::size_t a = 0; a < atoms; ++a)
                if (dist[a] > e) s += term[a];
            sup = std::max(sup, std::fabs(s));
        }
        const double got = maximal(nu, k, g, x);
        const double err = std::fabs(got - static_cast<double>(sup));
        const double rel = err / std::max(static_cast<double>(scale), 1e-300);
        worst = std::max(worst, rel);
        if (!(rel <= 1e-12)) ++bad;
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return {bad == 0 && secs < 60.0, std::to_string(configs) + " configs, worst relative error " + fmt(worst) + ", " +
                                         fmt(secs) + " s"};
}

// 4
Outcome cone_check(const fs::path& dir) {
    const Table t = read_csv(dir / "cone_separation_cone.csv");
    std::size_t bad = 0, undersampled = 0;
    double min_slack = 1e300;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        if (t.num(r, "samples") - t.num(r, "skipped") < 1e5) ++undersampled;
        if (t.num(r, "violations") != 0) ++bad;
        if (!(t.num(r, "min_slack") >= -1e-12)) ++bad;
        min_slack = std::min(min_slack, t.num(r, "min_slack"));
    }
    return {t.rows.size() >= 4 && bad == 0 && undersampled == 0,
            std::to_string(t.rows.size()) + " graphs, min relative slack " + fmt(min_slack)};
}

// 5
Outcome lemma_check(const fs::path& dir, double runtime) {
    const Table t = read_csv(dir / "lemma_l2_check_lemma.csv");
    std::map<std::string, double> tuples;
    std::size_t violations = 0;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        if (t.str(r, "case") == "nontangential") {
            violations += static_cast<std::size_t>(t.num(r, "violations"));
            continue;
        }
        tuples[t.str(r, "dim") + "/" + t.str(r, "profile")] += t.num(r, "tuples");
        violations += static_cast<std::size_t>(t.num(r, "violations"));
    }
    bool covered = true;
    for (const char* dim : {"2", "3"})
        for (const char* prof : {"affine", "sawtooth", "cone"})
            covered = covered && tuples[std::string(dim) + "/" + prof] >= 1e4;
    return {covered && violations == 0 && runtime < 300.0,
            std::to_string(tuples.size()) + " (dim, profile) groups, " + std::to_string(violations) + " violations, " +
                fmt(runtime) + " s"};
}

// 6
Outcome kernel_check(const fs::path& dir) {
    const Table t = read_csv(dir / "kernel_validation_checks.csv");
    std::map<std::string, double> v;
    for (std::size_t r = 0; r < t.rows.size(); ++r) v[t.str(r, "check")] = t.num(r, "value");
    const bool ok = v.count("antisymmetry_residual") && v["antisymmetry_residual"] == 0.0 &&
                    v.count("size_sup") && v["size_sup"] <= 1.0 + 1e-9 && v.count("gradient_sup") &&
                    v["gradient_sup"] <= 1.0 + 1e-5 && v.count("gradient_fd_relative_error") &&
                    v["gradient_fd_relative_error"] <= 1e-5;
    return {ok, "antisymmetry " + fmt(v["antisymmetry_residual"]) + ", C0 sup " + fmt(v["size_sup"]) + ", C1 sup " +
                    fmt(v["gradient_sup"]) + ", fd error " + fmt(v["gradient_fd_relative_error"])};
}

// 7
Outcome boundedness_check(const fs::path& dir, double runtime) {
    const Table t = read_csv(dir / "separated_boundedness_ratios.csv");
    const Table f = read_csv(dir / "separated_boundedness_functions.csv");
    std::map<double, std::map<int, double>> best;  // p -> m -> max ratio
    for (std::size_t r = 0; r < t.rows.size(); ++r)
        best[t.num(r, "p")][static_cast<int>(t.num(r, "resolution"))] = t.num(r, "max_ratio");
    std::map<std::pair<double, int>, std::set<std::string>> funcs;
    for (std::size_t r = 0; r < f.rows.size(); ++r)
        funcs[{f.num(r, "p"), static_cast<int>(f.num(r, "resolution"))}].insert(f.str(r, "function"));
    bool ok = runtime < 600.0;
    double worst = 0.0;
    for (double p : {1.5, 2.0, 3.0}) {
        for (int m = 128; m <= 1024; m *= 2) {
            if (!best[p].count(m) || funcs[{p, m}].size() < 50) ok = false;
            if (m > 128 && best[p].count(m) && best[p].count(m / 2)) {
                const double growth = best[p][m] / best[p][m / 2];
                worst = std::max(worst, growth);
                if (!(growth <= 1.5)) ok = false;
            }
        }
    }
    return {ok, "worst growth " + fmt(worst) + " (limit 1.5), " + fmt(runtime) + " s"};
}

// 8
Outcome pv_check(const fs::path& dir) {
    const Table t = read_csv(dir / "pv_convergence_tails.csv");
    std::map<std::string, std::map<int, std::pair<double, double>>> rows;  // profile/axis -> m -> (tail, scale)
    for (std::size_t r = 0; r < t.rows.size(); ++r)
        rows[t.str(r, "profile") + " axis " + t.str(r, "axis")][static_cast<int>(t.num(r, "resolution"))] = {
            t.num(r, "tail"), t.num(r, "scale")};
    bool ok = true;
    std::set<std::string> profiles;
    double worst = 0.0;
    for (auto& [key, by_m] : rows) {
        profiles.insert(key.substr(0, key.find(' ')));
        for (int m : {256, 1024, 4096})
            if (!by_m.count(m)) ok = false;
        if (!ok) break;
        const auto [tail, scale] = by_m[4096];
        worst = std::max(worst, tail / scale);
        if (!(tail <= 1e-2 * scale)) ok = false;
        double prev = by_m[256].first;
        for (int m : {1024, 4096}) {
            const double cur = by_m[m].first;
            if (!(cur <= 1.1 * prev + 1e-12 * scale)) ok = false;
            prev = cur;
        }
    }
    ok = ok && profiles.count("affine") && profiles.count("bump");
    return {ok, std::to_string(rows.size()) + " (graph, component) series, worst tail/scale at m=4096 " + fmt(worst)};
}

// 9
Outcome control_check(const fs::path& dir) {
    const Table t = read_csv(dir / "cantor_control_ratios.csv");
    std::map<int, double> by_gen;
    for (std::size_t r = 0; r < t.rows.size(); ++r) by_gen[static_cast<int>(t.num(r, "resolution"))] = t.num(r, "max_ratio");
    bool ok = true;
    std::string trend;
    for (int g = 3; g <= 6; ++g) {
        if (!by_gen.count(g)) {
            ok = false;
            continue;
        }
        trend += (trend.empty() ? "" : " -> ") + fmt(by_gen[g]);
        if (g > 3 && by_gen.count(g - 1) && !(by_gen[g] > by_gen[g - 1])) ok = false;
    }
    return {ok, "ratios over generations 3..6: " + trend};
}

// 10
Outcome determinism(const std::vector<SuiteRun>& runs) {
    std::map<std::string, std::string> ref;
    for (const auto& e : fs::directory_iterator(runs[0].dir))
        if (e.path().extension() == ".csv") ref[e.path().filename().string()] = slurp(e.path());
    std::size_t mismatches = 0;
    for (std::size_t i = 1; i < runs.size(); ++i) {
        std::size_t seen = 0;
        for (const auto& e : fs::directory_iterator(runs[i].dir)) {
            if (e.path().extension() != ".csv") continue;
            ++seen;
            const auto it = ref.find(e.path().filename().string());
            if (it == ref.end() || it->second != slurp(e.path())) ++mismatches;
        }
        if (seen != ref.size()) ++mismatches;
    }
    return {mismatches == 0 && !ref.empty(),
            std::to_string(ref.size()) + " CSV files x " + std::to_string(runs.size()) + " runs, " +
                std::to_string(mismatches) + " mismatches"};
}

}  // namespace

int main(int argc, char** argv) {
    if (argc != 3) {
        std::cerr << "usage: acceptance <config-dir> <work-dir>\n";
        return 2;
    }
    const fs::path config_dir = argv[1];
    const fs::path work = argv[2];
    std::vector<fs::path> configs;
    for (const auto& e : fs::directory_iterator(config_dir))
        if (e.path().extension() == ".ini") configs.push_back(e.path());
    std::sort(configs.begin(), configs.end());
    if (configs.empty()) {
        std::cerr << "no configs in " << config_dir << "\n";
        return 2;
    }

    std::printf("running %zu configs three times\n", configs.size());
    std::vector<SuiteRun> runs;
    runs.push_back(run_suite(configs, work / "run1_threads1", 1));
    runs.push_back(run_suite(configs, work / "run2_threads1", 1));
    runs.push_back(run_suite(configs, work / "run3_threads8", 8));
    set_worker_count(0);

    const SuiteRun& base = runs[0];
    bool scenarios_ok = true;
    for (const auto& [name, r] : base.reports) {
        if (r.exit_code != kExitPass) {
            scenarios_ok = false;
            std::printf("  scenario %s exited %d %s\n", name.c_str(), r.exit_code, r.error.c_str());
        }
    }
    auto runtime = [&](const std::string& stem) {
        const auto it = base.reports.find(stem);
        return it == base.reports.end() ? 1e300 : it->second.runtime_seconds;
    };

    struct Row {
        int id;
        const char* name;
        Outcome o;
    };
    std::vector<Row> rows;
    auto guarded = [&](int id, const char* name, auto&& f) {
        try {
            rows.push_back({id, name, f()});
        } catch (const std::exception& e) {
            rows.push_back({id, name, {false, std::string("error: ") + e.what()}});
        }
    };
    const fs::path d = base.dir;
    guarded(1, "exact cancellation of I1", [&] {
        Outcome o = sweep_check(d, false);
        o.detail += ", sweep scenario " + fmt(runtime("weak_pairing")) + " s incl. trace";
        return o;
    });
    guarded(2, "discrete Fubini identity", [&] { return sweep_check(d, true); });
    guarded(3, "breakpoint oracle equivalence", [&] { return breakpoint_oracle(); });
    guarded(4, "cone separation inequality", [&] { return cone_check(d); });
    guarded(5, "local L2 lemma constants", [&] { return lemma_check(d, runtime("lemma_l2")); });
    guarded(6, "kernel class validation", [&] { return kernel_check(d); });
    guarded(7, "separated boundedness ratios", [&] { return boundedness_check(d, runtime("separated_boundedness")); });
    guarded(8, "principal value convergence", [&] { return pv_check(d); });
    guarded(9, "Cantor negative control trend", [&] { return control_check(d); });
    guarded(10, "determinism across runs and workers", [&] { return determinism(runs); });

    bool all = true;
    std::printf("\n");
    for (const auto& r : rows) {
        std::printf("criterion %2d %-38s %s  %s\n", r.id, r.name, r.o.pass ? "PASS" : "FAIL", r.o.detail.c_str());
        all = all && r.o.pass;
    }
    std::printf("scenario exit codes: %s\n", scenarios_ok ? "all 0" : "some nonzero");
    std::printf("acceptance: %s\n", all && scenarios_ok ? "PASS" : "FAIL");
    return all && scenarios_ok ? 0 : 1;
}
