#include "scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "siolab/operators.hpp"
#include "siolab/pairing.hpp"
#include "siolab/parallel.hpp"
#include "siolab/summation.hpp"

namespace siolab::detail {

void ScenarioContext::check(const std::string& criterion, double value, const std::string& comparison,
                            double threshold) {
    bool pass = true;
    if (comparison == "<=") pass = value <= threshold;
    else if (comparison == ">=") pass = value >= threshold;
    else if (comparison == "==") pass = value == threshold;
    else if (comparison != "info") throw std::logic_error("unknown comparison " + comparison);
    report.verdicts.push_back({criterion, value, comparison, threshold, pass});
}

namespace {

CsvTable make_table(std::string name, std::vector<std::string> header) {
    CsvTable t;
    t.name = std::move(name);
    t.header = std::move(header);
    return t;
}

std::string fmt(double v) { return format_double(v); }

/// value / limit with 0/0 = 0, so "ratio <= 1" expresses "value <= limit".
double ratio_to(double value, double limit) {
    if (limit > 0) return value / limit;
    return value == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
}

Point random_direction(Rng& rng, std::size_t m) {
    Point v(m);
    double r = 0.0;
    while (r < 1e-12) {
        for (auto& c : v) c = rng.normal();
        r = norm(v);
    }
    for (auto& c : v) c /= r;
    return v;
}

Point to_ambient(const LipschitzGraph& g, const Point& u, double t) {
    Point q(u);
    q.push_back(t);
    Point p(q.size());
    g.to_ambient(q, p);
    return p;
}

Point param_of(const LipschitzGraph& g, std::span<const double> p) {
    Point q(p.size());
    g.to_frame(p, q);
    q.pop_back();
    return q;
}

/// Point strictly inside the cone at u0 with height tau above the apex.
Point sample_in_cone(Rng& rng, const LipschitzGraph& g, const Point& u0, double L, double tau) {
    const std::size_t m = u0.size();
    const Point dir = random_direction(rng, m);
    const double rho = 0.999 * std::pow(rng.uniform(), 1.0 / static_cast<double>(m));
    Point u(u0);
    for (std::size_t k = 0; k < m; ++k) u[k] += tau / (4.0 * L) * rho * dir[k];
    return to_ambient(g, u, g.height(u0) + tau);
}

double aperture_for(const Config& cfg, const std::string& section, const LipschitzGraph& g) {
    const double fixed = cfg.get_double(section + ".L", 0.0);
    const double factor = cfg.get_double(section + ".L_factor", 1.25);
    const double L = fixed > 0 ? fixed : factor * std::max(1.0, g.lip());
    if (!(L > 1.0) || !(L > g.lip()))
        throw ConfigError("config: cone aperture L must exceed max(1, Lip f) = " + fmt(std::max(1.0, g.lip())));
    return L;
}

std::vector<int> increasing_ints(const Config& cfg, const std::string& key, const std::vector<long long>& def) {
    std::vector<int> out;
    for (long long v : cfg.get_ints(key, def)) {
        if (v <= 0) throw ConfigError("config: '" + key + "' entries must be positive");
        if (!out.empty() && v <= out.back()) throw ConfigError("config: '" + key + "' must be increasing");
        out.push_back(static_cast<int>(v));
    }
    if (out.empty()) throw ConfigError("config: '" + key + "' is empty");
    return out;
}

std::size_t positive_count(const Config& cfg, const std::string& key, long long def) {
    const long long v = cfg.get_int(key, def);
    if (v <= 0) throw ConfigError("config: '" + key + "' must be positive");
    return static_cast<std::size_t>(v);
}

SimpleSpace space_from(const std::string& s) {
    if (s == "balls") return SimpleSpace::Balls;
    if (s == "rectangles") return SimpleSpace::Rectangles;
    throw ConfigError("config: function space must be balls or rectangles");
}

/// Indices of the atom sets above, on and below the graph.
struct SideIndex {
    std::vector<std::size_t> above, on, below;
};

SideIndex index_sides(const DiscreteMeasure& mu, const LipschitzGraph& g) {
    SideIndex s;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        switch (g.classify(mu.position(i))) {
            case Side::Above: s.above.push_back(i); break;
            case Side::On: s.on.push_back(i); break;
            case Side::Below: s.below.push_back(i); break;
        }
    }
    return s;
}

std::vector<std::size_t> merged(std::vector<std::size_t> a, const std::vector<std::size_t>& b) {
    a.insert(a.end(), b.begin(), b.end());
    std::sort(a.begin(), a.end());
    return a;
}

double max_weight(const DiscreteMeasure& mu) {
    double w = 0.0;
    for (double v : mu.weights()) w = std::max(w, std::fabs(v));
    return w;
}

/// Checks "tail shrinks across resolutions within the noise allowance" and
/// records one verdict per consecutive pair.
void check_shrinking(ScenarioContext& ctx, const std::string& label, const std::vector<int>& res,
                     const std::vector<double>& tails, const std::vector<double>& scales, double noise) {
    for (std::size_t r = 1; r < tails.size(); ++r) {
        const double limit = (1.0 + noise) * tails[r - 1] + 1e-12 * scales[r];
        ctx.check(label + "_tail_shrinks_m" + std::to_string(res[r]), ratio_to(tails[r], limit), "<=", 1.0);
    }
}

}  // namespace

// ---------------------------------------------------------------------------

void scenario_kernel_validation(ScenarioContext& ctx) {
    const Config& cfg = ctx.cfg;
    const Kernel k = kernel_from_config(cfg, "kernel", 2);
    const std::size_t samples = positive_count(cfg, "validation.samples", 1000);
    const double anti = validate_antisymmetry(k, samples, ctx.seed);
    const BoundCheck size = validate_size(k, samples, ctx.seed + 1);
    const BoundCheck grad = validate_gradient(k, samples, ctx.seed + 2);

    CsvTable t = make_table("checks", {"kernel", "check", "value", "declared", "pass"});
    t.add_row({k.describe(), std::string("antisymmetry_residual"), anti, 0.0, std::string(anti == 0.0 ? "pass" : "fail")});
    t.add_row({k.describe(), std::string("size_sup"), size.sup, size.declared, std::string(size.ok ? "pass" : "fail")});
    t.add_row({k.describe(), std::string("gradient_sup"), grad.sup, grad.declared, std::string(grad.ok ? "pass" : "fail")});

    ctx.check("antisymmetry_residual", anti, "<=", cfg.get_double("validation.antisymmetry_tol", 0.0));
    ctx.check("size_sup_over_c0", size.sup / size.declared, "<=", 1.0 + 1e-9);
    ctx.check("gradient_sup_over_c1", grad.sup / grad.declared, "<=", 1.0 + 1e-4);

    if (k.family() == KernelFamily::RieszComponent) {
        // |grad K(x)| |x|^n = sqrt(1 + (n^2 - 2n) c^2) with c = x_i / |x|
        const double fd_tol = cfg.get_double("validation.fd_tol", 1e-5);
        const int n = k.dim();
        Rng rng(ctx.seed + 3);
        const KernelFunction fn = as_function(k);
        double worst = 0.0;
        for (std::size_t s = 0; s < samples; ++s) {
            Point x = random_direction(rng, static_cast<std::size_t>(n));
            const double c = x[static_cast<std::size_t>(k.axis())];
            const double r = rng.log_uniform(1e-3, 1e3);
            for (auto& v : x) v *= r;
            const double exact = std::sqrt(1.0 + (n * n - 2.0 * n) * c * c) * std::pow(r, -n);
            worst = std::max(worst, std::fabs(norm(fd_gradient(fn, x)) - exact) / exact);
        }
        t.add_row({k.describe(), std::string("gradient_fd_relative_error"), worst, fd_tol,
                   std::string(worst <= fd_tol ? "pass" : "fail")});
        ctx.check("gradient_fd_relative_error", worst, "<=", fd_tol);
    }
    ctx.report.tables.push_back(std::move(t));
}

// ---------------------------------------------------------------------------

void scenario_cone_separation(ScenarioContext& ctx) {
    const Config& cfg = ctx.cfg;
    const auto profiles = cfg.get_strings("cone.profiles", {"affine", "sawtooth", "cone", "bump"});
    const int n = static_cast<int>(cfg.get_int("cone.dim", 2));
    const std::size_t samples = positive_count(cfg, "cone.samples", 100000);
    const double half = cfg.get_double("cone.box", 1.0);
    const double tol = cfg.get_double("cone.slack_tol", 1e-12);

    CsvTable t = make_table("cone", {"profile", "lip", "L", "samples", "skipped", "violations", "min_slack"});
    for (std::size_t p = 0; p < profiles.size(); ++p) {
        const LipschitzGraph g = graph_from_config(cfg, "graph", profiles[p], n);
        const double L = aperture_for(cfg, "cone", g);
        const auto m = static_cast<std::size_t>(n - 1);
        std::vector<double> slack(samples);
        const Rng base = Rng(ctx.seed).fork(p + 1);
        parallel_for(samples, [&](std::size_t i) {
            Rng r = base.fork(i);
            Point u0(m);
            for (auto& v : u0) v = r.uniform(-half, half);
            const Cone cone(g, u0, L);
            const Point y = sample_in_cone(r, g, u0, L, r.log_uniform(1e-3, 10.0));
            const Point dir = random_direction(r, m);
            const double s = r.uniform() < 0.1 ? 0.0 : r.log_uniform(1e-4, 10.0);
            const double depth = r.uniform() < 0.1 ? 0.0 : r.log_uniform(1e-12, 10.0);
            Point ux(u0);
            for (std::size_t k = 0; k < m; ++k) ux[k] += s * dir[k];
            const Point x = to_ambient(g, ux, g.height(ux) - depth);
            if (!cone.contains(y) || g.classify(x) == Side::Above) {
                slack[i] = std::numeric_limits<double>::quiet_NaN();
                return;
            }
            const double dy0 = distance(y, cone.apex());
            slack[i] = (distance(y, x) - dy0 / (8.0 * L)) / dy0;
        });
        long long skipped = 0, violations = 0;
        double worst = std::numeric_limits<double>::infinity();
        for (double s : slack) {
            if (std::isnan(s)) {
                ++skipped;
                continue;
            }
            worst = std::min(worst, s);
            if (s < -tol) ++violations;
        }
        t.add_row({profiles[p], g.lip(), L, static_cast<long long>(samples), skipped, violations, worst});
        ctx.check(profiles[p] + "_violations", static_cast<double>(violations), "<=", 0.0);
        ctx.check(profiles[p] + "_min_slack", worst, ">=", -tol);
    }
    ctx.report.tables.push_back(std::move(t));
}

// ---------------------------------------------------------------------------

void scenario_lemma_l2(ScenarioContext& ctx) {
    const Config& cfg = ctx.cfg;
    const auto dims = cfg.get_ints("lemma.dims", {2, 3});
    const auto cells = cfg.get_ints("lemma.cells", {256, 24});
    if (cells.size() != dims.size()) throw ConfigError("config: 'lemma.cells' needs one entry per dimension");
    const auto profiles = cfg.get_strings("lemma.profiles", {"affine", "sawtooth", "cone"});
    const std::size_t points = positive_count(cfg, "lemma.points", 100);
    const std::size_t per_point = positive_count(cfg, "lemma.per_point", 100);
    const double nu_offset = cfg.get_double("lemma.nu_offset", 0.05);
    const auto extra_atoms = static_cast<std::size_t>(cfg.get_int("lemma.random_atoms", 200));
    const double slack_tol = cfg.get_double("lemma.slack_tol", 1e-9);
    const auto mesh_points = static_cast<std::size_t>(cfg.get_int("lemma.mesh_points", 5));
    const int mesh_depth = static_cast<int>(cfg.get_int("lemma.mesh_depth", 3));
    const double mesh_height = cfg.get_double("lemma.mesh_height", 1.0);
    if (!(nu_offset > 0)) throw ConfigError("config: 'lemma.nu_offset' must be positive (nu strictly below the graph)");

    CsvTable t = make_table("lemma", {"dim", "profile", "case", "tuples", "violations", "min_slack", "d1", "d2", "cn"});
    for (std::size_t di = 0; di < dims.size(); ++di) {
        const int n = static_cast<int>(dims[di]);
        const auto m = static_cast<std::size_t>(n - 1);
        for (std::size_t pi = 0; pi < profiles.size(); ++pi) {
            const LipschitzGraph g = graph_from_config(cfg, "graph", profiles[pi], n);
            const double L = aperture_for(cfg, "lemma", g);
            const ParamBox box{std::vector<double>(m, -1.0), std::vector<double>(m, 1.0)};
            DiscreteMeasure nu = build(GraphMeasureSpec{g, box, static_cast<int>(cells[di]), -nu_offset});
            const Rng base = Rng(ctx.seed).fork(1000 * di + pi + 1);
            {
                Rng r = base.fork(0);
                const double w = 0.25 / static_cast<double>(std::max<std::size_t>(extra_atoms, 1));
                for (std::size_t a = 0; a < extra_atoms; ++a) {
                    Point u(m);
                    for (auto& v : u) v = r.uniform(-1.0, 1.0);
                    nu.add_atom(to_ambient(g, u, g.height(u) - r.log_uniform(1e-4, 0.5)), w);
                }
            }
            for (std::size_t a = 0; a < nu.size(); ++a)
                if (g.classify(nu.position(a)) != Side::Below)
                    throw ConfigError("lemma: the measure must lie strictly below the graph");

            std::vector<Kernel> kernels;
            for (int axis = 0; axis < n; ++axis) kernels.push_back(Kernel::riesz(n, axis));
            const BoundConstants bc = bound_constants(kernels[0], L);

            struct PointResult {
                long long tuples[2] = {0, 0}, violations[2] = {0, 0};
                double slack[2] = {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
                long long mesh = 0, mesh_violations = 0;
                double mesh_slack = std::numeric_limits<double>::infinity();
            };
            std::vector<PointResult> results(points);
            parallel_for(points, [&](std::size_t i) {
                Rng r = base.fork(i + 1);
                const Kernel& k = kernels[i % kernels.size()];
                Point u0(m);
                for (auto& v : u0) v = r.uniform(-0.8, 0.8);
                const Point x = g.point_at(u0);
                std::vector<double> gv(nu.size());
                for (auto& v : gv) v = r.uniform(-1.0, 1.0);
                const double tstar = maximal(nu, k, gv, x);
                const HlMaximal hl = hl_maximal(nu, gv, x);
                const Cone cone(g, u0, L);
                PointResult& out = results[i];
                for (std::size_t j = 0; j < per_point; ++j) {
                    const Point y = sample_in_cone(r, g, u0, L, r.log_uniform(1e-3, 1.0));
                    const double dist = distance(x, y);
                    const double eps = dist * (j % 2 == 0 ? r.log_uniform(1e-3, 1.0) : r.log_uniform(1.0, 100.0));
                    const int c = eps < dist ? 0 : 1;
                    const double lhs = std::fabs(truncated(nu, k, gv, y, eps));
                    const double rhs = 3.0 * tstar + (c == 0 ? bc.d1 : bc.d2) * hl.value;
                    ++out.tuples[c];
                    if (lhs > rhs * (1.0 + slack_tol)) ++out.violations[c];
                    out.slack[c] = std::min(out.slack[c], rhs > 0 ? (rhs - lhs) / rhs : (lhs == 0 ? 0.0 : -1.0));
                }
                if (i < mesh_points) {
                    const double nt = nontangential_max(
                        [&](std::span<const double> y) { return maximal(nu, k, gv, y); }, cone, mesh_height,
                        mesh_depth);
                    const double rhs = bc.cn * (tstar + hl.value);
                    out.mesh = 1;
                    if (nt > rhs * (1.0 + slack_tol)) out.mesh_violations = 1;
                    out.mesh_slack = rhs > 0 ? (rhs - nt) / rhs : 0.0;
                }
            });
            const char* names[2] = {"eps_below_r", "eps_at_least_r"};
            for (int c = 0; c < 2; ++c) {
                long long tuples = 0, viol = 0;
                double slack = std::numeric_limits<double>::infinity();
                for (const auto& pr : results) {
                    tuples += pr.tuples[c];
                    viol += pr.violations[c];
                    slack = std::min(slack, pr.slack[c]);
                }
                t.add_row({static_cast<long long>(n), profiles[pi], std::string(names[c]), tuples, viol, slack, bc.d1,
                           bc.d2, bc.cn});
                ctx.check("n" + std::to_string(n) + "_" + profiles[pi] + "_" + names[c] + "_violations",
                          static_cast<double>(viol), "<=", 0.0);
            }
            long long mesh = 0, mviol = 0;
            double mslack = std::numeric_limits<double>::infinity();
            for (const auto& pr : results) {
                mesh += pr.mesh;
                mviol += pr.mesh_violations;
                mslack = std::min(mslack, pr.mesh_slack);
            }
            if (mesh > 0) {
                t.add_row({static_cast<long long>(n), profiles[pi], std::string("nontangential_mesh"), mesh, mviol, mslack,
                           bc.d1, bc.d2, bc.cn});
                ctx.check("n" + std::to_string(n) + "_" + profiles[pi] + "_nontangential_violations",
                          static_cast<double>(mviol), "<=", 0.0);
            }
        }
    }
    ctx.report.tables.push_back(std::move(t));
}

// ---------------------------------------------------------------------------

void scenario_separated_boundedness(ScenarioContext& ctx) {
    const Config& cfg = ctx.cfg;
    const std::string setup = cfg.get_string("scenario.setup", "separated");
    const bool control = setup == "cantor_control";
    if (!control && setup != "separated") throw ConfigError("config: scenario.setup must be separated or cantor_control");

    const std::vector<int> res = increasing_ints(
        cfg, "boundedness.resolutions",
        control ? std::vector<long long>{3, 4, 5, 6} : std::vector<long long>{128, 256, 512, 1024});
    const auto ps = cfg.get_doubles("boundedness.p", control ? std::vector<double>{2.0} : std::vector<double>{1.5, 2.0, 3.0});
    const std::size_t nfun = positive_count(cfg, "boundedness.functions", 50);
    const SimpleSpace space = space_from(cfg.get_string("boundedness.space", "balls"));
    const double growth_limit = cfg.get_double("boundedness.growth_limit", 1.5);

    std::vector<DiscreteMeasure> nus, mus;
    int n = 2;
    if (control) {
        for (int gen : res) {
            nus.push_back(build(CantorSpec{gen}));
            mus.push_back(nus.back());
        }
    } else {
        const LipschitzGraph g = graph_from_config(cfg, "graph");
        n = g.dim();
        const ParamBox box = box_from_config(cfg, "boundedness", n - 1, 0.0, 1.0);
        const double nu_offset = cfg.get_double("boundedness.nu_offset", 0.05);
        const double thickness = cfg.get_double("boundedness.thickness", 0.25);
        if (!(nu_offset > 0)) throw ConfigError("config: 'boundedness.nu_offset' must be positive");
        for (int m : res) {
            nus.push_back(build(GraphMeasureSpec{g, box, m, -nu_offset}));
            mus.push_back(build(SlabSpec{g, box, thickness, m}));
            for (std::size_t a = 0; a < nus.back().size(); ++a)
                if (g.classify(nus.back().position(a)) != Side::Below)
                    throw ConfigError("boundedness: nu must lie strictly below the graph");
            for (std::size_t a = 0; a < mus.back().size(); ++a)
                if (g.classify(mus.back().position(a)) == Side::Below)
                    throw ConfigError("boundedness: mu must not charge the region below the graph");
        }
    }
    const Kernel k = kernel_from_config(cfg, "kernel", n);
    if (k.dim() != n) throw ConfigError("config: kernel dimension does not match the measures");
    for (const auto& mu : mus)
        if (mu.empty()) throw ConfigError("boundedness: empty measure");

    // Random simple functions, drawn once inside the support box of the
    // coarsest nu and shared by every resolution.
    const auto [lo, hi] = nus.front().bounding_box();
    std::vector<SimpleFunction> funcs;
    for (std::size_t j = 0; j < nfun; ++j) {
        Rng r = Rng(ctx.seed).fork(j + 1);
        for (int attempt = 0;; ++attempt) {
            if (attempt == 1000) throw ConfigError("boundedness: could not draw a nonzero simple function");
            SimpleFunction f = random_simple_function(r, space, lo, hi);
            const auto v = density_values(nus.front(), f);
            if (std::any_of(v.begin(), v.end(), [](double x) { return x != 0.0; })) {
                funcs.push_back(std::move(f));
                break;
            }
        }
    }

    CsvTable ratios = make_table("ratios", {"resolution", "atoms_mu", "atoms_nu", "p", "max_ratio", "argmax", "growth"});
    CsvTable per = make_table("functions", {"resolution", "p", "function", "ratio"});
    std::vector<std::vector<double>> best(ps.size(), std::vector<double>(res.size(), 0.0));
    for (std::size_t ri = 0; ri < res.size(); ++ri) {
        const DiscreteMeasure& nu = nus[ri];
        const DiscreteMeasure& mu = mus[ri];
        std::vector<std::vector<double>> dens;
        for (const auto& f : funcs) dens.push_back(density_values(nu, f));
        const std::vector<Point> pts = atom_positions(mu);
        const auto tstar = maximal_batch(nu, k, dens, pts);
        std::vector<double> column(mu.size());
        for (std::size_t pi = 0; pi < ps.size(); ++pi) {
            double top = 0.0;
            long long arg = -1;
            for (std::size_t j = 0; j < funcs.size(); ++j) {
                const double den = lp_norm(nu, dens[j], ps[pi]);
                if (den == 0.0) continue;  // g vanishes on this discretization
                for (std::size_t a = 0; a < mu.size(); ++a) column[a] = tstar[a][j];
                const double ratio = lp_norm(mu, column, ps[pi]) / den;
                per.add_row({static_cast<long long>(res[ri]), ps[pi], static_cast<long long>(j), ratio});
                if (ratio > top) {
                    top = ratio;
                    arg = static_cast<long long>(j);
                }
            }
            best[pi][ri] = top;
            CsvCell growth = std::string();
            if (ri > 0) growth = ratio_to(top, best[pi][ri - 1]);
            ratios.add_row({static_cast<long long>(res[ri]), static_cast<long long>(mu.size()),
                            static_cast<long long>(nu.size()), ps[pi], top, arg, growth});
        }
    }
    for (std::size_t pi = 0; pi < ps.size(); ++pi) {
        if (control) {
            long long non_increasing = 0;
            for (std::size_t ri = 1; ri < res.size(); ++ri)
                if (!(best[pi][ri] > best[pi][ri - 1])) ++non_increasing;
            ctx.check("control_p" + fmt(ps[pi]) + "_non_increasing_steps", static_cast<double>(non_increasing), "info", 0.0);
        } else {
            for (std::size_t ri = 1; ri < res.size(); ++ri)
                ctx.check("ratio_growth_p" + fmt(ps[pi]) + "_m" + std::to_string(res[ri]),
                          ratio_to(best[pi][ri], best[pi][ri - 1]), "<=", growth_limit);
        }
    }
    ctx.report.tables.push_back(std::move(ratios));
    ctx.report.tables.push_back(std::move(per));
}

// ---------------------------------------------------------------------------

void scenario_pv_convergence(ScenarioContext& ctx) {
    const Config& cfg = ctx.cfg;
    const auto profiles = cfg.get_strings("pv.profiles", {"affine", "bump"});
    const int n = static_cast<int>(cfg.get_int("pv.dim", 2));
    const auto axes = cfg.get_ints("pv.axes", {0, 1});
    const std::vector<int> res = increasing_ints(cfg, "pv.resolutions", {256, 1024, 4096});
    const auto point = cfg.get_doubles("pv.point", {0.3});
    const double eps_start = cfg.get_double("pv.eps_start", 0.5);
    const double eps_min_cfg = cfg.get_double("pv.eps_min", 0.0);
    const double floor = cfg.get_double("pv.floor_factor", 4.0);
    const double tail_tol = cfg.get_double("pv.tail_tol", 1e-2);
    const double noise = cfg.get_double("pv.noise", 0.1);
    const auto m = static_cast<std::size_t>(n - 1);
    Point u_star(m, point.empty() ? 0.0 : point[0]);
    if (point.size() == m) u_star = point;
    else if (point.size() != 1) throw ConfigError("config: 'pv.point' needs 1 or n-1 entries");
    const ParamBox box = box_from_config(cfg, "pv", n - 1, -1.0, 1.0);

    CsvTable est = make_table("estimates", {"profile", "axis", "resolution", "eps", "value"});
    CsvTable tails = make_table("tails", {"profile", "axis", "resolution", "atoms", "h", "eps_min", "entries", "tail",
                                          "scale", "tail_over_scale", "limit_estimate"});
    for (const auto& prof : profiles) {
        const LipschitzGraph g = graph_from_config(cfg, "graph", prof, n);
        std::vector<std::vector<double>> tail(axes.size()), scale(axes.size());
        for (int mres : res) {
            const DiscreteMeasure nu = build(GraphMeasureSpec{g, box, mres, 0.0});
            std::size_t best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (std::size_t a = 0; a < nu.size(); ++a) {
                const double d = distance(param_of(g, nu.position(a)), u_star);
                if (d < best_d) {
                    best_d = d;
                    best = a;
                }
            }
            const auto xs = nu.position(best);
            const Point x(xs.begin(), xs.end());
            const PVSchedule sched{eps_start, eps_min_cfg > 0 ? eps_min_cfg : floor * nu.resolution(), 0.5};
            for (std::size_t ai = 0; ai < axes.size(); ++ai) {
                const Kernel k = Kernel::riesz(n, static_cast<int>(axes[ai]));
                const PVResult r = pv_estimate(nu, k, x, sched, tail_tol, floor);
                for (const auto& [e, v] : r.estimates)
                    est.add_row({prof, static_cast<long long>(axes[ai]), static_cast<long long>(mres), e, v});
                tails.add_row({prof, static_cast<long long>(axes[ai]), static_cast<long long>(mres),
                               static_cast<long long>(nu.size()), nu.resolution(), r.estimates.back().first,
                               static_cast<long long>(r.estimates.size()), r.tail, r.scale, ratio_to(r.tail, r.scale),
                               r.limit_estimate});
                tail[ai].push_back(r.tail);
                scale[ai].push_back(r.scale);
            }
        }
        for (std::size_t ai = 0; ai < axes.size(); ++ai) {
            const std::string label = prof + "_axis" + std::to_string(axes[ai]);
            ctx.check(label + "_tail_over_scale_m" + std::to_string(res.back()),
                      ratio_to(tail[ai].back(), scale[ai].back()), "<=", tail_tol);
            check_shrinking(ctx, label, res, tail[ai], scale[ai], noise);
        }
    }
    ctx.report.tables.push_back(std::move(est));
    ctx.report.tables.push_back(std::move(tails));
}

// ---------------------------------------------------------------------------

namespace {

struct SweepRow {
    std::string family, kernel;
    std::size_t atoms = 0;
    std::vector<double> eps;
    std::vector<IDecomposition> id;
    std::vector<FubiniCheck> fb;
};

SweepRow sweep_configuration(Rng r, std::size_t max_atoms) {
    SweepRow row;
    DiscreteMeasure mu;
    const auto fam = r.below(4);
    const std::size_t side2 = std::max<std::size_t>(16, max_atoms);
    if (fam == 0) {
        const char* names[3] = {"affine", "sawtooth", "bump"};
        const auto which = r.below(3);
        Profile prof = which == 0   ? Profile(AffineProfile{{r.uniform(-1.0, 1.0)}, 0.0})
                       : which == 1 ? Profile(SawtoothProfile{0.25, 0.5})
                                    : Profile(SmoothBumpProfile{0.5, 0.5});
        const LipschitzGraph g(2, prof);
        const int cells = 16 + static_cast<int>(r.below(side2 - 15));
        mu = build(GraphMeasureSpec{g, ParamBox{{-1.0}, {1.0}}, cells, 0.0});
        row.family = std::string("graph2d_") + names[which];
    } else if (fam == 1) {
        const LipschitzGraph g(3, SmoothBumpProfile{0.5, 0.5});
        const auto side = static_cast<std::size_t>(std::sqrt(static_cast<double>(side2)));
        const int cells = 4 + static_cast<int>(r.below(std::max<std::size_t>(side, 5) - 4));
        mu = build(GraphMeasureSpec{g, ParamBox{{-1.0, -1.0}, {1.0, 1.0}}, cells, 0.0});
        row.family = "graph3d_bump";
    } else if (fam == 2) {
        int gen = 3;
        while (gen < 6 && std::pow(4.0, gen + 1) <= static_cast<double>(side2) && r.below(2) == 0) ++gen;
        mu = build(CantorSpec{gen});
        row.family = "cantor";
    } else {
        const int n = 2 + static_cast<int>(r.below(2));
        const double per_axis = std::pow(static_cast<double>(side2), 1.0 / n);
        const int cells = 4 + static_cast<int>(r.below(std::max<std::size_t>(static_cast<std::size_t>(per_axis), 5) - 4));
        const Point c(static_cast<std::size_t>(n), 0.0);
        mu = build(UniformOnShapeSpec{r.below(2) == 0 ? Shape::ball(c, 1.0)
                                                       : Shape::rectangle(c, std::vector<double>(static_cast<std::size_t>(n), 1.0)),
                                      cells, 1.0});
        row.family = "uniform" + std::to_string(n) + "d";
    }
    const int n = mu.dim();
    Kernel k = Kernel::riesz(n, static_cast<int>(r.below(static_cast<std::uint64_t>(n))));
    if (r.below(2) == 0) {
        std::vector<int> e(static_cast<std::size_t>(n));
        int deg = 0;
        do {
            deg = 0;
            for (auto& v : e) deg += (v = static_cast<int>(r.below(3)));
        } while (deg % 2 == 0);
        k = Kernel::odd_homogeneous(n, e, 1.0, static_cast<double>(deg + n));
    }
    row.kernel = k.describe();
    row.atoms = mu.size();

    const auto [lo, hi] = mu.bounding_box();
    Point span(lo.size());
    double diag = 0.0;
    for (std::size_t j = 0; j < lo.size(); ++j) {
        span[j] = hi[j] - lo[j];
        diag += span[j] * span[j];
    }
    diag = std::sqrt(diag);
    const bool balls = r.below(2) == 0;
    auto random_shape = [&](const Point& center) {
        if (balls) return Shape::ball(center, diag * r.uniform(0.15, 0.5));
        std::vector<double> hw(lo.size());
        for (auto& w : hw) w = diag * r.uniform(0.1, 0.4);
        return Shape::rectangle(center, hw, Rotation::givens(n, 0, 1, r.uniform(0.0, 3.141592653589793)));
    };
    Point pc(lo.size()), qc(lo.size());
    for (std::size_t j = 0; j < lo.size(); ++j) {
        pc[j] = r.uniform(lo[j], hi[j]);
        qc[j] = pc[j] + r.uniform(-0.3, 0.3) * diag;
    }
    const Shape P = random_shape(pc);
    const Shape Q = random_shape(qc);
    row.eps = default_pairing_schedule(mu, 8);
    for (double e : row.eps) {
        row.id.push_back(i_decomposition(mu, k, P, Q, e));
        row.fb.push_back(fubini_check(mu, k, P, Q, e));
    }
    return row;
}

}  // namespace

void scenario_weak_pairing(ScenarioContext& ctx) {
    const Config& cfg = ctx.cfg;

    // Cancellation sweep over seeded random configurations.
    const auto sweep = static_cast<std::size_t>(cfg.get_int("pairing.sweep_configs", 100));
    const std::size_t max_atoms = positive_count(cfg, "pairing.sweep_max_atoms", 1000);
    std::vector<SweepRow> rows(sweep);
    const Rng sweep_base = Rng(ctx.seed).fork(7);
    parallel_for(sweep, [&](std::size_t c) { rows[c] = sweep_configuration(sweep_base.fork(c), max_atoms); });
    CsvTable st = make_table("sweep", {"config", "family", "kernel", "atoms", "eps", "i1", "i2", "i3", "i4",
                                       "undecomposed", "cancellation_bound", "completeness_residual", "fubini_residual",
                                       "fubini_bound"});
    double worst_i1 = 0.0, worst_complete = 0.0, worst_fubini = 0.0;
    for (std::size_t c = 0; c < rows.size(); ++c) {
        const auto& row = rows[c];
        for (std::size_t e = 0; e < row.eps.size(); ++e) {
            const auto& id = row.id[e];
            const auto& fb = row.fb[e];
            const double complete = std::fabs(id.total() - id.undecomposed);
            st.add_row({static_cast<long long>(c), row.family, row.kernel, static_cast<long long>(row.atoms), row.eps[e],
                        id.i1, id.i2, id.i3, id.i4, id.undecomposed, id.bound(), complete, fb.residual, fb.bound});
            worst_i1 = std::max(worst_i1, ratio_to(std::fabs(id.i1), id.bound()));
            worst_complete = std::max(worst_complete, ratio_to(complete, id.bound()));
            worst_fubini = std::max(worst_fubini, ratio_to(fb.residual, fb.bound));
        }
    }
    if (sweep > 0) {
        ctx.check("sweep_i1_over_bound", worst_i1, "<=", 1.0);
        ctx.check("sweep_completeness_over_bound", worst_complete, "<=", 1.0);
        ctx.check("sweep_fubini_over_bound", worst_fubini, "<=", 1.0);
    }
    ctx.report.tables.push_back(std::move(st));

    // Convergence trace for two overlapping balls on a configured measure.
    const std::vector<int> res = increasing_ints(cfg, "pairing.resolutions", {4096, 8192, 16384});
    MeasureSpec spec = measure_spec_from_config(cfg, "measure", "graph");
    const auto P = cfg.get_doubles("pairing.P_center", {-0.2, 0.0});
    const auto Q = cfg.get_doubles("pairing.Q_center", {0.3, 0.0});
    const double pr = cfg.get_double("pairing.P_radius", 0.6);
    const double qr = cfg.get_double("pairing.Q_radius", 0.6);
    // 0: halve from eps_start down to the resolution floor
    const auto count = static_cast<std::size_t>(cfg.get_int("pairing.schedule_count", 0));
    const double eps_start = cfg.get_double("pairing.eps_start", 0.0);
    const double floor = cfg.get_double("pairing.floor_factor", 4.0);
    const double tail_tol = cfg.get_double("pairing.tail_tol", 1e-3);
    const double noise = cfg.get_double("pairing.noise", 0.1);
    const SimpleFunction f = SimpleFunction::indicator(Shape::ball(Q, qr));
    const SimpleFunction g = SimpleFunction::indicator(Shape::ball(P, pr));

    CsvTable trace = make_table("trace", {"resolution", "term", "eps", "value", "I1", "I2", "I3", "I4", "i1_bound"});
    CsvTable tails = make_table("tails", {"resolution", "atoms", "eps_min", "tail", "max_abs_value", "tail_over_value",
                                          "routing_residual", "routing_bound"});
    std::vector<double> tail_list, scale_list;
    double worst_trace_i1 = 0.0;
    for (int m : res) {
        std::visit(
            [m](auto& s) {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, CantorSpec>) s.generation = m;
                else s.cells_per_axis = m;
            },
            spec);
        const DiscreteMeasure mu = build(spec);
        if (static_cast<int>(P.size()) != mu.dim() || static_cast<int>(Q.size()) != mu.dim())
            throw ConfigError("config: pairing centers must match the measure dimension");
        const Kernel k = kernel_from_config(cfg, "kernel", mu.dim());
        std::vector<double> sched;
        const double e0 = eps_start > 0 ? eps_start : mu.support_diameter() / 4.0;
        for (std::size_t i = 0; count > 0 ? i < count : e0 * std::ldexp(1.0, -static_cast<int>(i)) >= floor * mu.resolution();
             ++i)
            sched.push_back(e0 * std::ldexp(1.0, -static_cast<int>(i)));
        const PairingTrace tr = convergence_study(mu, k, f, g, sched, floor);
        const double maxw = max_weight(mu);
        double max_abs = 0.0;
        for (std::size_t e = 0; e < sched.size(); ++e) {
            const double ib = cancellation_bound(mu.size(), k.c0() * std::pow(sched[e], 1.0 - mu.dim()) * maxw * maxw);
            double s1 = 0, s2 = 0, s3 = 0, s4 = 0;
            for (const auto& row : tr.rows) {
                if (row.eps != sched[e]) continue;
                trace.add_row({static_cast<long long>(m),
                               std::to_string(row.outer_term) + ":" + std::to_string(row.inner_term), row.eps,
                               row.weight * (row.i1 + row.i2 + row.i3 + row.i4), row.i1, row.i2, row.i3, row.i4, ib});
                worst_trace_i1 = std::max(worst_trace_i1, ratio_to(std::fabs(row.i1), ib));
                s1 += row.weight * row.i1;
                s2 += row.weight * row.i2;
                s3 += row.weight * row.i3;
                s4 += row.weight * row.i4;
            }
            trace.add_row({static_cast<long long>(m), std::string("total"), sched[e], tr.values[e], s1, s2, s3, s4, ib});
            max_abs = std::max(max_abs, std::fabs(tr.values[e]));
        }
        tails.add_row({static_cast<long long>(m), static_cast<long long>(mu.size()), sched.back(), tr.cauchy_tail, max_abs,
                       ratio_to(tr.cauchy_tail, max_abs), tr.routing_residual, tr.routing_bound});
        ctx.check("routing_residual_over_bound_m" + std::to_string(m), ratio_to(tr.routing_residual, tr.routing_bound),
                  "<=", 1.0);
        tail_list.push_back(tr.cauchy_tail);
        scale_list.push_back(max_abs);
    }
    ctx.check("trace_i1_over_bound", worst_trace_i1, "<=", 1.0);
    check_shrinking(ctx, "pairing", res, tail_list, scale_list, noise);
    ctx.check("pairing_tail_over_value_m" + std::to_string(res.back()), ratio_to(tail_list.back(), scale_list.back()),
              "<=", tail_tol);
    ctx.report.tables.push_back(std::move(trace));
    ctx.report.tables.push_back(std::move(tails));
}

// ---------------------------------------------------------------------------

void scenario_cantor_growth(ScenarioContext& ctx) {
    const Config& cfg = ctx.cfg;
    const std::vector<int> gens = increasing_ints(cfg, "cantor.generations", {3, 4, 5, 6, 7});
    const std::size_t radii = positive_count(cfg, "cantor.radii", 40);
    const std::size_t max_centers = positive_count(cfg, "cantor.max_centers", 1024);
    const double stability = cfg.get_double("cantor.stability", 1.2);

    CsvTable t = make_table("growth", {"generation", "atoms", "h", "centers", "growth_constant", "lower_density"});
    double min_lower = std::numeric_limits<double>::infinity();
    std::vector<double> growths;
    for (int gen : gens) {
        const DiscreteMeasure mu = build(CantorSpec{gen});
        const std::size_t stride = std::max<std::size_t>(1, mu.size() / max_centers);
        const std::vector<Point> centers = atom_positions(mu, stride);
        const double h = mu.resolution();
        const double growth = growth_constant(mu, centers, geometric_grid(h, 2.0, radii));
        const double lower = lower_density(mu, centers, geometric_grid(h, 1.0 - 1e-12, radii));
        t.add_row({static_cast<long long>(gen), static_cast<long long>(mu.size()), h,
                   static_cast<long long>(centers.size()), growth, lower});
        growths.push_back(growth);
        min_lower = std::min(min_lower, lower);
    }
    for (std::size_t i = 1; i < growths.size(); ++i)
        ctx.check("growth_step_g" + std::to_string(gens[i]),
                  std::max(growths[i] / growths[i - 1], growths[i - 1] / growths[i]), "<=", stability);
    ctx.check("lower_density_min", min_lower, ">=", cfg.get_double("cantor.lower_density_floor", 0.0));
    ctx.report.tables.push_back(std::move(t));
}

// ---------------------------------------------------------------------------

void scenario_carleson(ScenarioContext& ctx) {
    const Config& cfg = ctx.cfg;
    const LipschitzGraph g = graph_from_config(cfg, "graph");
    const int n = g.dim();
    const auto m = static_cast<std::size_t>(n - 1);
    const std::vector<int> res = increasing_ints(cfg, "carleson.resolutions", {64, 128, 256, 512});
    const ParamBox box = box_from_config(cfg, "carleson", n - 1, 0.0, 1.0);
    const double thickness = cfg.get_double("carleson.thickness", 0.25);
    const double p = cfg.get_double("carleson.p", 2.0);
    const auto names = cfg.get_strings("carleson.functions", {"one", "gaussian", "coordinate"});
    Point gc(m, 0.5);
    gc.push_back(0.35);
    gc = cfg.get_doubles("carleson.gaussian_center", gc);
    if (gc.size() != static_cast<std::size_t>(n)) throw ConfigError("config: 'carleson.gaussian_center' needs n entries");
    const double gw = cfg.get_double("carleson.gaussian_width", 0.15);
    const int axis = static_cast<int>(cfg.get_int("carleson.coordinate_axis", n - 1));
    if (axis < 0 || axis >= n) throw ConfigError("config: 'carleson.coordinate_axis' out of range");
    const double L = aperture_for(cfg, "carleson", g);
    const double height_cap = cfg.get_double("carleson.height_cap", 1.0);
    const int depth = static_cast<int>(cfg.get_int("carleson.mesh_depth", 5));
    const double growth_limit = cfg.get_double("carleson.growth_limit", 1.5);
    if (!(p >= 1)) throw ConfigError("config: 'carleson.p' must be >= 1");

    std::vector<std::function<double(std::span<const double>)>> fns;
    for (const auto& name : names) {
        if (name == "one") fns.emplace_back([](std::span<const double>) { return 1.0; });
        else if (name == "zero") fns.emplace_back([](std::span<const double>) { return 0.0; });
        else if (name == "gaussian")
            fns.emplace_back([gc, gw](std::span<const double> x) {
                double d2 = 0.0;
                for (std::size_t j = 0; j < x.size(); ++j) d2 += (x[j] - gc[j]) * (x[j] - gc[j]);
                return std::exp(-d2 / (gw * gw));
            });
        else if (name == "coordinate")
            fns.emplace_back([&g, axis, thickness](std::span<const double> x) {
                const double s = g.signed_height(x);
                return (s >= 0.0 && s <= thickness) ? x[static_cast<std::size_t>(axis)] : 0.0;
            });
        else throw ConfigError("config: unknown carleson test function '" + name + "'");
    }

    CsvTable t = make_table("embedding", {"resolution", "function", "lhs", "rhs", "ratio"});
    std::vector<std::vector<double>> ratios(fns.size());
    for (int mres : res) {
        const DiscreteMeasure mu = build(SlabSpec{g, box, thickness, mres});
        const DiscreteMeasure sigma = build(GraphMeasureSpec{g, box, mres, 0.0});
        for (std::size_t fi = 0; fi < fns.size(); ++fi) {
            CompensatedSum lhs;
            for (std::size_t a = 0; a < mu.size(); ++a)
                lhs += std::pow(std::fabs(fns[fi](mu.position(a))), p) * mu.weight(a);
            std::vector<double> terms(sigma.size());
            parallel_for(sigma.size(), [&](std::size_t a) {
                const Cone cone(g, param_of(g, sigma.position(a)), L);
                terms[a] = std::pow(nontangential_max(fns[fi], cone, height_cap, depth), p) * sigma.weight(a);
            });
            CompensatedSum rhs;
            for (double v : terms) rhs += v;
            if (rhs.value() > 0) {
                const double ratio = lhs.value() / rhs.value();
                ratios[fi].push_back(ratio);
                t.add_row({static_cast<long long>(mres), names[fi], lhs.value(), rhs.value(), ratio});
            } else {
                t.add_row({static_cast<long long>(mres), names[fi], lhs.value(), rhs.value(), std::string("skipped")});
            }
        }
    }
    for (std::size_t fi = 0; fi < fns.size(); ++fi)
        for (std::size_t r = 1; r < ratios[fi].size(); ++r)
            ctx.check(names[fi] + "_ratio_growth_m" + std::to_string(res[r]), ratio_to(ratios[fi][r], ratios[fi][r - 1]),
                      "<=", growth_limit);
    ctx.report.tables.push_back(std::move(t));
}

// ---------------------------------------------------------------------------

void scenario_double_truncated(ScenarioContext& ctx) {
    const Config& cfg = ctx.cfg;
    const LipschitzGraph g = graph_from_config(cfg, "graph");
    const int n = g.dim();
    const Kernel k = kernel_from_config(cfg, "kernel", n);
    const std::vector<int> res = increasing_ints(cfg, "bli.resolutions", {128, 256, 512});
    const ParamBox box = box_from_config(cfg, "bli", n - 1, -1.0, 1.0);
    const double thickness = cfg.get_double("bli.thickness", 0.125);
    const double below_thickness = cfg.get_double("bli.below_thickness", thickness);
    const bool include_graph = cfg.get_bool("bli.include_graph", true);
    const bool include_below = cfg.get_bool("bli.include_below", true);
    const double eps_start = cfg.get_double("bli.eps_start", 1.0);
    const double floor = cfg.get_double("bli.floor_factor", 4.0);
    const double noise = cfg.get_double("bli.noise", 0.1);

    CsvTable trace = make_table("trace", {"resolution", "eps", "lower_value", "upper_value", "relabel_residual",
                                          "identity_residual", "bound"});
    CsvTable tails = make_table("tails", {"resolution", "atoms", "above", "on", "below", "eps_min", "entries",
                                          "lower_tail", "upper_tail", "limit_estimate", "max_abs_value"});
    std::vector<double> tail_list, scale_list;
    for (int m : res) {
        DiscreteMeasure mu = build(SlabSpec{g, box, thickness, m});
        auto append = [&mu](const DiscreteMeasure& other) {
            for (std::size_t a = 0; a < other.size(); ++a) mu.add_atom(other.position(a), other.weight(a));
            mu.set_resolution(std::max(mu.resolution(), other.resolution()));
        };
        if (include_below) append(build(SlabSpec{g, box, below_thickness, m, true}));
        if (include_graph) append(build(GraphMeasureSpec{g, box, m, 0.0}));
        const SideIndex s = index_sides(mu, g);

        std::vector<double> sched;
        for (double e = eps_start; e >= floor * mu.resolution(); e *= 0.5) sched.push_back(e);
        if (sched.size() < 4)
            throw ConfigError("bli: fewer than 4 truncations above the resolution floor at m = " + std::to_string(m));

        const auto not_below = merged(s.above, s.on);
        const auto not_above = merged(s.on, s.below);
        // lower: outer outside H^-, inner in H^-; upper: outer outside H^+, inner in H^+
        const auto v1 = double_truncated_schedule(mu, k, not_below, s.below, sched);
        const auto v3 = double_truncated_schedule(mu, k, not_above, s.above, sched);
        // relabelled upper sum and the on-graph correction terms
        const auto v2 = double_truncated_schedule(mu, k, s.above, not_above, sched);
        const auto s_ao = double_truncated_schedule(mu, k, s.above, s.on, sched);
        const auto s_ob = double_truncated_schedule(mu, k, s.on, s.below, sched);

        const double maxw = max_weight(mu);
        double worst_relabel = 0.0, worst_identity = 0.0, max_abs = 0.0;
        for (std::size_t e = 0; e < sched.size(); ++e) {
            const double bound = cancellation_bound(mu.size(), k.c0() * std::pow(sched[e], 1.0 - n) * maxw * maxw);
            const double relabel = std::fabs(v3[e] + v2[e]);
            const double identity = std::fabs((v2[e] - v1[e]) - (s_ao[e] - s_ob[e]));
            trace.add_row({static_cast<long long>(m), sched[e], v1[e], v3[e], relabel, identity, bound});
            worst_relabel = std::max(worst_relabel, ratio_to(relabel, bound));
            worst_identity = std::max(worst_identity, ratio_to(identity, bound));
            max_abs = std::max(max_abs, std::fabs(v1[e]));
        }
        const double t1 = cauchy_tail(v1), t3 = cauchy_tail(v3);
        tails.add_row({static_cast<long long>(m), static_cast<long long>(mu.size()),
                       static_cast<long long>(s.above.size()), static_cast<long long>(s.on.size()),
                       static_cast<long long>(s.below.size()), sched.back(), static_cast<long long>(sched.size()), t1, t3,
                       v1.back(), max_abs});
        ctx.check("relabel_residual_over_bound_m" + std::to_string(m), worst_relabel, "<=", 1.0);
        ctx.check("identity_residual_over_bound_m" + std::to_string(m), worst_identity, "<=", 1.0);
        tail_list.push_back(t1);
        scale_list.push_back(max_abs);
    }
    check_shrinking(ctx, "lower", res, tail_list, scale_list, noise);
    ctx.report.tables.push_back(std::move(trace));
    ctx.report.tables.push_back(std::move(tails));
}

}  // namespace siolab::detail
