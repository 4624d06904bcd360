// Python module siolab._core: measures, kernels, the pointwise operators,
// the pairing decomposition and the scenario runner.

#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "siolab/config.hpp"
#include "siolab/harness.hpp"
#include "siolab/operators.hpp"
#include "siolab/pairing.hpp"
#include "siolab/parallel.hpp"

namespace py = pybind11;
using namespace siolab;

namespace {

py::array_t<double> positions_array(const DiscreteMeasure& mu) {
    py::array_t<double> out({static_cast<py::ssize_t>(mu.size()), static_cast<py::ssize_t>(mu.dim())});
    auto w = out.mutable_unchecked<2>();
    for (std::size_t a = 0; a < mu.size(); ++a)
        for (int j = 0; j < mu.dim(); ++j) w(static_cast<py::ssize_t>(a), j) = mu.position(a)[static_cast<std::size_t>(j)];
    return out;
}

DiscreteMeasure measure_from_arrays(py::array_t<double, py::array::c_style | py::array::forcecast> pos,
                                    py::array_t<double, py::array::c_style | py::array::forcecast> weights,
                                    double resolution) {
    if (pos.ndim() != 2) throw std::invalid_argument("positions must be an (N, n) array");
    if (weights.ndim() != 1 || weights.shape(0) != pos.shape(0))
        throw std::invalid_argument("weights must have one entry per position");
    DiscreteMeasure mu(static_cast<int>(pos.shape(1)), resolution);
    mu.reserve(static_cast<std::size_t>(pos.shape(0)));
    const auto p = pos.unchecked<2>();
    const auto w = weights.unchecked<1>();
    Point x(static_cast<std::size_t>(pos.shape(1)));
    for (py::ssize_t a = 0; a < pos.shape(0); ++a) {
        for (py::ssize_t j = 0; j < pos.shape(1); ++j) x[static_cast<std::size_t>(j)] = p(a, j);
        mu.add_atom(x, w(a));
    }
    return mu;
}

std::vector<double> density_arg(const DiscreteMeasure& nu, const py::object& g) {
    if (g.is_none()) return std::vector<double>(nu.size(), 1.0);
    if (py::isinstance<py::float_>(g) || py::isinstance<py::int_>(g))
        return std::vector<double>(nu.size(), g.cast<double>());
    if (py::isinstance<SimpleFunction>(g)) return density_values(nu, g.cast<SimpleFunction>());
    return g.cast<std::vector<double>>();
}

Profile profile_from(const std::string& name, const py::dict& kw, int n) {
    auto get = [&](const char* key, double fallback) { return kw.contains(key) ? kw[key].cast<double>() : fallback; };
    if (name == "affine") {
        std::vector<double> slope(static_cast<std::size_t>(n - 1), 0.0);
        if (kw.contains("slope")) {
            if (py::isinstance<py::float_>(kw["slope"]) || py::isinstance<py::int_>(kw["slope"]))
                slope[0] = kw["slope"].cast<double>();
            else
                slope = kw["slope"].cast<std::vector<double>>();
        }
        return AffineProfile{slope, get("offset", 0.0)};
    }
    if (name == "sawtooth") return SawtoothProfile{get("amplitude", 0.25), get("period", 0.5)};
    if (name == "cone") return ConeProfile{get("slope", 1.0)};
    if (name == "bump") return SmoothBumpProfile{get("amplitude", 0.5), get("width", 0.5)};
    throw std::invalid_argument("unknown profile '" + name + "' (affine, sawtooth, cone, bump)");
}

py::dict report_dict(const ScenarioReport& r) {
    py::dict d;
    d["scenario"] = r.scenario;
    d["seed"] = r.seed;
    d["exit_code"] = r.exit_code;
    d["passed"] = r.passed();
    d["error"] = r.error;
    d["runtime_seconds"] = r.runtime_seconds;
    py::list verdicts;
    for (const auto& v : r.verdicts) {
        py::dict e;
        e["criterion"] = v.criterion;
        e["value"] = v.value;
        e["comparison"] = v.comparison;
        e["threshold"] = v.threshold;
        e["pass"] = v.pass;
        verdicts.append(e);
    }
    d["verdicts"] = verdicts;
    py::dict tables;
    for (const auto& t : r.tables) tables[py::str(t.name)] = t.to_string();
    d["tables"] = tables;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Truncated and maximal singular integrals on discrete measures";
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

    py::enum_<Side>(m, "Side").value("Below", Side::Below).value("On", Side::On).value("Above", Side::Above);

    py::class_<LipschitzGraph>(m, "LipschitzGraph")
        .def(py::init([](int dim, const std::string& profile, double angle, double shift, py::kwargs kw) {
                 const Rotation rot = angle == 0.0 ? Rotation{} : Rotation::givens(dim, 0, dim - 1, angle);
                 return LipschitzGraph(dim, profile_from(profile, kw, dim), rot, shift);
             }),
             py::arg("dim"), py::arg("profile") = "affine", py::arg("angle") = 0.0, py::arg("shift") = 0.0)
        .def_property_readonly("dim", &LipschitzGraph::dim)
        .def_property_readonly("lip", &LipschitzGraph::lip)
        .def_property_readonly("profile", [](const LipschitzGraph& g) { return profile_name(g.profile()); })
        .def("height", [](const LipschitzGraph& g, const std::vector<double>& u) { return g.height(u); })
        .def("signed_height", [](const LipschitzGraph& g, const Point& p) { return g.signed_height(p); })
        .def("classify", [](const LipschitzGraph& g, const Point& p) { return g.classify(p); })
        .def("lipschitz_estimate",
             [](const LipschitzGraph& g, std::size_t samples, std::vector<double> lo, std::vector<double> hi,
                std::uint64_t seed) { return lipschitz_estimate(g, samples, ParamBox{lo, hi}, seed); },
             py::arg("samples"), py::arg("lo"), py::arg("hi"), py::arg("seed") = 1);

    py::class_<Cone>(m, "Cone")
        .def(py::init<LipschitzGraph, std::vector<double>, double>(), py::arg("graph"), py::arg("apex_param"),
             py::arg("aperture"))
        .def_property_readonly("apex", &Cone::apex)
        .def("contains", [](const Cone& c, const Point& y) { return c.contains(y); });

    py::class_<Shape>(m, "Shape")
        .def_static("ball", &Shape::ball, py::arg("center"), py::arg("radius"))
        .def_static(
            "rectangle",
            [](Point center, std::vector<double> half_widths, double angle) {
                const int n = static_cast<int>(center.size());
                return Shape::rectangle(center, half_widths,
                                        angle == 0.0 ? Rotation::identity(n) : Rotation::givens(n, 0, 1, angle));
            },
            py::arg("center"), py::arg("half_widths"), py::arg("angle") = 0.0)
        .def("contains", [](const Shape& s, const Point& p) { return s.contains(p); })
        .def("__repr__", &Shape::describe);

    m.def(
        "region_of",
        [](const Shape& s, const Point& p) -> py::object {
            const auto d = decompose_complement(s);
            const auto r = d.region_of(p);
            if (!r) return py::none();
            return py::str(d.pieces()[*r].label);
        },
        "Label of the complement region containing p, or None inside the shape.");

    py::class_<SimpleFunction>(m, "SimpleFunction")
        .def(py::init([](const std::vector<std::pair<double, Shape>>& terms) {
            if (terms.empty()) throw std::invalid_argument("simple function needs at least one term");
            std::vector<SimpleFunction::Term> ts;
            for (const auto& [c, s] : terms) ts.push_back({c, s});
            const SimpleSpace space = ts.front().shape.is_ball() ? SimpleSpace::Balls : SimpleSpace::Rectangles;
            return SimpleFunction(space, ts);
        }))
        .def("__call__", [](const SimpleFunction& f, const Point& p) { return f(p); })
        .def("__len__", &SimpleFunction::size)
        .def("__repr__", &SimpleFunction::describe);

    py::class_<DiscreteMeasure>(m, "DiscreteMeasure")
        .def(py::init(&measure_from_arrays), py::arg("positions"), py::arg("weights"), py::arg("resolution"))
        .def_property_readonly("dim", &DiscreteMeasure::dim)
        .def_property_readonly("resolution", &DiscreteMeasure::resolution)
        .def("__len__", &DiscreteMeasure::size)
        .def("total_mass", &DiscreteMeasure::total_mass)
        .def("support_diameter", &DiscreteMeasure::support_diameter)
        .def_property_readonly("positions", &positions_array)
        .def_property_readonly("weights",
                               [](const DiscreteMeasure& mu) {
                                   return py::array_t<double>(static_cast<py::ssize_t>(mu.size()), mu.weights().data());
                               })
        .def("to_text",
             [](const DiscreteMeasure& mu) {
                 std::ostringstream os;
                 mu.write_text(os);
                 return os.str();
             })
        .def_static("from_text", [](const std::string& text) {
            std::istringstream is(text);
            return DiscreteMeasure::read_text(is);
        });

    m.def("cantor", [](int generation) { return build(CantorSpec{generation}); }, py::arg("generation"));
    m.def(
        "graph_measure",
        [](const LipschitzGraph& g, std::vector<double> lo, std::vector<double> hi, int cells, double offset) {
            return build(GraphMeasureSpec{g, ParamBox{lo, hi}, cells, offset});
        },
        py::arg("graph"), py::arg("lo"), py::arg("hi"), py::arg("cells"), py::arg("offset") = 0.0);
    m.def(
        "slab_measure",
        [](const LipschitzGraph& g, std::vector<double> lo, std::vector<double> hi, double thickness, int cells,
           bool below) { return build(SlabSpec{g, ParamBox{lo, hi}, thickness, cells, below}); },
        py::arg("graph"), py::arg("lo"), py::arg("hi"), py::arg("thickness"), py::arg("cells"),
        py::arg("below") = false);
    m.def(
        "uniform_measure", [](const Shape& s, int cells, double density) { return build(UniformOnShapeSpec{s, cells, density}); },
        py::arg("shape"), py::arg("cells"), py::arg("density") = 1.0);
    m.def(
        "growth_constant",
        [](const DiscreteMeasure& mu, std::vector<double> radii) { return growth_constant(mu, atom_positions(mu), radii); },
        py::arg("mu"), py::arg("radii"), "Growth estimate over the atom centers.");
    m.def("geometric_grid", &geometric_grid, py::arg("lo"), py::arg("hi"), py::arg("count"));

    py::class_<Kernel>(m, "Kernel")
        .def_static("riesz", py::overload_cast<int, int, double, double>(&Kernel::riesz), py::arg("dim"), py::arg("axis"),
                    py::arg("c0") = 1.0, py::arg("c1") = 1.0)
        .def_static("odd_homogeneous", &Kernel::odd_homogeneous, py::arg("dim"), py::arg("exponents"), py::arg("c0"),
                    py::arg("c1"))
        .def_property_readonly("dim", &Kernel::dim)
        .def_property_readonly("c0", &Kernel::c0)
        .def_property_readonly("c1", &Kernel::c1)
        .def("__call__", [](const Kernel& k, const Point& x) { return k(x); })
        .def("__repr__", &Kernel::describe);

    py::class_<BoundCheck>(m, "BoundCheck")
        .def_readonly("sup", &BoundCheck::sup)
        .def_readonly("declared", &BoundCheck::declared)
        .def_readonly("ok", &BoundCheck::ok);
    m.def("validate_antisymmetry", py::overload_cast<const Kernel&, std::size_t, std::uint64_t>(&validate_antisymmetry),
          py::arg("kernel"), py::arg("samples"), py::arg("seed") = 1);
    m.def("validate_size", py::overload_cast<const Kernel&, std::size_t, std::uint64_t>(&validate_size),
          py::arg("kernel"), py::arg("samples"), py::arg("seed") = 1);
    m.def("validate_gradient", py::overload_cast<const Kernel&, std::size_t, std::uint64_t>(&validate_gradient),
          py::arg("kernel"), py::arg("samples"), py::arg("seed") = 1);

    m.def(
        "truncated",
        [](const DiscreteMeasure& nu, const Kernel& k, const Point& x, double eps, const py::object& g) {
            return truncated(nu, k, density_arg(nu, g), x, eps);
        },
        py::arg("nu"), py::arg("kernel"), py::arg("x"), py::arg("eps"), py::arg("g") = py::none());
    m.def(
        "maximal",
        [](const DiscreteMeasure& nu, const Kernel& k, const Point& x, const py::object& g) {
            return maximal(nu, k, density_arg(nu, g), x);
        },
        py::arg("nu"), py::arg("kernel"), py::arg("x"), py::arg("g") = py::none());
    m.def(
        "hl_maximal",
        [](const DiscreteMeasure& nu, const Point& x, const py::object& g) {
            const auto r = hl_maximal(nu, density_arg(nu, g), x);
            return r.infinite ? std::numeric_limits<double>::infinity() : r.value;
        },
        py::arg("nu"), py::arg("x"), py::arg("g") = py::none(), "Returns inf when an atom of positive mass sits at x.");
    m.def(
        "lp_norm", [](const DiscreteMeasure& mu, const std::vector<double>& h, double p) { return lp_norm(mu, h, p); },
        py::arg("mu"), py::arg("values"), py::arg("p"));

    py::class_<PVResult>(m, "PVResult")
        .def_readonly("estimates", &PVResult::estimates)
        .def_readonly("converged", &PVResult::converged)
        .def_readonly("tail", &PVResult::tail)
        .def_readonly("scale", &PVResult::scale)
        .def_readonly("limit_estimate", &PVResult::limit_estimate);
    m.def(
        "pv_estimate",
        [](const DiscreteMeasure& nu, const Kernel& k, const Point& x, double eps_start, double eps_min, double ratio,
           double rel_tol) { return pv_estimate(nu, k, x, PVSchedule{eps_start, eps_min, ratio}, rel_tol); },
        py::arg("nu"), py::arg("kernel"), py::arg("x"), py::arg("eps_start"), py::arg("eps_min"),
        py::arg("ratio") = 0.5, py::arg("rel_tol") = 1e-3);

    m.def(
        "double_truncated",
        [](const DiscreteMeasure& mu, const Kernel& k, const RegionPredicate& outer, const RegionPredicate& inner,
           double eps) { return double_truncated(mu, k, outer, inner, eps); },
        py::arg("mu"), py::arg("kernel"), py::arg("outer"), py::arg("inner"), py::arg("eps"),
        "Outer and inner are callables taking a point (list of floats) and returning bool.");

    py::class_<BoundConstants>(m, "BoundConstants")
        .def_readonly("d1", &BoundConstants::d1)
        .def_readonly("d2", &BoundConstants::d2)
        .def_readonly("cn", &BoundConstants::cn);
    m.def("bound_constants", py::overload_cast<double, double, double, int>(&bound_constants), py::arg("c0"),
          py::arg("c1"), py::arg("L"), py::arg("dim"));

    m.def("pairing", &pairing, py::arg("mu"), py::arg("kernel"), py::arg("f"), py::arg("g"), py::arg("eps"));
    py::class_<IDecomposition>(m, "IDecomposition")
        .def_readonly("i1", &IDecomposition::i1)
        .def_readonly("i2", &IDecomposition::i2)
        .def_readonly("i3", &IDecomposition::i3)
        .def_readonly("i4", &IDecomposition::i4)
        .def_readonly("undecomposed", &IDecomposition::undecomposed)
        .def("total", &IDecomposition::total)
        .def("bound", &IDecomposition::bound);
    m.def("i_decomposition", &i_decomposition, py::arg("mu"), py::arg("kernel"), py::arg("P"), py::arg("Q"),
          py::arg("eps"));
    py::class_<FubiniCheck>(m, "FubiniCheck")
        .def_readonly("i3", &FubiniCheck::i3)
        .def_readonly("j", &FubiniCheck::j)
        .def_readonly("residual", &FubiniCheck::residual)
        .def_readonly("bound", &FubiniCheck::bound)
        .def("ok", &FubiniCheck::ok);
    m.def("fubini_check", &fubini_check, py::arg("mu"), py::arg("kernel"), py::arg("P"), py::arg("Q"), py::arg("eps"));

    m.def("scenario_names", &scenario_names);
    m.def(
        "run_scenario",
        [](const std::string& config_text, py::object seed, int threads, const std::string& out_dir) {
            RunOptions o;
            if (!seed.is_none()) o.seed = seed.cast<std::uint64_t>();
            o.threads = threads;
            o.out_dir = out_dir;
            ScenarioReport r;
            {
                py::gil_scoped_release release;
                r = run_scenario(Config::parse_string(config_text), o);
            }
            return report_dict(r);
        },
        py::arg("config_text"), py::arg("seed") = py::none(), py::arg("threads") = 0, py::arg("out_dir") = "",
        "Runs the scenario described by an ini-style config string and returns the report as a dict.");
    m.def("set_worker_count", &set_worker_count, py::arg("workers"));
}
