#include "siolab/measure.hpp"

#include <algorithm>
#include <array>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "siolab/parallel.hpp"
#include "siolab/summation.hpp"

namespace siolab {

DiscreteMeasure::DiscreteMeasure(int ambient_dim, double resolution) : n_(ambient_dim), h_(resolution) {
    check_dim(n_);
    if (!(resolution > 0) || !std::isfinite(resolution)) throw std::invalid_argument("measure: resolution must be positive");
}

void DiscreteMeasure::add_atom(std::span<const double> position, double weight) {
    if (position.size() != static_cast<std::size_t>(n_)) throw std::invalid_argument("measure: atom dimension mismatch");
    if (!(weight >= 0) || !std::isfinite(weight)) throw std::invalid_argument("measure: atom weight must be finite and >= 0");
    for (double x : position)
        if (!std::isfinite(x)) throw std::invalid_argument("measure: atom position must be finite");
    coords_.insert(coords_.end(), position.begin(), position.end());
    weights_.push_back(weight);
}

void DiscreteMeasure::reserve(std::size_t count) {
    coords_.reserve(count * static_cast<std::size_t>(n_));
    weights_.reserve(count);
}

void DiscreteMeasure::set_resolution(double h) {
    if (!(h > 0)) throw std::invalid_argument("measure: resolution must be positive");
    h_ = h;
}

double DiscreteMeasure::total_mass() const {
    CompensatedSum s;
    for (double w : weights_) s += w;
    return s.value();
}

std::pair<Point, Point> DiscreteMeasure::bounding_box() const {
    const auto n = static_cast<std::size_t>(n_);
    Point lo(n, 0.0), hi(n, 0.0);
    if (empty()) return {lo, hi};
    lo.assign(position(0).begin(), position(0).end());
    hi = lo;
    for (std::size_t i = 1; i < size(); ++i) {
        const auto p = position(i);
        for (std::size_t k = 0; k < n; ++k) {
            lo[k] = std::min(lo[k], p[k]);
            hi[k] = std::max(hi[k], p[k]);
        }
    }
    return {lo, hi};
}

double DiscreteMeasure::support_diameter() const {
    const auto [lo, hi] = bounding_box();
    return distance(lo, hi);
}

void DiscreteMeasure::write_text(std::ostream& os) const {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%a", h_);
    os << "n=" << n_ << " count=" << size() << " h=" << buf << '\n';
    for (std::size_t i = 0; i < size(); ++i) {
        for (double x : position(i)) {
            std::snprintf(buf, sizeof buf, "%a", x);
            os << buf << ' ';
        }
        std::snprintf(buf, sizeof buf, "%a", weights_[i]);
        os << buf << '\n';
    }
}

DiscreteMeasure DiscreteMeasure::read_text(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("measure text: missing header");
    int n = 0;
    unsigned long long count = 0;
    char hbuf[64] = {0};
    if (std::sscanf(line.c_str(), "n=%d count=%llu h=%63s", &n, &count, hbuf) != 3)
        throw std::runtime_error("measure text: malformed header '" + line + "'");
    DiscreteMeasure mu(n, std::strtod(hbuf, nullptr));
    mu.reserve(count);
    Point p(static_cast<std::size_t>(n));
    for (unsigned long long i = 0; i < count; ++i) {
        if (!std::getline(is, line)) throw std::runtime_error("measure text: truncated atom list");
        const char* cur = line.c_str();
        char* end = nullptr;
        for (auto& x : p) {
            x = std::strtod(cur, &end);
            if (end == cur) throw std::runtime_error("measure text: malformed atom line");
            cur = end;
        }
        const double w = std::strtod(cur, &end);
        if (end == cur) throw std::runtime_error("measure text: missing weight");
        mu.add_atom(p, w);
    }
    return mu;
}

namespace {

void check_count(double count) {
    if (count > static_cast<double>(kMaxAtoms)) throw std::length_error("measure build: atom count exceeds 1e8");
}

/// Visits every cell center of an m^(dims) grid over the box, last axis fastest.
template <class F>
void for_each_cell(const ParamBox& box, int m, F&& f) {
    const std::size_t dims = box.lo.size();
    std::vector<double> u(dims);
    std::vector<int> idx(dims, 0);
    if (dims == 0) {
        f(std::span<const double>(u));
        return;
    }
    while (true) {
        for (std::size_t k = 0; k < dims; ++k) {
            const double c = (box.hi[k] - box.lo[k]) / m;
            u[k] = box.lo[k] + (idx[k] + 0.5) * c;
        }
        f(std::span<const double>(u));
        std::size_t k = dims;
        while (k > 0) {
            --k;
            if (++idx[k] < m) break;
            idx[k] = 0;
            if (k == 0) return;
        }
    }
}

void check_box(const ParamBox& box, int n) {
    const auto m = static_cast<std::size_t>(n - 1);
    if (box.lo.size() != m || box.hi.size() != m) throw std::invalid_argument("measure build: parameter box must have n-1 axes");
    for (std::size_t k = 0; k < m; ++k)
        if (!(box.hi[k] > box.lo[k])) throw std::invalid_argument("measure build: empty parameter box");
}

DiscreteMeasure build_graph(const GraphMeasureSpec& s) {
    const int n = s.graph.dim();
    check_box(s.box, n);
    if (s.cells_per_axis < 1) throw std::invalid_argument("graph measure: cells_per_axis must be >= 1");
    const auto m = static_cast<std::size_t>(n - 1);
    check_count(std::pow(static_cast<double>(s.cells_per_axis), static_cast<double>(m)));

    double cell_volume = 1.0, diag2 = 0.0;
    std::vector<double> step(m);
    for (std::size_t k = 0; k < m; ++k) {
        const double c = (s.box.hi[k] - s.box.lo[k]) / s.cells_per_axis;
        cell_volume *= c;
        diag2 += c * c;
        step[k] = c / 100.0;
    }
    const double lip = s.graph.lip();
    DiscreteMeasure mu(n, std::sqrt(diag2) * std::sqrt(1.0 + lip * lip));
    mu.reserve(static_cast<std::size_t>(std::pow(static_cast<double>(s.cells_per_axis), static_cast<double>(m))));

    std::vector<double> probe(m);
    Point q(static_cast<std::size_t>(n)), p(static_cast<std::size_t>(n));
    for_each_cell(s.box, s.cells_per_axis, [&](std::span<const double> u) {
        double grad2 = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            std::copy(u.begin(), u.end(), probe.begin());
            probe[k] = u[k] + step[k];
            const double fp = s.graph.height(probe);
            probe[k] = u[k] - step[k];
            const double fm = s.graph.height(probe);
            const double d = (fp - fm) / (2.0 * step[k]);
            grad2 += d * d;
        }
        std::copy(u.begin(), u.end(), q.begin());
        q[m] = s.graph.height(u) + s.offset;
        s.graph.to_ambient(q, p);
        mu.add_atom(p, cell_volume * std::sqrt(1.0 + grad2));
    });
    return mu;
}

DiscreteMeasure build_cantor(const CantorSpec& s) {
    if (s.generation < 0 || s.generation > 10) throw std::invalid_argument("cantor: generation must be in [0, 10]");
    const std::size_t count = std::size_t{1} << (2 * s.generation);
    const double side = std::ldexp(1.0, -2 * s.generation);
    DiscreteMeasure mu(2, side * std::sqrt(2.0));
    mu.reserve(count);
    const double w = 1.0 / static_cast<double>(count);
    std::array<double, 2> p{};
    for (std::size_t i = 0; i < count; ++i) {
        // base-4 digits of i, most significant first, pick the corner at each level
        double x = 0.0, y = 0.0, scale = 1.0;
        for (int level = s.generation - 1; level >= 0; --level) {
            const std::size_t digit = (i >> (2 * level)) & 3u;
            scale *= 0.25;
            x += 3.0 * scale * static_cast<double>(digit & 1u);
            y += 3.0 * scale * static_cast<double>((digit >> 1) & 1u);
        }
        p = {x + 0.5 * side, y + 0.5 * side};
        mu.add_atom(p, w);
    }
    return mu;
}

std::pair<Point, Point> shape_bounds(const Shape& shape) {
    const auto n = static_cast<std::size_t>(shape.dim());
    Point lo(n), hi(n);
    if (shape.is_ball()) {
        const auto& b = shape.as_ball();
        for (std::size_t k = 0; k < n; ++k) {
            lo[k] = b.center[k] - b.radius;
            hi[k] = b.center[k] + b.radius;
        }
    } else {
        const auto& r = shape.as_rectangle();
        for (std::size_t j = 0; j < n; ++j) {
            double ext = 0.0;
            for (std::size_t k = 0; k < n; ++k)
                ext += std::fabs(r.rotation(static_cast<int>(j), static_cast<int>(k))) * r.half_widths[k];
            lo[j] = r.center[j] - ext;
            hi[j] = r.center[j] + ext;
        }
    }
    return {lo, hi};
}

DiscreteMeasure build_uniform(const UniformOnShapeSpec& s) {
    const int n = s.shape.dim();
    if (s.cells_per_axis < 1) throw std::invalid_argument("uniform measure: cells_per_axis must be >= 1");
    if (!(s.density > 0)) throw std::invalid_argument("uniform measure: density must be positive");
    const auto [lo, hi] = shape_bounds(s.shape);
    double longest = 0.0;
    for (std::size_t k = 0; k < lo.size(); ++k) longest = std::max(longest, hi[k] - lo[k]);
    const double cell = longest / s.cells_per_axis;
    ParamBox grid;
    std::vector<int> per_axis;
    double total_cells = 1.0;
    for (std::size_t k = 0; k < lo.size(); ++k) {
        const int cnt = std::max(1, static_cast<int>(std::ceil((hi[k] - lo[k]) / cell - 1e-9)));
        per_axis.push_back(cnt);
        total_cells *= cnt;
    }
    check_count(total_cells);
    DiscreteMeasure mu(n, cell * std::sqrt(static_cast<double>(n)));
    const double w = s.density * std::pow(cell, n);
    const auto nn = static_cast<std::size_t>(n);
    std::vector<int> idx(nn, 0);
    Point p(nn);
    while (true) {
        for (std::size_t k = 0; k < nn; ++k) {
            const double extent = per_axis[k] * cell;
            const double start = 0.5 * (lo[k] + hi[k]) - 0.5 * extent;
            p[k] = start + (idx[k] + 0.5) * cell;
        }
        if (s.shape.contains(p)) mu.add_atom(p, w);
        std::size_t k = nn;
        bool done = false;
        while (k > 0) {
            --k;
            if (++idx[k] < per_axis[k]) break;
            idx[k] = 0;
            if (k == 0) done = true;
        }
        if (done) break;
    }
    return mu;
}

DiscreteMeasure build_slab(const SlabSpec& s) {
    const int n = s.graph.dim();
    check_box(s.box, n);
    if (s.cells_per_axis < 1) throw std::invalid_argument("slab measure: cells_per_axis must be >= 1");
    if (!(s.thickness > 0)) throw std::invalid_argument("slab measure: thickness must be positive");
    const auto m = static_cast<std::size_t>(n - 1);
    double cell_volume = 1.0, diag2 = 0.0, smallest = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < m; ++k) {
        const double c = (s.box.hi[k] - s.box.lo[k]) / s.cells_per_axis;
        cell_volume *= c;
        diag2 += c * c;
        smallest = std::min(smallest, c);
    }
    const int layers = std::max(1, static_cast<int>(std::lround(s.thickness / smallest)));
    const double dt = s.thickness / layers;
    check_count(std::pow(static_cast<double>(s.cells_per_axis), static_cast<double>(m)) * layers);
    DiscreteMeasure mu(n, std::sqrt(diag2 + dt * dt));
    const double w = cell_volume * dt / s.thickness;
    Point q(static_cast<std::size_t>(n)), p(static_cast<std::size_t>(n));
    for_each_cell(s.box, s.cells_per_axis, [&](std::span<const double> u) {
        const double f = s.graph.height(u);
        std::copy(u.begin(), u.end(), q.begin());
        for (int j = 0; j < layers; ++j) {
            q[m] = s.below ? f - (j + 0.5) * dt : f + (j + 0.5) * dt;
            s.graph.to_ambient(q, p);
            mu.add_atom(p, w);
        }
    });
    return mu;
}

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

/// For each center: distances sorted ascending with the running closed-ball mass.
template <class Reduce>
double ball_ratio_scan(const DiscreteMeasure& mu, std::span<const Point> centers, std::span<const double> radii,
                       double init, Reduce reduce) {
    if (radii.empty()) throw std::invalid_argument("growth estimate: empty radius grid");
    for (double r : radii)
        if (!(r >= mu.resolution() * (1.0 - 1e-12)))
            throw std::invalid_argument("growth estimate: radii must be >= the measure resolution");
    const int n = mu.dim();
    std::vector<double> per_center(centers.size(), init);
    parallel_for(centers.size(), [&](std::size_t c) {
        std::vector<std::pair<double, double>> dw(mu.size());
        for (std::size_t i = 0; i < mu.size(); ++i) dw[i] = {distance(centers[c], mu.position(i)), mu.weight(i)};
        std::sort(dw.begin(), dw.end());
        std::vector<double> prefix(dw.size() + 1, 0.0);
        CompensatedSum acc;
        for (std::size_t i = 0; i < dw.size(); ++i) {
            acc += dw[i].second;
            prefix[i + 1] = acc.value();
        }
        double best = init;
        for (double r : radii) {
            const auto it = std::upper_bound(dw.begin(), dw.end(), r,
                                             [](double v, const std::pair<double, double>& e) { return v < e.first; });
            const double mass = prefix[static_cast<std::size_t>(it - dw.begin())];
            best = reduce(best, mass / std::pow(r, n - 1));
        }
        per_center[c] = best;
    });
    double out = init;
    for (double v : per_center) out = reduce(out, v);
    return out;
}

}  // namespace

DiscreteMeasure build(const MeasureSpec& spec) {
    return std::visit(overloaded{
                          [](const GraphMeasureSpec& s) { return build_graph(s); },
                          [](const CantorSpec& s) { return build_cantor(s); },
                          [](const UniformOnShapeSpec& s) { return build_uniform(s); },
                          [](const SlabSpec& s) { return build_slab(s); },
                      },
                      spec);
}

std::vector<double> geometric_grid(double lo, double hi, std::size_t count) {
    if (count == 0) return {};
    if (!(lo > 0) || !(hi >= lo)) throw std::invalid_argument("geometric_grid: need 0 < lo <= hi");
    std::vector<double> out(count);
    if (count == 1) {
        out[0] = lo;
        return out;
    }
    const double ratio = std::log(hi / lo) / static_cast<double>(count - 1);
    for (std::size_t i = 0; i < count; ++i) out[i] = lo * std::exp(ratio * static_cast<double>(i));
    out.front() = lo;
    out.back() = hi;
    return out;
}

double growth_constant(const DiscreteMeasure& mu, std::span<const Point> centers, std::span<const double> radii) {
    return ball_ratio_scan(mu, centers, radii, 0.0, [](double a, double b) { return std::max(a, b); });
}

double lower_density(const DiscreteMeasure& mu, std::span<const Point> centers, std::span<const double> radii) {
    return ball_ratio_scan(mu, centers, radii, std::numeric_limits<double>::infinity(),
                           [](double a, double b) { return std::min(a, b); });
}

std::vector<Point> atom_positions(const DiscreteMeasure& mu, std::size_t stride) {
    std::vector<Point> out;
    if (stride == 0) stride = 1;
    for (std::size_t i = 0; i < mu.size(); i += stride) out.emplace_back(mu.position(i).begin(), mu.position(i).end());
    return out;
}

GraphSplit split_by_graph(const DiscreteMeasure& mu, const LipschitzGraph& graph) {
    GraphSplit out{DiscreteMeasure(mu.dim(), mu.resolution()), DiscreteMeasure(mu.dim(), mu.resolution()),
                   DiscreteMeasure(mu.dim(), mu.resolution())};
    for (std::size_t i = 0; i < mu.size(); ++i) {
        switch (graph.classify(mu.position(i))) {
            case Side::On: out.on.add_atom(mu.position(i), mu.weight(i)); break;
            case Side::Above: out.above.add_atom(mu.position(i), mu.weight(i)); break;
            case Side::Below: out.below.add_atom(mu.position(i), mu.weight(i)); break;
        }
    }
    return out;
}

DiscreteMeasure restrict(const DiscreteMeasure& mu, const std::function<bool(std::span<const double>)>& keep) {
    DiscreteMeasure out(mu.dim(), mu.resolution());
    for (std::size_t i = 0; i < mu.size(); ++i)
        if (keep(mu.position(i))) out.add_atom(mu.position(i), mu.weight(i));
    return out;
}

DiscreteMeasure restrict(const DiscreteMeasure& mu, const Shape& shape) {
    return restrict(mu, [&shape](std::span<const double> p) { return shape.contains(p); });
}

std::vector<std::size_t> select(const DiscreteMeasure& mu, const std::function<bool(std::span<const double>)>& keep) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < mu.size(); ++i)
        if (keep(mu.position(i))) out.push_back(i);
    return out;
}

}  // namespace siolab
