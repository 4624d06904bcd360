#include "siolab/operators.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "siolab/parallel.hpp"
#include "siolab/summation.hpp"

namespace siolab {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_density(const DiscreteMeasure& nu, std::span<const double> g) {
    if (g.size() != nu.size()) throw std::invalid_argument("density must have one value per atom");
}

void check_point(const DiscreteMeasure& nu, std::span<const double> x) {
    if (x.size() != static_cast<std::size_t>(nu.dim())) throw std::invalid_argument("evaluation point dimension mismatch");
}

/// Atoms at positive distance from x, sorted by (distance, index), with K(x - y) w.
struct SortedAtoms {
    std::vector<std::uint32_t> index;
    std::vector<double> dist;
    std::vector<double> kw;
};

SortedAtoms sort_by_distance(const DiscreteMeasure& nu, const Kernel* k, std::span<const double> x) {
    const auto n = static_cast<std::size_t>(nu.dim());
    const std::size_t N = nu.size();
    std::vector<std::pair<double, std::uint32_t>> order;
    order.reserve(N);
    std::array<double, kMaxDim> diff{};
    const double* coords = nu.coords().data();
    for (std::size_t a = 0; a < N; ++a) {
        double d2 = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double d = x[j] - coords[a * n + j];
            d2 += d * d;
        }
        if (d2 > 0.0) order.emplace_back(std::sqrt(d2), static_cast<std::uint32_t>(a));
    }
    std::sort(order.begin(), order.end());
    SortedAtoms out;
    out.index.resize(order.size());
    out.dist.resize(order.size());
    out.kw.resize(k ? order.size() : 0);
    for (std::size_t i = 0; i < order.size(); ++i) {
        out.dist[i] = order[i].first;
        const std::uint32_t a = order[i].second;
        out.index[i] = a;
        if (k) {
            for (std::size_t j = 0; j < n; ++j) diff[j] = x[j] - coords[a * n + j];
            out.kw[i] = k->eval(diff.data()) * nu.weight(a);
        }
    }
    return out;
}

/// Walks distance groups from the outside in; callback(group_distance, suffix_value).
template <class F>
void suffix_scan(const SortedAtoms& s, std::span<const double> g, F&& f) {
    CompensatedSum acc;
    std::size_t i = s.dist.size();
    while (i > 0) {
        const double d = s.dist[i - 1];
        // group of equal distances [j, i)
        std::size_t j = i - 1;
        while (j > 0 && s.dist[j - 1] == d) --j;
        for (std::size_t t = j; t < i; ++t) acc += s.kw[t] * g[s.index[t]];
        f(d, acc.value());
        i = j;
    }
}

double sup_from_sorted(const SortedAtoms& s, std::span<const double> g) {
    double best = 0.0;
    suffix_scan(s, g, [&](double, double v) { best = std::max(best, std::fabs(v)); });
    return best;
}

}  // namespace

std::vector<double> density_values(const DiscreteMeasure& nu, const DensityFunction& g) {
    std::vector<double> out = std::visit(
        overloaded{
            [&](double c) { return std::vector<double>(nu.size(), c); },
            [&](const std::vector<double>& v) {
                if (v.size() != nu.size()) throw std::invalid_argument("density table must have one value per atom");
                return v;
            },
            [&](const SimpleFunction& f) {
                std::vector<double> v(nu.size());
                for (std::size_t i = 0; i < nu.size(); ++i) v[i] = f(nu.position(i));
                return v;
            },
        },
        g);
    for (double v : out)
        if (!std::isfinite(v)) throw std::invalid_argument("density values must be finite");
    return out;
}

double truncated(const DiscreteMeasure& nu, const Kernel& k, std::span<const double> g, std::span<const double> x,
                 double eps) {
    check_density(nu, g);
    check_point(nu, x);
    if (!(eps > 0)) throw std::invalid_argument("truncated: eps must be positive");
    const auto n = static_cast<std::size_t>(nu.dim());
    const double* coords = nu.coords().data();
    std::array<double, kMaxDim> diff{};
    CompensatedSum acc;
    for (std::size_t a = 0; a < nu.size(); ++a) {
        double d2 = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            diff[j] = x[j] - coords[a * n + j];
            d2 += diff[j] * diff[j];
        }
        // strict: atoms on the sphere |x - y| = eps belong to the removed closed ball
        if (!(std::sqrt(d2) > eps)) continue;
        acc += (k.eval(diff.data()) * nu.weight(a)) * g[a];
    }
    return acc.value();
}

double TruncationProfile::sup() const {
    double best = 0.0;
    for (double v : values) best = std::max(best, std::fabs(v));
    return best;
}

TruncationProfile truncation_profile(const DiscreteMeasure& nu, const Kernel& k, std::span<const double> g,
                                     std::span<const double> x) {
    check_density(nu, g);
    check_point(nu, x);
    const SortedAtoms s = sort_by_distance(nu, &k, x);
    TruncationProfile out;
    suffix_scan(s, g, [&](double d, double v) {
        out.breakpoints.push_back(d);
        out.values.push_back(v);
    });
    std::reverse(out.breakpoints.begin(), out.breakpoints.end());
    std::reverse(out.values.begin(), out.values.end());
    return out;
}

double maximal(const DiscreteMeasure& nu, const Kernel& k, std::span<const double> g, std::span<const double> x) {
    check_density(nu, g);
    check_point(nu, x);
    return sup_from_sorted(sort_by_distance(nu, &k, x), g);
}

std::vector<std::vector<double>> maximal_batch(const DiscreteMeasure& nu, const Kernel& k,
                                               std::span<const std::vector<double>> densities,
                                               std::span<const Point> points) {
    for (const auto& g : densities) check_density(nu, g);
    for (const auto& p : points) check_point(nu, p);
    std::vector<std::vector<double>> out(points.size(), std::vector<double>(densities.size(), 0.0));
    parallel_for(points.size(), [&](std::size_t i) {
        const SortedAtoms s = sort_by_distance(nu, &k, points[i]);
        for (std::size_t j = 0; j < densities.size(); ++j) out[i][j] = sup_from_sorted(s, densities[j]);
    });
    return out;
}

HlMaximal hl_maximal(const DiscreteMeasure& nu, std::span<const double> g, std::span<const double> x) {
    check_density(nu, g);
    check_point(nu, x);
    const auto n = static_cast<std::size_t>(nu.dim());
    const double* coords = nu.coords().data();
    for (std::size_t a = 0; a < nu.size(); ++a) {
        bool same = true;
        for (std::size_t j = 0; j < n && same; ++j) same = coords[a * n + j] == x[j];
        if (same && std::fabs(g[a]) * nu.weight(a) > 0.0) return {0.0, true};
    }
    const SortedAtoms s = sort_by_distance(nu, nullptr, x);
    HlMaximal out;
    CompensatedSum mass;
    std::size_t i = 0;
    while (i < s.dist.size()) {
        const double d = s.dist[i];
        while (i < s.dist.size() && s.dist[i] == d) {
            mass += std::fabs(g[s.index[i]]) * nu.weight(s.index[i]);
            ++i;
        }
        out.value = std::max(out.value, mass.value() * std::pow(d, 1.0 - static_cast<double>(n)));
    }
    return out;
}

std::vector<Point> cone_mesh(const Cone& cone, double height_cap, int mesh_depth) {
    if (!(height_cap > 0)) throw std::invalid_argument("nontangential_max: height cap must be positive");
    if (mesh_depth < 1 || mesh_depth > 24) throw std::invalid_argument("nontangential_max: mesh depth must be in [1, 24]");
    const LipschitzGraph& graph = cone.graph();
    const auto n = static_cast<std::size_t>(graph.dim());
    const std::size_t m = n - 1;
    const std::size_t levels = std::size_t{1} << mesh_depth;
    const std::size_t per_axis = std::size_t{1} << ((mesh_depth + 1) / 2);

    // cross-section offsets v with |v| < 1, plus the axis itself
    std::vector<std::vector<double>> offsets;
    offsets.emplace_back(m, 0.0);
    std::vector<std::size_t> idx(m, 0);
    while (true) {
        std::vector<double> v(m);
        double r2 = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            v[k] = -1.0 + (2.0 * static_cast<double>(idx[k]) + 1.0) / static_cast<double>(per_axis);
            r2 += v[k] * v[k];
        }
        if (r2 < 1.0) offsets.push_back(std::move(v));
        std::size_t k = m;
        bool done = false;
        while (k > 0) {
            --k;
            if (++idx[k] < per_axis) break;
            idx[k] = 0;
            if (k == 0) done = true;
        }
        if (done) break;
    }

    const auto& u0 = cone.apex_param();
    const double base = graph.height(u0);
    std::vector<Point> pts;
    pts.reserve(levels * offsets.size());
    Point q(n), p(n);
    for (std::size_t j = 1; j <= levels; ++j) {
        const double tau = height_cap * static_cast<double>(j) / static_cast<double>(levels);
        const double radius = tau / (4.0 * cone.aperture());
        for (const auto& v : offsets) {
            for (std::size_t k = 0; k < m; ++k) q[k] = u0[k] + radius * v[k];
            q[m] = base + tau;
            graph.to_ambient(q, p);
            pts.push_back(p);
        }
    }
    return pts;
}

double nontangential_max(const std::function<double(std::span<const double>)>& h, const Cone& cone, double height_cap,
                         int mesh_depth) {
    double best = 0.0;
    for (const auto& p : cone_mesh(cone, height_cap, mesh_depth)) best = std::max(best, std::fabs(h(p)));
    return best;
}

double lp_norm(const DiscreteMeasure& mu, std::span<const double> values, double p) {
    if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: p must be >= 1");
    check_density(mu, values);
    CompensatedSum acc;
    for (std::size_t a = 0; a < mu.size(); ++a) acc += std::pow(std::fabs(values[a]), p) * mu.weight(a);
    return std::pow(acc.value(), 1.0 / p);
}

std::vector<double> make_schedule(const PVSchedule& s) {
    if (!(s.eps_start > 0) || !(s.eps_min > 0) || !(s.ratio > 0 && s.ratio < 1))
        throw std::invalid_argument("schedule: need eps_start, eps_min > 0 and ratio in (0, 1)");
    std::vector<double> out;
    for (double e = s.eps_start; e >= s.eps_min * (1.0 - 1e-12); e *= s.ratio) out.push_back(e);
    return out;
}

double cauchy_tail(std::span<const double> values) {
    if (values.size() < 2) return 0.0;
    const std::size_t q = std::max<std::size_t>(2, (values.size() + 3) / 4);
    const auto last = values.subspan(values.size() - q);
    const auto [lo, hi] = std::minmax_element(last.begin(), last.end());
    return *hi - *lo;
}

PVResult pv_estimate(const DiscreteMeasure& nu, const Kernel& k, std::span<const double> g,
                     std::span<const double> x, const PVSchedule& schedule, double rel_tol, double floor_factor) {
    check_density(nu, g);
    check_point(nu, x);
    if (schedule.eps_min < floor_factor * nu.resolution() * (1.0 - 1e-12))
        throw std::invalid_argument("pv_estimate: eps_min is below the resolution floor");
    const std::vector<double> eps = make_schedule(schedule);
    if (eps.size() < 4) throw std::invalid_argument("pv_estimate: schedule needs at least 4 entries");
    PVResult out;
    std::vector<double> values;
    for (double e : eps) {
        const double v = truncated(nu, k, g, x, e);
        out.estimates.emplace_back(e, v);
        values.push_back(v);
    }
    // absolute-value sum at the finest truncation
    const auto n = static_cast<std::size_t>(nu.dim());
    std::array<double, kMaxDim> diff{};
    CompensatedSum scale;
    for (std::size_t a = 0; a < nu.size(); ++a) {
        double d2 = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            diff[j] = x[j] - nu.position(a)[j];
            d2 += diff[j] * diff[j];
        }
        if (std::sqrt(d2) > eps.back()) scale += std::fabs(k.eval(diff.data()) * nu.weight(a) * g[a]);
    }
    out.scale = scale.value();
    out.tail = cauchy_tail(values);
    out.converged = out.tail < rel_tol * out.scale || out.tail == 0.0;
    out.limit_estimate = values.back();
    return out;
}

PVResult pv_estimate(const DiscreteMeasure& nu, const Kernel& k, std::span<const double> x, const PVSchedule& schedule,
                     double rel_tol, double floor_factor) {
    const std::vector<double> ones(nu.size(), 1.0);
    return pv_estimate(nu, k, ones, x, schedule, rel_tol, floor_factor);
}

namespace {

constexpr std::size_t kChunk = 32;

void check_pairs(std::size_t outer, std::size_t inner) {
    if (static_cast<double>(outer) * static_cast<double>(inner) > kMaxPairs)
        throw std::length_error("double_truncated: more than 1e10 pairs");
}

}  // namespace

DoubleSum double_truncated_detail(const DiscreteMeasure& mu, const Kernel& k, std::span<const std::size_t> outer,
                                  std::span<const std::size_t> inner, double eps) {
    if (!(eps > 0)) throw std::invalid_argument("double_truncated: eps must be positive");
    check_pairs(outer.size(), inner.size());
    const auto n = static_cast<std::size_t>(mu.dim());
    const double* coords = mu.coords().data();
    const std::size_t chunks = (outer.size() + kChunk - 1) / kChunk;
    std::vector<CompensatedSum> partial(chunks);
    std::vector<double> partial_max(chunks, 0.0);
    std::vector<std::size_t> partial_pairs(chunks, 0);
    parallel_for(chunks, [&](std::size_t c) {
        std::array<double, kMaxDim> diff{};
        CompensatedSum acc;
        double mx = 0.0;
        std::size_t pairs = 0;
        const std::size_t end = std::min(outer.size(), (c + 1) * kChunk);
        for (std::size_t ia = c * kChunk; ia < end; ++ia) {
            const std::size_t a = outer[ia];
            for (const std::size_t b : inner) {
                double d2 = 0.0;
                for (std::size_t j = 0; j < n; ++j) {
                    diff[j] = coords[a * n + j] - coords[b * n + j];
                    d2 += diff[j] * diff[j];
                }
                if (!(std::sqrt(d2) > eps)) continue;
                const double term = k.eval(diff.data()) * (mu.weight(a) * mu.weight(b));
                acc += term;
                mx = std::max(mx, std::fabs(term));
                ++pairs;
            }
        }
        partial[c] = acc;
        partial_max[c] = mx;
        partial_pairs[c] = pairs;
    });
    DoubleSum out;
    CompensatedSum total;
    for (std::size_t c = 0; c < chunks; ++c) {
        total += partial[c];
        out.max_abs_term = std::max(out.max_abs_term, partial_max[c]);
        out.pairs += partial_pairs[c];
    }
    out.value = total.value();
    return out;
}

double double_truncated(const DiscreteMeasure& mu, const Kernel& k, std::span<const std::size_t> outer,
                        std::span<const std::size_t> inner, double eps) {
    return double_truncated_detail(mu, k, outer, inner, eps).value;
}

double double_truncated(const DiscreteMeasure& mu, const Kernel& k, const RegionPredicate& outer,
                        const RegionPredicate& inner, double eps) {
    const auto a = select(mu, outer);
    const auto b = select(mu, inner);
    return double_truncated(mu, k, a, b, eps);
}

std::vector<double> double_truncated_schedule(const DiscreteMeasure& mu, const Kernel& k,
                                              std::span<const std::size_t> outer, std::span<const std::size_t> inner,
                                              std::span<const double> eps_schedule) {
    check_pairs(outer.size(), inner.size());
    const std::size_t K = eps_schedule.size();
    for (std::size_t i = 0; i < K; ++i) {
        if (!(eps_schedule[i] > 0)) throw std::invalid_argument("double_truncated_schedule: eps must be positive");
        if (i > 0 && !(eps_schedule[i] < eps_schedule[i - 1]))
            throw std::invalid_argument("double_truncated_schedule: schedule must be strictly decreasing");
    }
    const auto n = static_cast<std::size_t>(mu.dim());
    const double* coords = mu.coords().data();
    const std::size_t chunks = (outer.size() + kChunk - 1) / kChunk;
    // bucket[j]: pairs counted for eps_j and every later (smaller) eps
    std::vector<std::vector<CompensatedSum>> partial(chunks, std::vector<CompensatedSum>(K));
    parallel_for(chunks, [&](std::size_t c) {
        std::array<double, kMaxDim> diff{};
        auto& bucket = partial[c];
        const std::size_t end = std::min(outer.size(), (c + 1) * kChunk);
        for (std::size_t ia = c * kChunk; ia < end; ++ia) {
            const std::size_t a = outer[ia];
            for (const std::size_t b : inner) {
                double d2 = 0.0;
                for (std::size_t j = 0; j < n; ++j) {
                    diff[j] = coords[a * n + j] - coords[b * n + j];
                    d2 += diff[j] * diff[j];
                }
                const double d = std::sqrt(d2);
                // first schedule index with eps < d
                std::size_t lo = 0, hi = K;
                while (lo < hi) {
                    const std::size_t mid = (lo + hi) / 2;
                    if (eps_schedule[mid] < d) hi = mid;
                    else lo = mid + 1;
                }
                if (lo == K) continue;
                bucket[lo] += k.eval(diff.data()) * (mu.weight(a) * mu.weight(b));
            }
        }
    });
    std::vector<CompensatedSum> bucket(K);
    for (std::size_t c = 0; c < chunks; ++c)
        for (std::size_t j = 0; j < K; ++j) bucket[j] += partial[c][j];
    std::vector<double> out(K);
    CompensatedSum run;
    for (std::size_t j = 0; j < K; ++j) {
        run += bucket[j];
        out[j] = run.value();
    }
    return out;
}

double cancellation_bound(std::size_t atoms, double max_abs_term) {
    const double N = static_cast<double>(atoms);
    return N * N * std::ldexp(1.0, -50) * max_abs_term;
}

BoundConstants bound_constants(double c0, double c1, double L, int n) {
    if (!(L > 1.0)) throw std::invalid_argument("bound_constants: L must exceed 1");
    BoundConstants out;
    const double four_n = std::pow(4.0, n);
    out.d1 = four_n * c1 + std::pow(16.0 * L, n - 1) * c0;
    out.d2 = four_n * c1 + std::pow(2.0, n - 1) * c0;
    out.cn = std::max({3.0, out.d1, out.d2});
    return out;
}

BoundConstants bound_constants(const Kernel& k, double L) { return bound_constants(k.c0(), k.c1(), L, k.dim()); }

}  // namespace siolab
