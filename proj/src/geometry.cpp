#include "siolab/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "siolab/rng.hpp"

namespace siolab {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double tri(double s) { return 2.0 * std::fabs(s - std::round(s)); }

double profile_lip(const Profile& p, int n) {
    return std::visit(overloaded{
                          [](const AffineProfile& a) { return norm(a.slope); },
                          [n](const SawtoothProfile& s) {
                              return 2.0 * std::fabs(s.amplitude) * std::sqrt(static_cast<double>(n - 1)) / s.period;
                          },
                          [](const ConeProfile& c) { return std::fabs(c.slope); },
                          [](const SmoothBumpProfile& b) {
                              return std::fabs(b.amplitude) * std::sqrt(2.0) * std::exp(-0.5) / b.width;
                          },
                          [](const CapConeProfile& c) { return c.cone_slope; },
                      },
                      p);
}

void validate_profile(const Profile& p, int n) {
    const auto m = static_cast<std::size_t>(n - 1);
    std::visit(overloaded{
                   [m](const AffineProfile& a) {
                       if (a.slope.size() != m) throw std::invalid_argument("affine profile: slope must have n-1 entries");
                   },
                   [](const SawtoothProfile& s) {
                       if (!(s.period > 0)) throw std::invalid_argument("sawtooth profile: period must be positive");
                   },
                   [](const ConeProfile&) {},
                   [](const SmoothBumpProfile& b) {
                       if (!(b.width > 0)) throw std::invalid_argument("bump profile: width must be positive");
                   },
                   [m](const CapConeProfile& c) {
                       if (c.center.size() != m) throw std::invalid_argument("cap-cone profile: center must have n-1 entries");
                       if (!(c.radius > 0) || !(c.cone_slope > 0))
                           throw std::invalid_argument("cap-cone profile: radius and slope must be positive");
                   },
               },
               p);
}

}  // namespace

const char* to_string(Side s) {
    switch (s) {
        case Side::Below: return "below";
        case Side::On: return "on";
        case Side::Above: return "above";
    }
    return "?";
}

std::string profile_name(const Profile& p) {
    return std::visit(overloaded{
                          [](const AffineProfile&) { return std::string("affine"); },
                          [](const SawtoothProfile&) { return std::string("sawtooth"); },
                          [](const ConeProfile&) { return std::string("cone"); },
                          [](const SmoothBumpProfile&) { return std::string("bump"); },
                          [](const CapConeProfile&) { return std::string("capcone"); },
                      },
                      p);
}

LipschitzGraph::LipschitzGraph(int ambient_dim, Profile profile, Rotation rotation, double shift)
    : n_(ambient_dim), profile_(std::move(profile)), rotation_(std::move(rotation)), shift_(shift) {
    check_dim(n_);
    validate_profile(profile_, n_);
    if (rotation_.dim() != 0 && rotation_.dim() != n_) throw std::invalid_argument("graph: rotation dimension mismatch");
    if (rotation_.dim() != 0 && rotation_.is_identity()) rotation_ = Rotation{};
    lip_ = profile_lip(profile_, n_);
}

double LipschitzGraph::height(std::span<const double> u) const {
    const double f = std::visit(
        overloaded{
            [&](const AffineProfile& a) { return dot(a.slope, u) + a.offset; },
            [&](const SawtoothProfile& s) {
                double sum = 0.0;
                for (double x : u) sum += tri(x / s.period);
                return s.amplitude * sum;
            },
            [&](const ConeProfile& c) { return c.slope * norm(u); },
            [&](const SmoothBumpProfile& b) { return b.amplitude * std::exp(-dot(u, u) / (b.width * b.width)); },
            [&](const CapConeProfile& c) {
                const double rho = distance(u, c.center);
                const double sec = std::sqrt(1.0 + c.cone_slope * c.cone_slope);
                const double rho_join = c.radius * c.cone_slope / sec;
                if (rho <= rho_join) return c.base + std::sqrt(std::max(0.0, c.radius * c.radius - rho * rho));
                return c.base + c.radius * sec - c.cone_slope * rho;
            },
        },
        profile_);
    return f + shift_;
}

void LipschitzGraph::to_frame(std::span<const double> p, std::span<double> q) const { rotation_.apply_transpose(p, q); }

void LipschitzGraph::to_ambient(std::span<const double> q, std::span<double> p) const { rotation_.apply(q, p); }

Point LipschitzGraph::point_at(std::span<const double> u) const {
    Point q(u.begin(), u.end());
    q.push_back(height(u));
    Point p(static_cast<std::size_t>(n_));
    to_ambient(q, p);
    return p;
}

double LipschitzGraph::signed_height(std::span<const double> p) const {
    std::array<double, kMaxDim> q{};
    const auto n = static_cast<std::size_t>(n_);
    to_frame(p, std::span<double>(q.data(), n));
    return q[n - 1] - height(std::span<const double>(q.data(), n - 1));
}

Side LipschitzGraph::classify(std::span<const double> p) const {
    const double s = signed_height(p);
    const double tol = 1e-12 * (1.0 + norm(p));
    if (s > tol) return Side::Above;
    if (s < -tol) return Side::Below;
    return Side::On;
}

LipschitzGraph LipschitzGraph::shifted(double delta) const {
    return LipschitzGraph(n_, profile_, rotation_, shift_ + delta);
}

double lipschitz_estimate(const LipschitzGraph& graph, std::size_t sample_count, const ParamBox& box,
                          std::uint64_t seed) {
    if (sample_count < 2) throw std::invalid_argument("lipschitz_estimate: need at least 2 samples");
    const auto m = static_cast<std::size_t>(graph.dim() - 1);
    if (box.lo.size() != m || box.hi.size() != m) throw std::invalid_argument("lipschitz_estimate: box dimension");
    Rng rng(seed);
    std::vector<double> u(m), v(m);
    double diam = 0.0;
    for (std::size_t k = 0; k < m; ++k) diam = std::max(diam, box.hi[k] - box.lo[k]);
    double best = 0.0;
    for (std::size_t s = 0; s < sample_count; ++s) {
        for (std::size_t k = 0; k < m; ++k) u[k] = rng.uniform(box.lo[k], box.hi[k]);
        const bool near = (s % 2) == 1;
        for (std::size_t k = 0; k < m; ++k)
            v[k] = near ? u[k] + 1e-4 * diam * rng.uniform(-1.0, 1.0) : rng.uniform(box.lo[k], box.hi[k]);
        const double d = distance(u, v);
        if (d == 0.0) continue;
        best = std::max(best, std::fabs(graph.height(u) - graph.height(v)) / d);
    }
    return best;
}

Cone::Cone(LipschitzGraph graph, std::vector<double> apex_u, double aperture)
    : graph_(std::move(graph)), apex_u_(std::move(apex_u)), L_(aperture) {
    if (apex_u_.size() != static_cast<std::size_t>(graph_.dim() - 1)) throw std::invalid_argument("cone: apex dimension");
    if (!(L_ > 1.0) || !(L_ > graph_.lip()))
        throw std::invalid_argument("cone: aperture parameter must exceed max(1, Lip(f))");
    apex_ = graph_.point_at(apex_u_);
}

bool Cone::contains(std::span<const double> y) const {
    std::array<double, kMaxDim> q{};
    const auto n = static_cast<std::size_t>(graph_.dim());
    graph_.to_frame(y, std::span<double>(q.data(), n));
    double du2 = 0.0;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        const double d = q[k] - apex_u_[k];
        du2 += d * d;
    }
    return q[n - 1] - graph_.height(apex_u_) > 4.0 * L_ * std::sqrt(du2);
}

Shape Shape::ball(Point center, double radius) {
    check_dim(static_cast<int>(center.size()));
    if (!(radius > 0) || !std::isfinite(radius)) throw std::invalid_argument("ball: radius must be positive");
    return Shape(Ball{std::move(center), radius});
}

Shape Shape::rectangle(Point center, std::vector<double> half_widths, Rotation rotation) {
    const int n = static_cast<int>(center.size());
    check_dim(n);
    if (half_widths.size() != center.size()) throw std::invalid_argument("rectangle: half_widths dimension");
    for (double w : half_widths)
        if (!(w > 0) || !std::isfinite(w)) throw std::invalid_argument("rectangle: half widths must be positive");
    if (rotation.dim() == 0) rotation = Rotation::identity(n);
    if (rotation.dim() != n) throw std::invalid_argument("rectangle: rotation dimension");
    return Shape(Rectangle{std::move(center), std::move(half_widths), std::move(rotation)});
}

int Shape::dim() const {
    return std::visit([](const auto& s) { return static_cast<int>(s.center.size()); }, v_);
}

bool Shape::contains(std::span<const double> p) const {
    return std::visit(overloaded{
                          [&](const Ball& b) {
                              double s = 0.0;
                              for (std::size_t k = 0; k < p.size(); ++k) {
                                  const double d = p[k] - b.center[k];
                                  s += d * d;
                              }
                              return s <= b.radius * b.radius;
                          },
                          [&](const Rectangle& r) {
                              const int n = static_cast<int>(p.size());
                              for (int k = 0; k < n; ++k) {
                                  double c = 0.0;
                                  for (int j = 0; j < n; ++j)
                                      c += r.rotation(j, k) * (p[static_cast<std::size_t>(j)] - r.center[static_cast<std::size_t>(j)]);
                                  if (std::fabs(c) > r.half_widths[static_cast<std::size_t>(k)]) return false;
                              }
                              return true;
                          },
                      },
                      v_);
}

std::string Shape::describe() const {
    std::ostringstream os;
    os.precision(17);
    std::visit(overloaded{
                   [&](const Ball& b) {
                       os << "ball(c=";
                       for (std::size_t k = 0; k < b.center.size(); ++k) os << (k ? " " : "") << b.center[k];
                       os << " r=" << b.radius << ")";
                   },
                   [&](const Rectangle& r) {
                       os << "rect(c=";
                       for (std::size_t k = 0; k < r.center.size(); ++k) os << (k ? " " : "") << r.center[k];
                       os << " hw=";
                       for (std::size_t k = 0; k < r.half_widths.size(); ++k) os << (k ? " " : "") << r.half_widths[k];
                       os << ")";
                   },
               },
               v_);
    return os.str();
}

RegionDecomposition::RegionDecomposition(Shape shape, std::vector<RegionPiece> pieces)
    : shape_(std::move(shape)), pieces_(std::move(pieces)) {}

std::optional<std::size_t> RegionDecomposition::region_of(std::span<const double> p) const {
    if (shape_.contains(p)) return std::nullopt;
    // Preferred piece: the dominant direction of p as seen from the shape.
    // The pieces come in (+e_k, -e_k) pairs, so that is index 2k or 2k + 1.
    const auto n = static_cast<std::size_t>(shape_.dim());
    Point v(n);
    if (shape_.is_ball()) {
        const Ball& b = shape_.as_ball();
        for (std::size_t k = 0; k < n; ++k) v[k] = p[k] - b.center[k];
    } else {
        const Rectangle& r = shape_.as_rectangle();
        Point d(n);
        for (std::size_t k = 0; k < n; ++k) d[k] = p[k] - r.center[k];
        r.rotation.apply_transpose(d, v);
        for (std::size_t k = 0; k < n; ++k) v[k] /= r.half_widths[k];
    }
    std::size_t axis = 0;
    for (std::size_t k = 1; k < n; ++k)
        if (std::fabs(v[k]) > std::fabs(v[axis])) axis = k;
    const std::size_t preferred = 2 * axis + (v[axis] >= 0.0 ? 0 : 1);
    if (preferred < pieces_.size() && pieces_[preferred].separator.signed_height(p) > 0.0) return preferred;

    std::size_t best = 0;
    double best_height = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
        const double h = pieces_[i].separator.signed_height(p);
        if (h > 0.0) return i;
        if (h > best_height) {
            best_height = h;
            best = i;
        }
    }
    // Only reachable within rounding of the shape boundary.
    return best;
}

bool RegionDecomposition::in_region(std::size_t i, std::span<const double> p) const {
    const auto r = region_of(p);
    return r && *r == i;
}

RegionDecomposition decompose_complement(const Shape& shape) {
    const int n = shape.dim();
    std::vector<RegionPiece> pieces;
    pieces.reserve(static_cast<std::size_t>(2 * n));
    const auto m = static_cast<std::size_t>(n - 1);

    if (shape.is_ball()) {
        const Ball& b = shape.as_ball();
        // Cap truncated at polar angle arccos(1/sqrt(n)): the largest-magnitude
        // coordinate direction of any exterior point is within that angle.
        const double slope = std::sqrt(static_cast<double>(n - 1));
        for (int k = 0; k < n; ++k) {
            for (int sign : {+1, -1}) {
                Rotation rot = Rotation::axis_to_vertical(n, k, sign);
                Point cq(static_cast<std::size_t>(n));
                rot.apply_transpose(b.center, cq);
                CapConeProfile prof{std::vector<double>(cq.begin(), cq.begin() + static_cast<std::ptrdiff_t>(m)),
                                    cq[m], b.radius, slope};
                std::string label = std::string(sign > 0 ? "+" : "-") + "e" + std::to_string(k);
                pieces.push_back({LipschitzGraph(n, prof, rot), label});
            }
        }
    } else {
        const Rectangle& r = shape.as_rectangle();
        for (int k = 0; k < n; ++k) {
            for (int sign : {+1, -1}) {
                // Frame whose vertical axis is the outward face normal sign * (R e_k).
                Rotation rot = r.rotation.compose(Rotation::axis_to_vertical(n, k, sign));
                Point cq(static_cast<std::size_t>(n));
                rot.apply_transpose(r.center, cq);
                AffineProfile prof{std::vector<double>(m, 0.0), cq[m] + r.half_widths[static_cast<std::size_t>(k)]};
                std::string label = std::string(sign > 0 ? "+" : "-") + "face" + std::to_string(k);
                pieces.push_back({LipschitzGraph(n, prof, rot), label});
            }
        }
    }
    return RegionDecomposition(shape, std::move(pieces));
}

}  // namespace siolab
