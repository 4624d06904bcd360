#pragma once

#include <functional>
#include <span>
#include <variant>
#include <vector>

#include "siolab/geometry.hpp"
#include "siolab/kernel.hpp"
#include "siolab/measure.hpp"
#include "siolab/simple_function.hpp"

namespace siolab {

/// The integrand g: a constant, one value per atom, or a simple function
/// evaluated at the atoms.
using DensityFunction = std::variant<double, std::vector<double>, SimpleFunction>;

/// g evaluated at every atom of nu (finite values required).
std::vector<double> density_values(const DiscreteMeasure& nu, const DensityFunction& g);

/// T^eps g(x): sum over atoms with |x - y| > eps (strict) of K(x - y) g(y) w,
/// in atom order with compensated accumulation.
double truncated(const DiscreteMeasure& nu, const Kernel& k, std::span<const double> g, std::span<const double> x,
                 double eps);

/// T* g(x) = sup_{eps > 0} |T^eps g(x)|, exact. T^eps is piecewise constant in
/// eps and only jumps at atom distances, so the sup is the largest absolute
/// suffix sum over atoms grouped by distance.
double maximal(const DiscreteMeasure& nu, const Kernel& k, std::span<const double> g, std::span<const double> x);

/// T^eps on each piece of the constant structure: breakpoints[j] is the j-th
/// distinct positive atom distance and values[j] the value for
/// eps in [breakpoints[j-1], breakpoints[j]) (breakpoints[-1] = 0). Past the
/// last breakpoint the value is 0.
struct TruncationProfile {
    std::vector<double> breakpoints;
    std::vector<double> values;
    double sup() const;
};

TruncationProfile truncation_profile(const DiscreteMeasure& nu, const Kernel& k, std::span<const double> g,
                                     std::span<const double> x);

/// Evaluates T* for several densities at several points, sorting distances
/// once per point. out[point][density] equals maximal() bit for bit.
std::vector<std::vector<double>> maximal_batch(const DiscreteMeasure& nu, const Kernel& k,
                                               std::span<const std::vector<double>> densities,
                                               std::span<const Point> points);

struct HlMaximal {
    double value = 0.0;
    bool infinite = false;  // an atom of positive |g| mass sits at x
};

/// M g(x) = sup_{r > 0} r^{1-n} integral over closed B(x, r) of |g| d nu.
HlMaximal hl_maximal(const DiscreteMeasure& nu, std::span<const double> g, std::span<const double> x);

/// Largest |h| over a dyadic mesh of the cone capped at height H above the
/// apex: 2^depth height levels, cross-sections on a grid of 2^ceil(depth/2)
/// points per axis. A lower bound for the supremum over the open cone.
double nontangential_max(const std::function<double(std::span<const double>)>& h, const Cone& cone, double height_cap,
                         int mesh_depth);

/// Mesh nodes used by nontangential_max, in evaluation order.
std::vector<Point> cone_mesh(const Cone& cone, double height_cap, int mesh_depth);

/// (sum |h_a|^p w_a)^{1/p}.
double lp_norm(const DiscreteMeasure& mu, std::span<const double> values, double p);

struct PVResult {
    std::vector<std::pair<double, double>> estimates;  // (eps, T^eps) with eps decreasing
    bool converged = false;
    double tail = 0.0;   // max pairwise difference over the last quarter
    double scale = 0.0;  // sum of |K(x - y)| w over atoms beyond the smallest eps
    double limit_estimate = 0.0;
};

struct PVSchedule {
    double eps_start = 1.0;
    double eps_min = 1e-3;
    double ratio = 0.5;
};

/// eps_k = eps_start * ratio^k while eps_k >= eps_min.
std::vector<double> make_schedule(const PVSchedule& s);

/// Truncations along a decreasing schedule. Requires eps_min >= floor_factor *
/// resolution and at least 4 schedule entries. Converged when tail < rel_tol * scale.
PVResult pv_estimate(const DiscreteMeasure& nu, const Kernel& k, std::span<const double> g,
                     std::span<const double> x, const PVSchedule& schedule, double rel_tol = 1e-3,
                     double floor_factor = 4.0);

/// pv_estimate with g = 1.
PVResult pv_estimate(const DiscreteMeasure& nu, const Kernel& k, std::span<const double> x, const PVSchedule& schedule,
                     double rel_tol = 1e-3, double floor_factor = 4.0);

/// max |v_i - v_j| over the last quarter (at least two entries) of a sequence.
double cauchy_tail(std::span<const double> values);

struct DoubleSum {
    double value = 0.0;
    double max_abs_term = 0.0;
    std::size_t pairs = 0;  // pairs with |x - y| > eps
};

/// Pair limit for the direct double sums.
inline constexpr double kMaxPairs = 1e10;

/// sum_{a in outer} sum_{b in inner, |x_a - x_b| > eps} K(x_a - x_b) w_a w_b.
/// Each term is K * (w_a * w_b), so swapped pairs cancel exactly.
DoubleSum double_truncated_detail(const DiscreteMeasure& mu, const Kernel& k, std::span<const std::size_t> outer,
                                  std::span<const std::size_t> inner, double eps);

double double_truncated(const DiscreteMeasure& mu, const Kernel& k, std::span<const std::size_t> outer,
                        std::span<const std::size_t> inner, double eps);

using RegionPredicate = std::function<bool(std::span<const double>)>;

double double_truncated(const DiscreteMeasure& mu, const Kernel& k, const RegionPredicate& outer,
                        const RegionPredicate& inner, double eps);

/// The same double sum for every eps of a schedule in one pass over the pairs.
std::vector<double> double_truncated_schedule(const DiscreteMeasure& mu, const Kernel& k,
                                              std::span<const std::size_t> outer, std::span<const std::size_t> inner,
                                              std::span<const double> eps_schedule);

/// N^2 * 2^-50 * max|term|: the float cancellation allowance for double sums.
double cancellation_bound(std::size_t atoms, double max_abs_term);

struct BoundConstants {
    double d1 = 0.0;  // 4^n C1 + (16 L)^{n-1} C0
    double d2 = 0.0;  // 4^n C1 + 2^{n-1} C0
    double cn = 0.0;  // max(3, d1, d2)
};

BoundConstants bound_constants(double c0, double c1, double L, int n);
BoundConstants bound_constants(const Kernel& k, double L);

}  // namespace siolab
