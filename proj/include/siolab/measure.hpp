#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "siolab/geometry.hpp"
#include "siolab/linalg.hpp"

namespace siolab {

/// Finite sum of weighted point masses. Coordinates are stored flat
/// (atom-major), which is what the summation kernels iterate over.
class DiscreteMeasure {
public:
    DiscreteMeasure() = default;
    DiscreteMeasure(int ambient_dim, double resolution);

    void add_atom(std::span<const double> position, double weight);
    void reserve(std::size_t count);

    int dim() const { return n_; }
    std::size_t size() const { return weights_.size(); }
    bool empty() const { return weights_.empty(); }
    double resolution() const { return h_; }
    void set_resolution(double h);
    std::optional<double> growth_declared() const { return growth_declared_; }
    void set_growth_declared(std::optional<double> c) { growth_declared_ = c; }

    std::span<const double> position(std::size_t i) const {
        return {coords_.data() + i * static_cast<std::size_t>(n_), static_cast<std::size_t>(n_)};
    }
    double weight(std::size_t i) const { return weights_[i]; }
    const std::vector<double>& coords() const { return coords_; }
    const std::vector<double>& weights() const { return weights_; }

    double total_mass() const;
    /// Smallest axis-aligned box containing the atoms.
    std::pair<Point, Point> bounding_box() const;
    double support_diameter() const;  // diagonal of the bounding box

    /// Hexadecimal-float text form: "n=<dim> count=<N> h=<res>" then one
    /// "x1 ... xn w" line per atom.
    void write_text(std::ostream& os) const;
    static DiscreteMeasure read_text(std::istream& is);

private:
    int n_ = 0;
    double h_ = 0.0;
    std::vector<double> coords_;
    std::vector<double> weights_;
    std::optional<double> growth_declared_;
};

/// sigma = H^{n-1} restricted to the graph over a parameter box, one atom per
/// grid cell carrying the surface element. `offset` moves the atoms vertically.
struct GraphMeasureSpec {
    LipschitzGraph graph;
    ParamBox box;
    int cells_per_axis = 64;
    double offset = 0.0;
};

/// Four-corners Cantor set on the unit square, contraction ratio 1/4.
struct CantorSpec {
    int generation = 4;
};

/// Lebesgue measure (density `density`) on a shape, sampled on a grid.
struct UniformOnShapeSpec {
    Shape shape;
    int cells_per_axis = 32;
    double density = 1.0;
};

/// Lebesgue slab of the given thickness sitting on top of the graph (or
/// hanging below it when `below` is set), with density 1/thickness so the mass
/// per unit of parameter area is 1.
struct SlabSpec {
    LipschitzGraph graph;
    ParamBox box;
    double thickness = 0.25;
    int cells_per_axis = 64;
    bool below = false;
};

using MeasureSpec = std::variant<GraphMeasureSpec, CantorSpec, UniformOnShapeSpec, SlabSpec>;

/// Atom count limit for build().
inline constexpr std::size_t kMaxAtoms = 100'000'000;

DiscreteMeasure build(const MeasureSpec& spec);

/// Geometric grid of `count` radii from lo to hi inclusive.
std::vector<double> geometric_grid(double lo, double hi, std::size_t count);

/// max over (center, r) of mu(closed B(x, r)) / r^{n-1}.
double growth_constant(const DiscreteMeasure& mu, std::span<const Point> centers, std::span<const double> radii);

/// min over (center, r) of mu(closed B(x, r)) / r^{n-1}.
double lower_density(const DiscreteMeasure& mu, std::span<const Point> centers, std::span<const double> radii);

/// Atom positions as points; convenient center sets for the estimators above.
std::vector<Point> atom_positions(const DiscreteMeasure& mu, std::size_t stride = 1);

struct GraphSplit {
    DiscreteMeasure on;
    DiscreteMeasure above;
    DiscreteMeasure below;
};

GraphSplit split_by_graph(const DiscreteMeasure& mu, const LipschitzGraph& graph);

DiscreteMeasure restrict(const DiscreteMeasure& mu, const std::function<bool(std::span<const double>)>& keep);
DiscreteMeasure restrict(const DiscreteMeasure& mu, const Shape& shape);

/// Indices of atoms satisfying the predicate, in atom order.
std::vector<std::size_t> select(const DiscreteMeasure& mu, const std::function<bool(std::span<const double>)>& keep);

}  // namespace siolab
