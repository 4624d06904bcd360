#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "siolab/linalg.hpp"

namespace siolab {

enum class Side { Below, On, Above };

const char* to_string(Side s);

// Graph profiles f: R^{n-1} -> R. Each carries a closed-form Lipschitz constant.

/// f(u) = <slope, u> + offset
struct AffineProfile {
    std::vector<double> slope;
    double offset = 0.0;
};

/// f(u) = amplitude * sum_k tri(u_k / period), tri(s) = 2|s - round(s)| in [0, 1].
struct SawtoothProfile {
    double amplitude = 0.25;
    double period = 0.5;
};

/// f(u) = slope * |u|
struct ConeProfile {
    double slope = 1.0;
};

/// f(u) = amplitude * exp(-|u|^2 / width^2)
struct SmoothBumpProfile {
    double amplitude = 0.5;
    double width = 0.5;
};

/// Spherical cap of radius `radius` over `center`, continued past polar angle
/// alpha (tan(alpha) = `cone_slope`) by its tangent cone. Supports the ball of
/// that radius centered at (center, base).
struct CapConeProfile {
    std::vector<double> center;
    double base = 0.0;
    double radius = 1.0;
    double cone_slope = 1.0;
};

using Profile = std::variant<AffineProfile, SawtoothProfile, ConeProfile, SmoothBumpProfile, CapConeProfile>;

std::string profile_name(const Profile& p);

/// Graph of a Lipschitz function in a rotated frame. Frame coordinates are
/// q = (u, t) with u in R^{n-1}; ambient points are p = R q. `shift` moves the
/// graph vertically in the frame: the graph is t = f(u) + shift.
class LipschitzGraph {
public:
    LipschitzGraph(int ambient_dim, Profile profile, Rotation rotation = {}, double shift = 0.0);

    int dim() const { return n_; }
    const Profile& profile() const { return profile_; }
    const Rotation& rotation() const { return rotation_; }
    double shift() const { return shift_; }
    double lip() const { return lip_; }

    /// f(u) + shift for u in R^{n-1}.
    double height(std::span<const double> u) const;

    void to_frame(std::span<const double> p, std::span<double> q) const;
    void to_ambient(std::span<const double> q, std::span<double> p) const;

    /// Ambient point (u, f(u)) of the graph.
    Point point_at(std::span<const double> u) const;

    /// t - f(u) in the frame. Positive above, negative below.
    double signed_height(std::span<const double> p) const;

    /// On means |t - f(u)| <= 1e-12 * (1 + |p|).
    Side classify(std::span<const double> p) const;

    LipschitzGraph shifted(double delta) const;

private:
    int n_;
    Profile profile_;
    Rotation rotation_;
    double shift_;
    double lip_;
};

/// Axis-aligned parameter box in R^{n-1}.
struct ParamBox {
    std::vector<double> lo;
    std::vector<double> hi;
};

/// max over sampled pairs of |f(u) - f(v)| / |u - v|. Half of the pairs are
/// short (relative separation 1e-4) so kinks and steep spots are resolved.
double lipschitz_estimate(const LipschitzGraph& graph, std::size_t sample_count, const ParamBox& box,
                          std::uint64_t seed = 1);

/// Open upward cone { (u, t) : t - f(u0) > 4L |u - u0| } at a graph point.
class Cone {
public:
    Cone(LipschitzGraph graph, std::vector<double> apex_u, double aperture);

    const LipschitzGraph& graph() const { return graph_; }
    double aperture() const { return L_; }
    const std::vector<double>& apex_param() const { return apex_u_; }
    /// Ambient apex point (u0, f(u0)).
    const Point& apex() const { return apex_; }

    bool contains(std::span<const double> y) const;

private:
    LipschitzGraph graph_;
    std::vector<double> apex_u_;
    double L_;
    Point apex_;
};

struct Ball {
    Point center;
    double radius = 1.0;
};

struct Rectangle {
    Point center;
    std::vector<double> half_widths;
    Rotation rotation;  // columns are the rectangle axes
};

/// Closed ball or closed (possibly rotated) rectangle.
class Shape {
public:
    static Shape ball(Point center, double radius);
    static Shape rectangle(Point center, std::vector<double> half_widths, Rotation rotation = {});

    int dim() const;
    bool is_ball() const { return std::holds_alternative<Ball>(v_); }
    const Ball& as_ball() const { return std::get<Ball>(v_); }
    const Rectangle& as_rectangle() const { return std::get<Rectangle>(v_); }

    bool contains(std::span<const double> p) const;
    std::string describe() const;

private:
    explicit Shape(std::variant<Ball, Rectangle> v) : v_(std::move(v)) {}
    std::variant<Ball, Rectangle> v_;
};

struct RegionPiece {
    LipschitzGraph separator;
    std::string label;
};

/// Complement of a shape split into 2n regions A_i, each lying strictly above
/// its separating graph F_i while the shape lies on or below every F_i.
/// A point belongs to the piece facing its dominant direction (largest
/// coordinate of p - center, in rectangle units for rectangles) when it lies
/// above that piece's graph, otherwise to the first piece it lies above.
class RegionDecomposition {
public:
    RegionDecomposition(Shape shape, std::vector<RegionPiece> pieces);

    const Shape& shape() const { return shape_; }
    const std::vector<RegionPiece>& pieces() const { return pieces_; }
    std::size_t size() const { return pieces_.size(); }

    /// Index of the region containing p, or nullopt if p lies in the shape.
    std::optional<std::size_t> region_of(std::span<const double> p) const;
    bool in_region(std::size_t i, std::span<const double> p) const;

private:
    Shape shape_;
    std::vector<RegionPiece> pieces_;
};

RegionDecomposition decompose_complement(const Shape& shape);

}  // namespace siolab
