#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace siolab {

/// Largest ambient dimension supported by the stack-buffer hot paths.
inline constexpr int kMaxDim = 8;

using Point = std::vector<double>;

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

inline double distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

inline void check_dim(int n) {
    if (n < 2 || n > kMaxDim) throw std::invalid_argument("ambient dimension must be in [2, 8]");
}

/// Orthogonal n x n matrix, row-major. Maps graph-frame coordinates into
/// ambient coordinates: p = R q.
class Rotation {
public:
    Rotation() = default;
    Rotation(int n, std::vector<double> entries);

    static Rotation identity(int n);
    /// Orthogonal map sending the last frame axis to sign * e_axis. Built from a
    /// column swap, so it may be a reflection.
    static Rotation axis_to_vertical(int n, int axis, int sign);
    /// Planar rotation by `angle` in the (i, j) coordinate plane.
    static Rotation givens(int n, int i, int j, double angle);

    int dim() const { return n_; }
    double operator()(int r, int c) const { return m_[static_cast<std::size_t>(r * n_ + c)]; }

    void apply(std::span<const double> q, std::span<double> p) const;
    void apply_transpose(std::span<const double> p, std::span<double> q) const;
    Rotation compose(const Rotation& rhs) const;  // this * rhs
    bool is_identity() const;

    /// max |R^T R - I| entry.
    double orthogonality_error() const;

private:
    int n_ = 0;
    std::vector<double> m_;
};

}  // namespace siolab
