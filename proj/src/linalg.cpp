#include "siolab/linalg.hpp"

#include <algorithm>

namespace siolab {

Rotation::Rotation(int n, std::vector<double> entries) : n_(n), m_(std::move(entries)) {
    if (n < 1 || m_.size() != static_cast<std::size_t>(n * n))
        throw std::invalid_argument("rotation: expected n*n entries");
    if (orthogonality_error() > 1e-12) throw std::invalid_argument("rotation: matrix is not orthogonal");
}

Rotation Rotation::identity(int n) {
    std::vector<double> m(static_cast<std::size_t>(n * n), 0.0);
    for (int i = 0; i < n; ++i) m[static_cast<std::size_t>(i * n + i)] = 1.0;
    return Rotation(n, std::move(m));
}

Rotation Rotation::axis_to_vertical(int n, int axis, int sign) {
    if (axis < 0 || axis >= n) throw std::invalid_argument("rotation: axis out of range");
    std::vector<double> m(static_cast<std::size_t>(n * n), 0.0);
    // column c of R is the image of frame axis c
    for (int c = 0; c < n; ++c) {
        int row = c;
        if (c == n - 1) row = axis;
        else if (c == axis) row = n - 1;
        m[static_cast<std::size_t>(row * n + c)] = (c == n - 1) ? static_cast<double>(sign) : 1.0;
    }
    return Rotation(n, std::move(m));
}

Rotation Rotation::givens(int n, int i, int j, double angle) {
    Rotation r = identity(n);
    const double c = std::cos(angle), s = std::sin(angle);
    auto at = [&](int a, int b) -> double& { return r.m_[static_cast<std::size_t>(a * n + b)]; };
    at(i, i) = c;
    at(j, j) = c;
    at(i, j) = -s;
    at(j, i) = s;
    return r;
}

void Rotation::apply(std::span<const double> q, std::span<double> p) const {
    if (m_.empty()) {
        std::copy(q.begin(), q.end(), p.begin());
        return;
    }
    for (int r = 0; r < n_; ++r) {
        double s = 0.0;
        for (int c = 0; c < n_; ++c) s += (*this)(r, c) * q[static_cast<std::size_t>(c)];
        p[static_cast<std::size_t>(r)] = s;
    }
}

void Rotation::apply_transpose(std::span<const double> p, std::span<double> q) const {
    if (m_.empty()) {
        std::copy(p.begin(), p.end(), q.begin());
        return;
    }
    for (int c = 0; c < n_; ++c) {
        double s = 0.0;
        for (int r = 0; r < n_; ++r) s += (*this)(r, c) * p[static_cast<std::size_t>(r)];
        q[static_cast<std::size_t>(c)] = s;
    }
}

Rotation Rotation::compose(const Rotation& rhs) const {
    if (m_.empty()) return rhs;
    if (rhs.m_.empty()) return *this;
    std::vector<double> out(static_cast<std::size_t>(n_ * n_), 0.0);
    for (int r = 0; r < n_; ++r)
        for (int c = 0; c < n_; ++c) {
            double s = 0.0;
            for (int k = 0; k < n_; ++k) s += (*this)(r, k) * rhs(k, c);
            out[static_cast<std::size_t>(r * n_ + c)] = s;
        }
    return Rotation(n_, std::move(out));
}

bool Rotation::is_identity() const {
    for (int r = 0; r < n_; ++r)
        for (int c = 0; c < n_; ++c)
            if ((*this)(r, c) != (r == c ? 1.0 : 0.0)) return false;
    return true;
}

double Rotation::orthogonality_error() const {
    double worst = 0.0;
    for (int a = 0; a < n_; ++a)
        for (int b = 0; b < n_; ++b) {
            double s = 0.0;
            for (int k = 0; k < n_; ++k) s += (*this)(k, a) * (*this)(k, b);
            worst = std::max(worst, std::fabs(s - (a == b ? 1.0 : 0.0)));
        }
    return worst;
}

}  // namespace siolab
