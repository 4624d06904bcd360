#include "siolab/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "siolab/rng.hpp"

namespace siolab {

Kernel::Kernel(int n, KernelFamily family, int axis, std::vector<int> exponents, double c0, double c1)
    : n_(n), family_(family), axis_(axis), exponents_(std::move(exponents)), c0_(c0), c1_(c1) {
    check_dim(n_);
    if (!(c0_ > 0) || !(c1_ > 0)) throw std::invalid_argument("kernel: declared constants must be positive");
    if (family_ == KernelFamily::RieszComponent) {
        if (axis_ < 0 || axis_ >= n_) throw std::invalid_argument("kernel: riesz axis out of range");
        degree_ = 1;
    } else {
        if (exponents_.size() != static_cast<std::size_t>(n_)) throw std::invalid_argument("kernel: need n exponents");
        degree_ = 0;
        for (int e : exponents_) {
            if (e < 0) throw std::invalid_argument("kernel: exponents must be nonnegative");
            degree_ += e;
        }
        if (degree_ % 2 == 0) throw std::invalid_argument("kernel: monomial degree must be odd");
    }
    const int power = n_ - 1 + degree_;
    half_power_ = power / 2;
    odd_power_ = (power % 2) != 0;
}

Kernel Kernel::riesz(int n, int axis) {
    // sup |grad K| |x|^n is exactly n-1 for the Riesz components
    return riesz(n, axis, 1.0, n == 2 ? 1.0 : static_cast<double>(n + 1));
}

Kernel Kernel::riesz(int n, int axis, double c0, double c1) {
    return Kernel(n, KernelFamily::RieszComponent, axis, {}, c0, c1);
}

Kernel Kernel::odd_homogeneous(int n, std::vector<int> exponents, double c0, double c1) {
    return Kernel(n, KernelFamily::OddHomogeneous, 0, std::move(exponents), c0, c1);
}

std::string Kernel::describe() const {
    std::ostringstream os;
    if (family_ == KernelFamily::RieszComponent) {
        os << "riesz(n=" << n_ << " axis=" << axis_ << ")";
    } else {
        os << "odd_homogeneous(n=" << n_ << " P=";
        for (std::size_t k = 0; k < exponents_.size(); ++k) os << (k ? "," : "") << exponents_[k];
        os << ")";
    }
    return os.str();
}

double Kernel::operator()(std::span<const double> x) const {
    if (x.size() != static_cast<std::size_t>(n_)) throw std::invalid_argument("kernel: dimension mismatch");
    bool zero = true;
    for (double v : x) zero = zero && v == 0.0;
    if (zero) throw std::domain_error("kernel: evaluated at the origin");
    return eval(x.data());
}

KernelFunction as_function(const Kernel& k) {
    return [k](std::span<const double> x) { return k(x); };
}

namespace {

Point random_direction(Rng& rng, int n) {
    Point x(static_cast<std::size_t>(n));
    double r = 0.0;
    while (r < 1e-12) {
        for (auto& v : x) v = rng.normal();
        r = norm(x);
    }
    for (auto& v : x) v /= r;
    return x;
}

/// Random shell points plus the coordinate axes and diagonals at a few radii,
/// where homogeneous kernels typically attain their extremes.
std::vector<Point> probe_points(int n, std::size_t samples, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<Point> pts;
    for (double radius : {1e-3, 1.0, 1e3}) {
        for (int k = 0; k < n; ++k)
            for (double s : {1.0, -1.0}) {
                Point x(static_cast<std::size_t>(n), 0.0);
                x[static_cast<std::size_t>(k)] = s * radius;
                pts.push_back(x);
            }
        Point d(static_cast<std::size_t>(n), radius / std::sqrt(static_cast<double>(n)));
        pts.push_back(d);
    }
    for (std::size_t i = 0; i < samples; ++i) {
        Point x = random_direction(rng, n);
        const double radius = rng.log_uniform(1e-3, 1e3);
        for (auto& v : x) v *= radius;
        pts.push_back(std::move(x));
    }
    return pts;
}

}  // namespace

double validate_antisymmetry(const KernelFunction& k, int n, std::size_t sample_count, std::uint64_t seed) {
    if (sample_count == 0) throw std::invalid_argument("validate_antisymmetry: sample_count must be >= 1");
    Rng rng(seed);
    double worst = 0.0;
    Point neg(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < sample_count; ++i) {
        Point x = random_direction(rng, n);
        const double radius = rng.log_uniform(1e-3, 1e3);
        for (std::size_t j = 0; j < x.size(); ++j) {
            x[j] *= radius;
            neg[j] = -x[j];
        }
        worst = std::max(worst, std::fabs(k(x) + k(neg)));
    }
    return worst;
}

double validate_antisymmetry(const Kernel& k, std::size_t sample_count, std::uint64_t seed) {
    return validate_antisymmetry(as_function(k), k.dim(), sample_count, seed);
}

BoundCheck validate_size(const KernelFunction& k, int n, double declared_c0, std::size_t samples, std::uint64_t seed) {
    BoundCheck out;
    out.declared = declared_c0;
    for (const auto& x : probe_points(n, samples, seed))
        out.sup = std::max(out.sup, std::fabs(k(x)) * std::pow(norm(x), n - 1));
    out.ok = out.sup <= declared_c0 * (1.0 + 1e-9);
    return out;
}

BoundCheck validate_size(const Kernel& k, std::size_t samples, std::uint64_t seed) {
    return validate_size(as_function(k), k.dim(), k.c0(), samples, seed);
}

std::vector<double> fd_gradient(const KernelFunction& k, std::span<const double> x, double rel_step) {
    const double h = rel_step * norm(x);
    Point probe(x.begin(), x.end());
    std::vector<double> g(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) {
        probe[j] = x[j] + h;
        const double fp = k(probe);
        probe[j] = x[j] - h;
        const double fm = k(probe);
        probe[j] = x[j];
        g[j] = (fp - fm) / (2.0 * h);
    }
    return g;
}

BoundCheck validate_gradient(const KernelFunction& k, int n, double declared_c1, std::size_t samples,
                             std::uint64_t seed) {
    BoundCheck out;
    out.declared = declared_c1;
    for (const auto& x : probe_points(n, samples, seed))
        out.sup = std::max(out.sup, norm(fd_gradient(k, x)) * std::pow(norm(x), n));
    out.ok = out.sup <= declared_c1 * (1.0 + 1e-4);
    return out;
}

BoundCheck validate_gradient(const Kernel& k, std::size_t samples, std::uint64_t seed) {
    return validate_gradient(as_function(k), k.dim(), k.c1(), samples, seed);
}

}  // namespace siolab
