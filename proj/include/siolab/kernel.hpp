#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "siolab/linalg.hpp"

namespace siolab {

enum class KernelFamily { RieszComponent, OddHomogeneous };

/// Odd kernel homogeneous of degree -(n-1):
///   RieszComponent:  K(x) = x_i / |x|^n
///   OddHomogeneous:  K(x) = x^P / |x|^{n-1+d},  d = |P| odd
class Kernel {
public:
    static Kernel riesz(int n, int axis);
    static Kernel riesz(int n, int axis, double c0, double c1);
    static Kernel odd_homogeneous(int n, std::vector<int> exponents, double c0, double c1);

    int dim() const { return n_; }
    KernelFamily family() const { return family_; }
    int axis() const { return axis_; }
    const std::vector<int>& exponents() const { return exponents_; }
    int degree() const { return degree_; }
    double c0() const { return c0_; }
    double c1() const { return c1_; }
    std::string describe() const;

    /// Throws std::domain_error at the origin.
    double operator()(std::span<const double> x) const;

    /// Hot-path evaluation; x must point at dim() coordinates, not all zero.
    /// The numerator is odd in x and the denominator depends only on |x|^2,
    /// so K(-x) == -K(x) bit for bit.
    double eval(const double* x) const {
        double r2 = 0.0;
        for (int k = 0; k < n_; ++k) r2 += x[k] * x[k];
        double num;
        if (family_ == KernelFamily::RieszComponent) {
            num = x[axis_];
        } else {
            num = 1.0;
            for (int k = 0; k < n_; ++k)
                for (int e = 0; e < exponents_[static_cast<std::size_t>(k)]; ++e) num *= x[k];
        }
        // |x|^{power} = (r2)^{power/2}
        double den = 1.0;
        for (int e = 0; e < half_power_; ++e) den *= r2;
        if (odd_power_) den *= std::sqrt(r2);
        return num / den;
    }

private:
    Kernel(int n, KernelFamily family, int axis, std::vector<int> exponents, double c0, double c1);

    int n_;
    KernelFamily family_;
    int axis_ = 0;
    std::vector<int> exponents_;
    int degree_ = 1;
    double c0_;
    double c1_;
    int half_power_ = 0;  // floor((n-1+d)/2)
    bool odd_power_ = false;
};

/// Any scalar function on R^n \ {0}; lets the validators run on test fixtures.
using KernelFunction = std::function<double(std::span<const double>)>;

KernelFunction as_function(const Kernel& k);

/// max over random x of |K(x) + K(-x)|.
double validate_antisymmetry(const KernelFunction& k, int n, std::size_t sample_count, std::uint64_t seed);
double validate_antisymmetry(const Kernel& k, std::size_t sample_count, std::uint64_t seed);

struct BoundCheck {
    double sup = 0.0;       // sampled supremum of the scaled quantity
    double declared = 0.0;  // declared constant
    bool ok = false;
};

/// sup |K(x)| |x|^{n-1} over points on shells |x| in [1e-3, 1e3].
BoundCheck validate_size(const KernelFunction& k, int n, double declared_c0, std::size_t samples, std::uint64_t seed);
BoundCheck validate_size(const Kernel& k, std::size_t samples, std::uint64_t seed);

/// sup |grad K(x)| |x|^n with central differences, step 1e-6 |x|.
BoundCheck validate_gradient(const KernelFunction& k, int n, double declared_c1, std::size_t samples, std::uint64_t seed);
BoundCheck validate_gradient(const Kernel& k, std::size_t samples, std::uint64_t seed);

/// Central-difference gradient with a step relative to |x|.
std::vector<double> fd_gradient(const KernelFunction& k, std::span<const double> x, double rel_step = 1e-6);

}  // namespace siolab
