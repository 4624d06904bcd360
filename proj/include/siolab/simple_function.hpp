#pragma once

#include <span>
#include <string>
#include <vector>

#include "siolab/geometry.hpp"

namespace siolab {

enum class SimpleSpace { Balls, Rectangles };

/// Finite linear combination of indicators of closed balls (X_B) or closed,
/// possibly rotated, rectangles (X_Q).
class SimpleFunction {
public:
    struct Term {
        double coefficient;
        Shape shape;
    };

    SimpleFunction() = default;
    SimpleFunction(SimpleSpace space, std::vector<Term> terms);

    static SimpleFunction indicator(const Shape& shape, double coefficient = 1.0);

    SimpleSpace space() const { return space_; }
    const std::vector<Term>& terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }

    double operator()(std::span<const double> p) const;

    /// a*this + b*other; both must live in the same space.
    SimpleFunction combine(double a, const SimpleFunction& other, double b) const;

    std::string describe() const;

private:
    SimpleSpace space_ = SimpleSpace::Balls;
    std::vector<Term> terms_;
};

}  // namespace siolab
