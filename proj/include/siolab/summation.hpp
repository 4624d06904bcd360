#pragma once

#include <cmath>

namespace siolab {

/// Neumaier's variant of Kahan summation. Order-sensitive like any float sum,
/// so callers fix the order to get reproducible results.
class CompensatedSum {
public:
    CompensatedSum() = default;
    explicit CompensatedSum(double x) : sum_(x) {}

    CompensatedSum& operator+=(double x) {
        const double t = sum_ + x;
        if (std::fabs(sum_) >= std::fabs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
        return *this;
    }

    CompensatedSum& operator+=(const CompensatedSum& other) {
        *this += other.sum_;
        *this += other.comp_;
        return *this;
    }

    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

}  // namespace siolab
