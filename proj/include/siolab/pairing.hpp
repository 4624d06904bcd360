#pragma once

#include <string>
#include <vector>

#include "siolab/geometry.hpp"
#include "siolab/kernel.hpp"
#include "siolab/measure.hpp"
#include "siolab/operators.hpp"
#include "siolab/simple_function.hpp"

namespace siolab {

/// integral of T^eps f(x) g(x) d mu x
///   = sum_j sum_i b_j a_i  sum_{x in P_j} sum_{y in Q_i, |x-y| > eps} K(x - y)
/// for f = sum a_i chi_{Q_i}, g = sum b_j chi_{P_j}.
double pairing(const DiscreteMeasure& mu, const Kernel& k, const SimpleFunction& f, const SimpleFunction& g, double eps);

/// Split of the P x Q double sum (outer x in P, inner y in Q) by overlap:
///   I1: P&Q x P&Q    I2: P\Q x P&Q    I3: P&Q x Q\P    I4: P\Q x Q\P
struct IDecomposition {
    double i1 = 0.0, i2 = 0.0, i3 = 0.0, i4 = 0.0;
    double undecomposed = 0.0;  // the P x Q sum computed directly
    double max_abs_term = 0.0;
    std::size_t atoms = 0;  // atoms in P or Q
    double total() const { return i1 + i2 + i3 + i4; }
    double bound() const { return cancellation_bound(atoms, max_abs_term); }
};

IDecomposition i_decomposition(const DiscreteMeasure& mu, const Kernel& k, const Shape& P, const Shape& Q, double eps);

struct FubiniCheck {
    double i3 = 0.0;
    double j = 0.0;  // sum over x in Q\P, y in P&Q: the relabelled I3
    double residual = 0.0;
    double bound = 0.0;
    bool ok() const { return residual <= bound; }
};

FubiniCheck fubini_check(const DiscreteMeasure& mu, const Kernel& k, const Shape& P, const Shape& Q, double eps);

struct PairingTermRow {
    std::size_t outer_term = 0;  // j: index into g
    std::size_t inner_term = 0;  // i: index into f
    double eps = 0.0;
    double weight = 0.0;  // b_j a_i
    double i1 = 0.0, i2 = 0.0, i3 = 0.0, i4 = 0.0;
};

struct PairingTrace {
    std::vector<double> eps_schedule;
    std::vector<double> values;
    double cauchy_tail = 0.0;
    std::vector<PairingTermRow> rows;
    /// max |I2 via A_r(Q) & P - I2 via P\Q| and its cancellation allowance
    double routing_residual = 0.0;
    double routing_bound = 0.0;
};

/// Pairing along a geometric schedule (>= 8 entries, eps_min >= floor_factor * h),
/// with I2 and I4 routed through the complement regions A_r(Q).
PairingTrace convergence_study(const DiscreteMeasure& mu, const Kernel& k, const SimpleFunction& f,
                               const SimpleFunction& g, std::span<const double> eps_schedule,
                               double floor_factor = 4.0);

/// eps_k = eps0 * 2^-k with eps0 = diam(spt mu) / 4, for `count` entries.
std::vector<double> default_pairing_schedule(const DiscreteMeasure& mu, std::size_t count);

}  // namespace siolab
