#include "siolab/pairing.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "siolab/summation.hpp"

namespace siolab {

namespace {

std::vector<std::size_t> atoms_in(const DiscreteMeasure& mu, const Shape& s) {
    return select(mu, [&](std::span<const double> p) { return s.contains(p); });
}

struct Parts {
    std::vector<std::size_t> both, p_only, q_only;
};

Parts overlap_parts(const DiscreteMeasure& mu, const Shape& P, const Shape& Q) {
    Parts out;
    for (std::size_t a = 0; a < mu.size(); ++a) {
        const bool in_p = P.contains(mu.position(a));
        const bool in_q = Q.contains(mu.position(a));
        if (in_p && in_q) out.both.push_back(a);
        else if (in_p) out.p_only.push_back(a);
        else if (in_q) out.q_only.push_back(a);
    }
    return out;
}

}  // namespace

double pairing(const DiscreteMeasure& mu, const Kernel& k, const SimpleFunction& f, const SimpleFunction& g,
               double eps) {
    if (!(eps > 0)) throw std::invalid_argument("pairing: eps must be positive");
    std::vector<std::vector<std::size_t>> inner;
    for (const auto& t : f.terms()) inner.push_back(atoms_in(mu, t.shape));
    CompensatedSum acc;
    for (const auto& tj : g.terms()) {
        const auto outer = atoms_in(mu, tj.shape);
        for (std::size_t i = 0; i < f.size(); ++i)
            acc += tj.coefficient * f.terms()[i].coefficient * double_truncated(mu, k, outer, inner[i], eps);
    }
    return acc.value();
}

IDecomposition i_decomposition(const DiscreteMeasure& mu, const Kernel& k, const Shape& P, const Shape& Q,
                               double eps) {
    const Parts parts = overlap_parts(mu, P, Q);
    IDecomposition out;
    const auto d1 = double_truncated_detail(mu, k, parts.both, parts.both, eps);
    const auto d2 = double_truncated_detail(mu, k, parts.p_only, parts.both, eps);
    const auto d3 = double_truncated_detail(mu, k, parts.both, parts.q_only, eps);
    const auto d4 = double_truncated_detail(mu, k, parts.p_only, parts.q_only, eps);
    out.i1 = d1.value;
    out.i2 = d2.value;
    out.i3 = d3.value;
    out.i4 = d4.value;
    out.max_abs_term = std::max({d1.max_abs_term, d2.max_abs_term, d3.max_abs_term, d4.max_abs_term});
    out.undecomposed = double_truncated(mu, k, atoms_in(mu, P), atoms_in(mu, Q), eps);
    out.atoms = parts.both.size() + parts.p_only.size() + parts.q_only.size();
    return out;
}

FubiniCheck fubini_check(const DiscreteMeasure& mu, const Kernel& k, const Shape& P, const Shape& Q, double eps) {
    const Parts parts = overlap_parts(mu, P, Q);
    const auto i3 = double_truncated_detail(mu, k, parts.both, parts.q_only, eps);
    const auto j = double_truncated_detail(mu, k, parts.q_only, parts.both, eps);
    FubiniCheck out;
    out.i3 = i3.value;
    out.j = j.value;
    out.residual = std::fabs(i3.value + j.value);
    out.bound = cancellation_bound(parts.both.size() + parts.q_only.size(), std::max(i3.max_abs_term, j.max_abs_term));
    return out;
}

std::vector<double> default_pairing_schedule(const DiscreteMeasure& mu, std::size_t count) {
    std::vector<double> out(count);
    const double eps0 = mu.support_diameter() / 4.0;
    for (std::size_t k = 0; k < count; ++k) out[k] = std::ldexp(eps0, -static_cast<int>(k));
    return out;
}

PairingTrace convergence_study(const DiscreteMeasure& mu, const Kernel& k, const SimpleFunction& f,
                               const SimpleFunction& g, std::span<const double> eps_schedule, double floor_factor) {
    if (eps_schedule.size() < 8) throw std::invalid_argument("convergence_study: schedule needs at least 8 entries");
    for (std::size_t i = 1; i < eps_schedule.size(); ++i)
        if (!(eps_schedule[i] < eps_schedule[i - 1]))
            throw std::invalid_argument("convergence_study: schedule must be strictly decreasing");
    if (eps_schedule.back() < floor_factor * mu.resolution() * (1.0 - 1e-12))
        throw std::invalid_argument("convergence_study: eps_min is below the resolution floor");

    const std::size_t K = eps_schedule.size();
    PairingTrace trace;
    trace.eps_schedule.assign(eps_schedule.begin(), eps_schedule.end());
    std::vector<CompensatedSum> totals(K);

    for (std::size_t j = 0; j < g.size(); ++j) {
        const Shape& P = g.terms()[j].shape;
        for (std::size_t i = 0; i < f.size(); ++i) {
            const Shape& Q = f.terms()[i].shape;
            const double weight = g.terms()[j].coefficient * f.terms()[i].coefficient;
            const Parts parts = overlap_parts(mu, P, Q);
            const RegionDecomposition regions = decompose_complement(Q);

            const auto i1 = double_truncated_schedule(mu, k, parts.both, parts.both, eps_schedule);
            const auto i3 = double_truncated_schedule(mu, k, parts.both, parts.q_only, eps_schedule);
            std::vector<CompensatedSum> i2(K), i4(K);
            // P \ Q split into A_r(Q) & P
            std::vector<std::vector<std::size_t>> routed(regions.size());
            for (std::size_t a : parts.p_only) {
                const auto r = regions.region_of(mu.position(a));
                routed[r.value_or(0)].push_back(a);
            }
            for (std::size_t r = 0; r < regions.size(); ++r) {
                if (routed[r].empty()) continue;
                const auto a2 = double_truncated_schedule(mu, k, routed[r], parts.both, eps_schedule);
                const auto a4 = double_truncated_schedule(mu, k, routed[r], parts.q_only, eps_schedule);
                for (std::size_t e = 0; e < K; ++e) {
                    i2[e] += a2[e];
                    i4[e] += a4[e];
                }
            }
            const auto i2_direct = double_truncated_schedule(mu, k, parts.p_only, parts.both, eps_schedule);

            for (std::size_t e = 0; e < K; ++e) {
                PairingTermRow row{j, i, eps_schedule[e], weight, i1[e], i2[e].value(), i3[e], i4[e].value()};
                trace.routing_residual = std::max(trace.routing_residual, std::fabs(row.i2 - i2_direct[e]));
                CompensatedSum term;
                term += row.i1;
                term += row.i2;
                term += row.i3;
                term += row.i4;
                totals[e] += weight * term.value();
                trace.rows.push_back(row);
            }
            // allowance: every pair term is bounded by C0 eps_min^{1-n} w_a w_b
            auto max_weight = [&](const std::vector<std::size_t>& idx) {
                double m = 0.0;
                for (std::size_t a : idx) m = std::max(m, mu.weight(a));
                return m;
            };
            const double kmax = k.c0() * std::pow(eps_schedule.back(), -(k.dim() - 1));
            trace.routing_bound =
                std::max(trace.routing_bound, cancellation_bound(parts.p_only.size() + parts.both.size(),
                                                                 kmax * max_weight(parts.p_only) * max_weight(parts.both)));
        }
    }
    for (std::size_t e = 0; e < K; ++e) trace.values.push_back(totals[e].value());
    trace.cauchy_tail = cauchy_tail(trace.values);
    return trace;
}

}  // namespace siolab
