#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "siolab/operators.hpp"
#include "siolab/parallel.hpp"
#include "siolab/rng.hpp"

using namespace siolab;

namespace {

DiscreteMeasure two_atoms() {
    DiscreteMeasure nu(2, 0.1);
    nu.add_atom(Point{1, 0}, 1);
    nu.add_atom(Point{2, 0}, 1);
    return nu;
}

DiscreteMeasure random_measure(Rng& rng, int n, std::size_t atoms) {
    DiscreteMeasure mu(n, 1e-6);
    Point p(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < atoms; ++i) {
        for (auto& c : p) c = rng.uniform(-1, 1);
        mu.add_atom(p, rng.uniform(0.1, 1.0));
    }
    return mu;
}

// Oracle for T^eps: plain long double accumulation in atom order.
long double brute_truncated(const DiscreteMeasure& nu, const Kernel& k, const std::vector<double>& g, const Point& x,
                            double eps) {
    long double s = 0;
    Point d(x.size());
    for (std::size_t a = 0; a < nu.size(); ++a) {
        for (std::size_t j = 0; j < x.size(); ++j) d[j] = x[j] - nu.position(a)[j];
        if (norm(d) > eps) s += static_cast<long double>(k(d)) * nu.weight(a) * g[a];
    }
    return s;
}

// Oracle for T*: evaluate T^eps at every atom distance and just above zero.
long double brute_maximal(const DiscreteMeasure& nu, const Kernel& k, const std::vector<double>& g, const Point& x) {
    std::vector<double> cands{0.0};
    for (std::size_t a = 0; a < nu.size(); ++a) cands.push_back(distance(x, nu.position(a)));
    long double best = 0;
    for (double e : cands) best = std::max(best, std::fabs(brute_truncated(nu, k, g, x, e)));
    return best;
}

long double brute_double(const DiscreteMeasure& mu, const Kernel& k, const std::vector<std::size_t>& outer,
                         const std::vector<std::size_t>& inner, double eps) {
    long double s = 0;
    Point d(static_cast<std::size_t>(mu.dim()));
    for (std::size_t a : outer)
        for (std::size_t b : inner) {
            for (std::size_t j = 0; j < d.size(); ++j) d[j] = mu.position(a)[j] - mu.position(b)[j];
            if (norm(d) > eps) s += static_cast<long double>(k(d)) * mu.weight(a) * mu.weight(b);
        }
    return s;
}

}  // namespace

TEST_CASE("truncated integral on two atoms") {
    const auto nu = two_atoms();
    const Kernel k = Kernel::riesz(2, 0);
    const std::vector<double> one(2, 1.0);
    const Point x{0, 0};
    CHECK(truncated(nu, k, one, x, 0.5) == -1.5);
    CHECK(truncated(nu, k, one, x, 1.0) == -0.5);  // strict: the atom at distance 1 is excluded
    CHECK(truncated(nu, k, one, x, 2.0) == 0.0);
    CHECK(truncated(nu, k, one, x, 100.0) == 0.0);
    CHECK_THROWS_AS(truncated(nu, k, one, x, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(truncated(nu, k, std::vector<double>{1.0}, x, 0.5), std::invalid_argument);

    DiscreteMeasure sym(2, 0.1);
    sym.add_atom(Point{0.3, 0.4}, 1);
    sym.add_atom(Point{-0.3, -0.4}, 1);
    CHECK(truncated(sym, k, one, x, 0.1) == 0.0);
}

TEST_CASE("maximal and Hardy-Littlewood maximal on two atoms") {
    const auto nu = two_atoms();
    const Kernel k = Kernel::riesz(2, 0);
    const std::vector<double> one(2, 1.0), zero(2, 0.0);
    const Point x{0, 0};
    CHECK(maximal(nu, k, one, x) == 1.5);
    CHECK(maximal(nu, k, zero, x) == 0.0);
    const auto prof = truncation_profile(nu, k, one, x);
    CHECK(prof.breakpoints == std::vector<double>{1.0, 2.0});
    CHECK(prof.values == std::vector<double>{-1.5, -0.5});
    CHECK(prof.sup() == 1.5);

    const auto hl = hl_maximal(nu, one, x);
    CHECK_FALSE(hl.infinite);
    CHECK(hl.value == 1.0);
    CHECK(hl_maximal(nu, zero, x).value == 0.0);
    CHECK(hl_maximal(nu, one, Point{1, 0}).infinite);
    // a zero-weight atom at x does not make the supremum infinite
    CHECK_FALSE(hl_maximal(nu, std::vector<double>{0.0, 1.0}, Point{1, 0}).infinite);

    DiscreteMeasure single(2, 0.1);
    single.add_atom(Point{0.6, 0.8}, 0.7);
    CHECK(maximal(single, k, std::vector<double>{2.0}, x) == doctest::Approx(std::fabs(k(Point{-0.6, -0.8})) * 0.7 * 2.0));
}

TEST_CASE("maximal matches the brute-force oracle on random configurations") {
    Rng rng(99);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 2 + static_cast<int>(rng.below(2));
        const auto nu = random_measure(rng, n, 1 + rng.below(60));
        const Kernel k = rng.uniform() < 0.5 ? Kernel::riesz(n, static_cast<int>(rng.below(n)))
                                             : Kernel::odd_homogeneous(n, n == 2 ? std::vector<int>{1, 2}
                                                                                 : std::vector<int>{0, 3, 0},
                                                                       1, 10);
        std::vector<double> g(nu.size());
        for (auto& v : g) v = rng.uniform(-2, 2);
        Point x(static_cast<std::size_t>(n));
        for (auto& c : x) c = rng.uniform(-1.2, 1.2);
        if (trial % 5 == 0) x.assign(nu.position(0).begin(), nu.position(0).end());  // x on an atom

        long double scale = 0;
        Point d(x.size());
        for (std::size_t a = 0; a < nu.size(); ++a) {
            for (std::size_t j = 0; j < x.size(); ++j) d[j] = x[j] - nu.position(a)[j];
            if (norm(d) > 0) scale += std::fabs(k(d) * nu.weight(a) * g[a]);
        }
        const double tol = 1e-12 * static_cast<double>(scale) + 1e-300;
        CHECK(std::fabs(maximal(nu, k, g, x) - static_cast<double>(brute_maximal(nu, k, g, x))) <= tol);
        const double e = rng.uniform(0.01, 1.0);
        CHECK(std::fabs(truncated(nu, k, g, x, e) - static_cast<double>(brute_truncated(nu, k, g, x, e))) <= tol);

        // T^eps is constant between breakpoints
        const auto prof = truncation_profile(nu, k, g, x);
        for (std::size_t j = 0; j < prof.breakpoints.size(); ++j) {
            const double lo = j == 0 ? 0.0 : prof.breakpoints[j - 1];
            const double mid = 0.5 * (lo + prof.breakpoints[j]);
            if (mid > 0) CHECK(std::fabs(truncated(nu, k, g, x, mid) - prof.values[j]) <= tol);
        }
    }
}

TEST_CASE("maximal_batch agrees bit for bit with maximal at any worker count") {
    Rng rng(3);
    const auto nu = random_measure(rng, 2, 300);
    const Kernel k = Kernel::riesz(2, 1);
    std::vector<std::vector<double>> gs(3, std::vector<double>(nu.size()));
    for (auto& g : gs)
        for (auto& v : g) v = rng.uniform(-1, 1);
    std::vector<Point> pts;
    for (int i = 0; i < 40; ++i) pts.push_back({rng.uniform(-1, 1), rng.uniform(-1, 1)});
    set_worker_count(1);
    const auto one = maximal_batch(nu, k, gs, pts);
    set_worker_count(8);
    const auto eight = maximal_batch(nu, k, gs, pts);
    set_worker_count(0);
    CHECK(one == eight);
    for (std::size_t p = 0; p < pts.size(); ++p)
        for (std::size_t j = 0; j < gs.size(); ++j) CHECK(one[p][j] == maximal(nu, k, gs[j], pts[p]));
}

TEST_CASE("lp norm") {
    DiscreteMeasure mu(2, 0.1);
    mu.add_atom(Point{0, 0}, 0.5);
    mu.add_atom(Point{1, 0}, 0.5);
    CHECK(lp_norm(mu, std::vector<double>{1, 3}, 2) == doctest::Approx(std::sqrt(5.0)).epsilon(1e-15));
    CHECK(lp_norm(mu, std::vector<double>{1, 1}, 3) == doctest::Approx(1.0));
    CHECK(lp_norm(mu, std::vector<double>{0, 0}, 2) == 0.0);
    Rng rng(4);
    const auto big = random_measure(rng, 3, 100);
    std::vector<double> h(big.size()), ch(big.size());
    for (std::size_t i = 0; i < h.size(); ++i) {
        h[i] = rng.uniform(-1, 1);
        ch[i] = -3.5 * h[i];
    }
    for (double p : {1.0, 1.5, 2.0, 4.0}) CHECK(lp_norm(big, ch, p) == doctest::Approx(3.5 * lp_norm(big, h, p)).epsilon(1e-13));
    CHECK_THROWS_AS(lp_norm(mu, std::vector<double>{1, 1}, 0.5), std::invalid_argument);
}

TEST_CASE("nontangential maximal function on cone meshes") {
    const LipschitzGraph flat(2, AffineProfile{{0.0}, 0.0});
    const Cone cone(flat, {0.0}, 1.5);
    CHECK(nontangential_max([](std::span<const double>) { return -2.5; }, cone, 1.0, 4) == 2.5);
    // h = -|y - x0|: the signed maximum over the mesh sits at the node nearest
    // the apex and tends to 0; the maximum of |h| sits at the cap instead.
    const auto dist = [&](std::span<const double> y) { return -distance(y, cone.apex()); };
    double prev = 1e300;
    for (int depth : {2, 4, 8, 12}) {
        double signed_max = -1e300, abs_max = 0.0;
        for (const auto& p : cone_mesh(cone, 1.0, depth)) {
            signed_max = std::max(signed_max, dist(p));
            abs_max = std::max(abs_max, std::fabs(dist(p)));
        }
        CHECK(-signed_max <= prev);
        prev = -signed_max;
        CHECK(nontangential_max(dist, cone, 1.0, depth) == abs_max);
        CHECK(abs_max >= 1.0);
        CHECK(abs_max <= std::sqrt(1.0 + 1.0 / (16.0 * 1.5 * 1.5)));
    }
    CHECK(prev < 1e-3);
    // mesh points are inside the open cone
    for (const auto& p : cone_mesh(cone, 1.0, 5)) CHECK(cone.contains(p));
    CHECK_THROWS_AS(cone_mesh(cone, 0.0, 3), std::invalid_argument);
}

TEST_CASE("principal value estimates") {
    const Kernel k = Kernel::riesz(2, 0);
    // x far away: no atom inside any eps of the schedule
    DiscreteMeasure sparse(2, 0.01);
    sparse.add_atom(Point{1, 0}, 1);
    sparse.add_atom(Point{2, 0}, 1);
    const auto r = pv_estimate(sparse, k, Point{50, 50}, PVSchedule{1.0, 0.05, 0.5});
    REQUIRE(r.estimates.size() >= 4);
    for (const auto& [e, v] : r.estimates) CHECK(v == r.estimates.front().second);
    CHECK(r.converged);
    CHECK(r.tail == 0.0);

    DiscreteMeasure sym(2, 0.01);
    sym.add_atom(Point{0.5, 0.1}, 1);
    sym.add_atom(Point{-0.5, -0.1}, 1);
    for (const auto& [e, v] : pv_estimate(sym, k, Point{0, 0}, PVSchedule{1.0, 0.05, 0.5}).estimates) CHECK(v == 0.0);

    CHECK_THROWS_AS(pv_estimate(sym, k, Point{0, 0}, PVSchedule{1.0, 0.039, 0.5}), std::invalid_argument);
    CHECK_THROWS_AS(pv_estimate(sym, k, Point{0, 0}, PVSchedule{1.0, 0.2, 0.5}), std::invalid_argument);
}

TEST_CASE("tangential principal value on a flat segment vanishes by symmetry") {
    const Kernel k = Kernel::riesz(2, 0);
    double prev_tail = 1e300;
    for (int m : {256, 1024, 4096}) {
        const auto sigma = build(GraphMeasureSpec{LipschitzGraph(2, AffineProfile{{0.0}, 0.0}), ParamBox{{-1.0}, {1.0}}, m, 0.0});
        const auto r = pv_estimate(sigma, k, Point{0, 0}, PVSchedule{0.5, 4 * sigma.resolution(), 0.5});
        for (const auto& [e, v] : r.estimates) CHECK(std::fabs(v) < 1e-12);
        CHECK(r.tail <= prev_tail);
        prev_tail = r.tail;
    }
}

TEST_CASE("cauchy tail over the last quarter") {
    CHECK(cauchy_tail(std::vector<double>{5, 4, 3, 2, 1, 1.5, 1.25, 1.2}) == doctest::Approx(0.05));
    CHECK(cauchy_tail(std::vector<double>{3, 1, 2, 2.5, 2.25}) == doctest::Approx(0.25));
    CHECK(cauchy_tail(std::vector<double>{1}) == 0.0);
}

TEST_CASE("double truncated sums") {
    Rng rng(8);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 2 + trial % 2;
        const auto mu = random_measure(rng, n, 80);
        const Kernel k = Kernel::riesz(n, trial % n);
        std::vector<std::size_t> A, B, all;
        for (std::size_t i = 0; i < mu.size(); ++i) {
            all.push_back(i);
            (rng.uniform() < 0.5 ? A : B).push_back(i);
        }
        const double eps = rng.uniform(0.05, 0.5);
        const auto self = double_truncated_detail(mu, k, all, all, eps);
        CHECK(std::fabs(self.value) <= cancellation_bound(mu.size(), self.max_abs_term));
        const auto ab = double_truncated_detail(mu, k, A, B, eps);
        const auto ba = double_truncated_detail(mu, k, B, A, eps);
        const double bound = cancellation_bound(mu.size(), std::max(ab.max_abs_term, ba.max_abs_term));
        CHECK(std::fabs(ab.value + ba.value) <= bound);
        CHECK(std::fabs(ab.value - static_cast<double>(brute_double(mu, k, A, B, eps))) <= bound);
        CHECK(ab.pairs == ba.pairs);

        const std::vector<double> sched{0.8, 0.4, 0.2, 0.1, 0.05};
        const auto vals = double_truncated_schedule(mu, k, A, B, sched);
        REQUIRE(vals.size() == sched.size());
        for (std::size_t i = 0; i < sched.size(); ++i)
            CHECK(std::fabs(vals[i] - double_truncated(mu, k, A, B, sched[i])) <= bound);
    }
    DiscreteMeasure mu(2, 0.01);
    mu.add_atom(Point{0, 0}, 1);
    mu.add_atom(Point{3, 0}, 1);
    mu.add_atom(Point{3.1, 0}, 1);
    const Kernel k = Kernel::riesz(2, 0);
    const auto left = [](std::span<const double> p) { return p[0] < 1; };
    const auto right = [](std::span<const double> p) { return p[0] > 1; };
    // separated by a gap of 3: independent of eps below the gap
    const double v1 = double_truncated(mu, k, left, right, 0.5);
    CHECK(v1 == double_truncated(mu, k, left, right, 2.9));
    CHECK(v1 == doctest::Approx(-1.0 / 3.0 - 1.0 / 3.1));
    CHECK_THROWS_AS(double_truncated(mu, k, left, right, 0.0), std::invalid_argument);
    const std::vector<std::size_t> idx{0, 1, 2};
    CHECK_THROWS_AS(double_truncated_schedule(mu, k, idx, idx, std::vector<double>{0.1, 0.2}), std::invalid_argument);
}

TEST_CASE("bound constants") {
    const auto b = bound_constants(1.0, 1.0, 2.0, 2);
    CHECK(b.d1 == 48.0);
    CHECK(b.d2 == 18.0);
    CHECK(b.cn == 48.0);
    const auto c1zero = bound_constants(1.0, 0.0, 2.0, 2);
    CHECK(c1zero.d1 == 32.0);
    CHECK(c1zero.d2 == 2.0);
    CHECK(c1zero.cn == 32.0);
    CHECK(bound_constants(0.1, 0.0, 1.01, 2).cn == 3.0);
    const auto b3 = bound_constants(Kernel::riesz(3, 0, 1.0, 4.0), 1.5);
    CHECK(b3.d1 == doctest::Approx(64.0 * 4 + 24.0 * 24.0));
    CHECK_THROWS_AS(bound_constants(1.0, 1.0, 1.0, 2), std::invalid_argument);
    CHECK(cancellation_bound(1024, 1.0) == std::ldexp(1.0, -30));
}
