#include <doctest.h>

#include <cmath>
#include <vector>

#include "siolab/linalg.hpp"
#include "siolab/parallel.hpp"
#include "siolab/rng.hpp"
#include "siolab/summation.hpp"

using namespace siolab;

TEST_CASE("splitmix64 reproduces the reference stream for seed 0") {
    Rng r(0);
    CHECK(r.next() == 0xE220A8397B1DCDAFULL);
    CHECK(r.next() == 0x6E789E6AA1B965F4ULL);
    CHECK(r.next() == 0x06C45D188009454FULL);
}

TEST_CASE("rng doubles lie in [0, 1) and streams are reproducible") {
    Rng a(42), b(42);
    for (int i = 0; i < 1000; ++i) {
        const double u = a.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        CHECK(u == b.uniform());
    }
    Rng c(7);
    for (int i = 0; i < 1000; ++i) {
        const double v = c.log_uniform(1e-3, 1e3);
        CHECK(v >= 1e-3 * (1 - 1e-12));
        CHECK(v <= 1e3 * (1 + 1e-12));
    }
    CHECK(Rng(1).fork(3).next() == Rng(1).fork(3).next());
    CHECK(Rng(1).fork(3).next() != Rng(1).fork(4).next());
}

TEST_CASE("compensated summation recovers cancelled low-order bits") {
    CompensatedSum s;
    s += 1e16;
    s += 1.0;
    s += -1e16;
    CHECK(s.value() == 1.0);
    double naive = 0.0;
    CompensatedSum t;
    for (int i = 0; i < 1000000; ++i) {
        naive += 0.1;
        t += 0.1;
    }
    CHECK(std::fabs(t.value() - 100000.0) < std::fabs(naive - 100000.0));
    CHECK(std::fabs(t.value() - 100000.0) < 1e-8);
}

TEST_CASE("rotations are orthogonal and compose") {
    const Rotation g = Rotation::givens(3, 0, 2, 0.7);
    CHECK(g.orthogonality_error() < 1e-15);
    const Rotation v = Rotation::axis_to_vertical(3, 0, -1);
    CHECK(v.orthogonality_error() == 0.0);
    // last frame axis maps to -e_0
    const std::vector<double> q{0, 0, 1};
    std::vector<double> p(3);
    v.apply(q, p);
    CHECK(p[0] == -1.0);
    CHECK(p[1] == 0.0);
    CHECK(p[2] == 0.0);
    std::vector<double> back(3);
    v.apply_transpose(p, back);
    CHECK(back == q);
    const Rotation c = g.compose(Rotation::givens(3, 0, 2, -0.7));
    CHECK(c.orthogonality_error() < 1e-15);
    CHECK(std::fabs(c(0, 0) - 1.0) < 1e-15);
    CHECK_THROWS_AS(Rotation(2, {1, 1, 0, 1}), std::invalid_argument);
    CHECK_THROWS_AS(check_dim(1), std::invalid_argument);
    CHECK_THROWS_AS(check_dim(kMaxDim + 1), std::invalid_argument);
}

TEST_CASE("parallel_for visits every index once and propagates exceptions") {
    for (int workers : {1, 2, 8}) {
        set_worker_count(workers);
        std::vector<int> hits(1000, 0);
        parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; });
        for (int h : hits) CHECK(h == 1);
        CHECK_THROWS_AS(parallel_for(10, [](std::size_t i) {
                            if (i == 5) throw std::runtime_error("boom");
                        }),
                        std::runtime_error);
    }
    set_worker_count(0);
}
