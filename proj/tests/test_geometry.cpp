#include <doctest.h>

#include <cmath>
#include <vector>

#include "siolab/geometry.hpp"
#include "siolab/rng.hpp"

using namespace siolab;

namespace {

LipschitzGraph flat2() { return LipschitzGraph(2, AffineProfile{{0.0}, 0.0}); }

std::vector<LipschitzGraph> catalog(int n) {
    const auto m = static_cast<std::size_t>(n - 1);
    std::vector<double> slope(m, 0.0);
    slope[0] = 0.7;
    return {LipschitzGraph(n, AffineProfile{slope, 0.1}), LipschitzGraph(n, SawtoothProfile{0.25, 0.5}),
            LipschitzGraph(n, ConeProfile{1.5}), LipschitzGraph(n, SmoothBumpProfile{0.5, 0.5})};
}

// Uniform direction times a radius; used to scatter test points.
Point random_point(Rng& rng, int n, double scale) {
    Point p(static_cast<std::size_t>(n));
    for (auto& c : p) c = rng.uniform(-scale, scale);
    return p;
}

}  // namespace

TEST_CASE("classify: above, below and on") {
    const auto f0 = flat2();
    CHECK(f0.classify(Point{0, 1}) == Side::Above);
    CHECK(f0.classify(Point{3, 0}) == Side::On);
    CHECK(f0.classify(Point{3, -1e-3}) == Side::Below);
    const LipschitzGraph abs1(2, ConeProfile{1.0});
    CHECK(abs1.classify(Point{1, 0.5}) == Side::Below);
    CHECK(abs1.lip() == 1.0);
}

TEST_CASE("classify is invariant under rotating graph and point together") {
    Rng rng(5);
    for (const auto& base : catalog(3)) {
        const Rotation R = Rotation::givens(3, 0, 2, 0.4).compose(Rotation::givens(3, 1, 2, -0.3));
        const LipschitzGraph rotated(3, base.profile(), R);
        for (int i = 0; i < 2000; ++i) {
            const Point q = random_point(rng, 3, 2.0);
            Point p(3);
            R.apply(q, p);
            const double a = base.signed_height(q);
            const double b = rotated.signed_height(p);
            CHECK(std::fabs(a - b) <= 1e-12 * (1.0 + std::fabs(a)));
            if (std::fabs(a) > 1e-9) CHECK(base.classify(q) == rotated.classify(p));
        }
    }
}

TEST_CASE("cone membership uses the strict inequality") {
    // An aperture of exactly 1 is rejected (it must exceed max(1, Lip f)), so
    // the unit-aperture example is run just above 1.
    CHECK_THROWS_AS(Cone(flat2(), {0.0}, 1.0), std::invalid_argument);
    const Cone c(flat2(), {0.0}, 1.0 + 1e-9);
    CHECK(c.contains(Point{0.1, 1.0}));
    CHECK_FALSE(c.contains(Point{1.0, 2.0}));
    CHECK_FALSE(c.contains(c.apex()));
    CHECK_THROWS_AS(Cone(LipschitzGraph(2, ConeProfile{2.0}), {0.0}, 1.5), std::invalid_argument);
}

TEST_CASE("points in the cone stay a fixed fraction away from the region below the graph") {
    Rng rng(2024);
    for (int n : {2, 3}) {
        for (const auto& g : catalog(n)) {
            const double L = 1.25 * std::max(1.0, g.lip());
            const auto m = static_cast<std::size_t>(n - 1);
            std::size_t tested = 0, violations = 0;
            for (int i = 0; i < 100000; ++i) {
                std::vector<double> u0(m);
                for (auto& c : u0) c = rng.uniform(-1, 1);
                const Cone cone(g, u0, L);
                // y: apex + (v, t) with |v| < t / (4L)
                Point yq(static_cast<std::size_t>(n));
                const double t = rng.uniform(1e-3, 2.0);
                double v2 = 0.0;
                for (std::size_t k = 0; k < m; ++k) {
                    yq[k] = rng.uniform(-1, 1);
                    v2 += yq[k] * yq[k];
                }
                const double s = rng.uniform() * 0.999 * t / (4.0 * L) / std::max(std::sqrt(v2), 1e-300);
                for (std::size_t k = 0; k < m; ++k) yq[k] = u0[k] + s * yq[k];
                yq[m] = g.height(u0) + t;
                Point y(static_cast<std::size_t>(n));
                g.to_ambient(yq, y);
                if (!cone.contains(y)) continue;
                const Point x = random_point(rng, n, 2.0);
                if (g.classify(x) != Side::Below) continue;
                ++tested;
                const double lhs = distance(y, x);
                const double rhs = distance(y, cone.apex()) / (8.0 * L);
                if (!(lhs >= rhs * (1.0 - 1e-12))) ++violations;
            }
            CHECK(tested > 10000);
            CHECK(violations == 0);
        }
    }
}

TEST_CASE("lipschitz_estimate against closed forms") {
    const ParamBox box1{{-1.0}, {1.0}};
    CHECK(std::fabs(lipschitz_estimate(LipschitzGraph(2, AffineProfile{{0.5}, 0.0}), 1000, box1) - 0.5) < 1e-12);
    CHECK(lipschitz_estimate(LipschitzGraph(2, AffineProfile{{0.0}, 3.0}), 1000, box1) == 0.0);
    const double cone = lipschitz_estimate(LipschitzGraph(2, ConeProfile{1.0}), 20000, box1);
    CHECK(cone <= 1.0 + 1e-9);
    CHECK(cone > 0.99);
    for (int n : {2, 3}) {
        const ParamBox box{std::vector<double>(static_cast<std::size_t>(n - 1), -1.0),
                           std::vector<double>(static_cast<std::size_t>(n - 1), 1.0)};
        for (const auto& g : catalog(n)) CHECK(lipschitz_estimate(g, 5000, box) <= g.lip() * (1 + 1e-9));
    }
    CHECK_THROWS_AS(lipschitz_estimate(flat2(), 1, box1), std::invalid_argument);
}

TEST_CASE("complement of the unit square: face hyperplanes separate") {
    const Shape sq = Shape::rectangle({0, 0}, {0.5, 0.5});
    const auto d = decompose_complement(sq);
    REQUIRE(d.size() == 4);
    const auto r = d.region_of(Point{0, 10});
    REQUIRE(r.has_value());
    CHECK(d.pieces()[*r].label == "+face1");
    const auto& top = d.pieces()[*r].separator;
    CHECK(std::fabs(top.signed_height(Point{0.3, 0.5})) < 1e-15);
    CHECK(top.classify(Point{-7.0, 0.5}) == Side::On);
    CHECK_FALSE(d.region_of(Point{0.1, 0.2}).has_value());
    CHECK_FALSE(d.region_of(Point{0.5, 0.5}).has_value());  // closed shape
}

TEST_CASE("complement of a ball: top region for a far point") {
    const Shape ball = Shape::ball({0, 0}, 1.0);
    const auto d = decompose_complement(ball);
    const auto r = d.region_of(Point{0, 10});
    REQUIRE(r.has_value());
    CHECK(d.pieces()[*r].label == "+e1");
    CHECK_FALSE(d.region_of(Point{0.2, -0.3}).has_value());
}

TEST_CASE("complement decompositions are total and every region sits above its graph") {
    Rng rng(77);
    std::vector<Shape> shapes{Shape::ball({0, 0}, 1.0), Shape::ball({0.3, -0.2, 0.1}, 0.7),
                              Shape::rectangle({0, 0}, {0.5, 0.5}),
                              Shape::rectangle({0.2, 0.1}, {0.8, 0.3}, Rotation::givens(2, 0, 1, 0.6)),
                              Shape::rectangle({0, 0, 0}, {0.4, 0.6, 0.2}, Rotation::givens(3, 0, 2, -0.8))};
    for (const auto& shape : shapes) {
        const int n = shape.dim();
        const auto d = decompose_complement(shape);
        REQUIRE(d.size() == static_cast<std::size_t>(2 * n));
        std::size_t exterior = 0, interior = 0, bad = 0;
        for (int i = 0; i < 100000; ++i) {
            const Point p = random_point(rng, n, 3.0);
            if (shape.contains(p)) {
                ++interior;
                // the shape lies on or below every separating graph
                for (const auto& piece : d.pieces())
                    if (piece.separator.signed_height(p) > 1e-12) ++bad;
                if (d.region_of(p).has_value()) ++bad;
                continue;
            }
            ++exterior;
            const auto r = d.region_of(p);
            REQUIRE(r.has_value());
            std::size_t above = 0;
            for (const auto& piece : d.pieces()) above += piece.separator.signed_height(p) > 0.0 ? 1u : 0u;
            // total: every exterior point is strictly above some separator
            if (above == 0) ++bad;
            if (!(d.pieces()[*r].separator.signed_height(p) > 0.0)) ++bad;
            for (std::size_t j = 0; j < d.size(); ++j)
                if (d.in_region(j, p) != (j == *r)) ++bad;
        }
        CHECK(bad == 0);
        CHECK(exterior > 1000);
        CHECK(interior > 100);
    }
}
