#include <doctest.h>

#include <cmath>
#include <limits>

#include "natform/numerics.hpp"
#include "natform/parallel.hpp"
#include "natform/quadrature.hpp"

using namespace natform;

TEST_CASE("constant integrates exactly on the unit square") {
    const Domain box({0.0, 0.0}, {1.0, 1.0});
    const QuadratureGrid grid(box, 16);
    CHECK(grid.integrate_value([](const Vec&) { return 1.0; }) == 1.0);
    CHECK(grid.total_weight() == 1.0);
}

TEST_CASE("bilinear integrand at 256^2") {
    const Domain box({0.0, 0.0}, {1.0, 1.0});
    const QuadratureGrid grid(box, 256);
    const double v = grid.integrate_value([](const Vec& x) { return x[0] * x[1]; });
    CHECK(std::abs(v - 0.25) <= 1e-6);
}

TEST_CASE("error estimate tracks resolution halving") {
    const Domain box({0.0, 0.0}, {1.0, 1.0});
    const QuadratureGrid grid(box, 64);
    auto g = [](const Vec& x) { return x[0] * x[0]; };
    const auto r = integrate(g, grid);
    const QuadratureGrid half(box, 32);
    CHECK(r.error_estimate ==
          doctest::Approx(std::abs(grid.integrate_value(g) - half.integrate_value(g)))
              .epsilon(1e-12));
    CHECK(r.value == doctest::Approx(1.0 / 3.0).epsilon(1e-3));
}

TEST_CASE("disk-excised square extrapolates to the full area") {
    // g = 1 with a shrinking excision: dropped mass ~ pi eps_l^2 ~ 4^-l, so
    // one Richardson step against the last two levels recovers the area.
    const Domain box(Vec{0.0, 0.0}, Vec{1.0, 1.0}, {Excision{Vec{0.5, 0.5}, 0.2}});
    const GridSchedule sched{256, 3, 1.0};
    const auto grids = make_level_grids(box, sched);
    std::vector<double> v;
    for (const auto& g : grids) v.push_back(g.integrate_value([](const Vec&) { return 1.0; }));
    CHECK(v[0] < v[1]);
    CHECK(v[1] < v[2]);
    const double extrap = v[2] + (v[2] - v[1]) / 3.0;
    CHECK(std::abs(extrap - 1.0) <= 1e-3);
}

TEST_CASE("weights are positive and sum to the un-excised volume") {
    const Domain box(Vec{-1.0, -1.0}, Vec{1.0, 1.0}, {Excision{Vec{0.0, 0.0}, 0.3}});
    const QuadratureGrid grid(box, 64);
    CHECK(grid.cell_volume() > 0.0);
    // kept-cell count times cell volume, exactly
    CHECK(grid.total_weight() == grid.cell_volume() * static_cast<double>(grid.node_count()));
    CHECK(grid.total_weight() < box.volume());
    // no node inside the excision ball
    for (std::size_t i = 0; i < grid.node_count(); ++i) CHECK(grid.node(i).norm() >= 0.3);
}

TEST_CASE("integration is bit-identical across thread counts") {
    const Domain box({0.0, 0.0, 0.0}, {1.0, 1.0, 1.0});
    const QuadratureGrid grid(box, 48);
    auto g = [](const Vec& x) { return std::sin(13.0 * x[0]) * x[1] + std::exp(x[2]); };
    par::set_threads(1);
    const double v1 = grid.integrate_value(g);
    par::set_threads(8);
    const double v8 = grid.integrate_value(g);
    par::set_threads(3);
    const double v3 = grid.integrate_value(g);
    par::set_threads(0);
    CHECK(v1 == v8);
    CHECK(v1 == v3);
}

TEST_CASE("non-finite integrand names the node") {
    const Domain box({0.0, 0.0}, {1.0, 1.0});
    const QuadratureGrid grid(box, 4);
    const Vec bad = grid.node(5);
    CHECK_THROWS_AS(grid.integrate_value([&](const Vec& x) {
        return (dist(x, bad) < 1e-12) ? std::numeric_limits<double>::infinity() : 1.0;
    }),
                    std::domain_error);
    try {
        grid.integrate_value([&](const Vec& x) {
            return (dist(x, bad) < 1e-12) ? std::numeric_limits<double>::quiet_NaN() : 1.0;
        });
        FAIL("expected a domain_error");
    } catch (const std::domain_error& e) {
        CHECK(std::string(e.what()).find("non-finite") != std::string::npos);
    }
}

TEST_CASE("refine_and_extrapolate on a smooth integrand has slope -2") {
    const Domain box({0.0, 0.0}, {1.0, 1.0});
    const GridSchedule sched{128, 4, 1.0};
    const auto r =
        refine_and_extrapolate([](const Vec& x) { return x[0] * x[0] + std::sin(x[1]); }, box, sched);
    REQUIRE(!r.converged);
    CHECK(r.slope == doctest::Approx(-2.0).epsilon(0.15));
}

TEST_CASE("refine_and_extrapolate flags identical levels as converged") {
    const Domain box({0.0, 0.0}, {1.0, 1.0});
    const GridSchedule sched{32, 3, 1.0};
    const auto r = refine_and_extrapolate([](const Vec&) { return 0.0; }, box, sched);
    CHECK(r.converged);
}

TEST_CASE("pairwise sum is order-deterministic") {
    std::vector<double> xs;
    for (int i = 0; i < 100000; ++i) xs.push_back(std::sin(i * 0.1) / (i + 1.0));
    const double a = par::pairwise_sum(xs);
    const double b = par::pairwise_sum(xs);
    CHECK(a == b);
}

TEST_CASE("growth classifier") {
    // geometric increments (convergent tail)
    CHECK(classify_growth({1.0, 1.5, 1.75, 1.875}) == Growth::finite);
    // constant increments (log divergence) classify as divergent
    CHECK(classify_growth({10.0, 14.0, 18.0, 22.0}) == Growth::divergent);
    // growing increments
    CHECK(classify_growth({1.0, 2.0, 4.0, 8.0}) == Growth::divergent);
    // small growth below the 5% rule
    CHECK(classify_growth({100.0, 101.0, 102.0, 103.0}) == Growth::finite);
    // non-finite values are divergent
    CHECK(classify_growth({1.0, std::numeric_limits<double>::infinity(), 2.0}) == Growth::divergent);
    // too short to be called divergent
    CHECK(classify_growth({1.0, 10.0}) == Growth::finite);
    CHECK(classify_growth({0.0, 0.0, 0.0}) == Growth::finite);
}

TEST_CASE("log2 slope fits") {
    CHECK(log2_slope({8.0, 4.0, 2.0, 1.0}).value() == doctest::Approx(-1.0));
    CHECK(!log2_slope({1.0, 0.0, 1.0}).has_value());
    CHECK(diff_log2_slope({0.0, 3.0, 3.75, 3.9375}).value() == doctest::Approx(-2.0));
}

TEST_CASE("grid schedule couples resolution doubling with excision halving") {
    const Domain box(Vec{-1.0, -1.0}, Vec{1.0, 1.0}, {Excision{Vec{0.0, 0.0}, 0.4}});
    const auto grids = make_level_grids(box, GridSchedule{64, 3, 1.0});
    REQUIRE(grids.size() == 3);
    CHECK(grids[0].resolution() == 16);
    CHECK(grids[1].resolution() == 32);
    CHECK(grids[2].resolution() == 64);
    CHECK(grids[0].excision_radius() == doctest::Approx(0.4));
    CHECK(grids[1].excision_radius() == doctest::Approx(0.2));
    CHECK(grids[2].excision_radius() == doctest::Approx(0.1));
}
