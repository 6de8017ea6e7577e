#include <catch_amalgamated.hpp>

#include "whittaker/gtpoly.hpp"
#include "whittaker/specfun.hpp"

using namespace wlab;

TEST_CASE("TriangularArray indexing and rows")
{
    TriangularArray t(3);
    t(1, 1) = 5.0;
    t(2, 1) = 6.0;
    t(2, 2) = 4.0;
    t(3, 1) = 7.0;
    t(3, 2) = 5.0;
    t(3, 3) = 3.0;
    CHECK(t.row(3) == Vec{7.0, 5.0, 3.0});
    CHECK(t.row_sum(2) == 10.0);
    CHECK(interlaces(t));
    CHECK(pattern_type(t) == Vec{5.0, 5.0, 5.0});
    t(2, 2) = 2.0;
    CHECK_FALSE(interlaces(t));
}

TEST_CASE("Gibbs samples stay in GT(x) and type sums to Σx")
{
    const Vec x = {2.5, 1.0, 0.2, -1.0};
    GibbsSampler g(x, 11);
    for (int s = 0; s < 200; ++s) {
        g.sweep();
        REQUIRE(interlaces(g.state()));
        const Vec ty = pattern_type(g.state());
        double total = 0.0;
        for (double v : ty) total += v;
        REQUIRE(std::abs(total - sum(x)) < 1e-12);
    }
    CHECK_THROWS_AS(GibbsSampler(Vec{0.0, 1.0}, 1), DomainError);
}

TEST_CASE("GT volume: rejection sampling matches h(x)/∏ j!")
{
    const Vec x = {2.0, 1.0, 0.0};
    const Estimate rej = gt_volume(x, VolumeMethod::rejection, 400000, 3);
    const Estimate lim = gt_volume(x, VolumeMethod::limit);
    CHECK(lim.value == Catch::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(rej.value - lim.value) < 4.0 * rej.std_error);
    // n = 2: the polytope is the interval [x_2, x_1]
    CHECK(gt_volume(Vec{3.0, 0.5}, VolumeMethod::limit).value == Catch::Approx(2.5));
}

TEST_CASE("Duistermaat–Heckman estimate reproduces J at n = 2 and n = 3")
{
    for (const auto& [l, x] : std::vector<std::pair<Vec, Vec>>{{{1.0, -0.5}, {1.0, 0.0}}, {{0.8, 0.1, -0.5}, {2.0, 1.0, 0.0}}}) {
        const Estimate e = dh_estimate_J(l, x, 100000, 5);
        const double j = specfun::hciz_J(l, x);
        CHECK(std::abs(e.value - j) < 4.0 * e.std_error);
        CHECK(e.std_error < 0.02 * j);
    }
}

TEST_CASE("Uniform first-row marginal at n = 2")
{
    // GT(x) for n = 2 is the interval [x_2, x_1]; the Gibbs chain samples it uniformly
    const Vec x = {1.0, -1.0};
    GibbsSampler g(x, 9);
    std::vector<double> v;
    for (int s = 0; s < 20000; ++s) {
        g.sweep();
        v.push_back(g.state()(1, 1));
    }
    const auto ks = stats::ks_one_sample(v, [](double t) { return std::clamp((t + 1.0) / 2.0, 0.0, 1.0); });
    CHECK(ks.p_value > 1e-3);
}
