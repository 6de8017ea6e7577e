#include <catch_amalgamated.hpp>

#include <boost/math/special_functions/bessel.hpp>

#include "whittaker/givental.hpp"

using namespace wlab;

static double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

TEST_CASE("n = 2 quadrature equals 2K_ν closed form")
{
    // CLI example: ψ_{(1,−1)}(0,0) = 2K_2(2)
    CHECK(rel(whittaker_quadrature(Vec{1.0, -1.0}, Vec{0.0, 0.0}).value, 2.0 * boost::math::cyl_bessel_k(2.0, 2.0)) < 1e-12);
    for (const auto& [l, x] : std::vector<std::pair<Vec, Vec>>{
             {{0.3, -0.3}, {0.0, 0.0}}, {{1.5, 0.2}, {-0.7, 0.4}}, {{2.0, 0.0}, {3.0, -1.0}}, {{0.05, 0.0}, {0.1, 0.0}}})
        CHECK(rel(whittaker_quadrature(l, x).value, whittaker_closed_form_n2(l, x)) < 1e-10);
}

TEST_CASE("n = 3 routes agree: quadrature, Lusztig integral, T-array display, series")
{
    const Vec l = {0.7, 0.1, -0.6}, x = {0.4, 0.0, -0.3};
    const WhittakerEval q = whittaker_quadrature(l, x);
    CHECK(rel(whittaker_lusztig_n3(l, x).value, q.value) < 1e-9);
    CHECK(rel(whittaker_tarray_n3(l, x).value, q.value) < 1e-8);
    const WhittakerEval s = whittaker_series(l, x);
    CHECK(std::abs(s.value - q.value) < 3.0 * (s.est_error + q.est_error) + 1e-10 * q.value);
    const WhittakerEval mc = whittaker_givental_mc(l, x, 200000, 17);
    CHECK(std::abs(mc.value - q.value) < 4.0 * mc.est_error);
}

TEST_CASE("ψ_λ is symmetric in λ")
{
    const Vec x = {0.5, 0.1, -0.2};
    const double a = whittaker_quadrature(Vec{0.6, 0.0, -0.4}, x).value;
    const double b = whittaker_quadrature(Vec{-0.4, 0.6, 0.0}, x).value;
    CHECK(rel(a, b) < 1e-9);
    CHECK(rel(whittaker_closed_form_n2(Vec{0.4, -0.1}, Vec{0.3, 0.0}), whittaker_closed_form_n2(Vec{-0.1, 0.4}, Vec{0.3, 0.0})) < 1e-14);
}

TEST_CASE("eigen-equation residual decays like h²")
{
    const Vec l = {0.6, -0.4}, x = {0.5, -0.5};
    const double r1 = eigen_residual(l, x, 0.04), r2 = eigen_residual(l, x, 0.02);
    CHECK(r1 / r2 == Catch::Approx(4.0).epsilon(0.05));
    CHECK(eigen_residual(l, x, 1e-3) < 1e-5);
    CHECK(eigen_residual(Vec{0.8, 0.1, -0.7}, Vec{0.6, 0.0, -0.6}, 1e-3) < 1e-3);
}

TEST_CASE("Baxter kernel intertwines the Toda operators")
{
    CHECK(kernel_identity_residual(0.7, Vec{0.5, -0.2}, Vec{0.1}) < 1e-5);
    CHECK(kernel_identity_residual(1.1, Vec{0.4, 0.0, -0.5}, Vec{0.2, -0.1}) < 1e-5);
}

TEST_CASE("asymptotic ratio lies in [0, 1] and tends to 1")
{
    for (const Vec& l : std::vector<Vec>{{1.0, -0.5}, {1.0, 0.0, -1.0}})
        for (double gap : {0.0, 2.0, 6.0}) {
            const AsymptoticResult a = asymptotic_check(l, gap);
            CHECK(a.bound_ok);
        }
    CHECK(std::abs(asymptotic_check(Vec{1.0, 0.0, -1.0}, 8.0).ratio - 1.0) < 1e-2);
    CHECK_THROWS_AS(asymptotic_check(Vec{0.0, 1.0}, 1.0), DomainError);
}

TEST_CASE("zero-temperature limit approaches J monotonically")
{
    const Vec l = {1.0, 0.0}, x = {1.0, 0.0};
    const double j = specfun::hciz_J(l, x);
    double prev = 1e300;
    for (double beta : {5.0, 10.0, 20.0, 50.0, 200.0}) {
        const double err = std::abs(zero_temperature_limit(l, x, beta) - j) / j;
        CHECK(err < prev);
        prev = err;
    }
    CHECK(prev < 0.01);
}

TEST_CASE("routes and argument errors")
{
    CHECK(parse_route("lusztig") == Route::lusztig);
    CHECK_THROWS_AS(parse_route("nope"), DomainError);
    CHECK_THROWS_AS(whittaker_givental_mc(Vec{0.0, 1.0}, Vec{0.0, 0.0}, 10, 1), DomainError);
    CHECK_THROWS_AS(whittaker_quadrature(Vec{1.0, 0.0}, Vec{0.0}), DomainError);
    CHECK_THROWS_AS(whittaker_eval(Vec{1.0, 0.0}, Vec{0.0, 0.0}, Route::givental_mc), DomainError);
}
