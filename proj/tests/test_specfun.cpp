#include <catch_amalgamated.hpp>

#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "whittaker/specfun.hpp"

using namespace wlab;
using namespace wlab::specfun;

static double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

TEST_CASE("log_gamma and digamma against Boost on the real line")
{
    for (double x : {0.1, 0.5, 1.0, 2.5, 7.3, 30.0, 150.0}) {
        CHECK(std::abs(log_gamma(x) - boost::math::lgamma(x)) < 1e-13 * std::max(1.0, std::abs(boost::math::lgamma(x))));
        CHECK(std::abs(digamma(x) - boost::math::digamma(x)) < 1e-13 * std::max(1.0, std::abs(boost::math::digamma(x))));
    }
    // reflection region
    for (double x : {-0.5, -1.5, -2.3}) CHECK(rel(gamma(cplx(x)).real(), boost::math::tgamma(x)) < 1e-12);
}

TEST_CASE("Gamma recurrence and reflection in the complex plane")
{
    for (cplx z : {cplx(0.3, 1.2), cplx(2.0, -3.0), cplx(-1.7, 0.4), cplx(0.5, 8.0)}) {
        CHECK(std::abs(gamma(z + 1.0) - z * gamma(z)) < 1e-12 * std::abs(z * gamma(z)));
        const cplx refl = gamma(z) * gamma(1.0 - z) * std::sin(pi * z);
        CHECK(std::abs(refl - pi) < 1e-11);
        CHECK(std::abs(std::exp(log_gamma(z)) - gamma(z)) < 1e-12 * std::abs(gamma(z)));
    }
    CHECK(rgamma(cplx(-3.0)) == cplx(0.0));
    CHECK_THROWS_AS(gamma(cplx(-2.0)), PoleError);
}

TEST_CASE("Macdonald K against Boost and the half-integer closed form")
{
    for (double nu : {0.0, 0.5, 1.0, 2.0, 3.7, 10.0})
        for (double z : {0.01, 0.3, 1.0, 2.0, 8.0, 30.0})
            CHECK(rel(macdonald_K(nu, z), boost::math::cyl_bessel_k(nu, z)) < 1e-12);
    for (double z : {0.2, 1.0, 5.0}) CHECK(rel(macdonald_K(0.5, z), std::sqrt(pi / (2 * z)) * std::exp(-z)) < 1e-13);
    // symmetric in ν
    CHECK(rel(macdonald_K(-1.3, 0.7), macdonald_K(1.3, 0.7)) < 1e-14);
    // log form stays finite far out
    CHECK(std::isfinite(log_macdonald_K(2.0, 2000.0)));
    CHECK(std::abs(log_macdonald_K(2.0, 20.0) - std::log(boost::math::cyl_bessel_k(2.0, 20.0))) < 1e-12);
}

TEST_CASE("HCIZ J: n = 2 closed form, λ-symmetry and the λ → 0 limit")
{
    const Vec l = {1.0, 0.0}, x = {1.0, 0.0};
    CHECK(rel(hciz_J(l, x), std::exp(1.0) - 1.0) < 1e-14);
    const Vec l3 = {0.9, 0.2, -0.4}, x3 = {1.0, 0.3, -0.5};
    const Vec l3r = {-0.4, 0.9, 0.2};
    CHECK(rel(hciz_J(l3r, x3), hciz_J(l3, x3)) < 1e-12);
    // J_0(x) = h(x)/∏ j!
    const Vec x0 = {2.0, 1.0, 0.0};
    CHECK(rel(hciz_J(Vec{0.0, 0.0, 0.0}, x0), 1.0) < 1e-14);
    CHECK(rel(hciz_J0(x0), 1.0) < 1e-14);
    // continuity across the route switch
    const double a = hciz_J(Vec{0.5001, 0.0, -0.5}, x3, 1.0);
    const double b = hciz_J(Vec{0.5001, 0.0, -0.5}, x3, 1e-9);
    CHECK(rel(a, b) < 1e-12);
    CHECK(rel(hciz_J(Vec{1e-7, 0.0, -1e-7}, x0), 1.0) < 1e-6);
}

TEST_CASE("Vandermonde and Sklyanin density")
{
    CHECK(vandermonde(Vec{3.0, 1.0, 0.0}) == Catch::Approx(6.0));
    // on the imaginary axis s_2(ιu) · (2πι)² · 2 = |Γ(ιτ)|^{−2}, τ = u_1 − u_2, which equals τ sinh(πτ)/π
    const CVec lam = {cplx(0.0, 0.8), cplx(0.0, -0.4)};
    const double tau = 1.2;
    const cplx s = sklyanin_density(lam) * std::pow(cplx(0.0, 2.0 * pi), 2.0) * 2.0;
    CHECK(std::abs(s - cplx(tau * std::sinh(pi * tau) / pi, 0.0)) < 1e-12);
}

TEST_CASE("Fundamental series coefficients satisfy the quadratic recursion")
{
    const FundamentalCoefficients a(CVec{cplx(0.37), cplx(-0.11), cplx(-0.26)});
    for (const std::vector<int>& m : std::vector<std::vector<int>>{{1, 0}, {0, 1}, {2, 1}, {3, 3}, {1, 4}})
        CHECK(recursion_residual(a, m) < 1e-12);
    const FundamentalCoefficients a4(CVec{cplx(0.4), cplx(0.15), cplx(-0.2), cplx(-0.35)});
    CHECK(recursion_residual(a4, {1, 2, 1}) < 1e-12);
}

TEST_CASE("Series Whittaker function matches the n = 2 closed form")
{
    const Vec l = {0.35, -0.35}, x = {0.4, -0.1};
    const SeriesValue s = whittaker_from_series(to_complex(l), x);
    const double cf = 2.0 * std::exp((l[0] + l[1]) * (x[0] + x[1]) / 2.0) *
                      boost::math::cyl_bessel_k(l[0] - l[1], 2.0 * std::exp((x[1] - x[0]) / 2.0));
    CHECK(rel(s.value.real(), cf) < 1e-10);
    CHECK(std::abs(s.value.imag()) < 1e-10);
    CHECK_THROWS(whittaker_from_series(CVec{cplx(1.0), cplx(0.0)}, x));
}

TEST_CASE("theta_t is the heat kernel at n = 1 and a normalized positive density at n = 2")
{
    for (double xv : {-1.0, 0.0, 0.7})
        CHECK(rel(theta_density(1.3, Vec{xv}).value, std::exp(-xv * xv / 2.6) / std::sqrt(2 * pi * 1.3)) < 1e-10);
    CHECK(theta_density(1.0, Vec{0.5, -0.5}).value > 0.0);
    CHECK_THROWS_AS(theta_density(0.0, Vec{0.0}), DomainError);
    // the two representations agree
    const ThetaValue a = theta_density(1.0, Vec{0.3, -0.2}, ThetaForm::psi);
    const ThetaValue b = theta_density(1.0, Vec{0.3, -0.2}, ThetaForm::series);
    CHECK(std::abs(a.value - b.value) < 1e-7 + 3 * (a.est_error + b.est_error));
}
