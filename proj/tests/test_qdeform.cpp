#include <catch_amalgamated.hpp>

#include "whittaker/qdeform.hpp"

using namespace wlab;

TEST_CASE("exact rational identities at q = 1/4, t = 1/2")
{
    const QParams<Rational> par(Rational(1, 4), Rational(1, 2));
    CHECK(q_difference_residual(par, 20) == 0);
    CHECK(q_hermite_check(par, 20).max_discrepancy == 0);
    const QKernels<Rational> k(par);
    const RowSumReport<Rational> rs = kernel_row_sums(k, 20);
    CHECK(rs.max_pi == 0);
    CHECK(rs.max_q == 0);
    CHECK(rs.max_k == 0);
    CHECK(intertwining_check(k, 20) == 0);
    CHECK(k.p() == Rational(1, 5));
}

TEST_CASE("conditional law of Y given the Z-path is K(Z_n, ·)")
{
    const QKernels<Rational> k(QParams<Rational>(Rational(1, 3), Rational(2, 3)));
    const ConditionalLawReport<Rational> r = conditional_law_bruteforce(k, 8);
    CHECK(r.z_paths > 0);
    CHECK(r.max_conditional == 0);
    CHECK(r.max_marginal == 0);
}

TEST_CASE("floating identities hold to rounding for a range of (q, ν)")
{
    for (double q : {0.1, 0.5, 0.9})
        for (double nu : {-0.7, 0.0, 0.4, 1.5}) {
            const QParams<double> par = q_params_from_nu(q, nu);
            CHECK(q_difference_residual(par, 30) < 1e-11);
            const QKernels<double> k(par);
            const RowSumReport<double> rs = kernel_row_sums(k, 30);
            CHECK(rs.max_pi < 1e-13);
            CHECK(rs.max_q < 1e-11);
            CHECK(rs.max_k < 1e-11);
            CHECK(intertwining_check(k, 25) < 1e-11);
        }
}

TEST_CASE("q-Pochhammer, ψ(0) and 0^0")
{
    CHECK(qpochhammer(Rational(1, 2), 3) == Rational(21, 64));
    CHECK(qpochhammer(0.0, 5) == 1.0);
    CHECK(ipow(0.0, 0) == 1.0);
    const QParams<Rational> par(Rational(1, 2), Rational(1));
    CHECK(q_whittaker(par, 0) == 1);
    CHECK(q_whittaker(par, 1) == 4); // 2/(1 − 1/2)
    CHECK_THROWS_AS(QParams<double>(1.0, 0.5), DomainError);
    CHECK_THROWS_AS(QParams<double>(0.5, 0.0), DomainError);
}

TEST_CASE("Pitman limit: ψ_0(z) = z + 1 and the shifted kernel")
{
    const PitmanReport r = pitman_limit_check(8, 200000, 3);
    CHECK(r.psi_is_z_plus_1);
    CHECK(r.exact_checks_pass);
    CHECK(r.kernel_matches_shifted);
    CHECK_FALSE(r.kernel_matches_display);
    for (const PitmanRow& row : r.rows) CHECK(row.within_3sigma);
    CHECK(r.convention != "unresolved");
}

TEST_CASE("Burke property of the stationary Z-increments")
{
    const Vec pi = burke_stationary_law(0.3, 0.4);
    double s = 0.0;
    for (double v : pi) s += v;
    CHECK(s == Catch::Approx(1.0).epsilon(1e-12));
    const BurkeReport r = burke_check(0.3, 0.4, 200000, 5);
    CHECK(r.increments.p_value > 1e-3);
    CHECK(r.lag_pairs.p_value > 1e-3);
    CHECK(r.up_fraction == Catch::Approx(0.7).margin(0.01));
    CHECK(r.balance_residual < 1e-12);
}
