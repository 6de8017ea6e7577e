#include <catch_amalgamated.hpp>

#include <boost/math/special_functions/bessel.hpp>

#include "whittaker/givental.hpp"
#include "whittaker/laws.hpp"
#include "whittaker/paths.hpp"

using namespace wlab;

TEST_CASE("T_1 at n = 2 matches a trapezoid integral")
{
    const SampledPath eta = brownian_sample(2, Vec{0.3, -0.2}, 2.0, 1e-4, 3);
    const SampledPath t1 = transform_Ti(eta, 1);
    double integral = 0.0;
    for (std::size_t j = 1; j < eta.size(); ++j) {
        const double dt = eta.time(j) - eta.time(j - 1);
        auto f = [&](std::size_t m) { return std::exp(-(eta.value(m, 0) - eta.value(m, 1))); };
        integral += 0.5 * dt * (f(j) + f(j - 1));
        if (j % 5000 == 0) {
            // trapezoid error on Brownian increments is about t·dt/6 in the log
            CHECK(std::abs(t1.value(j, 0) - eta.value(j, 0) - std::log(integral)) < eta.time(j) * 1e-4);
            CHECK(t1.value(j, 0) + t1.value(j, 1) == Catch::Approx(eta.value(j, 0) + eta.value(j, 1)).epsilon(1e-12));
        }
    }
    CHECK_THROWS_AS(transform_Ti(eta, 2), DomainError);
}

TEST_CASE("braid relation holds within the grid bound away from t = 0")
{
    const SampledPath eta = brownian_sample(3, Vec{0.0, 0.0, 0.0}, 2.0, 1e-3, 5);
    const ReducedWord a(3, {1, 2, 1}), b(3, {2, 1, 2});
    const std::size_t from = 100; // t >= 0.1
    const double d = sup_distance(transform_Tw(eta, a), transform_Tw(eta, b), from);
    CHECK(d <= grid_error_bound(eta, a) + grid_error_bound(eta, b));
    // the transform preserves the coordinate sum
    const SampledPath w0 = transform_w0(eta);
    for (std::size_t j = 1; j < eta.size(); j += 250) {
        double s0 = 0.0, s1 = 0.0;
        for (std::size_t i = 0; i < 3; ++i) {
            s0 += eta.value(j, i);
            s1 += w0.value(j, i);
        }
        CHECK(s1 == Catch::Approx(s0).margin(1e-10));
    }
}

TEST_CASE("reduced words of w_0 and their moves")
{
    CHECK(reduced_words(Permutation::longest(3)).size() == 2);
    CHECK(reduced_words(Permutation::longest(4)).size() == 16);
    CHECK(reduced_words_by_moves(ReducedWord::canonical_longest(4)).size() == 16);
    CHECK_THROWS_AS(ReducedWord(3, {1, 1}), DomainError);
}

TEST_CASE("array SDE tracks the transform route")
{
    const ArrayTrajectory tr = simulate_array(Vec{0.2, 0.0, -0.2}, 1.0, 1e-4, 9);
    const TriangularArray last = tr.states.back();
    const TriangularArray exact = array_by_transform(tr.driving, tr.driving.size() - 1);
    for (std::size_t k = 1; k <= 3; ++k)
        for (std::size_t i = 1; i <= k; ++i) CHECK(std::abs(last(k, i) - exact(k, i)) < 0.05);
}

TEST_CASE("particle system: free case is the driving path, top particle is T_{w_0}")
{
    const SampledPath eta = brownian_sample(3, Vec{0.1, 0.0, -0.1}, 1.0, 1e-3, 21);
    ParticleOptions free;
    free.interaction = false;
    const Trajectory xi0 = particle_system_on(eta, free);
    for (std::size_t i = 0; i < 3; ++i) CHECK(xi0.last()[i] == Catch::Approx(eta.value(eta.size() - 1, i)).margin(1e-12));
    const Trajectory xi = particle_system_on(eta);
    for (double v : xi.last()) CHECK(std::isfinite(v));
}

TEST_CASE("Lusztig drift in word form equals the q-network form")
{
    for (std::size_t n : {2u, 3u, 4u}) {
        const ReducedWord w = ReducedWord::canonical_longest(n);
        Vec y;
        for (std::size_t k = 0; k < w.size(); ++k) y.push_back(0.3 * static_cast<double>(k) - 0.5);
        const Vec a = lusztig_drift(w, y), b = lusztig_drift_q(n, y);
        for (std::size_t k = 0; k < a.size(); ++k) CHECK(a[k] == Catch::Approx(b[k]).margin(1e-12));
    }
}

TEST_CASE("directed polymer: recursion equals the top transform coordinate")
{
    for (std::size_t n : {2u, 3u, 4u}) {
        const PolymerSample s = polymer_partition(n, 1.5, 1e-3, 17);
        CHECK(s.log_z_direct == Catch::Approx(s.log_z_transform).margin(1e-6));
    }
    const SampledPath b = brownian_sample(2, Vec{0.0, 0.0}, 1.0, 1e-4, 2);
    CHECK(std::abs(polymer_log_partition(b) - polymer_log_partition_trapezoid_n2(b)) < 1e-4);
    const FreeEnergyConstant c = free_energy_constant();
    CHECK(c.residual < 1e-6);
    CHECK(c.value == Catch::Approx(c.t_star - specfun::digamma(c.t_star)));
}

TEST_CASE("Feynman–Kac and exit probability at small sample sizes")
{
    const Vec l = {0.8, -0.4}, x = {0.5, -0.5};
    const WhittakerEval fk = feynman_kac_psi(l, x, 30.0, 20000, 0.1, 4);
    const double exact = whittaker_closed_form_n2(l, x);
    CHECK(std::abs(fk.value - exact) < 4.0 * fk.est_error + 5e-3 * exact);
    const ExitEstimate e = exit_probability(l, x, 30.0, 5000, 1e-3, 6);
    CHECK(std::abs(e.value - e.target) < 4.0 * e.std_error + e.bias_allowance);
    CHECK(e.target == Catch::Approx(exit_target(l, x)));
}

TEST_CASE("laws: ν_t marginal normalization, GIG closed form, n = 1 Laplace contour")
{
    const DifferenceMarginal m = nu_difference_marginal(Vec{0.5, -0.3}, 1.0);
    CHECK(m.mass == Catch::Approx(1.0).epsilon(1e-4));
    for (double z : {0.3, 1.0, 4.0}) {
        const GIGLaw g(0.7, z);
        CHECK(g.log_mass() == Catch::Approx(std::log(2.0 * boost::math::cyl_bessel_k(0.7, 1.0 / z))).epsilon(1e-10));
        CHECK(g.cdf(-1e9) == 0.0);
        CHECK(g.cdf(1e9) == 1.0);
    }
    const LaplaceCheck lc = laplace_transform_check(1, 1.0, 1.0, 20000, 8);
    CHECK(std::abs(lc.contour - lc.gaussian) < 1e-6 + lc.contour_error);
    CHECK(std::abs(lc.mc - lc.contour) < 4.0 * lc.mc_std_error);
}

TEST_CASE("n = 2 particle gap is stationary with Gamma(θ) law")
{
    const stats::GoodnessOfFit g = particle_gap_stationarity_check(Vec{-0.5, 0.5}, 3000, 10.0, 2e-3, 12);
    CHECK(g.p_value > 1e-3);
}
