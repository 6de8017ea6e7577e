#include <catch_amalgamated.hpp>

#include "whittaker/cells.hpp"
#include "whittaker/paths.hpp"

using namespace wlab;

TEST_CASE("sbar satisfies braid relations and wbar of w_0 is antidiagonal up to sign")
{
    for (std::size_t n : {3u, 4u}) {
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const RMatrix a = sbar(n, i) * sbar(n, i + 1) * sbar(n, i);
            const RMatrix b = sbar(n, i + 1) * sbar(n, i) * sbar(n, i + 1);
            CHECK(max_abs_diff(a, b) == 0.0);
        }
        const RMatrix w = wbar<double>(ReducedWord::canonical_longest(n));
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < n; ++c) CHECK(std::abs(w(r, c)) == (r + c == n - 1 ? 1.0 : 0.0));
    }
}

TEST_CASE("transition maps are exact in rationals and involutive")
{
    const std::array<Rational, 3> u = {Rational(2, 3), Rational(5, 7), Rational(3)};
    const std::array<Rational, 3> u2 = transition_map_u(u);
    const ReducedWord w121(3, {1, 2, 1}), w212(3, {2, 1, 2});
    CHECK(factor_product(FactorKind::Y, w121, std::vector<Rational>(u.begin(), u.end())) ==
          factor_product(FactorKind::Y, w212, std::vector<Rational>(u2.begin(), u2.end())));
    CHECK(transition_map_u(u2, WordDirection::w212_to_121) == u);

    const std::array<Rational, 3> v = {Rational(1, 2), Rational(4), Rational(2, 9)};
    const std::array<Rational, 3> v2 = transition_map_v(v);
    CHECK(factor_product(FactorKind::X, w121, std::vector<Rational>(v.begin(), v.end())) ==
          factor_product(FactorKind::X, w212, std::vector<Rational>(v2.begin(), v2.end())));
    CHECK(transition_map_v(v2) == v);
    CHECK_THROWS_AS(transition_map_v(std::array<Rational, 3>{Rational(1), Rational(1), Rational(-1)}), DomainError);
}

TEST_CASE("a ∏Y(u) = ∏X(v) a^r exactly")
{
    const ReducedWord w = ReducedWord::canonical_longest(4);
    const std::vector<Rational> a = {Rational(3), Rational(1, 2), Rational(2, 5), Rational(7)};
    std::vector<Rational> u;
    for (std::size_t k = 0; k < w.size(); ++k) u.emplace_back(static_cast<int>(k) + 2, 3);
    const LemmaUV<Rational> r = lemma_uv_check(a, w, u);
    CHECK(r.lhs == r.rhs);
}

TEST_CASE("LDU reconstructs b and detects the complement of the big cell")
{
    RMatrix b(3, 3);
    const double vals[3][3] = {{2, 1, 0.5}, {0.3, 1.5, 0.2}, {1, -0.4, 3}};
    for (std::size_t r = 0; r < 3; ++r)
        for (std::size_t c = 0; c < 3; ++c) b(r, c) = vals[r][c];
    const LDU<double> g = ldu(b);
    CHECK(max_abs_diff(RMatrix(g.L * g.D * g.U), b) < 1e-14);
    CHECK_THROWS_AS(ldu(sbar(3, 1)), GaussDecompositionError);
}

TEST_CASE("Gauss decomposition of b(t) recovers the path transform")
{
    const Vec mu = {0.2, 0.0, -0.3};
    const SampledPath eta = brownian_sample(3, mu, 1.0, 1e-3, 41);
    for (const ReducedWord& w : reduced_words(Permutation::longest(3))) {
        const GaussReport r = gauss_theorem_check(eta, w, 1.0);
        CHECK(r.diagonal_error <= 3.0 * r.grid_bound + 1e-9);
        // the factor parameters come from the same discretized path
        CHECK(r.y_error <= r.grid_bound);
        CHECK(r.x_error <= r.grid_bound);
    }
}

TEST_CASE("ODE routes for b(t) agree")
{
    const SampledPath eta = brownian_sample(3, Vec{0.0, 0.0, 0.0}, 0.5, 1e-3, 7);
    const BTrajectory a = ode_b_integral(eta), s = ode_b_stepwise(eta);
    CHECK(max_abs_diff(a.b.back(), s.b.back()) < 1e-2 * std::max(1.0, max_abs_entry(a.b.back())));
}

TEST_CASE("Haar conjugation gives GT patterns with the uniform law")
{
    const Vec x = {2.0, 0.5, -1.0};
    const HaarReport r = haar_gt_check(x, 4000, 13);
    CHECK(r.max_interlace_violation < 1e-10);
    CHECK(r.max_type_error < 1e-10);
    for (double z : r.diag_mean_z) CHECK(std::abs(z) < 4.0);
    for (const auto& m : r.marginals) CHECK(m.p_value > 1e-3);
    CHECK(symmetric_eigenvalues(RMatrix::diagonal(Vec{1.0, 3.0, 2.0})) == Vec{3.0, 2.0, 1.0});
}
