#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "whittaker/core.hpp"
#include "whittaker/gtpoly.hpp"
#include "whittaker/quadrature.hpp"
#include "whittaker/rng.hpp"
#include "whittaker/specfun.hpp"
#include "whittaker/stats.hpp"

namespace wlab {

enum class Route { quadrature, givental_mc, lusztig, series, feynman_kac, closed_form, tarray };

inline const char* route_name(Route r)
{
    switch (r) {
    case Route::quadrature: return "quadrature";
    case Route::givental_mc: return "givental_mc";
    case Route::lusztig: return "lusztig";
    case Route::series: return "series";
    case Route::feynman_kac: return "feynman_kac";
    case Route::closed_form: return "closed_form";
    case Route::tarray: return "tarray";
    }
    return "?";
}

inline Route parse_route(const std::string& s)
{
    for (Route r : {Route::quadrature, Route::givental_mc, Route::lusztig, Route::series, Route::feynman_kac,
                    Route::closed_form, Route::tarray})
        if (s == route_name(r)) return r;
    throw DomainError("unknown route '" + s + "'");
}

struct WhittakerEval {
    double value = 0.0;
    double est_error = 0.0;
    Route route = Route::quadrature;
    std::map<std::string, double> meta;
};

// Trapezoid step and tail cut for the doubly exponential integrands below.
// The finer pass uses h/2; the difference is the reported error.
struct QuadSpec {
    double h = 0.2;
    double drop = 46.0; // log of the neglected tail ratio (e^{-46} ≈ 1e-20)
};

// λ(x) = Σ λ_i x_i; α_i(x) = x_i − x_{i+1}
inline Vec simple_roots(std::span<const double> x)
{
    Vec a(x.size() > 0 ? x.size() - 1 : 0);
    for (std::size_t i = 0; i + 1 < x.size(); ++i) a[i] = x[i] - x[i + 1];
    return a;
}

inline double gamma_product(std::span<const double> lambda)
{
    double p = 1.0;
    for (std::size_t i = 0; i < lambda.size(); ++i)
        for (std::size_t j = i + 1; j < lambda.size(); ++j) p *= specfun::gamma(cplx(lambda[i] - lambda[j])).real();
    return p;
}

inline bool in_chamber_strict(std::span<const double> lambda) { return in_chamber(lambda); }

// ---------------------------------------------------------------------------
// Kernels

template <class S>
S baxter_kernel(S theta, std::span<const double> x, std::span<const double> y)
{
    if (x.size() < 2 || y.size() + 1 != x.size()) throw DomainError("baxter_kernel: need x in R^n, y in R^{n-1}, n >= 2");
    double gaps = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) gaps += std::exp(y[i] - x[i]) + std::exp(x[i + 1] - y[i]);
    return std::exp(theta * (sum(x) - sum(y)) - gaps);
}

inline double baxter_kernel(double theta, const Vec& x, const Vec& y)
{
    return baxter_kernel<double>(theta, std::span<const double>(x), std::span<const double>(y));
}

// H = Δ − 2 Σ e^{−α_i(x)} applied to f by central differences.
template <class F>
double toda_apply(F&& f, std::span<const double> x, double h)
{
    Vec p(x.begin(), x.end());
    const double f0 = f(p);
    double lap = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double xi = p[i];
        p[i] = xi + h;
        const double fp = f(p);
        p[i] = xi - h;
        const double fm = f(p);
        p[i] = xi;
        lap += (fp - 2.0 * f0 + fm) / (h * h);
    }
    double pot = 0.0;
    for (double a : simple_roots(x)) pot += std::exp(-a);
    return lap - 2.0 * pot * f0;
}

// |(H_x − θ²)Q − H_y Q| / |Q| at one point.
inline double kernel_identity_residual(double theta, const Vec& x, const Vec& y, double h = 1e-3)
{
    auto qx = [&](std::span<const double> xx) { return baxter_kernel<double>(theta, xx, y); };
    auto qy = [&](std::span<const double> yy) { return baxter_kernel<double>(theta, x, yy); };
    const double q = qx(x);
    const double lhs = toda_apply(qx, x, h) - theta * theta * q;
    const double rhs = toda_apply(qy, y, h);
    return std::abs(lhs - rhs) / q;
}

// F_λ(T) = Σ_k λ_k type_k(T) − Σ_{k<n} Σ_i (e^{T_{k,i}−T_{k+1,i}} + e^{T_{k+1,i+1}−T_{k,i}})
inline double givental_energy(std::span<const double> lambda, const TriangularArray& t)
{
    require_same_size(lambda.size(), t.n(), "givental_energy");
    double f = dot(lambda, pattern_type(t));
    for (std::size_t k = 1; k < t.n(); ++k)
        for (std::size_t i = 1; i <= k; ++i) f -= std::exp(t(k, i) - t(k + 1, i)) + std::exp(t(k + 1, i + 1) - t(k, i));
    return f;
}

// 2 e^{(λ_1+λ_2)(x_1+x_2)/2} K_{λ_1−λ_2}(2 e^{(x_2−x_1)/2})
inline double whittaker_closed_form_n2(std::span<const double> lambda, std::span<const double> x)
{
    require(lambda.size() == 2 && x.size() == 2, "whittaker_closed_form_n2: n = 2 only");
    const double log_k = specfun::log_macdonald_K(lambda[0] - lambda[1], 2.0 * std::exp((x[1] - x[0]) / 2.0));
    return 2.0 * std::exp((lambda[0] + lambda[1]) * (x[0] + x[1]) / 2.0 + log_k);
}

// k(x, y) for the conditional law; y omits its last (implied) coordinate.
inline double conditional_kernel_k(std::size_t n, std::span<const double> x, std::span<const double> y)
{
    if (n == 2) {
        require(x.size() == 2 && y.size() >= 1, "conditional_kernel_k: n = 2 needs x in R^2, y_1");
        return std::exp(-std::exp(x[1] - y[0]) - std::exp(y[0] - x[0]));
    }
    if (n == 3) {
        require(x.size() == 3 && y.size() >= 2, "conditional_kernel_k: n = 3 needs x in R^3, (y_1, y_2)");
        const double a = -std::log(std::exp(x[2] - y[0] - y[1]) + std::exp(-x[0]));
        const double b = std::log(std::exp(y[0]) + std::exp(y[1]) + std::exp(y[0] + y[1] - x[1]) + std::exp(x[1]));
        return 2.0 * specfun::macdonald_K(0.0, 2.0 * std::exp((b - a) / 2.0));
    }
    throw DomainError("conditional_kernel_k: n must be 2 or 3");
}

// ---------------------------------------------------------------------------
// Layered quadrature of the recursive definition

namespace detail {

// [lo, hi] outside which the concave log-density g falls more than `drop` below its maximum.
template <class G>
std::pair<double, double> concave_window(G&& g, double a, double b, double drop)
{
    const Minimum m = golden_section([&](double t) { return -g(t); }, a, b, 1e-6);
    return log_window(g, m.x, drop, 0.25);
}

// Lattice points k·h inside [lo, hi]: fixed anchors keep sums smooth in the parameters.
inline std::pair<long, long> lattice(double lo, double hi, double h)
{
    return {static_cast<long>(std::ceil(lo / h)), static_cast<long>(std::floor(hi / h))};
}

// Window for y_i given the bracketing x_i, x_{i+1} and a linear tilt bound A.
inline std::pair<double, double> layer_window(double xi, double xnext, double tilt, double drop)
{
    const double lo0 = std::min(xi, xnext) - 80.0, hi0 = std::max(xi, xnext) + 80.0;
    double lo = hi0, hi = lo0;
    for (double a : {tilt, -tilt}) {
        auto g = [&](double t) { return a * (t - xi) - std::exp(t - xi) - std::exp(xnext - t); };
        const auto w = concave_window(g, lo0, hi0, drop);
        lo = std::min(lo, w.first);
        hi = std::max(hi, w.second);
    }
    return {lo, hi};
}

// φ_n(x) = e^{−λ(x)} ψ_λ(x) for n ≤ 3 on the lattice hZ.
template <class S>
S scaled_psi_layers(const std::vector<S>& lambda, std::span<const double> x, double h, double drop)
{
    const std::size_t n = lambda.size();
    double tilt = 1.0;
    for (const S& l : lambda) tilt += 2.0 * std::abs(l);
    if (n == 1) return S(1.0);
    if (n == 2) {
        const S a = lambda[0] - lambda[1];
        const auto [lo, hi] = layer_window(x[0], x[1], std::real(a), drop);
        const auto [k0, k1] = lattice(lo, hi, h);
        S s{};
        for (long k = k0; k <= k1; ++k) {
            const double y = k * h;
            s += std::exp(a * (y - x[0]) - std::exp(y - x[0]) - std::exp(x[1] - y));
        }
        return s * h;
    }
    if (n != 3) throw DomainError("whittaker_quadrature: n <= 3");
    const S a1 = lambda[0] - lambda[2], a2 = lambda[1] - lambda[2], b = lambda[0] - lambda[1];
    const auto [lo1, hi1] = layer_window(x[0], x[1], tilt, drop);
    const auto [lo2, hi2] = layer_window(x[1], x[2], tilt, drop);
    const auto [i0, i1] = lattice(lo1, hi1, h);
    const auto [j0, j1] = lattice(lo2, hi2, h);
    S total{};
    for (long i = i0; i <= i1; ++i) {
        const double y1 = i * h;
        for (long j = j0; j <= j1; ++j) {
            const double y2 = j * h;
            const double gaps = std::exp(y1 - x[0]) + std::exp(x[1] - y1) + std::exp(y2 - x[1]) + std::exp(x[2] - y2);
            const S outer = a1 * (y1 - x[0]) + a2 * (y2 - x[1]) - gaps;
            if (std::real(outer) < -drop - 20.0) continue;
            // inner layer: φ_2(y) = ∫ e^{(λ_1−λ_2)(t−y_1) − e^{t−y_1} − e^{y_2−t}} dt
            const auto [lo, hi] = layer_window(y1, y2, std::real(b), drop);
            const auto [k0, k1] = lattice(lo, hi, h);
            S inner{};
            for (long k = k0; k <= k1; ++k) {
                const double t = k * h;
                inner += std::exp(b * (t - y1) - std::exp(t - y1) - std::exp(y2 - t));
            }
            total += std::exp(outer) * inner * h;
        }
    }
    return total * h * h;
}

} // namespace detail

// ψ_λ(x) by nested trapezoid sums over the layers ψ^(k) = Q_{λ_k} ψ^(k−1).
inline WhittakerEval whittaker_quadrature(std::span<const double> lambda, std::span<const double> x,
                                          const QuadSpec& grid = {})
{
    require_same_size(lambda.size(), x.size(), "whittaker_quadrature");
    if (lambda.empty() || lambda.size() > 3) throw DomainError("whittaker_quadrature: 1 <= n <= 3");
    const Vec l(lambda.begin(), lambda.end());
    const double pre = dot(lambda, x);
    WhittakerEval r;
    r.route = Route::quadrature;
    if (l.size() == 1) {
        r.value = std::exp(pre);
        return r;
    }
    const double coarse = detail::scaled_psi_layers(l, x, grid.h, grid.drop);
    const double fine = detail::scaled_psi_layers(l, x, grid.h / 2.0, grid.drop);
    r.value = std::exp(pre) * fine;
    r.est_error = std::exp(pre) * std::abs(fine - coarse) + 4e-15 * std::abs(r.value);
    r.meta["scaled"] = fine;
    r.meta["h"] = grid.h / 2.0;
    return r;
}

inline WhittakerEval whittaker_quadrature(const Vec& lambda, const Vec& x, const QuadSpec& grid = {})
{
    return whittaker_quadrature(std::span<const double>(lambda), std::span<const double>(x), grid);
}

struct ComplexEval {
    cplx value;
    double est_error = 0.0;
};

// Complex spectral parameter; same layers with complex tilts.
inline ComplexEval whittaker_quadrature(const CVec& lambda, const Vec& x, const QuadSpec& grid = {})
{
    require_same_size(lambda.size(), x.size(), "whittaker_quadrature");
    if (lambda.empty() || lambda.size() > 3) throw DomainError("whittaker_quadrature: 1 <= n <= 3");
    cplx pre(0.0, 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) pre += lambda[i] * x[i];
    const cplx e = std::exp(pre);
    if (lambda.size() == 1) return {e, 0.0};
    const cplx coarse = detail::scaled_psi_layers(lambda, x, grid.h, grid.drop);
    const cplx fine = detail::scaled_psi_layers(lambda, x, grid.h / 2.0, grid.drop);
    return {e * fine, std::abs(e) * std::abs(fine - coarse) + 4e-15 * std::abs(e * fine)};
}

// ---------------------------------------------------------------------------
// Lusztig-coordinate integral for n = 3, word 121

namespace detail {

// ∫_{R^3} exp(Σθ_k s_k − Σe^{s_k} − c_1 e^{−s_1} − c_2 (e^{s_1}+e^{s_3}) e^{−s_2−s_3}) ds
inline double lusztig_integral_n3(const Vec& th, double c1, double c2, double h, double drop)
{
    auto w1 = concave_window([&](double s) { return th[0] * s - std::exp(s) - c1 * std::exp(-s); }, -200.0, 10.0, drop);
    // (v_1+v_3)/(v_3) ≥ 1 gives a v_1-free lower envelope for s_2
    auto w2 = concave_window([&](double s) { return th[1] * s - std::exp(s) - c2 * std::exp(-s); }, -200.0, 10.0, drop);
    const auto [i0, i1] = lattice(w1.first, w1.second, h);
    const auto [j0, j1] = lattice(w2.first, w2.second, h);
    double total = 0.0;
    for (long i = i0; i <= i1; ++i) {
        const double s1 = i * h;
        const double e1 = th[0] * s1 - std::exp(s1) - c1 * std::exp(-s1);
        for (long j = j0; j <= j1; ++j) {
            const double s2 = j * h;
            const double e2 = e1 + th[1] * s2 - std::exp(s2) - c2 * std::exp(-s2);
            const double c3 = c2 * std::exp(s1 - s2);
            auto g3 = [&](double s) { return th[2] * s - std::exp(s) - c3 * std::exp(-s); };
            const auto w3 = concave_window(g3, -200.0, 10.0, drop);
            const auto [k0, k1] = lattice(w3.first, w3.second, h);
            double inner = 0.0;
            for (long k = k0; k <= k1; ++k) inner += std::exp(g3(k * h));
            total += std::exp(e2) * inner;
        }
    }
    return total * h * h * h;
}

} // namespace detail

// ψ_λ(x) = e^{λ(x)} ∫ v^{θ−1} e^{−v} exp(−e^{−α_1(x)}/v_1 − e^{−α_2(x)}(v_1+v_3)/(v_2 v_3)) dv
inline WhittakerEval whittaker_lusztig_n3(std::span<const double> lambda, std::span<const double> x,
                                          const QuadSpec& grid = {})
{
    require(lambda.size() == 3 && x.size() == 3, "whittaker_lusztig_n3: n = 3 only");
    if (!in_chamber(lambda)) throw DomainError("whittaker_lusztig_n3: need λ_1 > λ_2 > λ_3");
    const Vec th = {lambda[0] - lambda[1], lambda[0] - lambda[2], lambda[1] - lambda[2]};
    const double c1 = std::exp(-(x[0] - x[1])), c2 = std::exp(-(x[1] - x[2]));
    const double coarse = detail::lusztig_integral_n3(th, c1, c2, grid.h, grid.drop);
    const double fine = detail::lusztig_integral_n3(th, c1, c2, grid.h / 2.0, grid.drop);
    const double e = std::exp(dot(lambda, x));
    WhittakerEval r;
    r.route = Route::lusztig;
    r.value = e * fine;
    r.est_error = e * std::abs(fine - coarse) + 4e-15 * std::abs(r.value);
    r.meta["scaled"] = fine;
    return r;
}

// Corrected T-array display: Givental's integrand with λ reversed, summed on the full 3-d grid.
inline WhittakerEval whittaker_tarray_n3(std::span<const double> lambda, std::span<const double> x,
                                         const QuadSpec& grid = {})
{
    require(lambda.size() == 3 && x.size() == 3, "whittaker_tarray_n3: n = 3 only");
    const Vec rev = {lambda[2], lambda[1], lambda[0]};
    double tilt = 1.0;
    for (double l : lambda) tilt += 2.0 * std::abs(l);
    auto run = [&](double h) {
        TriangularArray t = TriangularArray::with_bottom_row(x);
        const double shift = dot(rev, x);
        const auto w21 = detail::layer_window(x[0], x[1], tilt, grid.drop);
        const auto w22 = detail::layer_window(x[1], x[2], tilt, grid.drop);
        const auto [i0, i1] = detail::lattice(w21.first, w21.second, h);
        const auto [j0, j1] = detail::lattice(w22.first, w22.second, h);
        double total = 0.0;
        for (long i = i0; i <= i1; ++i)
            for (long j = j0; j <= j1; ++j) {
                t(2, 1) = i * h;
                t(2, 2) = j * h;
                const auto w11 = detail::layer_window(t(2, 1), t(2, 2), tilt, grid.drop);
                const auto [k0, k1] = detail::lattice(w11.first, w11.second, h);
                for (long k = k0; k <= k1; ++k) {
                    t(1, 1) = k * h;
                    total += std::exp(givental_energy(rev, t) - shift);
                }
            }
        return total * h * h * h;
    };
    // the shift e^{−λ_rev(x)} only rescales; ψ is recovered with e^{λ_rev(x)}
    const double coarse = run(grid.h), fine = run(grid.h / 2.0);
    const double e = std::exp(dot(rev, x));
    WhittakerEval r;
    r.route = Route::tarray;
    r.value = e * fine;
    r.est_error = e * std::abs(fine - coarse) + 4e-15 * std::abs(r.value);
    return r;
}

// ---------------------------------------------------------------------------
// Monte Carlo with Gamma proposals (n ≤ 3)

inline WhittakerEval whittaker_givental_mc(std::span<const double> lambda, std::span<const double> x,
                                           std::size_t samples, std::uint64_t seed)
{
    require_same_size(lambda.size(), x.size(), "whittaker_givental_mc");
    const std::size_t n = lambda.size();
    if (n > 3) throw DomainError("whittaker_givental_mc: n <= 3");
    if (!in_chamber(lambda)) throw DomainError("whittaker_givental_mc: λ must lie in Ω (strictly decreasing)");
    WhittakerEval r;
    r.route = Route::givental_mc;
    const double e = std::exp(dot(lambda, x));
    if (n == 1) {
        r.value = e;
        return r;
    }
    Vec th;
    if (n == 2) th = {lambda[0] - lambda[1]};
    else th = {lambda[0] - lambda[1], lambda[0] - lambda[2], lambda[1] - lambda[2]};
    const Vec c = [&] {
        Vec v;
        for (double a : simple_roots(x)) v.push_back(std::exp(-a));
        return v;
    }();
    std::vector<stats::Accumulator> acc(default_shards);
    parallel_for(default_shards, [&](std::size_t s) {
        Engine rng = make_stream(seed, s);
        std::vector<std::gamma_distribution<double>> g;
        for (double t : th) g.emplace_back(t, 1.0);
        const auto [b, end] = shard_range(samples, default_shards, s);
        for (std::size_t k = b; k < end; ++k) {
            double w;
            if (n == 2) {
                w = std::exp(-c[0] / g[0](rng));
            } else {
                const double v1 = g[0](rng), v2 = g[1](rng), v3 = g[2](rng);
                w = std::exp(-c[0] / v1 - c[1] * (v1 + v3) / (v2 * v3));
            }
            acc[s].add(w);
        }
    });
    stats::Accumulator all;
    for (const auto& a : acc) all.merge(a);
    double norm = 1.0;
    for (double t : th) norm *= specfun::gamma(cplx(t)).real();
    r.value = e * norm * all.mean();
    r.est_error = e * norm * all.stderr_of_mean();
    r.meta["samples"] = static_cast<double>(samples);
    return r;
}

// ψ via m_ν series; λ differences must be non-integer.
inline WhittakerEval whittaker_series(std::span<const double> lambda, std::span<const double> x)
{
    const specfun::SeriesValue s = specfun::whittaker_from_series(to_complex(lambda), x);
    WhittakerEval r;
    r.route = Route::series;
    r.value = s.value.real();
    r.est_error = s.est_error + std::abs(s.value.imag());
    r.meta["degree"] = s.degree;
    return r;
}

// Deterministic evaluator dispatch (Monte Carlo routes live elsewhere).
inline WhittakerEval whittaker_eval(std::span<const double> lambda, std::span<const double> x, Route route,
                                    const QuadSpec& grid = {})
{
    switch (route) {
    case Route::quadrature: return whittaker_quadrature(lambda, x, grid);
    case Route::lusztig: return whittaker_lusztig_n3(lambda, x, grid);
    case Route::tarray: return whittaker_tarray_n3(lambda, x, grid);
    case Route::series: return whittaker_series(lambda, x);
    case Route::closed_form: {
        WhittakerEval r;
        r.route = Route::closed_form;
        if (lambda.size() == 1) r.value = std::exp(lambda[0] * x[0]);
        else r.value = whittaker_closed_form_n2(lambda, x);
        r.est_error = 1e-13 * std::abs(r.value);
        return r;
    }
    default: throw DomainError(std::string("whittaker_eval: route ") + route_name(route) + " needs samples and a seed");
    }
}

// ---------------------------------------------------------------------------
// Checks built on the evaluators

struct AsymptoticResult {
    double scaled = 0.0; // e^{−λ(x)} ψ_λ(x)
    double target = 0.0; // ∏ Γ(λ_i − λ_j)
    double ratio = 0.0;
    bool bound_ok = true;
};

// x with every consecutive gap equal to x_gap, centred at 0.
inline Vec equal_gap_point(std::size_t n, double gap)
{
    Vec x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = gap * ((n - 1) / 2.0 - static_cast<double>(i));
    return x;
}

inline AsymptoticResult asymptotic_check(std::span<const double> lambda, double x_gap, const QuadSpec& grid = {})
{
    if (!in_chamber(lambda)) throw DomainError("asymptotic_check: λ must lie in Ω");
    const std::size_t n = lambda.size();
    const Vec x = equal_gap_point(n, x_gap);
    AsymptoticResult r;
    r.target = gamma_product(lambda);
    if (n == 1) {
        r.scaled = 1.0;
    } else if (n == 2) {
        const double th = lambda[0] - lambda[1];
        const double z = 2.0 * std::exp(-x_gap / 2.0);
        r.scaled = 2.0 * std::exp(-th * x_gap / 2.0 + specfun::log_macdonald_K(th, z));
    } else if (n == 3) {
        r.scaled = whittaker_lusztig_n3(lambda, x, grid).meta.at("scaled");
    } else {
        throw DomainError("asymptotic_check: n <= 3");
    }
    r.ratio = r.scaled / r.target;
    r.bound_ok = r.ratio <= 1.0 + 1e-9 && r.ratio >= 0.0;
    return r;
}

// β^{−n(n−1)/2} ψ_{λ/β}(βx)
inline double zero_temperature_limit(std::span<const double> lambda, std::span<const double> x, double beta,
                                     const QuadSpec& grid = {})
{
    require_same_size(lambda.size(), x.size(), "zero_temperature_limit");
    if (!(beta > 0.0)) throw DomainError("zero_temperature_limit: β > 0");
    const std::size_t n = lambda.size();
    Vec l(n), bx(n);
    for (std::size_t i = 0; i < n; ++i) {
        l[i] = lambda[i] / beta;
        bx[i] = beta * x[i];
    }
    const double q = static_cast<double>(positive_roots(n));
    if (n == 1) return std::exp(lambda[0] * x[0]);
    if (n == 2) {
        const double log_k = specfun::log_macdonald_K(l[0] - l[1], 2.0 * std::exp((bx[1] - bx[0]) / 2.0));
        return std::exp(std::log(2.0) + (l[0] + l[1]) * (bx[0] + bx[1]) / 2.0 + log_k - q * std::log(beta));
    }
    const WhittakerEval e = whittaker_quadrature(l, bx, grid);
    return e.value * std::pow(beta, -q);
}

// |Hψ − (Σλ_i²)ψ| / |ψ| by central differences of the chosen evaluator.
inline double eigen_residual(std::span<const double> lambda, std::span<const double> x, double h,
                             Route route = Route::quadrature, const QuadSpec& grid = {})
{
    const Vec l(lambda.begin(), lambda.end());
    auto psi = [&](std::span<const double> p) {
        if (l.size() == 1) return std::exp(l[0] * p[0]);
        return whittaker_eval(l, p, route, grid).value;
    };
    const double f0 = psi(x);
    const double hf = toda_apply(psi, x, h);
    double e = 0.0;
    for (double v : l) e += v * v;
    return std::abs(hf - e * f0) / std::abs(f0);
}

} // namespace wlab
