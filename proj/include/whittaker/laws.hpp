#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "whittaker/core.hpp"
#include "whittaker/givental.hpp"
#include "whittaker/paths.hpp"
#include "whittaker/quadrature.hpp"
#include "whittaker/rng.hpp"
#include "whittaker/specfun.hpp"
#include "whittaker/stats.hpp"
#include "whittaker/words.hpp"

namespace wlab {

// ---------------------------------------------------------------------------
// Law of T_{w_0}η(t) at n = 2

// ν^μ_t density e^{−Σμ_i²t/2} ψ_μ(x) θ_t(x) at a point of R².
inline double nu_density(std::span<const double> mu, double t, std::span<const double> x)
{
    require(mu.size() == 2 && x.size() == 2, "nu_density: n = 2 only");
    const double psi = whittaker_closed_form_n2(mu, x);
    return std::exp(-(mu[0] * mu[0] + mu[1] * mu[1]) * t / 2.0) * psi * specfun::theta_density(t, x).value;
}

// Marginal law of d = x_1 − x_2 under ν^μ_t, tabulated on a grid. The density factorizes as
// N(S; (μ_1+μ_2)t, 2t) · g(d) in S = x_1 + x_2, so g(d) = ν(x(S_0, d)) / (2 φ_S(S_0)).
struct DifferenceMarginal {
    Vec d;
    Vec density;
    Vec cdf;
    double mass = 0.0; // ∫ g over the grid, 1 when the conventions are consistent

    double quantile(double p) const
    {
        const auto it = std::lower_bound(cdf.begin(), cdf.end(), p);
        if (it == cdf.begin()) return d.front();
        if (it == cdf.end()) return d.back();
        const std::size_t j = static_cast<std::size_t>(it - cdf.begin());
        const double w = (p - cdf[j - 1]) / (cdf[j] - cdf[j - 1]);
        return d[j - 1] + w * (d[j] - d[j - 1]);
    }
};

inline DifferenceMarginal nu_difference_marginal(std::span<const double> mu, double t, double step = 0.02)
{
    const double s0 = (mu[0] + mu[1]) * t;
    const double phi_s = 1.0 / std::sqrt(4.0 * pi * t);
    const double centre = (mu[0] - mu[1]) * t;
    const double lo = std::min(-12.0, centre - 12.0), hi = std::max(12.0, centre) + 12.0 * std::sqrt(t) + 6.0;
    DifferenceMarginal m;
    for (double d = lo; d <= hi + 1e-12; d += step) {
        const Vec x = {(s0 + d) / 2.0, (s0 - d) / 2.0};
        m.d.push_back(d);
        m.density.push_back(nu_density(mu, t, x) / (2.0 * phi_s));
    }
    m.cdf.assign(m.d.size(), 0.0);
    for (std::size_t j = 1; j < m.d.size(); ++j)
        m.cdf[j] = m.cdf[j - 1] + 0.5 * (m.density[j] + m.density[j - 1]) * (m.d[j] - m.d[j - 1]);
    m.mass = m.cdf.back();
    for (double& c : m.cdf) c /= m.mass;
    return m;
}

struct LawCheck {
    stats::GoodnessOfFit fit;
    double normalization = 0.0; // ∫ ν_t over the truncated window
    double sum_mean_z = 0.0;    // (mean S − Σμ t)/stderr
    double sum_var_ratio = 0.0; // sample Var(S) / 2t
};

// Chi-square of T_{w_0}η(t) against ν^μ_t on bins × bins cells, equal-probability in S and in d.
inline LawCheck law_check_nu_t(std::span<const double> mu, double t, std::size_t paths, double dt, std::size_t bins,
                               std::uint64_t seed)
{
    require(mu.size() == 2, "law_check_nu_t: n = 2 only");
    if (t < 0.5 || t > 4.0) throw DomainError("law_check_nu_t: t must lie in [0.5, 4]");
    require(bins >= 2, "law_check_nu_t: bins >= 2");
    const DifferenceMarginal g = nu_difference_marginal(mu, t);
    const double s_mean = (mu[0] + mu[1]) * t, s_sd = std::sqrt(2.0 * t);
    const boost::math::normal_distribution<double> s_law(s_mean, s_sd);
    Vec s_edges, d_edges;
    for (std::size_t b = 1; b < bins; ++b) {
        const double p = static_cast<double>(b) / bins;
        s_edges.push_back(boost::math::quantile(s_law, p));
        d_edges.push_back(g.quantile(p));
    }
    auto cell = [](const Vec& edges, double v) {
        return static_cast<std::size_t>(std::upper_bound(edges.begin(), edges.end(), v) - edges.begin());
    };

    const Vec grid = uniform_grid(t, dt);
    std::vector<std::vector<double>> counts(default_shards, std::vector<double>(bins * bins, 0.0));
    std::vector<stats::Accumulator> s_acc(default_shards);
    parallel_for(default_shards, [&](std::size_t sh) {
        Engine rng = make_stream(seed, sh);
        const auto [b, e] = shard_range(paths, default_shards, sh);
        for (std::size_t p = b; p < e; ++p) {
            const SampledPath x = transform_w0(brownian_on_grid(grid, mu, rng));
            const Vec v = x.value(x.size() - 1);
            const double s = v[0] + v[1], d = v[0] - v[1];
            counts[sh][cell(s_edges, s) * bins + cell(d_edges, d)] += 1.0;
            s_acc[sh].add(s);
        }
    });
    Vec obs(bins * bins, 0.0);
    stats::Accumulator s_all;
    for (std::size_t sh = 0; sh < default_shards; ++sh) {
        for (std::size_t c = 0; c < obs.size(); ++c) obs[c] += counts[sh][c];
        s_all.merge(s_acc[sh]);
    }
    const Vec expected(bins * bins, static_cast<double>(paths) / (bins * bins));
    LawCheck r;
    r.fit = stats::chi_square(obs, expected, 0);
    r.normalization = g.mass;
    r.sum_mean_z = (s_all.mean() - s_mean) / s_all.stderr_of_mean();
    r.sum_var_ratio = s_all.variance() / (2.0 * t);
    return r;
}

// ---------------------------------------------------------------------------
// Laplace transform E e^{−sZ^n_t}

struct LaplaceCheck {
    double mc = 0.0;
    double mc_std_error = 0.0;
    double contour = 0.0;
    double contour_error = 0.0; // |trapezoid(h) − trapezoid(2h)| plus the truncation estimate
    double gaussian = 0.0;      // n = 1 only: ∫ e^{−s e^{√t z}} φ(z) dz
};

namespace detail {

// ∫ s^{−Σλ} ∏Γ(λ_i)^n e^{Σλ_i² t/2} s_n(λ) dλ over Re λ_i = c, trapezoid with step h on [−R, R]^n
inline double laplace_contour(std::size_t n, double s, double t, double c, double h, double R)
{
    const std::size_t m = static_cast<std::size_t>(std::ceil(R / h));
    std::vector<cplx> lam(2 * m + 1), f(2 * m + 1);
    for (std::size_t k = 0; k <= 2 * m; ++k) {
        const double u = (static_cast<double>(k) - static_cast<double>(m)) * h;
        lam[k] = cplx(c, u);
        f[k] = std::exp(static_cast<double>(n) * specfun::log_gamma(lam[k]) + lam[k] * lam[k] * t / 2.0 -
                        lam[k] * std::log(s));
    }
    const cplx in = std::pow(cplx(0.0, 1.0), static_cast<double>(n)); // dλ = ιⁿ du
    cplx total(0.0, 0.0);
    if (n == 1) {
        for (std::size_t k = 0; k <= 2 * m; ++k) total += f[k] * specfun::sklyanin_density(CVec{lam[k]});
    } else if (n == 2) {
        for (std::size_t a = 0; a <= 2 * m; ++a)
            for (std::size_t b = 0; b <= 2 * m; ++b)
                total += f[a] * f[b] * specfun::sklyanin_density(CVec{lam[a], lam[b]});
    } else {
        throw DomainError("laplace_transform_check: n must be 1 or 2");
    }
    return (total * in * std::pow(h, static_cast<double>(n))).real();
}

} // namespace detail

inline LaplaceCheck laplace_transform_check(std::size_t n, double s, double t, std::size_t paths, std::uint64_t seed,
                                            double c = 0.5, double dt = 0.01)
{
    if (!(s > 0.0)) throw DomainError("laplace_transform_check: s must be positive");
    if (n != 1 && n != 2) throw DomainError("laplace_transform_check: n must be 1 or 2");
    if (!(c > 0.0)) throw DomainError("laplace_transform_check: contour abscissa must be positive");
    LaplaceCheck r;
    // |Γ(c+ιu)|^n e^{−u²t/2} below 1e−16 past R
    const double R = std::sqrt(2.0 * 40.0 / t) + 2.0;
    const double h = n == 1 ? 0.02 : 0.05;
    r.contour = detail::laplace_contour(n, s, t, c, h, R);
    r.contour_error = std::abs(r.contour - detail::laplace_contour(n, s, t, c, 2.0 * h, R)) + 1e-14;

    std::vector<stats::Accumulator> acc(default_shards);
    if (n == 1) {
        // Z = e^{B(t)} exactly
        parallel_for(default_shards, [&](std::size_t sh) {
            Engine rng = make_stream(seed, sh);
            std::normal_distribution<double> g(0.0, 1.0);
            const auto [b, e] = shard_range(paths, default_shards, sh);
            for (std::size_t p = b; p < e; ++p) acc[sh].add(std::exp(-s * std::exp(std::sqrt(t) * g(rng))));
        });
        auto f = [&](double z) { return std::exp(-s * std::exp(std::sqrt(t) * z) - z * z / 2.0) / std::sqrt(2.0 * pi); };
        const GaussRule rule = gauss_legendre(64);
        for (int k = -12; k < 12; ++k) r.gaussian += gauss_integrate(rule, k, k + 1.0, f);
    } else {
        // Z = e^{B_2(t)} ∫_0^t e^{B_1−B_2}; conditional mean and variance of the integral given the grid
        const Vec grid = uniform_grid(t, dt);
        parallel_for(default_shards, [&](std::size_t sh) {
            Engine rng = make_stream(seed, sh);
            std::normal_distribution<double> g(0.0, 1.0);
            const auto [b, e] = shard_range(paths, default_shards, sh);
            for (std::size_t p = b; p < e; ++p) {
                double b1 = 0.0, b2 = 0.0, m = 0.0, v = 0.0;
                for (std::size_t j = 0; j + 1 < grid.size(); ++j) {
                    const double h_j = grid[j + 1] - grid[j], sd = std::sqrt(h_j);
                    const double n1 = b1 + sd * g(rng), n2 = b2 + sd * g(rng);
                    const auto mom = detail::bridge_exp_moments(b1 - b2, n1 - n2, h_j, 2.0);
                    m += mom.mean;
                    v += mom.weight * mom.weight * 2.0 * h_j * h_j * h_j / 12.0;
                    b1 = n1;
                    b2 = n2;
                }
                const double scale = s * std::exp(b2);
                acc[sh].add(std::exp(-scale * m + 0.5 * scale * scale * v));
            }
        });
    }
    stats::Accumulator all;
    for (const auto& a : acc) all.merge(a);
    r.mc = all.mean();
    r.mc_std_error = all.stderr_of_mean();
    return r;
}

// ---------------------------------------------------------------------------
// Matsumoto–Yor

// ∫ e^{μx − cosh(x)/z} dx, whose closed form is 2K_μ(1/z).
class GIGLaw {
public:
    GIGLaw(double mu, double z) : mu_(mu), z_(z)
    {
        if (!(z > 0.0)) throw DomainError("GIGLaw: z must be positive");
        mode_ = std::asinh(mu * z);
        top_ = log_density(mode_);
        const auto [a, b] = log_window([&](double x) { return log_density(x); }, mode_, 40.0,
                                       0.25 * std::min(1.0, std::sqrt(z)));
        lo_ = a;
        hi_ = b;
        mass_ = integral(lo_, hi_);
    }

    double log_density(double x) const { return mu_ * x - std::cosh(x) / z_; }
    double mass() const { return mass_; } // unnormalized, over the window
    double log_mass() const { return top_ + std::log(mass_); }

    double cdf(double x) const
    {
        if (x <= lo_) return 0.0;
        if (x >= hi_) return 1.0;
        return integral(lo_, x) / mass_;
    }

private:
    // ∫ e^{log f − top} over [a, b], 24 Gauss–Legendre panels
    double integral(double a, double b) const
    {
        static const GaussRule rule = gauss_legendre(16);
        const int panels = 24;
        const double w = (b - a) / panels;
        double s = 0.0;
        for (int p = 0; p < panels; ++p) {
            const double c = a + (p + 0.5) * w;
            for (std::size_t k = 0; k < rule.nodes.size(); ++k)
                s += rule.weights[k] * std::exp(log_density(c + 0.5 * w * rule.nodes[k]) - top_);
        }
        return 0.5 * w * s;
    }

    double mu_, z_, mode_ = 0.0, top_ = 0.0, lo_ = 0.0, hi_ = 0.0, mass_ = 0.0;
};

// d/dx log K_μ(e^{−x}), central differences
inline double my_drift(double mu, double x, double h = 1e-4)
{
    return (specfun::log_macdonald_K(mu, std::exp(-(x + h))) - specfun::log_macdonald_K(mu, std::exp(-(x - h)))) /
           (2.0 * h);
}

struct DriftBin {
    double x = 0.0;        // mean log Z in the bin
    double drift = 0.0;    // mean Δlog Z / Δ
    double std_error = 0.0;
    double target = 0.0;   // bin mean of d/dx log K_μ(e^{−x})
    bool pass = false;     // within 3σ
};

struct MYCheck {
    std::vector<DriftBin> bins;
    std::size_t bins_passed = 0;
    stats::GoodnessOfFit conditional; // KS of u = F_GIG(B_t | Z_t) against U(0,1)
    double normalization_error = 0.0;  // max relative |∫ e^{μx−cosh x/z} − 2K_μ(1/z)| over test z
};

// Z_t = e^{−B_t}∫_0^t e^{2B_s} ds for B a BM with drift μ.
// (a) increments of log Z over [t, t+Δ] binned by log Z_t into equal-count bins; (b) PIT of B_t under the
// GIG law given Z_t.
inline MYCheck matsumoto_yor_check(double mu, double t, std::size_t paths, double dt, std::uint64_t seed,
                                   std::size_t drift_bins = 32, double increment = 0.02)
{
    if (!(t > 0.0) || !(dt > 0.0)) throw DomainError("matsumoto_yor_check: need t > 0 and dt > 0");
    const std::size_t steps_t = static_cast<std::size_t>(std::llround(t / dt));
    const std::size_t steps_d = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(increment / dt)));
    const double delta = steps_d * dt;
    Vec log_z(paths), inc(paths), b_t(paths);
    parallel_for(default_shards, [&](std::size_t sh) {
        Engine rng = make_stream(seed, sh);
        std::normal_distribution<double> g(0.0, 1.0);
        const auto [b, e] = shard_range(paths, default_shards, sh);
        const double sd = std::sqrt(dt);
        for (std::size_t p = b; p < e; ++p) {
            double bm = 0.0, integral = 0.0, lz_t = 0.0;
            for (std::size_t j = 0; j < steps_t + steps_d; ++j) {
                const double next = bm + mu * dt + sd * g(rng);
                integral += detail::bridge_exp_moments(2.0 * bm, 2.0 * next, dt, 4.0).mean;
                bm = next;
                if (j + 1 == steps_t) {
                    lz_t = std::log(integral) - bm;
                    b_t[p] = bm;
                }
            }
            log_z[p] = lz_t;
            inc[p] = std::log(integral) - bm - lz_t;
        }
    });

    MYCheck r;
    std::vector<std::size_t> order(paths);
    for (std::size_t i = 0; i < paths; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return log_z[a] < log_z[b]; });
    for (std::size_t bin = 0; bin < drift_bins; ++bin) {
        const std::size_t lo = bin * paths / drift_bins, hi = (bin + 1) * paths / drift_bins;
        stats::Accumulator d, x, target;
        for (std::size_t k = lo; k < hi; ++k) {
            const std::size_t i = order[k];
            d.add(inc[i] / delta);
            x.add(log_z[i]);
            target.add(my_drift(mu, log_z[i]));
        }
        DriftBin db{x.mean(), d.mean(), d.stderr_of_mean(), target.mean(), false};
        db.pass = std::abs(db.drift - db.target) <= 3.0 * db.std_error;
        if (db.pass) ++r.bins_passed;
        r.bins.push_back(db);
    }

    Vec u(paths);
    parallel_for(default_shards, [&](std::size_t sh) {
        const auto [b, e] = shard_range(paths, default_shards, sh);
        for (std::size_t p = b; p < e; ++p) u[p] = GIGLaw(mu, std::exp(log_z[p])).cdf(b_t[p]);
    });
    r.conditional = stats::ks_one_sample(u, [](double v) { return std::clamp(v, 0.0, 1.0); });

    for (double z : {0.05, 0.3, 1.0, 4.0, 20.0}) {
        const GIGLaw law(mu, z);
        const double exact = specfun::log_macdonald_K(mu, 1.0 / z) + std::log(2.0);
        r.normalization_error = std::max(r.normalization_error, std::abs(std::expm1(law.log_mass() - exact)));
    }
    return r;
}

// ---------------------------------------------------------------------------
// Stationarity of Lusztig coordinates

struct StationarityCheck {
    Vec thetas;
    std::vector<stats::GoodnessOfFit> ks; // e^{−y_k} against Gamma(θ_k)
};

// Terminal values of independent paths after a burn-in from e^{−y_k} = θ_k.
inline StationarityCheck lusztig_stationarity_check(std::span<const double> mu, const ReducedWord& word,
                                                    std::size_t paths, double t_burn, double dt, std::uint64_t seed)
{
    const Vec th = lusztig_thetas(mu, word);
    for (double v : th)
        if (!(v > 0.0)) throw DomainError("lusztig_stationarity_check: needs θ_k > 0 (μ in −Ω)");
    const std::size_t q = word.size();
    LusztigOptions opt;
    for (double v : th) opt.y0.push_back(-std::log(v));
    opt.record_every = std::numeric_limits<std::size_t>::max();
    std::vector<Vec> samples(q, Vec(paths));
    const Vec grid = uniform_grid(t_burn, dt);
    parallel_for(default_shards, [&](std::size_t sh) {
        Engine rng = make_stream(seed, sh);
        const auto [b, e] = shard_range(paths, default_shards, sh);
        for (std::size_t p = b; p < e; ++p) {
            const Trajectory tr = lusztig_dynamics_on(brownian_on_grid(grid, mu, rng), word, opt);
            const Vec y = tr.last();
            for (std::size_t k = 0; k < q; ++k) samples[k][p] = std::exp(-y[k]);
        }
    });
    StationarityCheck r;
    r.thetas = th;
    for (std::size_t k = 0; k < q; ++k)
        r.ks.push_back(stats::ks_one_sample(samples[k], [&](double v) {
            return v <= 0.0 ? 0.0 : boost::math::gamma_p(th[k], v);
        }));
    return r;
}

// Gap ξ_1 − ξ_2 of the n = 2 particle system at t_burn (started at 0), against the law with
// density ∝ e^{−θg − e^{−g}}, θ = μ_2 − μ_1; equivalently e^{−g} ~ Gamma(θ).
inline stats::GoodnessOfFit particle_gap_stationarity_check(std::span<const double> mu, std::size_t paths,
                                                            double t_burn, double dt, std::uint64_t seed)
{
    require(mu.size() == 2, "particle_gap_stationarity_check: n = 2");
    const double th = mu[1] - mu[0];
    if (!(th > 0.0)) throw DomainError("particle_gap_stationarity_check: needs μ_2 > μ_1");
    Vec v(paths);
    const Vec grid = uniform_grid(t_burn, dt);
    parallel_for(default_shards, [&](std::size_t sh) {
        Engine rng = make_stream(seed, sh);
        const auto [b, e] = shard_range(paths, default_shards, sh);
        for (std::size_t p = b; p < e; ++p) {
            const Trajectory tr = particle_system_on(brownian_on_grid(grid, mu, rng));
            const Vec xi = tr.last();
            v[p] = std::exp(-(xi[0] - xi[1]));
        }
    });
    return stats::ks_one_sample(v, [&](double x) { return x <= 0.0 ? 0.0 : boost::math::gamma_p(th, x); });
}

} // namespace wlab
