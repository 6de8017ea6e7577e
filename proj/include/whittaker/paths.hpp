#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "whittaker/core.hpp"
#include "whittaker/givental.hpp"
#include "whittaker/gtpoly.hpp"
#include "whittaker/rng.hpp"
#include "whittaker/specfun.hpp"
#include "whittaker/stats.hpp"
#include "whittaker/words.hpp"

namespace wlab {

// Path on a grid 0 = t_0 < … < t_M in R^n, stored as a regular part r plus a
// logarithmic part: η(t) = r(t) + ℓ log t. Transforms of Brownian paths are
// singular at t = 0 only through ℓ, so r stays finite on the whole grid.
class SampledPath {
public:
    SampledPath() = default;
    SampledPath(Vec times, std::size_t n, Vec regular, Vec ell = {}, Vec drift = {})
        : times_(std::move(times)), n_(n), r_(std::move(regular)), ell_(std::move(ell)), drift_(std::move(drift))
    {
        if (ell_.empty()) ell_.assign(n_, 0.0);
        if (drift_.empty()) drift_.assign(n_, 0.0);
        require(n_ >= 1, "SampledPath: n >= 1");
        require(times_.size() >= 2, "SampledPath: need at least two grid points");
        require(r_.size() == times_.size() * n_, "SampledPath: value array has the wrong size");
        require(ell_.size() == n_ && drift_.size() == n_, "SampledPath: ℓ and drift must have length n");
        require(times_[0] == 0.0, "SampledPath: grid must start at t = 0");
        for (std::size_t j = 1; j < times_.size(); ++j)
            if (!(times_[j] > times_[j - 1])) throw DomainError("SampledPath: times must increase strictly");
        for (double v : r_)
            if (!std::isfinite(v)) throw DomainError("SampledPath: non-finite value");
    }

    std::size_t n() const { return n_; }
    std::size_t size() const { return times_.size(); }
    const Vec& times() const { return times_; }
    double time(std::size_t j) const { return times_[j]; }
    const Vec& ell() const { return ell_; }
    const Vec& drift() const { return drift_; }
    const Vec& regular() const { return r_; }

    double reg(std::size_t j, std::size_t i) const { return r_[j * n_ + i]; }
    double& reg(std::size_t j, std::size_t i) { return r_[j * n_ + i]; }

    // η_i(t_j); −∞/+∞ at t = 0 when ℓ_i ≠ 0
    double value(std::size_t j, std::size_t i) const
    {
        if (ell_[i] == 0.0) return reg(j, i);
        return reg(j, i) + ell_[i] * std::log(times_[j]);
    }

    Vec value(std::size_t j) const
    {
        Vec v(n_);
        for (std::size_t i = 0; i < n_; ++i) v[i] = value(j, i);
        return v;
    }

    bool singular() const
    {
        return std::any_of(ell_.begin(), ell_.end(), [](double l) { return l != 0.0; });
    }

    // First k coordinates.
    SampledPath head(std::size_t k) const
    {
        require(k >= 1 && k <= n_, "SampledPath::head: bad k");
        Vec r(times_.size() * k);
        for (std::size_t j = 0; j < times_.size(); ++j)
            for (std::size_t i = 0; i < k; ++i) r[j * k + i] = reg(j, i);
        return SampledPath(times_, k, std::move(r), Vec(ell_.begin(), ell_.begin() + k),
                           Vec(drift_.begin(), drift_.begin() + k));
    }

    // Grid points [0, m].
    SampledPath prefix(std::size_t m) const
    {
        require(m >= 1 && m < times_.size(), "SampledPath::prefix: bad length");
        return SampledPath(Vec(times_.begin(), times_.begin() + m + 1), n_,
                           Vec(r_.begin(), r_.begin() + (m + 1) * n_), ell_, drift_);
    }

    // Midpoints inserted; r interpolated linearly.
    SampledPath refined() const
    {
        const std::size_t m = times_.size();
        Vec t(2 * m - 1), r((2 * m - 1) * n_);
        for (std::size_t j = 0; j < m; ++j) {
            t[2 * j] = times_[j];
            for (std::size_t i = 0; i < n_; ++i) r[2 * j * n_ + i] = reg(j, i);
            if (j + 1 < m) {
                t[2 * j + 1] = 0.5 * (times_[j] + times_[j + 1]);
                for (std::size_t i = 0; i < n_; ++i) r[(2 * j + 1) * n_ + i] = 0.5 * (reg(j, i) + reg(j + 1, i));
            }
        }
        return SampledPath(std::move(t), n_, std::move(r), ell_, drift_);
    }

    // Every other grid point (inverse of refined()).
    SampledPath coarsened() const
    {
        require(times_.size() % 2 == 1, "SampledPath::coarsened: need an even number of steps");
        const std::size_t m = (times_.size() + 1) / 2;
        Vec t(m), r(m * n_);
        for (std::size_t j = 0; j < m; ++j) {
            t[j] = times_[2 * j];
            for (std::size_t i = 0; i < n_; ++i) r[j * n_ + i] = reg(2 * j, i);
        }
        return SampledPath(std::move(t), n_, std::move(r), ell_, drift_);
    }

private:
    Vec times_;
    std::size_t n_ = 0;
    Vec r_;
    Vec ell_;
    Vec drift_;
};

inline Vec uniform_grid(double t_max, double dt)
{
    if (!(dt > 0.0) || !(t_max > 0.0)) throw DomainError("uniform_grid: need t_max > 0 and dt > 0");
    const std::size_t m = static_cast<std::size_t>(std::llround(t_max / dt));
    require(m >= 1, "uniform_grid: t_max/dt must be at least 1");
    Vec t(m + 1);
    for (std::size_t j = 0; j <= m; ++j) t[j] = t_max * static_cast<double>(j) / static_cast<double>(m);
    return t;
}

// Brownian motion from 0 with drift μ sampled on the grid.
inline SampledPath brownian_on_grid(const Vec& times, std::span<const double> mu, Engine& rng)
{
    const std::size_t n = mu.size();
    std::normal_distribution<double> g(0.0, 1.0);
    Vec r(times.size() * n, 0.0);
    for (std::size_t j = 1; j < times.size(); ++j) {
        const double dt = times[j] - times[j - 1], sd = std::sqrt(dt);
        for (std::size_t i = 0; i < n; ++i) r[j * n + i] = r[(j - 1) * n + i] + mu[i] * dt + sd * g(rng);
    }
    return SampledPath(times, n, std::move(r), {}, Vec(mu.begin(), mu.end()));
}

inline SampledPath brownian_sample(std::size_t n, std::span<const double> mu, double t_max, double dt,
                                   std::uint64_t seed, std::uint64_t stream = 0)
{
    require(mu.size() == n, "brownian_sample: μ must have length n");
    Engine rng = make_stream(seed, stream);
    return brownian_on_grid(uniform_grid(t_max, dt), mu, rng);
}

// ---------------------------------------------------------------------------
// Exact integrals of s^p e^{a(s)} with a piecewise linear

namespace detail {

// φ_k(c) = ∫_0^1 u^k e^{cu} du for k = 0..K (positive-term series, or the
// upward recurrence φ_k = (e^c − kφ_{k−1})/c when |c| > K + 1 where it is stable).
inline void phi_table(double c, int K, double* out)
{
    if (std::abs(c) < 1e-300) {
        for (int k = 0; k <= K; ++k) out[k] = 1.0 / (k + 1);
        return;
    }
    if (std::abs(c) > K + 1.0) {
        out[0] = std::expm1(c) / c;
        const double ec = std::exp(c);
        for (int k = 1; k <= K; ++k) out[k] = (ec - k * out[k - 1]) / c;
        return;
    }
    for (int k = 0; k <= K; ++k) {
        double s = 0.0;
        if (c > 0.0) {
            double term = 1.0; // c^m / m!
            for (int m = 0; m < 400; ++m) {
                const double add = term / (k + m + 1);
                s += add;
                if (add < 1e-17 * s) break;
                term *= c / (m + 1);
            }
        } else {
            // e^{c} Σ_m |c|^m k!/(k+m+1)!
            double term = 1.0 / (k + 1);
            for (int m = 0; m < 400; ++m) {
                s += term;
                if (term < 1e-17 * s) break;
                term *= -c / (k + m + 2);
            }
            s *= std::exp(c);
        }
        out[k] = s;
    }
}

inline double log_add(double a, double b)
{
    if (a == -std::numeric_limits<double>::infinity()) return b;
    if (b == -std::numeric_limits<double>::infinity()) return a;
    return std::max(a, b) + std::log1p(std::exp(-std::abs(a - b)));
}

inline double binomial(int p, int k)
{
    double c = 1.0;
    for (int i = 1; i <= k; ++i) c = c * (p - k + i) / i;
    return c;
}

// log ∫_{t0}^{t0+Δ} s^p e^{a0 + (a1−a0)(s−t0)/Δ} ds
inline double log_segment(int p, double t0, double dlt, double a0, double a1, std::vector<double>& phi)
{
    const double c = a1 - a0;
    if (p == 0) {
        const double f = std::abs(c) < 1e-12 ? 1.0 + c / 2.0 : std::expm1(c) / c;
        return std::log(dlt) + a0 + std::log(f);
    }
    phi.resize(p + 1);
    phi_table(c, p, phi.data());
    double s = 0.0;
    double dk = 1.0;
    for (int k = 0; k <= p; ++k) {
        s += binomial(p, k) * std::pow(t0, p - k) * dk * phi[k];
        dk *= dlt;
    }
    return std::log(dlt) + a0 + std::log(s);
}

} // namespace detail

// log J(t_j), where ∫_0^{t_j} s^p e^{a(s)} ds = t_j^{p+1} J(t_j); a linear between grid
// points. J(0) = e^{a(0)}/(p+1).
inline Vec regularized_log_integral(const Vec& times, const Vec& a, int p)
{
    require_same_size(times.size(), a.size(), "regularized_log_integral");
    require(p >= 0, "regularized_log_integral: p >= 0");
    Vec out(times.size());
    out[0] = a[0] - std::log(p + 1.0);
    double log_i = -std::numeric_limits<double>::infinity();
    std::vector<double> phi;
    for (std::size_t j = 0; j + 1 < times.size(); ++j) {
        log_i = detail::log_add(log_i, detail::log_segment(p, times[j], times[j + 1] - times[j], a[j], a[j + 1], phi));
        out[j + 1] = log_i - (p + 1.0) * std::log(times[j + 1]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Path transforms

// T_i η(t) = η(t) + (log ∫_0^t e^{−α_i(η(s))} ds) α_i
inline SampledPath transform_Ti(const SampledPath& eta, int i)
{
    const std::size_t n = eta.n();
    if (i < 1 || static_cast<std::size_t>(i) >= n) throw DomainError("transform_Ti: need 1 <= i <= n-1");
    const std::size_t a = static_cast<std::size_t>(i) - 1;
    const double pe = -(eta.ell()[a] - eta.ell()[a + 1]);
    const double pr = std::round(pe);
    if (std::abs(pe - pr) > 1e-9) throw DomainError("transform_Ti: non-integer singular exponent");
    if (pr < 0.0) throw DomainError("transform_Ti: divergent integral at t = 0 (word not reduced?)");
    const int p = static_cast<int>(pr);

    const std::size_t m = eta.size();
    Vec g(m);
    for (std::size_t j = 0; j < m; ++j) g[j] = -(eta.reg(j, a) - eta.reg(j, a + 1));
    const Vec log_j = regularized_log_integral(eta.times(), g, p);

    Vec r = eta.regular();
    for (std::size_t j = 0; j < m; ++j) {
        r[j * n + a] += log_j[j];
        r[j * n + a + 1] -= log_j[j];
    }
    Vec ell = eta.ell();
    ell[a] += p + 1.0;
    ell[a + 1] -= p + 1.0;
    return SampledPath(eta.times(), n, std::move(r), std::move(ell), eta.drift());
}

// T_w = T_{i_r} ∘ ⋯ ∘ T_{i_1}
inline SampledPath transform_Tw(const SampledPath& eta, const ReducedWord& word)
{
    require(word.n() == eta.n(), "transform_Tw: word and path dimensions differ");
    SampledPath p = eta;
    for (int i : word.letters()) p = transform_Ti(p, i);
    return p;
}

inline SampledPath transform_w0(const SampledPath& eta) { return transform_Tw(eta, ReducedWord::canonical_longest(eta.n())); }

// sup over t > 0 grid points and coordinates of |a − b|
inline double sup_distance(const SampledPath& a, const SampledPath& b, std::size_t from = 1)
{
    require(a.size() == b.size() && a.n() == b.n(), "sup_distance: shapes differ");
    double d = 0.0;
    for (std::size_t j = from; j < a.size(); ++j)
        for (std::size_t i = 0; i < a.n(); ++i) d = std::max(d, std::abs(a.value(j, i) - b.value(j, i)));
    return d;
}

inline constexpr double rounding_floor = 1e-12;

// 2 · sup |T_w(P) − T_w(P with linear midpoints)| on the coarse grid, floored at the rounding level
// (single-letter transforms of a linear path are exact, so the difference can vanish).
inline double grid_error_bound(const SampledPath& eta, const ReducedWord& word)
{
    const SampledPath coarse = transform_Tw(eta, word);
    const SampledPath fine = transform_Tw(eta.refined(), word).coarsened();
    return std::max(rounding_floor, 2.0 * sup_distance(coarse, fine));
}

// Rows T_{k,·} = T^{(k)}(η^1, …, η^k) at grid point j, from the transform route.
inline TriangularArray array_by_transform(const SampledPath& eta, std::size_t j)
{
    const std::size_t n = eta.n();
    TriangularArray t(n);
    for (std::size_t k = 1; k <= n; ++k) {
        const SampledPath row = k == 1 ? eta.head(1) : transform_w0(eta.head(k));
        for (std::size_t i = 1; i <= k; ++i) t(k, i) = row.value(j, i - 1);
    }
    return t;
}

// All rows on the whole grid: rows[k−1] is the transformed k-coordinate path.
inline std::vector<SampledPath> array_rows_by_transform(const SampledPath& eta)
{
    std::vector<SampledPath> rows;
    for (std::size_t k = 1; k <= eta.n(); ++k) rows.push_back(k == 1 ? eta.head(1) : transform_w0(eta.head(k)));
    return rows;
}

// ---------------------------------------------------------------------------
// Triangular-array SDE

struct ArrayTrajectory {
    Vec times;
    std::vector<TriangularArray> states;
    SampledPath driving;
    std::size_t first_index = 0; // grid index of states[0]
};

inline constexpr double blow_up_limit = 1e6;

namespace detail {

// dT/dt for the array driven by a path with constant velocity v on the current segment:
// each row inherits the increments of the row above, plus the exponential interactions.
inline void array_velocity(const TriangularArray& t, const Vec& v, TriangularArray& d)
{
    const std::size_t n = t.n();
    d(1, 1) = v[0];
    for (std::size_t k = 2; k <= n; ++k)
        for (std::size_t i = 1; i <= k; ++i) {
            double r = i < k ? d(k - 1, i) : v[k - 1];
            if (i < k) r += std::exp(t(k, i + 1) - t(k - 1, i));
            if (i > 1) r -= std::exp(t(k, i) - t(k - 1, i - 1));
            d(k, i) = r;
        }
}

} // namespace detail

// Array dynamics along the piecewise-linear interpolation of the driving path (additive noise,
// so no Itô correction), by classical RK4 with substeps h ≤ t/20 where the drifts behave like 1/t.
// Started at t = init_steps·dt from the transform route.
inline ArrayTrajectory simulate_array_on(const SampledPath& eta, std::size_t init_steps = 10)
{
    const std::size_t n = eta.n();
    const std::size_t m = eta.size();
    require(init_steps >= 1 && init_steps < m, "simulate_array: grid too short for the start-up interval");
    if (eta.singular()) throw DomainError("simulate_array: driving path must be regular");
    ArrayTrajectory out;
    out.driving = eta;
    out.first_index = init_steps;
    TriangularArray t = array_by_transform(eta.prefix(init_steps), init_steps);
    out.times.push_back(eta.time(init_steps));
    out.states.push_back(t);
    Vec v(n);
    TriangularArray k1(n), k2(n), k3(n), k4(n), tmp(n);
    auto axpy = [](const TriangularArray& a, double h, const TriangularArray& d, TriangularArray& r) {
        for (std::size_t k = 1; k <= a.n(); ++k)
            for (std::size_t i = 1; i <= k; ++i) r(k, i) = a(k, i) + h * d(k, i);
    };
    for (std::size_t j = init_steps; j + 1 < m; ++j) {
        const double t0 = eta.time(j), dt = eta.time(j + 1) - t0;
        for (std::size_t i = 0; i < n; ++i) v[i] = (eta.reg(j + 1, i) - eta.reg(j, i)) / dt;
        const std::size_t sub = static_cast<std::size_t>(std::ceil(20.0 * dt / t0));
        const double h = dt / static_cast<double>(sub);
        for (std::size_t s = 0; s < sub; ++s) {
            detail::array_velocity(t, v, k1);
            axpy(t, h / 2.0, k1, tmp);
            detail::array_velocity(tmp, v, k2);
            axpy(t, h / 2.0, k2, tmp);
            detail::array_velocity(tmp, v, k3);
            axpy(t, h, k3, tmp);
            detail::array_velocity(tmp, v, k4);
            for (std::size_t k = 1; k <= n; ++k)
                for (std::size_t i = 1; i <= k; ++i)
                    t(k, i) += h / 6.0 * (k1(k, i) + 2.0 * k2(k, i) + 2.0 * k3(k, i) + k4(k, i));
        }
        for (double x : t.flat())
            if (!std::isfinite(x) || std::abs(x) > blow_up_limit)
                throw BlowUpError("simulate_array: |T| exceeded 1e6 at t = " + std::to_string(eta.time(j + 1)) +
                                  " (reduce dt)");
        out.times.push_back(eta.time(j + 1));
        out.states.push_back(t);
    }
    return out;
}

inline ArrayTrajectory simulate_array(std::span<const double> mu, double t_max, double dt, std::uint64_t seed,
                                      std::size_t init_steps = 10)
{
    return simulate_array_on(brownian_sample(mu.size(), mu, t_max, dt, seed), init_steps);
}

// ---------------------------------------------------------------------------
// Particle system ξ and Lusztig coordinates

// Generic sampled trajectory in R^d.
struct Trajectory {
    Vec times;
    std::size_t dim = 0;
    Vec data; // row-major, times.size() × dim

    double operator()(std::size_t j, std::size_t i) const { return data[j * dim + i]; }
    Vec row(std::size_t j) const { return Vec(data.begin() + j * dim, data.begin() + (j + 1) * dim); }
    const Vec& back_row_storage() const { return data; }
    Vec last() const { return row(times.size() - 1); }
};

struct ParticleOptions {
    bool interaction = true;
    Vec x0; // default: all zero
};

// dξ_1 = dη^1, dξ_k = dη^k − e^{ξ_k − ξ_{k−1}} dt
inline Trajectory particle_system_on(const SampledPath& eta, const ParticleOptions& opt = {})
{
    const std::size_t n = eta.n();
    Trajectory tr;
    tr.times = eta.times();
    tr.dim = n;
    tr.data.resize(eta.size() * n);
    Vec xi = opt.x0.empty() ? Vec(n, 0.0) : opt.x0;
    require(xi.size() == n, "particle_system_xi: x0 must have length n");
    std::copy(xi.begin(), xi.end(), tr.data.begin());
    for (std::size_t j = 0; j + 1 < eta.size(); ++j) {
        const double dt = eta.time(j + 1) - eta.time(j);
        Vec next(n);
        for (std::size_t k = 0; k < n; ++k) {
            next[k] = xi[k] + eta.reg(j + 1, k) - eta.reg(j, k);
            if (k > 0 && opt.interaction) next[k] -= std::exp(xi[k] - xi[k - 1]) * dt;
            if (!std::isfinite(next[k]) || std::abs(next[k]) > blow_up_limit)
                throw BlowUpError("particle_system_xi: |ξ| exceeded 1e6 (reduce dt)");
        }
        xi = next;
        std::copy(xi.begin(), xi.end(), tr.data.begin() + (j + 1) * n);
    }
    return tr;
}

inline Trajectory particle_system_xi(std::span<const double> mu, double t_max, double dt, std::uint64_t seed,
                                     const ParticleOptions& opt = {})
{
    return particle_system_on(brownian_sample(mu.size(), mu, t_max, dt, seed), opt);
}

// α_i(α_j): 2 on the diagonal, −1 for neighbours.
inline double cartan(int i, int j)
{
    if (i == j) return 2.0;
    if (std::abs(i - j) == 1) return -1.0;
    return 0.0;
}

// θ_k = −β_k(μ)
inline Vec lusztig_thetas(std::span<const double> mu, const ReducedWord& word)
{
    Vec th = word_thetas(word, mu);
    for (double& t : th) t = -t;
    return th;
}

// Drift of y_k: Σ_{j<k} α_{i_k}(α_{i_j}) e^{−y_j} + e^{−y_k}
inline Vec lusztig_drift(const ReducedWord& word, std::span<const double> y)
{
    require(y.size() == word.size(), "lusztig_drift: y must have one entry per letter");
    Vec d(y.size());
    for (std::size_t k = 0; k < y.size(); ++k) {
        double s = std::exp(-y[k]);
        for (std::size_t j = 0; j < k; ++j) s += cartan(word[k], word[j]) * std::exp(-y[j]);
        d[k] = s;
    }
    return d;
}

// Position of q_{m,i} in y for the canonical word (1)(21)(321)…: block b = i+m−1, letter i.
inline std::size_t q_index(std::size_t m, std::size_t i)
{
    const std::size_t b = i + m - 1;
    return (b - 1) * b / 2 + (b - i);
}

// Drift in the q-network form for the canonical word, with q_{l,0} = +∞:
// e^{−q_{m,i}} + Σ_{l<m} (2e^{−q_{l,i}} − e^{−q_{l,i+1}}) − Σ_{l≤m} e^{−q_{l,i−1}}
inline Vec lusztig_drift_q(std::size_t n, std::span<const double> y)
{
    require(y.size() == positive_roots(n), "lusztig_drift_q: y must have n(n−1)/2 entries");
    auto e = [&](std::size_t m, std::size_t i) { return i == 0 ? 0.0 : std::exp(-y[q_index(m, i)]); };
    Vec d(y.size());
    for (std::size_t m = 1; m < n; ++m)
        for (std::size_t i = 1; i + m <= n; ++i) {
            double s = e(m, i);
            for (std::size_t l = 1; l < m; ++l) s += 2.0 * e(l, i) - e(l, i + 1);
            for (std::size_t l = 1; l <= m; ++l) s -= e(l, i - 1);
            d[q_index(m, i)] = s;
        }
    return d;
}

struct LusztigOptions {
    Vec y0; // default: all zero
    std::size_t record_every = 1;
};

// dy_k = dα_{i_k}(η) + (Σ_{j<k} α_{i_k}(α_{i_j}) e^{−y_j} + e^{−y_k}) dt
inline Trajectory lusztig_dynamics_on(const SampledPath& eta, const ReducedWord& word, const LusztigOptions& opt = {})
{
    require(word.n() == eta.n(), "lusztig_dynamics: word and path dimensions differ");
    if (!word.is_longest()) throw DomainError("lusztig_dynamics: word must be reduced for w_0");
    const std::size_t q = word.size();
    Vec y = opt.y0.empty() ? Vec(q, 0.0) : opt.y0;
    require(y.size() == q, "lusztig_dynamics: y0 must have n(n−1)/2 entries");
    Trajectory tr;
    tr.dim = q;
    auto record = [&](std::size_t j) {
        tr.times.push_back(eta.time(j));
        tr.data.insert(tr.data.end(), y.begin(), y.end());
    };
    record(0);
    const std::size_t every = std::max<std::size_t>(1, opt.record_every);
    for (std::size_t j = 0; j + 1 < eta.size(); ++j) {
        const double dt = eta.time(j + 1) - eta.time(j);
        const Vec d = lusztig_drift(word, y);
        for (std::size_t k = 0; k < q; ++k) {
            const std::size_t i = static_cast<std::size_t>(word[k]) - 1;
            const double da = (eta.reg(j + 1, i) - eta.reg(j, i)) - (eta.reg(j + 1, i + 1) - eta.reg(j, i + 1));
            y[k] += da + d[k] * dt;
            if (!std::isfinite(y[k]) || std::abs(y[k]) > blow_up_limit)
                throw BlowUpError("lusztig_dynamics: |y| exceeded 1e6 (reduce dt)");
        }
        if ((j + 1) % every == 0 || j + 2 == eta.size()) record(j + 1);
    }
    return tr;
}

inline Trajectory lusztig_dynamics(std::span<const double> mu, const ReducedWord& word, double t_max, double dt,
                                   std::uint64_t seed, const LusztigOptions& opt = {})
{
    return lusztig_dynamics_on(brownian_sample(mu.size(), mu, t_max, dt, seed), word, opt);
}

// ---------------------------------------------------------------------------
// Exponential functionals along Brownian grids

namespace detail {

struct SegmentMoments {
    double mean = 0.0;
    double weight = 0.0; // e^{(g0+g1)/2}, for the variance term
};

// E[∫_0^Δ e^{g(u)} du | g(0)=g0, g(Δ)=g1] for g a Brownian bridge with variance rate s2:
// Δ e^{g0} ∫_0^1 e^{cw + κw(1−w)} dw with c = g1 − g0, κ = s2Δ/2 (lognormal mean at each u).
inline SegmentMoments bridge_exp_moments(double g0, double g1, double dlt, double s2)
{
    static const GaussRule rule = [] {
        GaussRule r = gauss_legendre(5);
        for (std::size_t k = 0; k < r.nodes.size(); ++k) {
            r.nodes[k] = 0.5 * (r.nodes[k] + 1.0);
            r.weights[k] *= 0.5;
        }
        return r;
    }();
    const double c = g1 - g0, kappa = s2 * dlt / 2.0;
    double f = 0.0;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
        const double w = rule.nodes[k];
        f += rule.weights[k] * std::exp(c * w + kappa * w * (1.0 - w));
    }
    return {dlt * std::exp(g0) * f, std::exp(0.5 * (g0 + g1))};
}

} // namespace detail

// ψ_λ(x) = ∏Γ(λ_i−λ_j) e^{λ(x)} E_x exp(−Σ_i ∫_0^∞ e^{−α_i(β_s)} ds), β BM with drift λ.
// Each path contributes E[· | grid values] (bridge mean and variance per segment). A path
// stops once the expected remaining integral Σ_i e^{−α_i}/(δ_i − 1) is below `stop_level`, or at the horizon.
// Steps grow from dt once every wall is far (e^{−α_min}·step stays below dt/20).
inline WhittakerEval feynman_kac_psi(std::span<const double> lambda, std::span<const double> x, double horizon,
                                     std::size_t paths, double dt, std::uint64_t seed, double stop_level = 1e-9)
{
    require_same_size(lambda.size(), x.size(), "feynman_kac_psi");
    const std::size_t n = lambda.size();
    if (!in_chamber(lambda)) throw DomainError("feynman_kac_psi: λ must lie in Ω");
    if (!(dt > 0.0) || !(horizon > 0.0)) throw DomainError("feynman_kac_psi: need dt > 0 and horizon > 0");
    WhittakerEval r;
    r.route = Route::feynman_kac;
    const double e = std::exp(dot(lambda, x));
    if (n == 1) {
        r.value = e;
        return r;
    }
    const std::size_t q = n - 1;
    Vec delta(q);
    for (std::size_t i = 0; i < q; ++i) delta[i] = lambda[i] - lambda[i + 1];
    const bool tail_ok = std::all_of(delta.begin(), delta.end(), [](double d) { return d > 1.0; });

    std::vector<stats::Accumulator> acc(default_shards), tails(default_shards);
    parallel_for(default_shards, [&](std::size_t s) {
        Engine rng = make_stream(seed, s);
        std::normal_distribution<double> g(0.0, 1.0);
        const auto [b, end] = shard_range(paths, default_shards, s);
        Vec alpha(q), prev(q), z(n);
        std::vector<detail::SegmentMoments> mom(q);
        for (std::size_t p = b; p < end; ++p) {
            for (std::size_t i = 0; i < q; ++i) alpha[i] = x[i] - x[i + 1];
            double t = 0.0, log_w = 0.0;
            double tail = 0.0;
            while (true) {
                double tail_now = 0.0;
                if (tail_ok)
                    for (std::size_t i = 0; i < q; ++i) tail_now += std::exp(-alpha[i]) / (delta[i] - 1.0);
                if (tail_ok && tail_now < stop_level) {
                    tail = tail_now;
                    break;
                }
                if (t >= horizon) {
                    tail = tail_ok ? tail_now : std::numeric_limits<double>::infinity();
                    break;
                }
                double amin = alpha[0];
                for (double a : alpha) amin = std::min(amin, a);
                // near or past a wall keep h·e^{−α} ≤ 0.1 so the variance correction stays second order
                const double h = std::min({horizon - t, std::clamp(0.05 * dt * std::exp(amin), dt, 2.0),
                                           std::max(0.1 * std::exp(amin), 1e-6)});
                const double sd = std::sqrt(h);
                for (std::size_t k = 0; k < n; ++k) z[k] = sd * g(rng);
                prev = alpha;
                for (std::size_t i = 0; i < q; ++i) alpha[i] += delta[i] * h + z[i] - z[i + 1];
                double m = 0.0, v = 0.0;
                for (std::size_t i = 0; i < q; ++i) {
                    mom[i] = detail::bridge_exp_moments(-prev[i], -alpha[i], h, 2.0);
                    m += mom[i].mean;
                }
                for (std::size_t i = 0; i < q; ++i)
                    for (std::size_t j = 0; j < q; ++j)
                        v += cartan(static_cast<int>(i), static_cast<int>(j)) * mom[i].weight * mom[j].weight;
                v *= h * h * h / 12.0;
                log_w += -m + 0.5 * v;
                t += h;
                if (log_w < -60.0) break; // weight below e^{−60}
            }
            acc[s].add(std::exp(log_w));
            tails[s].add(tail);
        }
    });
    stats::Accumulator all, tail_all;
    for (std::size_t s = 0; s < default_shards; ++s) {
        all.merge(acc[s]);
        tail_all.merge(tails[s]);
    }
    const double norm = gamma_product(lambda) * e;
    r.value = norm * all.mean();
    r.est_error = norm * all.stderr_of_mean();
    r.meta["tail_bound"] = norm * tail_all.mean();
    r.meta["samples"] = static_cast<double>(paths);
    return r;
}

struct ExitEstimate {
    double value = 0.0;   // P_x(T > horizon), grid monitoring
    double std_error = 0.0;
    double target = 0.0;  // h(λ) e^{−λ(x)} J_λ(x)
    double bias_allowance = 0.0; // one-sided: missed exits between grid points
};

// P_x(T = ∞) for drifted BM killed on leaving Ω
inline double exit_target(std::span<const double> lambda, std::span<const double> x)
{
    return specfun::vandermonde(Vec(lambda.begin(), lambda.end())) * std::exp(-dot(lambda, x)) *
           specfun::hciz_J(lambda, x);
}

inline ExitEstimate exit_probability(std::span<const double> lambda, std::span<const double> x, double horizon,
                                     std::size_t paths, double dt, std::uint64_t seed)
{
    require_same_size(lambda.size(), x.size(), "exit_probability");
    if (!in_chamber(lambda) || !in_chamber(x)) throw DomainError("exit_probability: λ and x must lie in Ω");
    const std::size_t n = x.size();
    const std::size_t q = n - 1;
    Vec delta(q);
    for (std::size_t i = 0; i < q; ++i) delta[i] = lambda[i] - lambda[i + 1];
    std::vector<std::size_t> survived(default_shards, 0);
    parallel_for(default_shards, [&](std::size_t s) {
        Engine rng = make_stream(seed, s);
        std::normal_distribution<double> g(0.0, 1.0);
        const auto [b, end] = shard_range(paths, default_shards, s);
        Vec alpha(q), z(n);
        for (std::size_t p = b; p < end; ++p) {
            for (std::size_t i = 0; i < q; ++i) alpha[i] = x[i] - x[i + 1];
            bool alive = true;
            double t = 0.0;
            while (t < horizon) {
                // union bound on ever leaving from here: Σ_i e^{−δ_i α_i}
                double risk = 0.0, amin = alpha[0];
                for (std::size_t i = 0; i < q; ++i) {
                    risk += std::exp(-delta[i] * alpha[i]);
                    amin = std::min(amin, alpha[i]);
                }
                if (risk < 1e-7) break;
                // far from every wall a crossing inside a step of length α²/100 has probability < e^{−25}
                const double h = std::min(horizon - t, std::max(dt, amin * amin / 100.0));
                const double sd = std::sqrt(h);
                for (std::size_t k = 0; k < n; ++k) z[k] = sd * g(rng);
                for (std::size_t i = 0; i < q; ++i) {
                    alpha[i] += delta[i] * h + z[i] - z[i + 1];
                    if (alpha[i] <= 0.0) alive = false;
                }
                if (!alive) break;
                t += h;
            }
            if (alive) ++survived[s];
        }
    });
    std::size_t total = 0;
    for (auto v : survived) total += v;
    ExitEstimate r;
    r.value = static_cast<double>(total) / paths;
    r.std_error = std::sqrt(std::max(r.value * (1.0 - r.value), 1.0 / paths) / paths);
    r.target = exit_target(lambda, x);
    // discrete monitoring acts like walls moved out by 0.5826·σ√dt, σ² = 2 per gap
    const double shift = 0.5826 * std::sqrt(2.0 * dt);
    Vec xs(x.begin(), x.end());
    for (std::size_t i = 0; i < n; ++i) xs[i] += shift * ((n - 1) / 2.0 - static_cast<double>(i));
    r.bias_allowance = std::max(0.0, exit_target(lambda, xs) - r.target);
    return r;
}

// ---------------------------------------------------------------------------
// Polymer

struct PolymerSample {
    double log_z_transform = 0.0; // X_1(t) from T_{w_0}η
    double log_z_direct = 0.0;    // nested-integral recursion
    Vec X;                        // T_{w_0}η(t)
    Vec B_final;                  // B_1(t), …, B_n(t)
};

// log Z^n_t from n Brownian paths (coordinate i of `b` is B_{i+1}) by Z_k(t) = ∫_0^t Z_{k−1}(s) e^{B_k(t)−B_k(s)} ds,
// with Z_k(t) = t^{k−1} R_k(t) and log R_k piecewise linear on the grid.
inline double polymer_log_partition(const SampledPath& b)
{
    const std::size_t n = b.n(), m = b.size();
    Vec log_r(m);
    for (std::size_t j = 0; j < m; ++j) log_r[j] = b.reg(j, 0);
    for (std::size_t k = 2; k <= n; ++k) {
        Vec a(m);
        for (std::size_t j = 0; j < m; ++j) a[j] = log_r[j] - b.reg(j, k - 1);
        const Vec log_j = regularized_log_integral(b.times(), a, static_cast<int>(k) - 2);
        for (std::size_t j = 0; j < m; ++j) log_r[j] = b.reg(j, k - 1) + log_j[j];
    }
    const double t = b.time(m - 1);
    return (n - 1.0) * std::log(t) + log_r[m - 1];
}

// n = 2 oracle: log ∫_0^t e^{B_1(s)+B_2(t)−B_2(s)} ds by the plain trapezoid rule.
inline double polymer_log_partition_trapezoid_n2(const SampledPath& b)
{
    require(b.n() == 2, "polymer_log_partition_trapezoid_n2: n = 2 only");
    const std::size_t m = b.size();
    double s = 0.0;
    for (std::size_t j = 0; j + 1 < m; ++j) {
        const double f0 = std::exp(b.reg(j, 0) - b.reg(j, 1)), f1 = std::exp(b.reg(j + 1, 0) - b.reg(j + 1, 1));
        s += 0.5 * (f0 + f1) * (b.time(j + 1) - b.time(j));
    }
    return b.reg(m - 1, 1) + std::log(s);
}

// η = (B_n, …, B_1)
inline SampledPath polymer_eta(const SampledPath& b)
{
    const std::size_t n = b.n();
    Vec r(b.size() * n);
    for (std::size_t j = 0; j < b.size(); ++j)
        for (std::size_t i = 0; i < n; ++i) r[j * n + i] = b.reg(j, n - 1 - i);
    return SampledPath(b.times(), n, std::move(r));
}

inline PolymerSample polymer_partition(std::size_t n, double t, double dt, std::uint64_t seed, std::uint64_t stream = 0)
{
    require(n >= 1, "polymer_partition: n >= 1");
    const Vec zero(n, 0.0);
    const SampledPath b = brownian_sample(n, zero, t, dt, seed, stream);
    PolymerSample out;
    out.log_z_direct = polymer_log_partition(b);
    const SampledPath x = n == 1 ? b : transform_w0(polymer_eta(b));
    out.X = x.value(x.size() - 1);
    out.log_z_transform = out.X[0];
    out.B_final = b.value(b.size() - 1);
    return out;
}

struct FreeEnergyConstant {
    double t_star = 0.0;
    double value = 0.0;    // inf_t [t − Ψ(t)]
    double residual = 0.0; // |Ψ'(t*) − 1| by central differences of Ψ
};

inline FreeEnergyConstant free_energy_constant()
{
    auto f = [](double t) { return t - specfun::digamma(t); };
    const double fd_h = 1e-4;
    auto trigamma_fd = [&](double t) { return (specfun::digamma(t + fd_h) - specfun::digamma(t - fd_h)) / (2.0 * fd_h); };
    Minimum m = golden_section(f, 0.2, 10.0, 1e-10);
    // polish with Newton on Ψ'(t) = 1
    double t = m.x;
    for (int it = 0; it < 20; ++it) {
        const double g = trigamma_fd(t) - 1.0;
        const double dg = (trigamma_fd(t + 1e-3) - trigamma_fd(t - 1e-3)) / 2e-3;
        const double step = g / dg;
        t -= step;
        if (std::abs(step) < 1e-14) break;
    }
    return {t, f(t), std::abs(trigamma_fd(t) - 1.0)};
}

struct FreeEnergyRow {
    std::size_t n = 0;
    double mean = 0.0;   // mean of (1/n) log Z^n_n
    double std_error = 0.0;
    double spread = 0.0; // sample standard deviation across reps
};

inline std::vector<FreeEnergyRow> free_energy_estimate(const std::vector<std::size_t>& n_values, std::size_t reps,
                                                       double dt, std::uint64_t seed)
{
    std::vector<FreeEnergyRow> rows;
    for (std::size_t idx = 0; idx < n_values.size(); ++idx) {
        const std::size_t n = n_values[idx];
        Vec vals(reps);
        parallel_for(reps, [&](std::size_t r) {
            const Vec zero(n, 0.0);
            const SampledPath b = brownian_sample(n, zero, static_cast<double>(n), dt, seed, idx * 1000003ull + r);
            vals[r] = polymer_log_partition(b) / static_cast<double>(n);
        });
        stats::Accumulator a;
        for (double v : vals) a.add(v);
        rows.push_back({n, a.mean(), a.stderr_of_mean(), std::sqrt(a.variance())});
    }
    return rows;
}

} // namespace wlab
