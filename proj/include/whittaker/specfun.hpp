#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <numeric>
#include <span>
#include <vector>

#include "whittaker/core.hpp"
#include "whittaker/matrix.hpp"

namespace wlab::specfun {

// ---------------------------------------------------------------------------
// Vandermonde product h(λ) = ∏_{i<j} (λ_i − λ_j)

template <class T>
T vandermonde(std::span<const T> lambda)
{
    T h = T(1);
    for (std::size_t i = 0; i < lambda.size(); ++i)
        for (std::size_t j = i + 1; j < lambda.size(); ++j) h *= lambda[i] - lambda[j];
    return h;
}

inline double vandermonde(const Vec& lambda) { return vandermonde(std::span<const double>(lambda)); }
inline cplx vandermonde(const CVec& lambda) { return vandermonde(std::span<const cplx>(lambda)); }

// ---------------------------------------------------------------------------
// Γ, log Γ, digamma

namespace detail {

// B_2, B_4, ..., B_20
inline constexpr std::array<double, 10> bernoulli = {
    1.0 / 6.0,       -1.0 / 30.0,      1.0 / 42.0,   -1.0 / 30.0,      5.0 / 66.0,
    -691.0 / 2730.0, 7.0 / 6.0,        -3617.0 / 510.0, 43867.0 / 798.0, -174611.0 / 330.0};

inline bool is_nonpositive_integer(cplx z)
{
    return z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::round(z.real());
}

// sin(πz) with exact reduction of the real part.
inline cplx sin_pi(cplx z)
{
    const double r = std::round(z.real());
    const cplx f(z.real() - r, z.imag());
    const cplx s = std::sin(pi * f);
    return std::fmod(std::abs(r), 2.0) == 1.0 ? -s : s;
}

inline cplx log_sin_pi(cplx z)
{
    if (std::abs(z.imag()) < 20.0) return std::log(sin_pi(z));
    const cplx iu(0.0, 1.0);
    if (z.imag() > 0.0) return -iu * pi * z + std::log(iu / 2.0) + std::log(1.0 - std::exp(2.0 * iu * pi * z));
    return iu * pi * z + std::log(-iu / 2.0) + std::log(1.0 - std::exp(-2.0 * iu * pi * z));
}

// log Γ for Re z >= 0.5: upward shift to |w| >= 15 then Stirling.
inline cplx log_gamma_right(cplx z)
{
    cplx prod(1.0, 0.0);
    cplx w = z;
    cplx acc(0.0, 0.0);
    while (std::abs(w) < 15.0 || w.real() < 15.0) {
        prod *= w;
        if (std::abs(prod) > 1e200) {
            acc += std::log(prod);
            prod = 1.0;
        }
        w += 1.0;
    }
    acc += std::log(prod);
    const cplx w2 = w * w;
    cplx series(0.0, 0.0);
    cplx wpow = w;
    for (std::size_t k = 1; k <= bernoulli.size(); ++k) {
        series += bernoulli[k - 1] / (2.0 * k * (2.0 * k - 1.0) * wpow);
        wpow *= w2;
    }
    return (w - 0.5) * std::log(w) - w + 0.5 * std::log(2.0 * pi) + series - acc;
}

inline cplx digamma_right(cplx z)
{
    cplx w = z;
    cplx acc(0.0, 0.0);
    while (std::abs(w) < 15.0 || w.real() < 15.0) {
        acc += 1.0 / w;
        w += 1.0;
    }
    const cplx w2 = w * w;
    cplx series(0.0, 0.0);
    cplx wpow = w2;
    for (std::size_t k = 1; k <= bernoulli.size(); ++k) {
        series += bernoulli[k - 1] / (2.0 * k * wpow);
        wpow *= w2;
    }
    return std::log(w) - 0.5 / w - series - acc;
}

} // namespace detail

inline cplx log_gamma(cplx z)
{
    if (detail::is_nonpositive_integer(z)) throw PoleError("log_gamma: pole at nonpositive integer");
    if (z.real() >= 0.5) return detail::log_gamma_right(z);
    return std::log(pi) - detail::log_sin_pi(z) - detail::log_gamma_right(1.0 - z);
}

inline cplx digamma(cplx z)
{
    if (detail::is_nonpositive_integer(z)) throw PoleError("digamma: pole at nonpositive integer");
    if (z.real() >= 0.5) return detail::digamma_right(z);
    // ψ(z) = ψ(1−z) − π cot(πz); cot has period 1, so reduce the real part first
    const cplx f(z.real() - std::round(z.real()), z.imag());
    cplx cot;
    if (std::abs(f.imag()) < 20.0) {
        cot = std::cos(pi * f) / std::sin(pi * f);
    } else {
        const double sgn = f.imag() > 0.0 ? 1.0 : -1.0;
        const cplx e = std::exp(cplx(0.0, 2.0 * sgn) * pi * f);
        cot = cplx(0.0, -sgn) * (1.0 + e) / (1.0 - e);
    }
    return detail::digamma_right(1.0 - z) - pi * cot;
}

inline double log_gamma(double x) { return log_gamma(cplx(x, 0.0)).real(); }
inline double digamma(double x) { return digamma(cplx(x, 0.0)).real(); }

// 1/Γ(z); entire, zero at the poles of Γ.
inline cplx rgamma(cplx z)
{
    if (detail::is_nonpositive_integer(z)) return 0.0;
    return std::exp(-log_gamma(z));
}

inline cplx gamma(cplx z) { return std::exp(log_gamma(z)); }

struct GammaValues {
    cplx log_gamma;
    cplx digamma;
};

inline GammaValues gamma_fns(cplx z) { return {log_gamma(z), digamma(z)}; }

// ---------------------------------------------------------------------------
// Macdonald function K_ν(z) = ∫_0^∞ e^{−z cosh t} cosh(νt) dt

struct KValue {
    double value;
    double log_value;
    bool in_window;   // z ∈ [1e−3, 50], |ν| ≤ 20: the validated accuracy window
};

inline KValue macdonald_K_ex(double nu, double z)
{
    if (!(z > 0.0)) throw DomainError("macdonald_K: z must be positive");
    nu = std::abs(nu);
    auto phi = [&](double t) {
        return -z * std::cosh(t) + nu * t + std::log1p(std::exp(-2.0 * nu * t)) - std::log(2.0);
    };
    const double tstar = std::asinh(nu / z);
    const double top = std::max(phi(0.0), phi(tstar));
    double tmax = tstar + 1.0;
    while (phi(tmax) > top - 50.0) tmax += 1.0;

    double h = 0.5;
    double sum = 0.5 * std::exp(phi(0.0) - top);
    for (double t = h; t <= tmax; t += h) sum += std::exp(phi(t) - top);
    double prev = h * sum;
    for (int level = 0; level < 24; ++level) {
        // add midpoints of the current grid
        double mid = 0.0;
        const std::size_t count = static_cast<std::size_t>(tmax / h) + 1;
        for (std::size_t k = 0; k < count; ++k) {
            const double t = (k + 0.5) * h;
            if (t > tmax) break;
            mid += std::exp(phi(t) - top);
        }
        sum += mid;
        h *= 0.5;
        const double cur = h * sum;
        if (level >= 1 && std::abs(cur - prev) <= 1e-14 * cur) {
            const bool ok = z >= 1e-3 && z <= 50.0 && nu <= 20.0;
            const double lv = top + std::log(cur);
            return {std::exp(lv), lv, ok};
        }
        prev = cur;
    }
    throw ConvergenceError("macdonald_K: trapezoid refinement did not converge");
}

inline double macdonald_K(double nu, double z) { return macdonald_K_ex(nu, z).value; }
inline double log_macdonald_K(double nu, double z) { return macdonald_K_ex(nu, z).log_value; }

// Samples e^{−z cosh(kh)} on a fixed grid; K_{iτ}(z) for many τ reuses them.
class ImagOrderK {
public:
    ImagOrderK(double z, double h = 0.05) : h_(h)
    {
        if (!(z > 0.0)) throw DomainError("macdonald_K_imag: z must be positive");
        const double tmax = std::acosh(1.0 + 45.0 / z);
        const std::size_t m = static_cast<std::size_t>(tmax / h) + 2;
        samples_.resize(m);
        for (std::size_t k = 0; k < m; ++k) samples_[k] = std::exp(-z * std::cosh(k * h));
        samples_[0] *= 0.5;
    }

    double operator()(double tau) const
    {
        // cos(τ k h) by recurrence would drift; direct cos is cheap enough
        double s = 0.0;
        for (std::size_t k = 0; k < samples_.size(); ++k) s += samples_[k] * std::cos(tau * k * h_);
        return h_ * s;
    }

    double step() const { return h_; }

private:
    double h_;
    Vec samples_;
};

// K_{iτ}(z) = ∫_0^∞ e^{−z cosh t} cos(τ t) dt (real for real τ).
inline double macdonald_K_imag(double tau, double z)
{
    const double h = std::min(0.05, 0.5 / (1.0 + std::abs(tau)));
    return ImagOrderK(z, h)(tau);
}

// ---------------------------------------------------------------------------
// HCIZ determinant J_λ(x) = h(λ)^{−1} det(e^{λ_i x_j})

// Confluent evaluation: row k of D holds the divided difference e^{·x_j}[λ_1..λ_k],
// read off the first row of exp(x_j B) with B bidiagonal (diag λ, superdiag 1).
inline double hciz_J_confluent(std::span<const double> lambda, std::span<const double> x)
{
    const std::size_t n = lambda.size();
    RMatrix d(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        RMatrix b(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            b(i, i) = lambda[i] * x[j];
            if (i + 1 < n) b(i, i + 1) = x[j];
        }
        const RMatrix e = expm(b);
        for (std::size_t k = 0; k < n; ++k) d(k, j) = e(0, k);
    }
    const double sign = (n * (n - 1) / 2) % 2 == 0 ? 1.0 : -1.0;
    return sign * det(d);
}

// The determinant route cancels about log10(1/(gap·span x))·(n−1) digits, so it is
// used only when every scaled gap |λ_i−λ_j|·(max x − min x) is at least `switch_gap`
// and λ is regular; otherwise the divided-difference route is exact and continuous.
inline double hciz_J(std::span<const double> lambda, std::span<const double> x, double switch_gap = 1.0)
{
    require_same_size(lambda.size(), x.size(), "hciz_J");
    require(!lambda.empty(), "hciz_J: empty input");
    const std::size_t n = lambda.size();
    if (n == 1) return std::exp(lambda[0] * x[0]);
    const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
    const double span = *hi - *lo;
    double min_gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) min_gap = std::min(min_gap, std::abs(lambda[i] - lambda[j]));
    if (!is_regular(lambda) || min_gap * span < switch_gap) return hciz_J_confluent(lambda, x);
    RMatrix e(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) e(i, j) = std::exp(lambda[i] * x[j]);
    return det(e) / vandermonde(lambda);
}

inline double hciz_J(const Vec& lambda, const Vec& x, double switch_gap = 1.0)
{
    return hciz_J(std::span<const double>(lambda), std::span<const double>(x), switch_gap);
}

inline double factorial(int k)
{
    return std::tgamma(k + 1.0);
}

// h(x)/∏_{j<n} j!: the λ→0 value of J_λ(x).
inline double hciz_J0(std::span<const double> x)
{
    double f = 1.0;
    for (std::size_t j = 1; j < x.size(); ++j) f *= factorial(static_cast<int>(j));
    return vandermonde(x) / f;
}

// ---------------------------------------------------------------------------
// Sklyanin density s_n(λ) = (2πι)^{−n}(n!)^{−1} ∏_{j≠k} Γ(λ_j − λ_k)^{−1}

inline cplx sklyanin_density(std::span<const cplx> lambda)
{
    const std::size_t n = lambda.size();
    require(n >= 1, "sklyanin_density: empty input");
    cplx p(1.0, 0.0);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k)
            if (j != k) p *= rgamma(lambda[j] - lambda[k]);
    const cplx two_pi_i(0.0, 2.0 * pi);
    return p / (std::pow(two_pi_i, static_cast<double>(n)) * factorial(static_cast<int>(n)));
}

inline cplx sklyanin_density(const CVec& lambda) { return sklyanin_density(std::span<const cplx>(lambda)); }

// ---------------------------------------------------------------------------
// Fundamental series coefficients a_{n,m}(ν)

// Coefficients from the nested-sum definition, memoized per instance.
// a_{2,m} = 1/(m! Γ(ν_1−ν_2+m+1)); for n > 2
// a_{n,m}(ν) = Σ_k a_{n−1,k}(μ) ∏_i 1/(m_i−k_i)! · 1/Γ(ν_i−ν_n+m_i−k_{i−1}+1),
// μ_i = ν_i + ν_n/(n−1), k_0 = k_{n−1} = 0.
class FundamentalCoefficients {
public:
    explicit FundamentalCoefficients(CVec nu) : nu_(std::move(nu))
    {
        require(nu_.size() >= 2, "fundamental_coeff: n >= 2");
        if (nu_.size() > 2) {
            const std::size_t n = nu_.size();
            CVec mu(n - 1);
            for (std::size_t i = 0; i + 1 < n; ++i) mu[i] = nu_[i] + nu_[n - 1] / static_cast<double>(n - 1);
            lower_ = std::make_unique<FundamentalCoefficients>(std::move(mu));
        }
    }

    std::size_t n() const { return nu_.size(); }
    const CVec& nu() const { return nu_; }

    cplx operator()(const std::vector<int>& m) const
    {
        require(m.size() + 1 == nu_.size(), "fundamental_coeff: m must have n-1 entries");
        for (int v : m)
            if (v < 0) return 0.0;
        auto it = cache_.find(m);
        if (it != cache_.end()) return it->second;
        const cplx a = compute(m);
        cache_.emplace(m, a);
        return a;
    }

private:
    cplx rg(std::size_t i, int shift) const
    {
        const auto key = std::make_pair(i, shift);
        auto it = rgamma_cache_.find(key);
        if (it != rgamma_cache_.end()) return it->second;
        const cplx v = rgamma(nu_[i] - nu_.back() + static_cast<double>(shift) + 1.0);
        rgamma_cache_.emplace(key, v);
        return v;
    }

    static double inv_factorial(int k)
    {
        return std::exp(-std::lgamma(k + 1.0));
    }

    cplx compute(const std::vector<int>& m) const
    {
        const std::size_t n = nu_.size();
        if (n == 2) return inv_factorial(m[0]) * rg(0, m[0]);
        // enumerate k ∈ Z_+^{n−2}, k_i ≤ m_i
        std::vector<int> k(n - 2, 0);
        cplx total(0.0, 0.0);
        while (true) {
            cplx term = (*lower_)(k);
            if (term != 0.0) {
                for (std::size_t i = 0; i + 1 < n; ++i) {
                    const int ki = i < n - 2 ? k[i] : 0;
                    const int kprev = i == 0 ? 0 : k[i - 1];
                    term *= inv_factorial(m[i] - ki) * rg(i, m[i] - kprev);
                }
                total += term;
            }
            std::size_t pos = 0;
            while (pos < k.size() && k[pos] == m[pos]) k[pos++] = 0;
            if (pos == k.size()) break;
            ++k[pos];
        }
        return total;
    }

    CVec nu_;
    std::unique_ptr<FundamentalCoefficients> lower_;
    mutable std::map<std::vector<int>, cplx> cache_;
    mutable std::map<std::pair<std::size_t, int>, cplx> rgamma_cache_;
};

inline cplx fundamental_coeff(const std::vector<int>& m, const CVec& nu)
{
    return FundamentalCoefficients(nu)(m);
}

// Bracketed quadratic form of the recursion.
inline cplx recursion_form(const std::vector<int>& m, const CVec& nu)
{
    cplx q(0.0, 0.0);
    for (std::size_t i = 0; i < m.size(); ++i) {
        q += static_cast<double>(m[i]) * m[i] + (nu[i] - nu[i + 1]) * static_cast<double>(m[i]);
        if (i + 1 < m.size()) q -= static_cast<double>(m[i]) * m[i + 1];
    }
    return q;
}

// Coefficients generated by the quadratic recursion from a_{n,0}.
class RecursiveCoefficients {
public:
    explicit RecursiveCoefficients(CVec nu) : nu_(std::move(nu))
    {
        require(nu_.size() >= 2, "fundamental_coeff: n >= 2");
    }

    cplx operator()(const std::vector<int>& m) const
    {
        for (int v : m)
            if (v < 0) return 0.0;
        auto it = cache_.find(m);
        if (it != cache_.end()) return it->second;
        cplx a;
        if (std::all_of(m.begin(), m.end(), [](int v) { return v == 0; })) {
            a = 1.0;
            for (std::size_t i = 0; i < nu_.size(); ++i)
                for (std::size_t j = i + 1; j < nu_.size(); ++j) a *= rgamma(nu_[i] - nu_[j] + 1.0);
        } else {
            const cplx q = recursion_form(m, nu_);
            if (std::abs(q) < 1e-12) throw PoleError("fundamental_coeff: resonant ν, recursion form vanishes");
            cplx s(0.0, 0.0);
            for (std::size_t i = 0; i < m.size(); ++i) {
                auto mm = m;
                --mm[i];
                s += (*this)(mm);
            }
            a = s / q;
        }
        cache_.emplace(m, a);
        return a;
    }

private:
    CVec nu_;
    mutable std::map<std::vector<int>, cplx> cache_;
};

// |Q(m) a_m − Σ_i a_{m−e_i}| relative to the larger side.
inline double recursion_residual(const FundamentalCoefficients& a, const std::vector<int>& m)
{
    const cplx lhs = recursion_form(m, a.nu()) * a(m);
    cplx rhs(0.0, 0.0);
    for (std::size_t i = 0; i < m.size(); ++i) {
        auto mm = m;
        --mm[i];
        rhs += a(mm);
    }
    const double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-300});
    return std::abs(lhs - rhs) / scale;
}

// ---------------------------------------------------------------------------
// Fundamental Whittaker function m_ν(x) = Σ_m a_{n,m}(ν) e^{−(m'+ν, x)}

struct SeriesValue {
    cplx value;
    double est_error;   // truncation plus rounding estimate
    int degree;         // last total degree summed
};

inline SeriesValue fundamental_whittaker(const CVec& nu, std::span<const double> x, double tol = 1e-15,
                                         int max_degree = 200)
{
    require_same_size(nu.size(), x.size(), "fundamental_whittaker");
    const std::size_t n = nu.size();
    cplx prefactor(0.0, 0.0);
    for (std::size_t i = 0; i < n; ++i) prefactor -= nu[i] * x[i];
    prefactor = std::exp(prefactor);
    if (n == 1) return {prefactor, 0.0, 0};

    Vec gaps(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) gaps[i] = x[i] - x[i + 1];

    const FundamentalCoefficients a(nu);
    cplx partial(0.0, 0.0);
    double abs_sum = 0.0;
    int quiet_shells = 0;
    std::vector<int> m(n - 1, 0);
    for (int s = 0; s <= max_degree; ++s) {
        double shell_max = 0.0;
        // all compositions of s into n−1 nonnegative parts
        std::function<void(std::size_t, int)> rec = [&](std::size_t i, int left) {
            if (i + 1 == m.size()) {
                m[i] = left;
                double e = 0.0;
                for (std::size_t j = 0; j < m.size(); ++j) e -= m[j] * gaps[j];
                const cplx term = a(m) * std::exp(e);
                partial += term;
                abs_sum += std::abs(term);
                shell_max = std::max(shell_max, std::abs(term));
                return;
            }
            for (int v = 0; v <= left; ++v) {
                m[i] = v;
                rec(i + 1, left - v);
            }
        };
        rec(0, s);
        if (s > 0 && shell_max < tol * std::abs(partial))
            ++quiet_shells;
        else
            quiet_shells = 0;
        if (quiet_shells >= 2) {
            const double err = (tol * std::abs(partial) + 4.0 * std::numeric_limits<double>::epsilon() * abs_sum) *
                               std::abs(prefactor);
            return {prefactor * partial, err, s};
        }
    }
    throw ConvergenceError("fundamental_whittaker: series did not converge within max degree");
}

inline SeriesValue fundamental_whittaker(const CVec& nu, const Vec& x, double tol = 1e-15, int max_degree = 200)
{
    return fundamental_whittaker(nu, std::span<const double>(x), tol, max_degree);
}

// ψ_ν(x) = ∏_{i<j} π/sin π(ν_i−ν_j) · Σ_w (−1)^w m_{−wν}(x)
inline SeriesValue whittaker_from_series(const CVec& nu, std::span<const double> x, double tol = 1e-15)
{
    require_same_size(nu.size(), x.size(), "whittaker_from_series");
    const std::size_t n = nu.size();
    cplx pref(1.0, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const cplx d = nu[i] - nu[j];
            if (d.imag() == 0.0 && std::abs(d.real() - std::round(d.real())) < 1e-9)
                throw PoleError("whittaker_from_series: integer difference in ν");
            pref *= pi / detail::sin_pi(d);
        }
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    cplx total(0.0, 0.0);
    double err = 0.0;
    int degree = 0;
    do {
        int inversions = 0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                if (perm[i] > perm[j]) ++inversions;
        CVec w(n);
        for (std::size_t i = 0; i < n; ++i) w[i] = -nu[perm[i]];
        const SeriesValue s = fundamental_whittaker(w, x, tol);
        total += (inversions % 2 == 0 ? 1.0 : -1.0) * s.value;
        err += s.est_error;
        degree = std::max(degree, s.degree);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return {pref * total, std::abs(pref) * err, degree};
}

inline SeriesValue whittaker_from_series(const CVec& nu, const Vec& x, double tol = 1e-15)
{
    return whittaker_from_series(nu, std::span<const double>(x), tol);
}

// ---------------------------------------------------------------------------
// θ_t(x) for n ∈ {1, 2}

enum class ThetaForm { psi, series };

struct ThetaValue {
    double value;
    double est_error;
};

namespace detail {

// Truncation radius with e^{−R² t/4} below ~1e−17 (τ = u_1 − u_2 variable).
inline double theta_radius(double t) { return std::sqrt(4.0 * 40.0 / t); }

// Even integrand on [0, R]; trapezoid with step h and 2h for the error estimate.
template <class F>
ThetaValue half_line_trapezoid(F&& g, double R, double h)
{
    const std::size_t m = static_cast<std::size_t>(std::ceil(R / h));
    double fine = 0.5 * g(0.0), coarse = fine;
    for (std::size_t k = 1; k <= m; ++k) {
        const double v = g(k * h);
        fine += v;
        if (k % 2 == 0) coarse += v;
    }
    fine *= h;
    coarse *= 2.0 * h;
    return {fine, std::abs(fine - coarse)};
}

} // namespace detail

inline ThetaValue theta_density(double t, std::span<const double> x, ThetaForm form = ThetaForm::psi)
{
    if (!(t > 0.0)) throw DomainError("theta_density: t must be positive");
    const std::size_t n = x.size();
    if (n == 1) {
        // (1/2π) ∫ e^{−ιux} e^{−u²t/2} du; even part cos(ux)
        const double R = std::sqrt(2.0 * 40.0 / t);
        const double h = std::min(0.02, 0.2 / (1.0 + std::abs(x[0])));
        auto g = [&](double u) { return std::cos(u * x[0]) * std::exp(-u * u * t / 2.0); };
        ThetaValue r = detail::half_line_trapezoid(g, R, h);
        return {r.value / pi, r.est_error / pi};
    }
    if (n != 2) throw DomainError("theta_density: only n = 1, 2 are supported");

    const double S = x[0] + x[1];
    const double d = x[0] - x[1];
    const double gauss = std::sqrt(4.0 * pi / t) * std::exp(-S * S / (4.0 * t));
    const double R = detail::theta_radius(t);
    const double h = 0.025;
    if (form == ThetaForm::psi) {
        const ImagOrderK k(2.0 * std::exp(-d / 2.0));
        auto g = [&](double tau) { return tau * std::sinh(pi * tau) * k(tau) * std::exp(-tau * tau * t / 4.0); };
        const ThetaValue r = detail::half_line_trapezoid(g, R, h);
        const double c = gauss / (4.0 * pi * pi * pi);
        return {c * r.value, c * r.est_error};
    }
    // series form: ∫_R ιτ e^{−ιτd/2} e^{−τ²t/4} Σ_m e^{−md}/(m! Γ(1+m+ιτ)) dτ
    auto g_complex = [&](double tau) {
        const CVec nu = {cplx(0.0, tau / 2.0), cplx(0.0, -tau / 2.0)};
        const Vec xx = {d / 2.0, -d / 2.0};
        const SeriesValue m = fundamental_whittaker(nu, xx, 1e-16);
        return cplx(0.0, tau) * m.value * std::exp(-tau * tau * t / 4.0);
    };
    // g(−τ) = conj g(τ), so the line integral is 2 Re ∫_0^R
    auto g = [&](double tau) { return g_complex(tau).real(); };
    const ThetaValue r = detail::half_line_trapezoid(g, R, h);
    const double c = gauss / (8.0 * pi * pi);
    return {2.0 * c * r.value, 2.0 * c * r.est_error};
}

inline ThetaValue theta_density(double t, const Vec& x, ThetaForm form = ThetaForm::psi)
{
    return theta_density(t, std::span<const double>(x), form);
}

} // namespace wlab::specfun
