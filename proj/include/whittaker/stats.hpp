#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "whittaker/core.hpp"

namespace wlab::stats {

// Welford running mean / variance; mergeable.
class Accumulator {
public:
    void add(double x)
    {
        ++n_;
        const double d = x - mean_;
        mean_ += d / n_;
        m2_ += d * (x - mean_);
    }

    void merge(const Accumulator& o)
    {
        if (o.n_ == 0) return;
        const double n = static_cast<double>(n_ + o.n_);
        const double d = o.mean_ - mean_;
        mean_ += d * o.n_ / n;
        m2_ += o.m2_ + d * d * static_cast<double>(n_) * o.n_ / n;
        n_ += o.n_;
    }

    std::size_t count() const { return n_; }
    double mean() const { return mean_; }
    double variance() const { return n_ > 1 ? m2_ / (n_ - 1) : 0.0; }
    double stderr_of_mean() const { return n_ > 1 ? std::sqrt(variance() / n_) : 0.0; }

private:
    std::size_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

struct GoodnessOfFit {
    std::string test;
    double statistic = 0.0;
    double p_value = 0.0;
    double dof = 0.0;
    std::size_t samples = 0;
};

// Kolmogorov limiting survival function Q(λ) = 2 Σ (−1)^{k−1} e^{−2k²λ²}.
inline double kolmogorov_q(double lambda)
{
    if (lambda < 0.2) return 1.0;
    double s = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        s += (k % 2 == 1 ? term : -term);
        if (term < 1e-17) break;
    }
    return std::clamp(2.0 * s, 0.0, 1.0);
}

template <class Cdf>
GoodnessOfFit ks_one_sample(std::vector<double> x, Cdf&& cdf)
{
    require(!x.empty(), "ks_one_sample: no samples");
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double f = cdf(x[i]);
        d = std::max({d, f - i / n, (i + 1) / n - f});
    }
    const double sn = std::sqrt(n);
    return {"ks", d, kolmogorov_q((sn + 0.12 + 0.11 / sn) * d), 0.0, x.size()};
}

inline GoodnessOfFit ks_two_sample(std::vector<double> a, std::vector<double> b)
{
    require(!a.empty() && !b.empty(), "ks_two_sample: no samples");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    while (i < a.size() && j < b.size()) {
        const double v = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == v) ++i;
        while (j < b.size() && b[j] == v) ++j;
        d = std::max(d, std::abs(i / na - j / nb));
    }
    const double ne = std::sqrt(na * nb / (na + nb));
    return {"ks2", d, kolmogorov_q((ne + 0.12 + 0.11 / ne) * d), 0.0, a.size() + b.size()};
}

inline double chi_square_sf(double stat, double dof)
{
    if (stat <= 0.0) return 1.0;
    return boost::math::gamma_q(dof / 2.0, stat / 2.0);
}

// Pearson statistic over cells with expected counts; cells with expected < min_expected are pooled.
inline GoodnessOfFit chi_square(const std::vector<double>& observed, const std::vector<double>& expected,
                                std::size_t fitted_params = 0, double min_expected = 5.0)
{
    require_same_size(observed.size(), expected.size(), "chi_square");
    double stat = 0.0, pool_o = 0.0, pool_e = 0.0, total = 0.0;
    std::size_t cells = 0;
    for (std::size_t k = 0; k < observed.size(); ++k) {
        total += observed[k];
        if (expected[k] < min_expected) {
            pool_o += observed[k];
            pool_e += expected[k];
            continue;
        }
        stat += (observed[k] - expected[k]) * (observed[k] - expected[k]) / expected[k];
        ++cells;
    }
    if (pool_e > 0.0) {
        stat += (pool_o - pool_e) * (pool_o - pool_e) / pool_e;
        ++cells;
    }
    const double dof = static_cast<double>(cells) - 1.0 - static_cast<double>(fitted_params);
    return {"chi2", stat, chi_square_sf(stat, std::max(dof, 1.0)), dof, static_cast<std::size_t>(total)};
}

// Standard error of the mean from non-overlapping batch means.
inline double batch_means_stderr(const std::vector<double>& x, std::size_t batches = 50)
{
    if (x.size() < 2 * batches) batches = std::max<std::size_t>(2, x.size() / 2);
    const std::size_t len = x.size() / batches;
    Accumulator acc;
    for (std::size_t b = 0; b < batches; ++b) {
        double s = 0.0;
        for (std::size_t k = b * len; k < (b + 1) * len; ++k) s += x[k];
        acc.add(s / len);
    }
    return acc.stderr_of_mean();
}

// Least-squares slope of y against x.
inline double fit_slope(const std::vector<double>& x, const std::vector<double>& y)
{
    require_same_size(x.size(), y.size(), "fit_slope");
    require(x.size() >= 2, "fit_slope: need two points");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= x.size();
    my /= y.size();
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxy / sxx;
}

} // namespace wlab::stats
