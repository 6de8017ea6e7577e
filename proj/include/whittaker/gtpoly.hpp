#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "whittaker/core.hpp"
#include "whittaker/rng.hpp"
#include "whittaker/specfun.hpp"
#include "whittaker/stats.hpp"

namespace wlab {

// Real triangular array T_{k,i}, 1 ≤ i ≤ k ≤ n, stored row by row; row n is the
// defining vector x. Indices are 1-based to match the usual notation.
class TriangularArray {
public:
    TriangularArray() = default;
    explicit TriangularArray(std::size_t n, double fill = 0.0) : n_(n), data_(triangular_size(n), fill) {}

    // Array with bottom row x and every other entry zero.
    static TriangularArray with_bottom_row(std::span<const double> x)
    {
        TriangularArray t(x.size());
        for (std::size_t i = 1; i <= x.size(); ++i) t(x.size(), i) = x[i - 1];
        return t;
    }

    std::size_t n() const { return n_; }

    double& operator()(std::size_t k, std::size_t i) { return data_[index(k, i)]; }
    double operator()(std::size_t k, std::size_t i) const { return data_[index(k, i)]; }

    Vec row(std::size_t k) const
    {
        Vec r(k);
        for (std::size_t i = 1; i <= k; ++i) r[i - 1] = (*this)(k, i);
        return r;
    }

    double row_sum(std::size_t k) const
    {
        double s = 0.0;
        for (std::size_t i = 1; i <= k; ++i) s += (*this)(k, i);
        return s;
    }

    const Vec& flat() const { return data_; }

    static std::size_t index(std::size_t k, std::size_t i) { return k * (k - 1) / 2 + (i - 1); }

private:
    std::size_t n_ = 0;
    Vec data_;
};

// P_{k,j+1} ≤ P_{k−1,j} ≤ P_{k,j} for all 1 ≤ j < k ≤ n, up to `slack`.
inline bool interlaces(const TriangularArray& p, double slack = 0.0)
{
    for (std::size_t k = 2; k <= p.n(); ++k)
        for (std::size_t j = 1; j < k; ++j)
            if (p(k, j + 1) > p(k - 1, j) + slack || p(k - 1, j) > p(k, j) + slack) return false;
    return true;
}

// Gelfand–Tsetlin pattern: a triangular array that interlaces.
class GTPattern {
public:
    explicit GTPattern(TriangularArray a) : a_(std::move(a))
    {
        if (!interlaces(a_, 1e-12)) throw DomainError("GTPattern: rows do not interlace");
    }

    const TriangularArray& array() const { return a_; }
    std::size_t n() const { return a_.n(); }
    double operator()(std::size_t k, std::size_t i) const { return a_(k, i); }

private:
    TriangularArray a_;
};

// (P_{11}, P_{21}+P_{22}−P_{11}, …, Σ_j P_{nj} − Σ_j P_{n−1,j})
inline Vec pattern_type(const TriangularArray& p)
{
    Vec t(p.n());
    double prev = 0.0;
    for (std::size_t k = 1; k <= p.n(); ++k) {
        const double s = p.row_sum(k);
        t[k - 1] = s - prev;
        prev = s;
    }
    return t;
}

inline Vec pattern_type(const GTPattern& p) { return pattern_type(p.array()); }

// Single-site Gibbs sampler for the uniform measure on GT(x).
class GibbsSampler {
public:
    GibbsSampler(std::span<const double> x, std::uint64_t seed, std::uint64_t stream = 0)
        : p_(TriangularArray::with_bottom_row(x)), rng_(make_stream(seed, stream))
    {
        if (!in_chamber(x)) throw DomainError("gt_gibbs_sample: x must be strictly decreasing");
        // midpoints of the row below give a strictly interlacing start
        for (std::size_t k = p_.n() - 1; k >= 1; --k)
            for (std::size_t j = 1; j <= k; ++j) p_(k, j) = 0.5 * (p_(k + 1, j) + p_(k + 1, j + 1));
    }

    void sweep()
    {
        const std::size_t n = p_.n();
        for (std::size_t k = 1; k < n; ++k)
            for (std::size_t j = 1; j <= k; ++j) {
                double lo = p_(k + 1, j + 1), hi = p_(k + 1, j);
                if (j <= k - 1) lo = std::max(lo, p_(k - 1, j));
                if (j >= 2) hi = std::min(hi, p_(k - 1, j - 1));
                p_(k, j) = lo + (hi - lo) * unif_(rng_);
            }
        if (!interlaces(p_)) throw Error("GibbsSampler: interlacing violated");
    }

    void sweeps(std::size_t count)
    {
        for (std::size_t s = 0; s < count; ++s) sweep();
    }

    const TriangularArray& state() const { return p_; }
    GTPattern pattern() const { return GTPattern(p_); }

private:
    TriangularArray p_;
    Engine rng_;
    std::uniform_real_distribution<double> unif_{0.0, 1.0};
};

inline GTPattern gt_gibbs_sample(std::span<const double> x, std::size_t sweeps, std::uint64_t seed)
{
    GibbsSampler s(x, seed);
    s.sweeps(sweeps);
    return s.pattern();
}

struct Estimate {
    double value = 0.0;
    double std_error = 0.0;
};

enum class VolumeMethod { rejection, limit };

// Lebesgue volume of GT(x).
inline Estimate gt_volume(std::span<const double> x, VolumeMethod method, std::size_t samples = 1000000,
                          std::uint64_t seed = 1)
{
    if (!in_chamber(x)) throw DomainError("gt_volume: x must be strictly decreasing");
    const std::size_t n = x.size();
    if (method == VolumeMethod::limit) {
        const Vec zero(n, 0.0);
        return {specfun::hciz_J(zero, Vec(x.begin(), x.end())), 0.0};
    }
    if (n > 4) throw DomainError("gt_volume: rejection limited to n <= 4");
    if (n == 1) return {1.0, 0.0};
    const double lo = x[n - 1], hi = x[0];
    const std::size_t q = positive_roots(n);
    const double box = std::pow(hi - lo, static_cast<double>(q));
    std::vector<std::size_t> hits(default_shards, 0);
    parallel_for(default_shards, [&](std::size_t s) {
        Engine rng = make_stream(seed, s);
        std::uniform_real_distribution<double> u(lo, hi);
        TriangularArray p = TriangularArray::with_bottom_row(x);
        const auto [b, e] = shard_range(samples, default_shards, s);
        for (std::size_t r = b; r < e; ++r) {
            for (std::size_t k = 1; k < n; ++k)
                for (std::size_t j = 1; j <= k; ++j) p(k, j) = u(rng);
            if (interlaces(p)) ++hits[s];
        }
    });
    std::size_t total = 0;
    for (auto h : hits) total += h;
    const double frac = static_cast<double>(total) / samples;
    return {box * frac, box * std::sqrt(frac * (1.0 - frac) / samples)};
}

struct DHOptions {
    std::size_t burn_in = 50;
    std::size_t thinning = 5;
    std::size_t chains = 16;
    std::size_t batches_per_chain = 20;
};

// vol(GT(x)) · mean e^{λ·type(P)} over Gibbs samples; stderr from pooled batch means.
inline Estimate dh_estimate_J(std::span<const double> lambda, std::span<const double> x, std::size_t samples,
                              std::uint64_t seed, const DHOptions& opt = {})
{
    require_same_size(lambda.size(), x.size(), "dh_estimate_J");
    if (!in_chamber(x)) throw DomainError("dh_estimate_J: x must be strictly decreasing");
    const double vol = gt_volume(x, VolumeMethod::limit).value;
    const std::size_t per_chain = std::max<std::size_t>(opt.batches_per_chain, samples / opt.chains);
    std::vector<Vec> batch_means(opt.chains);
    parallel_for(opt.chains, [&](std::size_t c) {
        GibbsSampler g(x, seed, c);
        g.sweeps(opt.burn_in);
        const std::size_t len = per_chain / opt.batches_per_chain;
        for (std::size_t b = 0; b < opt.batches_per_chain; ++b) {
            double s = 0.0;
            for (std::size_t r = 0; r < len; ++r) {
                g.sweeps(opt.thinning);
                s += std::exp(dot(lambda, pattern_type(g.state())));
            }
            batch_means[c].push_back(s / len);
        }
    });
    stats::Accumulator acc;
    for (const auto& chain : batch_means)
        for (double m : chain) acc.add(m);
    return {vol * acc.mean(), vol * acc.stderr_of_mean()};
}

} // namespace wlab
