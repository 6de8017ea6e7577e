#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "whittaker/core.hpp"

namespace wlab {

struct GaussRule {
    Vec nodes;    // on [-1, 1]
    Vec weights;
};

// Gauss–Legendre rule by Newton iteration on P_n.
inline GaussRule gauss_legendre(std::size_t n)
{
    require(n >= 1, "gauss_legendre: n >= 1");
    GaussRule r{Vec(n), Vec(n)};
    for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (std::size_t k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        r.nodes[i] = -x;
        r.nodes[n - 1 - i] = x;
        r.weights[i] = r.weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return r;
}

// Integral of f over [a, b] with a fixed Gauss–Legendre rule.
template <class F>
auto gauss_integrate(const GaussRule& rule, double a, double b, F&& f)
{
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    decltype(f(c)) s{};
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) s += rule.weights[k] * f(c + h * rule.nodes[k]);
    return s * h;
}

struct Minimum {
    double x;
    double value;
};

// Golden-section search for a unimodal function on [a, b].
template <class F>
Minimum golden_section(F&& f, double a, double b, double tol = 1e-12)
{
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = f(c), fd = f(d);
    while (std::abs(b - a) > tol * (1.0 + std::abs(a) + std::abs(b))) {
        if (fc < fd) {
            b = d; d = c; fd = fc;
            c = b - g * (b - a); fc = f(c);
        } else {
            a = c; c = d; fc = fd;
            d = a + g * (b - a); fd = f(d);
        }
    }
    const double x = 0.5 * (a + b);
    return {x, f(x)};
}

// Window [lo, hi] around x0 outside which log f drops below log f(x0) - drop.
// logf must be unimodal-ish; step grows geometrically.
template <class F>
std::pair<double, double> log_window(F&& logf, double x0, double drop, double step = 0.5)
{
    const double top = logf(x0);
    auto walk = [&](double dir) {
        double s = step, x = x0;
        for (int it = 0; it < 200; ++it) {
            x = x0 + dir * s;
            if (logf(x) < top - drop) return x;
            s *= 1.5;
        }
        throw ConvergenceError("log_window: integrand does not decay");
    };
    return {walk(-1.0), walk(1.0)};
}

} // namespace wlab
