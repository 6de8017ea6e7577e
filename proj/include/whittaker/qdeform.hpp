#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <type_traits>
#include <vector>

#include "whittaker/cells.hpp"
#include "whittaker/core.hpp"
#include "whittaker/rng.hpp"
#include "whittaker/stats.hpp"

namespace wlab {

// q ∈ [0,1) and t = q^ν (t = q^λ for ψ_λ). T is double or Rational; with rational (q, t) every
// quantity below is rational.
template <class T>
struct QParams {
    T q;
    T t;

    QParams(T q_, T t_) : q(std::move(q_)), t(std::move(t_))
    {
        if (q < T(0) || !(q < T(1))) throw DomainError("QParams: need 0 <= q < 1");
        if (!(t > T(0))) throw DomainError("QParams: need t = q^ν > 0");
    }

    // p = q^ν/(q^ν + q^{−ν})
    T p() const { return t / (t + T(1) / t); }
};

// Floating parameters from ν; q = 0 is allowed only with ν = 0 (0^0 = 1).
inline QParams<double> q_params_from_nu(double q, double nu)
{
    if (q == 0.0) {
        if (nu != 0.0) throw DomainError("q_params_from_nu: q = 0 requires ν = 0");
        return {0.0, 1.0};
    }
    return {q, std::pow(q, nu)};
}

// x^k for integer k with 0^0 = 1
template <class T>
T ipow(const T& x, int k)
{
    if (k < 0) {
        if (x == T(0)) throw PoleError("ipow: zero to a negative power");
        return T(1) / ipow(x, -k);
    }
    T r(1);
    for (int i = 0; i < k; ++i) r *= x;
    return r;
}

// (q)_n = (1−q)⋯(1−q^n), (q)_0 = 1
template <class T>
T qpochhammer(const T& q, int n)
{
    if (n < 0) throw DomainError("qpochhammer: n >= 0");
    T r(1), qk(1);
    for (int k = 1; k <= n; ++k) {
        qk *= q;
        r *= T(1) - qk;
    }
    return r;
}

// ψ_λ(z) = Σ_{y=0}^{z} t^{2y−z}/((q)_y (q)_{z−y}); ψ(−1) = 0
template <class T>
T q_whittaker(const QParams<T>& par, int z)
{
    if (z < 0) return T(0);
    T s(0);
    for (int y = 0; y <= z; ++y) s += ipow(par.t, 2 * y - z) / (qpochhammer(par.q, y) * qpochhammer(par.q, z - y));
    return s;
}

// max_z |(1−q^{z+1})ψ(z+1) + ψ(z−1) − (t + 1/t)ψ(z)|, relative to |ψ(z+1)| + |ψ(z)| in floating point
template <class T>
T q_difference_residual(const QParams<T>& par, int z_max)
{
    require(z_max >= 0, "q_difference_residual: z_max >= 0");
    T worst(0);
    for (int z = 0; z <= z_max; ++z) {
        const T a = q_whittaker(par, z + 1), b = q_whittaker(par, z), c = q_whittaker(par, z - 1);
        T r = (T(1) - ipow(par.q, z + 1)) * a + c - (par.t + T(1) / par.t) * b;
        if (r < T(0)) r = -r;
        if constexpr (std::is_floating_point_v<T>) r /= std::abs(a) + std::abs(b);
        if (r > worst) worst = r;
    }
    return worst;
}

// (q)_z ψ_λ(z) = H_z(x | q) with H_{z+1} = 2x H_z − (1−q^z) H_{z−1}, H_0 = 1, H_1 = 2x, x = (t + 1/t)/2.
template <class T>
struct HermiteReport {
    std::vector<T> lhs; // (q)_z ψ(z)
    std::vector<T> rhs; // H_z
    T max_discrepancy = T(0);
};

template <class T>
HermiteReport<T> q_hermite_check(const QParams<T>& par, int z_max)
{
    HermiteReport<T> r;
    const T two_x = par.t + T(1) / par.t;
    T h_prev(1), h = two_x;
    for (int z = 0; z <= z_max; ++z) {
        const T hz = z == 0 ? T(1) : h;
        r.lhs.push_back(qpochhammer(par.q, z) * q_whittaker(par, z));
        r.rhs.push_back(hz);
        if (z >= 1) {
            const T next = two_x * h - (T(1) - ipow(par.q, z)) * h_prev;
            h_prev = h;
            h = next;
        }
        T d = r.lhs.back() - r.rhs.back();
        if (d < T(0)) d = -d;
        if constexpr (std::is_floating_point_v<T>) d /= std::max(1.0, std::abs(static_cast<double>(hz)));
        if (d > r.max_discrepancy) r.max_discrepancy = d;
    }
    return r;
}

// ---------------------------------------------------------------------------
// Kernels

struct QState {
    int y = 0;
    int z = 0;
    auto operator<=>(const QState&) const = default;
};

template <class T>
class QKernels {
public:
    explicit QKernels(QParams<T> par) : par_(std::move(par)), p_(par_.p()) {}

    const QParams<T>& params() const { return par_; }
    T p() const { return p_; }

    T psi(int z) const
    {
        if (z < 0) return T(0);
        while (static_cast<int>(psi_.size()) <= z) psi_.push_back(q_whittaker(par_, static_cast<int>(psi_.size())));
        return psi_[z];
    }

    // Π((y,z), (y',z'))
    T Pi(QState from, QState to) const
    {
        if (to.y == from.y + 1 && to.z == from.z + 1) return p_;
        if (to.y == from.y && to.z == from.z + 1) return (T(1) - p_) * ipow(par_.q, from.y);
        if (to.y == from.y - 1 && to.z == from.z - 1) return (T(1) - p_) * (T(1) - ipow(par_.q, from.y));
        return T(0);
    }

    // Q(z, z')
    T Q(int z, int z2) const
    {
        const T s = par_.t + T(1) / par_.t;
        if (z2 == z + 1) return (T(1) - ipow(par_.q, z + 1)) / s * psi(z + 1) / psi(z);
        if (z2 == z - 1) return z == 0 ? T(0) : T(1) / s * psi(z - 1) / psi(z);
        return T(0);
    }

    // K(z, (y, z'))
    T K(int z, QState s) const
    {
        if (s.z != z || s.y < 0 || s.y > z) return T(0);
        return ipow(par_.t, 2 * s.y - z) / (psi(z) * qpochhammer(par_.q, s.y) * qpochhammer(par_.q, z - s.y));
    }

    std::vector<QState> Pi_targets(QState s) const
    {
        std::vector<QState> out{{s.y + 1, s.z + 1}, {s.y, s.z + 1}};
        if (s.y >= 1) out.push_back({s.y - 1, s.z - 1});
        return out;
    }

private:
    QParams<T> par_;
    T p_;
    mutable std::vector<T> psi_;
};

template <class T>
struct RowSumReport {
    T max_pi = T(0);
    T max_q = T(0);
    T max_k = T(0);
};

template <class T>
RowSumReport<T> kernel_row_sums(const QKernels<T>& k, int z_max)
{
    auto absd = [](T v) { return v < T(0) ? T(-v) : v; };
    RowSumReport<T> r;
    for (int z = 0; z <= z_max; ++z) {
        const T q_sum = k.Q(z, z + 1) + k.Q(z, z - 1);
        r.max_q = std::max(r.max_q, absd(q_sum - T(1)));
        T k_sum(0);
        for (int y = 0; y <= z; ++y) {
            k_sum += k.K(z, {y, z});
            T pi_sum(0);
            for (QState to : k.Pi_targets({y, z})) pi_sum += k.Pi({y, z}, to);
            r.max_pi = std::max(r.max_pi, absd(pi_sum - T(1)));
        }
        r.max_k = std::max(r.max_k, absd(k_sum - T(1)));
    }
    return r;
}

// max over z ≤ z_max and reachable (y, z') of |(QK)(z,(y,z')) − (KΠ)(z,(y,z'))|
template <class T>
T intertwining_check(const QKernels<T>& k, int z_max)
{
    T worst(0);
    for (int z = 0; z <= z_max; ++z)
        for (int z2 : {z - 1, z + 1}) {
            if (z2 < 0) continue;
            for (int y = 0; y <= z2; ++y) {
                const QState s{y, z2};
                const T qk = k.Q(z, z2) * k.K(z2, s);
                T kp(0);
                for (int y0 = 0; y0 <= z; ++y0) kp += k.K(z, {y0, z}) * k.Pi({y0, z}, s);
                T d = qk - kp;
                if (d < T(0)) d = -d;
                if (d > worst) worst = d;
            }
        }
    return worst;
}

// Exact law of (Z-path, Y_n) from (0,0) after `steps` steps, aggregated over Y-paths.
template <class T>
struct ConditionalLawReport {
    std::size_t z_paths = 0;     // Z-trajectories with positive probability
    T max_conditional = T(0);    // max |P(Y_n = y | Z-path) − π_{Z_n}(y)|
    T max_marginal = T(0);       // max |P(Z-path) − ∏ Q(z_k, z_{k+1})|
};

template <class T>
ConditionalLawReport<T> conditional_law_bruteforce(const QKernels<T>& k, int steps)
{
    if (steps < 0 || steps > 14) throw DomainError("conditional_law_bruteforce: 0 <= steps <= 14");
    std::map<std::vector<int>, std::map<int, T>> layer;
    layer[{0}][0] = T(1);
    for (int s = 0; s < steps; ++s) {
        std::map<std::vector<int>, std::map<int, T>> next;
        for (const auto& [zpath, ys] : layer)
            for (const auto& [y, pr] : ys) {
                const QState from{y, zpath.back()};
                for (QState to : k.Pi_targets(from)) {
                    const T w = k.Pi(from, to);
                    if (w == T(0)) continue;
                    auto zp = zpath;
                    zp.push_back(to.z);
                    next[zp][to.y] += pr * w;
                }
            }
        layer = std::move(next);
    }
    auto absd = [](T v) { return v < T(0) ? T(-v) : v; };
    ConditionalLawReport<T> r;
    for (const auto& [zpath, ys] : layer) {
        T total(0);
        for (const auto& [y, pr] : ys) total += pr;
        if (total == T(0)) continue;
        ++r.z_paths;
        T q_path(1);
        for (std::size_t i = 0; i + 1 < zpath.size(); ++i) q_path *= k.Q(zpath[i], zpath[i + 1]);
        r.max_marginal = std::max(r.max_marginal, absd(total - q_path));
        const int z = zpath.back();
        for (int y = 0; y <= z; ++y) {
            const auto it = ys.find(y);
            const T cond = it == ys.end() ? T(0) : it->second / total;
            r.max_conditional = std::max(r.max_conditional, absd(cond - k.K(z, {y, z})));
        }
    }
    return r;
}

// ---------------------------------------------------------------------------
// q = 0, ν = 0

struct PitmanRow {
    int z = 0;
    Rational q_up;          // Q(z, z+1) from the kernel with ψ(z) = z + 1
    Rational display_up;    // (z+1)/2z at the same z (undefined at z = 0)
    Rational shifted_up;    // (z'+1)/2z' at z' = z + 1
    double empirical_up = 0.0;
    double std_error = 0.0;
    std::size_t visits = 0;
    bool within_3sigma = true;
};

struct PitmanReport {
    std::vector<PitmanRow> rows;
    bool psi_is_z_plus_1 = false;     // ψ_0(z) = z+1 at q = 0 under 0^0 = 1, (0)_n = 1
    bool kernel_matches_display = false;  // Q(z,z+1) = (z+1)/2z at every z ≥ 1
    bool kernel_matches_shifted = false;  // Q(z,z+1) = (z+2)/2(z+1), i.e. the display in z' = z + 1
    bool exact_checks_pass = false;   // row sums, difference equation and intertwining at q = 0
    std::size_t simulated_steps = 0;
    std::string convention;
};

// Exact q = 0 kernel against the displayed Pitman kernel, plus 2M − X from a simple symmetric walk.
inline PitmanReport pitman_limit_check(int z_max, std::size_t steps = 1000000, std::uint64_t seed = 1)
{
    const QKernels<Rational> k(QParams<Rational>(Rational(0), Rational(1)));
    PitmanReport r;
    r.psi_is_z_plus_1 = true;
    for (int z = 0; z <= z_max + 1; ++z) r.psi_is_z_plus_1 = r.psi_is_z_plus_1 && k.psi(z) == Rational(z + 1);
    const auto sums = kernel_row_sums(k, z_max);
    r.exact_checks_pass = sums.max_pi == 0 && sums.max_q == 0 && sums.max_k == 0 &&
                          intertwining_check(k, z_max) == 0 && q_difference_residual(k.params(), z_max) == 0;

    // 2M − X
    std::vector<std::size_t> visits(z_max + 1, 0), ups(z_max + 1, 0);
    Engine rng = make_stream(seed, 0);
    std::bernoulli_distribution coin(0.5);
    long x = 0, m = 0;
    for (std::size_t s = 0; s < steps; ++s) {
        const long z = 2 * m - x;
        x += coin(rng) ? 1 : -1;
        m = std::max(m, x);
        const long z2 = 2 * m - x;
        if (z <= z_max) {
            ++visits[z];
            if (z2 == z + 1) ++ups[z];
        }
    }
    r.simulated_steps = steps;
    r.kernel_matches_display = true;
    r.kernel_matches_shifted = true;
    for (int z = 0; z <= z_max; ++z) {
        PitmanRow row;
        row.z = z;
        row.q_up = k.Q(z, z + 1);
        row.display_up = z == 0 ? Rational(0) : Rational(z + 1, 2 * z);
        row.shifted_up = Rational(z + 2, 2 * (z + 1));
        if (z >= 1 && row.q_up != row.display_up) r.kernel_matches_display = false;
        if (row.q_up != row.shifted_up) r.kernel_matches_shifted = false;
        row.visits = visits[z];
        if (visits[z] > 0) {
            const double pq = static_cast<double>(row.q_up);
            row.empirical_up = static_cast<double>(ups[z]) / visits[z];
            row.std_error = std::sqrt(pq * (1.0 - pq) / visits[z]);
            row.within_3sigma = std::abs(row.empirical_up - pq) <= 3.0 * row.std_error + 1e-12;
        }
        r.rows.push_back(row);
    }
    r.convention = r.psi_is_z_plus_1 && r.exact_checks_pass && r.kernel_matches_shifted
                       ? "psi(z) = z+1 (0^0 = 1, (0)_n = 1); displayed (z+1)/2z holds in the shifted index z' = z+1"
                       : "unresolved";
    return r;
}

// ---------------------------------------------------------------------------
// Output theorem

// π(y) ∝ ρ^y/(q)_y, ρ = p/(1−p), truncated once the terms are below 1e−18 of the total.
inline Vec burke_stationary_law(double p, double q)
{
    if (!(p > 0.0) || !(p < 0.5)) throw DomainError("burke: stationary law needs 0 < p < 1/2");
    const double rho = p / (1.0 - p);
    Vec w{1.0};
    double total = 1.0;
    for (int y = 0; y < 100000; ++y) {
        const double next = w.back() * rho / (1.0 - std::pow(q, y + 1));
        w.push_back(next);
        total += next;
        if (next < 1e-18 * total) break;
    }
    for (double& v : w) v /= total;
    return w;
}

struct BurkeReport {
    stats::GoodnessOfFit increments; // against up 1−p, down p
    stats::GoodnessOfFit lag_pairs;  // non-overlapping pairs against the product law
    double up_fraction = 0.0;
    double balance_residual = 0.0;   // max |πP − π| on the truncated law
};

inline BurkeReport burke_check(double p, double q, std::size_t steps, std::uint64_t seed)
{
    if (q < 0.0 || q >= 1.0) throw DomainError("burke_check: need 0 <= q < 1");
    const Vec pi = burke_stationary_law(p, q);
    BurkeReport r;
    // left-eigenvector residual of the Y kernel
    for (std::size_t y = 0; y + 1 < pi.size(); ++y) {
        const double qy = std::pow(q, static_cast<double>(y));
        double in = pi[y] * (1.0 - p) * qy + pi[y + 1] * (1.0 - p) * (1.0 - std::pow(q, y + 1.0));
        if (y >= 1) in += pi[y - 1] * p;
        r.balance_residual = std::max(r.balance_residual, std::abs(in - pi[y]));
    }
    Engine rng = make_stream(seed, 0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::discrete_distribution<int> start(pi.begin(), pi.end());
    int y = start(rng);
    std::vector<int> inc;
    inc.reserve(steps);
    for (std::size_t s = 0; s < steps; ++s) {
        const double v = u(rng);
        if (v < p) {
            ++y;
            inc.push_back(1);
        } else if (v < p + (1.0 - p) * std::pow(q, y)) {
            inc.push_back(1);
        } else {
            --y;
            inc.push_back(-1);
        }
    }
    const double n_up = static_cast<double>(std::count(inc.begin(), inc.end(), 1));
    r.up_fraction = n_up / steps;
    r.increments = stats::chi_square({n_up, steps - n_up}, {(1.0 - p) * steps, p * steps});
    Vec pairs(4, 0.0);
    for (std::size_t s = 0; s + 1 < inc.size(); s += 2) pairs[(inc[s] > 0 ? 2 : 0) + (inc[s + 1] > 0 ? 1 : 0)] += 1.0;
    const double np = static_cast<double>(inc.size() / 2);
    const double pu = 1.0 - p, pd = p;
    r.lag_pairs = stats::chi_square(pairs, {pd * pd * np, pd * pu * np, pu * pd * np, pu * pu * np});
    return r;
}

} // namespace wlab
