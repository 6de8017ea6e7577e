#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "whittaker/core.hpp"
#include "whittaker/gtpoly.hpp"
#include "whittaker/matrix.hpp"
#include "whittaker/paths.hpp"
#include "whittaker/rng.hpp"
#include "whittaker/stats.hpp"
#include "whittaker/words.hpp"

namespace wlab {

using Rational = boost::multiprecision::cpp_rational;

class GaussDecompositionError : public DomainError {
public:
    using DomainError::DomainError;
};

// ---------------------------------------------------------------------------
// Generators and Weyl group representatives (indices i are 1-based)

template <class T = double>
struct Generators {
    std::vector<Matrix<T>> h; // h_1 … h_n
    std::vector<Matrix<T>> e; // e_1 … e_{n−1}
    std::vector<Matrix<T>> f; // f_1 … f_{n−1}
};

template <class T = double>
Generators<T> generators(std::size_t n)
{
    if (n < 2) throw DomainError("generators: n >= 2");
    Generators<T> g;
    for (std::size_t i = 0; i < n; ++i) {
        Matrix<T> m(n, n);
        m(i, i) = T(1);
        g.h.push_back(m);
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        Matrix<T> e(n, n), f(n, n);
        e(i, i + 1) = T(1);
        f(i + 1, i) = T(1);
        g.e.push_back(e);
        g.f.push_back(f);
    }
    return g;
}

namespace detail {

// φ_i of a 2×2 block
template <class T>
Matrix<T> embed(std::size_t n, std::size_t i, const T& a, const T& b, const T& c, const T& d)
{
    if (i < 1 || i >= n) throw DomainError("embed: need 1 <= i <= n-1");
    Matrix<T> m = Matrix<T>::identity(n);
    m(i - 1, i - 1) = a;
    m(i - 1, i) = b;
    m(i, i - 1) = c;
    m(i, i) = d;
    return m;
}

} // namespace detail

template <class T = double>
Matrix<T> sbar(std::size_t n, std::size_t i)
{
    return detail::embed<T>(n, i, T(0), T(-1), T(1), T(0));
}

template <class T = double>
Matrix<T> wbar(const ReducedWord& word)
{
    Matrix<T> m = Matrix<T>::identity(word.n());
    for (int i : word.letters()) m = m * sbar<T>(word.n(), static_cast<std::size_t>(i));
    return m;
}

enum class FactorKind { Y, X, Z };

// Y_i(u) = φ_i[[u,0],[1,1/u]], X_i(v) = I + v f_i, Z_i(u) = φ_i diag(u, 1/u)
template <class T = double>
Matrix<T> factor_matrix(FactorKind kind, std::size_t i, const T& u, std::size_t n)
{
    if (u == T(0)) throw DomainError("factor_matrix: parameter must be nonzero");
    switch (kind) {
    case FactorKind::Y: return detail::embed<T>(n, i, u, T(0), T(1), T(1) / u);
    case FactorKind::X: return detail::embed<T>(n, i, T(1), T(0), u, T(1));
    case FactorKind::Z: return detail::embed<T>(n, i, u, T(0), T(0), T(1) / u);
    }
    throw DomainError("factor_matrix: unknown kind");
}

template <class T>
Matrix<T> factor_product(FactorKind kind, const ReducedWord& word, const std::vector<T>& params)
{
    require_same_size(word.size(), params.size(), "factor_product");
    Matrix<T> m = Matrix<T>::identity(word.n());
    for (std::size_t k = 0; k < word.size(); ++k)
        m = m * factor_matrix<T>(kind, static_cast<std::size_t>(word[k]), params[k], word.n());
    return m;
}

// ---------------------------------------------------------------------------
// Gauss decomposition b = L D U

template <class T>
struct LDU {
    Matrix<T> L;
    Matrix<T> D;
    Matrix<T> U;
};

// Doolittle elimination without pivoting. A leading minor that vanishes (relative to the
// matrix scale, for floating types) means b lies off the big cell.
template <class T>
LDU<T> ldu(const Matrix<T>& b)
{
    require(b.square(), "ldu: matrix not square");
    const std::size_t n = b.rows();
    double scale = 0.0;
    if constexpr (std::is_floating_point_v<T>) scale = max_abs_entry(b);
    Matrix<T> a = b;
    Matrix<T> L = Matrix<T>::identity(n), D(n, n), U = Matrix<T>::identity(n);
    for (std::size_t k = 0; k < n; ++k) {
        const T p = a(k, k);
        bool zero = p == T(0);
        if constexpr (std::is_floating_point_v<T>) zero = std::abs(p) <= 1e-14 * scale;
        if (zero)
            throw GaussDecompositionError("ldu: leading principal minor " + std::to_string(k + 1) +
                                          " vanishes (no Gauss decomposition)");
        D(k, k) = p;
        for (std::size_t j = k + 1; j < n; ++j) U(k, j) = a(k, j) / p;
        for (std::size_t i = k + 1; i < n; ++i) {
            L(i, k) = a(i, k) / p;
            for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= L(i, k) * a(k, j);
        }
    }
    return {L, D, U};
}

// ---------------------------------------------------------------------------
// Transition maps between the 121 and 212 parameterisations (n = 3)

enum class WordDirection { w121_to_212, w212_to_121 };

// Y_1(u_1)Y_2(u_2)Y_1(u_3) = Y_2(u'_1)Y_1(u'_2)Y_2(u'_3); the reverse map has the same form.
template <class T>
std::array<T, 3> transition_map_u(const std::array<T, 3>& u, WordDirection = WordDirection::w121_to_212)
{
    const T den = u[1] + u[0] * u[2];
    if (u[0] == T(0) || den == T(0)) throw DomainError("transition_map_u: zero denominator");
    return {u[2] + u[1] / u[0], u[0] * u[2], u[0] * u[1] / den};
}

// X_1(v_1)X_2(v_2)X_1(v_3) = X_2(v'_1)X_1(v'_2)X_2(v'_3)
template <class T>
std::array<T, 3> transition_map_v(const std::array<T, 3>& v)
{
    const T s = v[0] + v[2];
    if (s == T(0)) throw DomainError("transition_map_v: v_1 + v_3 = 0");
    return {v[1] * v[2] / s, s, v[0] * v[1] / s};
}

// Iterates a^k = a^{k−1}Z_{i_k}(u_k), v_k = u_k^{−1} a^{k−1}_{i_k+1}/a^{k−1}_{i_k}.
template <class T>
struct LemmaUV {
    std::vector<T> v;
    std::vector<T> final_diag;
    Matrix<T> lhs; // a ∏ Y_{i_k}(u_k)
    Matrix<T> rhs; // ∏ X_{i_k}(v_k) a^r
};

template <class T>
LemmaUV<T> lemma_uv_check(const std::vector<T>& a, const ReducedWord& word, const std::vector<T>& u)
{
    require_same_size(a.size(), word.n(), "lemma_uv_check");
    require_same_size(u.size(), word.size(), "lemma_uv_check");
    for (const T& x : a)
        if (x == T(0)) throw DomainError("lemma_uv_check: zero diagonal entry");
    LemmaUV<T> r;
    std::vector<T> ak = a;
    for (std::size_t k = 0; k < word.size(); ++k) {
        if (u[k] == T(0)) throw DomainError("lemma_uv_check: zero parameter");
        const std::size_t i = static_cast<std::size_t>(word[k]) - 1;
        r.v.push_back(ak[i + 1] / ak[i] / u[k]);
        ak[i] *= u[k];
        ak[i + 1] /= u[k];
    }
    r.final_diag = ak;
    r.lhs = Matrix<T>::diagonal(a) * factor_product(FactorKind::Y, word, u);
    r.rhs = factor_product(FactorKind::X, word, r.v) * Matrix<T>::diagonal(ak);
    return r;
}

// ---------------------------------------------------------------------------
// b(t) on upper triangular matrices

struct BTrajectory {
    Vec times;
    std::vector<RMatrix> b;
};

// db = (Σ h_i dη^i + Σ e_i dt) b along the piecewise-linear path: exact per segment, b_{j+1} = exp(A_j) b_j.
inline BTrajectory ode_b_stepwise(const SampledPath& eta)
{
    if (eta.singular()) throw DomainError("ode_b: path must be regular");
    const std::size_t n = eta.n();
    BTrajectory out;
    RMatrix b = RMatrix::identity(n);
    for (std::size_t i = 0; i < n; ++i) b(i, i) = std::exp(eta.reg(0, i));
    out.times.push_back(eta.time(0));
    out.b.push_back(b);
    for (std::size_t j = 0; j + 1 < eta.size(); ++j) {
        const double dt = eta.time(j + 1) - eta.time(j);
        RMatrix a(n, n);
        for (std::size_t i = 0; i < n; ++i) a(i, i) = eta.reg(j + 1, i) - eta.reg(j, i);
        for (std::size_t i = 0; i + 1 < n; ++i) a(i, i + 1) = dt;
        b = expm(a) * b;
        out.times.push_back(eta.time(j + 1));
        out.b.push_back(b);
    }
    return out;
}

namespace detail {

// (e^x − 1)/x
inline double phi0(double x) { return std::abs(x) < 1e-8 ? 1.0 + x / 2.0 : std::expm1(x) / x; }

} // namespace detail

// Iterated-integral formula for b_{ij}(t) with exact exponential-of-linear segments (n ≤ 3).
// The path must start at 0 (b(0) = I).
inline BTrajectory ode_b_integral(const SampledPath& eta)
{
    const std::size_t n = eta.n();
    if (n > 3) throw DomainError("ode_b_integral: closed form implemented for n <= 3");
    if (eta.singular()) throw DomainError("ode_b: path must be regular");
    const std::size_t m = eta.size();
    // F_k(t) = ∫_0^t e^{−α_k(η)}, G(t) = ∫_0^t e^{−α_1(η(s))} F_2(s) ds
    std::vector<Vec> F(n, Vec(m, 0.0));
    Vec G(m, 0.0);
    auto neg_alpha = [&](std::size_t j, std::size_t k) { return -(eta.reg(j, k) - eta.reg(j, k + 1)); };
    for (std::size_t j = 0; j + 1 < m; ++j) {
        const double dt = eta.time(j + 1) - eta.time(j);
        for (std::size_t k = 0; k + 1 < n; ++k) {
            const double a0 = neg_alpha(j, k), a1 = neg_alpha(j + 1, k);
            F[k][j + 1] = F[k][j] + dt * std::exp(a0) * detail::phi0(a1 - a0);
        }
        if (n == 3) {
            const double a0 = neg_alpha(j, 0), A = neg_alpha(j + 1, 0) - a0;
            const double g0 = neg_alpha(j, 1), Gs = neg_alpha(j + 1, 1) - g0;
            double cross; // ∫_0^1 e^{Aw}(e^{Gw} − 1)/G dw
            if (std::abs(Gs) < 1e-4) {
                double ph[3];
                detail::phi_table(A, 2, ph);
                cross = ph[1] + Gs * ph[2] / 2.0;
            } else {
                cross = (detail::phi0(A + Gs) - detail::phi0(A)) / Gs;
            }
            G[j + 1] = G[j] + dt * std::exp(a0) * (F[1][j] * detail::phi0(A) + dt * std::exp(g0) * cross);
        }
    }
    BTrajectory out;
    for (std::size_t j = 0; j < m; ++j) {
        RMatrix b(n, n);
        for (std::size_t i = 0; i < n; ++i) b(i, i) = std::exp(eta.reg(j, i));
        for (std::size_t k = 0; k + 1 < n; ++k) b(k, k + 1) = std::exp(eta.reg(j, k)) * F[k][j];
        if (n == 3) b(0, 2) = std::exp(eta.reg(j, 0)) * G[j];
        out.times.push_back(eta.time(j));
        out.b.push_back(b);
    }
    return out;
}

inline BTrajectory ode_b(const SampledPath& eta) { return eta.n() <= 3 ? ode_b_integral(eta) : ode_b_stepwise(eta); }

// ---------------------------------------------------------------------------
// Gauss decomposition theorem

struct GaussReport {
    double diagonal_error = 0.0; // sup_i |log [b w̄]_0 − T_w η(t)|
    double y_error = 0.0;        // max |[n w̄]_{−0} − ∏Y(u_k)| / max|·|
    double x_error = 0.0;        // max |[b w̄]_− − ∏X(v_k)|
    double grid_bound = 0.0;     // transform grid-error bound on the path
    Vec log_d;                   // log [b w̄]_0
    Vec transform;               // T_w η(t)
};

// Grid index j with t_j = t (nearest).
inline std::size_t grid_index(const SampledPath& eta, double t)
{
    const auto& ts = eta.times();
    const auto it = std::lower_bound(ts.begin(), ts.end(), t - 1e-12);
    require(it != ts.end(), "grid_index: t beyond the path");
    return static_cast<std::size_t>(it - ts.begin());
}

inline GaussReport gauss_theorem_check(const SampledPath& eta, const ReducedWord& word, double t)
{
    require(word.n() == eta.n(), "gauss_theorem_check: word and path dimensions differ");
    const std::size_t n = eta.n();
    const std::size_t j = grid_index(eta, t);
    require(j >= 1, "gauss_theorem_check: t must be positive");
    const SampledPath head = eta.prefix(j);
    const RMatrix b = ode_b(head).b.back();
    const RMatrix wb = wbar<double>(word);
    const LDU<double> g = ldu(RMatrix(b * wb));

    GaussReport r;
    std::vector<SampledPath> chain{head};
    for (int i : word.letters()) chain.push_back(transform_Ti(chain.back(), i));
    r.transform = chain.back().value(j);
    for (std::size_t i = 0; i < n; ++i) {
        r.log_d.push_back(std::log(g.D(i, i)));
        r.diagonal_error = std::max(r.diagonal_error, std::abs(r.log_d[i] - r.transform[i]));
    }

    // u_k = e^{x_k}, v_k = e^{−x_k − α_{i_k}(η_{k−1})} at t
    Vec u, v;
    for (std::size_t k = 0; k < word.size(); ++k) {
        const std::size_t i = static_cast<std::size_t>(word[k]) - 1;
        const Vec prev = chain[k].value(j), next = chain[k + 1].value(j);
        const double x = next[i] - prev[i];
        u.push_back(std::exp(x));
        v.push_back(std::exp(-x - (prev[i] - prev[i + 1])));
    }
    // n = a^{−1} b
    RMatrix nn = b;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < n; ++c) nn(i, c) /= b(i, i);
    const LDU<double> gn = ldu(RMatrix(nn * wb));
    const RMatrix lower0 = gn.L * gn.D;
    const RMatrix ys = factor_product(FactorKind::Y, word, u);
    r.y_error = max_abs_diff(lower0, ys) / std::max(1.0, max_abs_entry(ys));
    const RMatrix xs = factor_product(FactorKind::X, word, v);
    r.x_error = max_abs_diff(g.L, xs) / std::max(1.0, max_abs_entry(xs));
    r.grid_bound = grid_error_bound(head, word);
    return r;
}

// ---------------------------------------------------------------------------
// Haar measure and Gelfand–Tsetlin patterns

// Eigenvalues of a real symmetric matrix by cyclic Jacobi, descending.
inline Vec symmetric_eigenvalues(RMatrix a, double tol = 1e-14)
{
    require(a.square(), "symmetric_eigenvalues: matrix not square");
    const std::size_t n = a.rows();
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0, total = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                total += a(i, j) * a(i, j);
                if (i != j) off += a(i, j) * a(i, j);
            }
        if (off <= tol * tol * total) {
            Vec ev = a.diag();
            std::sort(ev.begin(), ev.end(), std::greater<>());
            return ev;
        }
        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                if (a(p, q) == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
            }
    }
    throw ConvergenceError("symmetric_eigenvalues: Jacobi did not converge");
}

// Hermitian H = A + ιB through the real form [[A, −B], [B, A]], whose spectrum is H's, doubled.
inline Vec hermitian_eigenvalues(const CMatrix& h)
{
    const std::size_t n = h.rows();
    RMatrix r(2 * n, 2 * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            r(i, j) = r(i + n, j + n) = h(i, j).real();
            r(i + n, j) = h(i, j).imag();
            r(i, j + n) = -h(i, j).imag();
        }
    const Vec ev = symmetric_eigenvalues(r);
    Vec out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = 0.5 * (ev[2 * i] + ev[2 * i + 1]);
    return out;
}

// QR of a complex Gaussian matrix with the phases of diag(R) divided out.
inline CMatrix haar_unitary(std::size_t n, Engine& rng)
{
    std::normal_distribution<double> g(0.0, 1.0 / std::sqrt(2.0));
    CMatrix a(n, n);
    for (auto i = 0u; i < n; ++i)
        for (auto j = 0u; j < n; ++j) a(i, j) = cplx(g(rng), g(rng));
    // modified Gram–Schmidt on columns
    CMatrix q(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<cplx> v(n);
        for (std::size_t i = 0; i < n; ++i) v[i] = a(i, j);
        for (std::size_t k = 0; k < j; ++k) {
            cplx d(0.0, 0.0);
            for (std::size_t i = 0; i < n; ++i) d += std::conj(q(i, k)) * v[i];
            for (std::size_t i = 0; i < n; ++i) v[i] -= d * q(i, k);
        }
        double norm = 0.0;
        for (const auto& z : v) norm += std::norm(z);
        norm = std::sqrt(norm);
        // r_jj = norm is real positive here, so the column already carries the Haar phase
        for (std::size_t i = 0; i < n; ++i) q(i, j) = v[i] / norm;
    }
    return q;
}

// Pattern of eigenvalues of the leading principal minors of H (row k = minor of size k).
inline TriangularArray minor_pattern(const CMatrix& h)
{
    const std::size_t n = h.rows();
    TriangularArray p(n);
    for (std::size_t k = 1; k <= n; ++k) {
        CMatrix m(k, k);
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < k; ++j) m(i, j) = h(i, j);
        const Vec ev = k == 1 ? Vec{h(0, 0).real()} : hermitian_eigenvalues(m);
        for (std::size_t i = 1; i <= k; ++i) p(k, i) = ev[i - 1];
    }
    return p;
}

struct HaarReport {
    double max_interlace_violation = 0.0;
    double max_type_error = 0.0; // |diag(UXU*) − type(P)|
    Vec diag_mean_z;             // (mean diag_k − Σx/n)/stderr
    std::vector<stats::GoodnessOfFit> marginals; // P_{k,1} for k < n, against Gibbs samples
    std::size_t samples = 0;
};

inline HaarReport haar_gt_check(std::span<const double> x, std::size_t samples, std::uint64_t seed,
                                std::size_t gibbs_sweeps = 60)
{
    if (!in_chamber(x)) throw DomainError("haar_gt_check: x must lie in Ω");
    const std::size_t n = x.size();
    if (n < 2 || n > 4) throw DomainError("haar_gt_check: 2 <= n <= 4");
    std::vector<TriangularArray> pats(samples);
    std::vector<Vec> diags(samples);
    std::vector<TriangularArray> gibbs(samples);
    parallel_for(default_shards, [&](std::size_t sh) {
        Engine rng = make_stream(seed, sh);
        const auto [b, e] = shard_range(samples, default_shards, sh);
        for (std::size_t s = b; s < e; ++s) {
            const CMatrix u = haar_unitary(n, rng);
            CMatrix xm(n, n);
            for (std::size_t i = 0; i < n; ++i) xm(i, i) = x[i];
            CMatrix h = u * xm * adjoint(u);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = i + 1; j < n; ++j) h(j, i) = std::conj(h(i, j)); // exact Hermitian symmetry
            pats[s] = minor_pattern(h);
            diags[s].resize(n);
            for (std::size_t i = 0; i < n; ++i) diags[s][i] = h(i, i).real();
            GibbsSampler g(x, seed ^ 0x9e3779b97f4a7c15ull, s);
            g.sweeps(gibbs_sweeps);
            gibbs[s] = g.state();
        }
    });
    HaarReport r;
    r.samples = samples;
    std::vector<stats::Accumulator> dacc(n);
    for (std::size_t s = 0; s < samples; ++s) {
        const TriangularArray& p = pats[s];
        for (std::size_t k = 2; k <= n; ++k)
            for (std::size_t j = 1; j < k; ++j)
                r.max_interlace_violation = std::max(
                    {r.max_interlace_violation, p(k, j + 1) - p(k - 1, j), p(k - 1, j) - p(k, j)});
        const Vec ty = pattern_type(p);
        for (std::size_t i = 0; i < n; ++i) {
            r.max_type_error = std::max(r.max_type_error, std::abs(ty[i] - diags[s][i]));
            dacc[i].add(diags[s][i]);
        }
    }
    const double centre = sum(x) / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) r.diag_mean_z.push_back((dacc[i].mean() - centre) / dacc[i].stderr_of_mean());
    for (std::size_t k = 1; k < n; ++k) {
        Vec a(samples), b(samples);
        for (std::size_t s = 0; s < samples; ++s) {
            a[s] = pats[s](k, 1);
            b[s] = gibbs[s](k, 1);
        }
        r.marginals.push_back(stats::ks_two_sample(a, b));
    }
    return r;
}

} // namespace wlab
