#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace wlab {

using cplx = std::complex<double>;
using Vec = std::vector<double>;
using CVec = std::vector<cplx>;

inline constexpr double pi = std::numbers::pi;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Precondition violated by the caller (bad lengths, out-of-domain arguments).
class DomainError : public Error {
public:
    using Error::Error;
};

// Argument sits on a pole of Γ or of a prefactor.
class PoleError : public DomainError {
public:
    using DomainError::DomainError;
};

// Iterative or adaptive method failed to reach its tolerance.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

// Simulation state left the finite range (|T| > guard).
class BlowUpError : public Error {
public:
    using Error::Error;
};

inline void require(bool ok, const std::string& what)
{
    if (!ok) throw DomainError(what);
}

inline void require_same_size(std::size_t a, std::size_t b, const char* what)
{
    if (a != b) throw DomainError(std::string(what) + ": length mismatch");
}

// x_1 > x_2 > ... > x_n
inline bool in_chamber(std::span<const double> x)
{
    for (std::size_t i = 1; i < x.size(); ++i)
        if (!(x[i - 1] > x[i])) return false;
    return true;
}

inline double dot(std::span<const double> a, std::span<const double> b)
{
    require_same_size(a.size(), b.size(), "dot");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double sum(std::span<const double> a)
{
    double s = 0.0;
    for (double v : a) s += v;
    return s;
}

inline CVec to_complex(std::span<const double> a)
{
    return CVec(a.begin(), a.end());
}

// Largest modulus, used to scale degeneracy tolerances.
template <class T>
double max_abs(std::span<const T> a)
{
    double m = 0.0;
    for (const auto& v : a) m = std::max(m, std::abs(v));
    return m;
}

// All pairwise differences exceed tol * max|λ_i| (absolute tol if λ = 0).
template <class T>
bool is_regular(std::span<const T> lambda, double rel_tol = 1e-6)
{
    const double scale = max_abs(lambda);
    const double thr = rel_tol * (scale > 0.0 ? scale : 1.0);
    for (std::size_t i = 0; i < lambda.size(); ++i)
        for (std::size_t j = i + 1; j < lambda.size(); ++j)
            if (std::abs(lambda[i] - lambda[j]) <= thr) return false;
    return true;
}

inline std::size_t triangular_size(std::size_t n) { return n * (n + 1) / 2; }

inline std::size_t positive_roots(std::size_t n) { return n * (n - 1) / 2; }

} // namespace wlab
