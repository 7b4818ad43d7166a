#pragma once

// Reference computations that share no code path with the library: the
// closed-form pi_p through the Beta function, finite-difference Sturm-Liouville
// eigenvalues by inertia counting, and the clamped-beam frequency equation.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace oracle {

/// pi_p = 2 (p-1)^{1/p} B(1/p, 1 - 1/p) / p.
inline double pi_p_beta(double p) {
    return 2.0 * std::pow(p - 1.0, 1.0 / p) * std::beta(1.0 / p, 1.0 - 1.0 / p) / p;
}

/// Composite Simpson on [lo, hi] with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double lo, double hi, int n = 64) {
    if (n % 2) ++n;
    const double h = (hi - lo) / n;
    double s = f(lo) + f(hi);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(lo + i * h);
    return s * h / 3.0;
}

/// Three-point discretization of -(a u')' = lambda rho u, u(0) = u(L) = 0, with
/// n interior nodes: a at the cell midpoints, rho averaged over the dual cell
/// [x_i - h/2, x_i + h/2] by Simpson on each half.
struct FdPencil {
    std::vector<double> diag, off, mass;
    double h = 0.0;
};

inline FdPencil fd_pencil(const std::function<double(double)>& a, const std::function<double(double)>& rho, double L,
                          int n) {
    FdPencil P;
    P.h = L / (n + 1);
    const double h = P.h;
    std::vector<double> am(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) am[static_cast<std::size_t>(i)] = a((i + 0.5) * h);
    P.diag.resize(static_cast<std::size_t>(n));
    P.off.resize(static_cast<std::size_t>(n > 0 ? n - 1 : 0));
    P.mass.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const auto u = static_cast<std::size_t>(i);
        P.diag[u] = (am[u] + am[u + 1]) / (h * h);
        if (i + 1 < n) P.off[u] = -am[u + 1] / (h * h);
        const double x = (i + 1) * h;
        // keep the sample points off x itself so a jump at a node is split evenly
        const double left = simpson(rho, x - 0.5 * h, x - 1e-14 * L, 8);
        const double right = simpson(rho, x + 1e-14 * L, x + 0.5 * h, 8);
        P.mass[u] = (left + right) / h;
    }
    return P;
}

/// Number of positive pencil eigenvalues below lambda: the negative pivots of
/// the LDL^T factorization of A - lambda M (Sylvester inertia).
inline int fd_count_below(const FdPencil& P, double lambda) {
    int neg = 0;
    double d = 0.0;
    for (std::size_t i = 0; i < P.diag.size(); ++i) {
        double t = P.diag[i] - lambda * P.mass[i];
        if (i > 0) t -= P.off[i - 1] * P.off[i - 1] / d;
        if (t == 0.0) t = 1e-300;
        d = t;
        if (d < 0.0) ++neg;
    }
    return neg;
}

/// k-th positive pencil eigenvalue by bisection on the inertia count.
inline double fd_sturm_eigenvalue(const FdPencil& P, int k) {
    double lo = 0.0;
    double hi = 1.0;
    while (fd_count_below(P, hi) < k) {
        hi *= 2.0;
        if (hi > 1e15) throw std::runtime_error("oracle: fewer than k positive eigenvalues");
    }
    for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (fd_count_below(P, mid) >= k ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

/// Smallest positive root of cos(b) cosh(b) = 1, by bisection then Newton.
inline double clamped_beam_beta() {
    auto f = [](double b) { return std::cos(b) * std::cosh(b) - 1.0; };
    auto df = [](double b) { return -std::sin(b) * std::cosh(b) + std::cos(b) * std::sinh(b); };
    double lo = 4.0, hi = 5.0; // f(4) < 0 < f(5)
    for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) < 0.0 ? lo : hi) = mid;
    }
    double b = 0.5 * (lo + hi);
    for (int i = 0; i < 5; ++i) b -= f(b) / df(b);
    return b;
}

} // namespace oracle
