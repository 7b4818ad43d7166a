#pragma once

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <type_traits>

#include "errors.hpp"

namespace plyap::quad {

/// Adaptive Gauss-Kronrod for integrands smooth on [lo, hi]. The rule runs on
/// the unit interval: its stopping test mixes scaled and unscaled quantities,
/// so on short intervals it would bisect to full depth.
template <class F>
double smooth(F&& f, double lo, double hi, double tol = 1e-13) {
    if (hi <= lo) return 0.0;
    // the rule's error estimate never falls below a few machine epsilons
    tol = std::max(tol, 64.0 * std::numeric_limits<double>::epsilon());
    const double w = hi - lo;
    auto g = [&](double t) { return f(lo + w * t); };
    double err = 0.0;
    double r = w * boost::math::quadrature::gauss_kronrod<double, 31>::integrate(g, 0.0, 1.0, 15, tol, &err);
    if (!std::isfinite(r)) throw DomainError("quadrature diverged");
    return r;
}

/// Fixed 30-point Gauss-Legendre; for short pieces with a smooth integrand whose
/// integral may cancel to zero, where adaptive relative control cannot terminate.
template <class F>
double fixed(F&& f, double lo, double hi) {
    if (hi <= lo) return 0.0;
    return boost::math::quadrature::gauss<double, 30>::integrate(f, lo, hi);
}

/// Double-exponential rule; tolerates integrable singularities at the endpoints.
/// The integrand receives (x, distance-to-nearest-endpoint signed as boost passes it).
template <class F>
double endpoint_singular(F&& f, double lo, double hi, double tol = 1e-14) {
    if (hi <= lo) return 0.0;
    // slivers left over from root finding break the rule's abscissa bookkeeping
    if (hi - lo <= 1e-12 * std::max({1.0, std::abs(lo), std::abs(hi)})) {
        const double mid = 0.5 * (lo + hi);
        if constexpr (std::is_invocable_v<F, double, double>) return f(mid, hi - mid) * (hi - lo);
        else return f(mid) * (hi - lo);
    }
    static thread_local boost::math::quadrature::tanh_sinh<double> rule;
    double err = 0.0;
    double l1 = 0.0;
    double r = 0.0;
    if constexpr (std::is_invocable_v<F, double, double>) {
        r = rule.integrate(f, lo, hi, tol, &err, &l1);
    } else {
        // the two-argument form skips the rule's assertion that abscissas never round onto an endpoint
        r = rule.integrate([&](double x, double) { return f(x); }, lo, hi, tol, &err, &l1);
    }
    if (!std::isfinite(r)) throw DomainError("quadrature diverged");
    return r;
}

} // namespace plyap::quad
