#pragma once

// p-exponent arithmetic: the generalized pi and the odd power map |s|^{p-2} s.

#include <cmath>
#include <numbers>

#include "errors.hpp"
#include "quadrature.hpp"

namespace plyap {

/// Exponent p > 1 together with its conjugate q = p / (p - 1).
class PExponent {
public:
    explicit PExponent(double p) : p_(p) {
        if (!(p > 1.0) || !std::isfinite(p)) throw DomainError("exponent p must satisfy p > 1, got " + std::to_string(p));
        q_ = p / (p - 1.0);
    }

    double p() const noexcept { return p_; }
    double q() const noexcept { return q_; }
    /// 1 / (p - 1), the power that appears in a^{-1/(p-1)}.
    double inv_pm1() const noexcept { return 1.0 / (p_ - 1.0); }

    friend bool operator==(const PExponent&, const PExponent&) = default;

private:
    double p_;
    double q_;
};

/// |s|^{p-2} s. The value at s = 0 is 0 for every p; for p < 2 the map has an
/// unbounded derivative there, so callers must not difference through 0.
inline double phi_p(double s, double p) {
    if (s == 0.0) return 0.0;
    if (p == 2.0) return s;
    if (p == 3.0) return s * std::abs(s);
    if (p == 1.5) return std::copysign(std::sqrt(std::abs(s)), s);
    return std::copysign(std::pow(std::abs(s), p - 1.0), s);
}

/// Closed form 2 pi (p-1)^{1/p} / (p sin(pi/p)).
inline double pi_p_closed_form(double p) {
    if (!(p > 1.0)) throw DomainError("pi_p requires p > 1");
    using std::numbers::pi;
    return 2.0 * pi * std::pow(p - 1.0, 1.0 / p) / (p * std::sin(pi / p));
}

/// pi_p = 2 (p-1)^{1/p} \int_0^1 (1 - s^p)^{-1/p} ds by double-exponential quadrature.
/// The endpoint singularity at s = 1 is evaluated through the complement 1 - s so
/// that 1 - s^p keeps full relative precision.
inline double pi_p(double p) {
    if (!(p > 1.0) || !std::isfinite(p)) throw DomainError("pi_p requires p > 1, got " + std::to_string(p));
    auto integrand = [p](double s, double sc) {
        double one_minus = 0.0;
        if (s > 0.5 && sc > 0.0) {
            one_minus = -std::expm1(p * std::log1p(-sc));
        } else {
            one_minus = 1.0 - std::pow(s, p);
        }
        if (one_minus <= 0.0) return 0.0;
        return std::pow(one_minus, -1.0 / p);
    };
    double integral = quad::endpoint_singular(integrand, 0.0, 1.0, 1e-15);
    return 2.0 * std::pow(p - 1.0, 1.0 / p) * integral;
}

} // namespace plyap
