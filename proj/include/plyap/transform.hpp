#pragma once

// Change of variables y = P(x) = \int_0^x a^{-1/(p-1)} that removes the
// coefficient a: the problem with (a, rho) on [0, L] becomes the problem with
// (1, Q) on [0, ell], Q(y) = a(x)^{1/(p-1)} rho(x) at x = P^{-1}(y).

#include <algorithm>
#include <cmath>
#include <vector>

#include "errors.hpp"
#include "pmath.hpp"
#include "sampled_weight.hpp"
#include "weights.hpp"

namespace plyap {

namespace detail {

/// Monotone cubic Hermite on a table with one-sided node slopes per cell.
class MonotoneHermite {
public:
    MonotoneHermite() = default;

    /// slope_right[i] is the slope at x[i] seen from cell i, slope_left[i] the
    /// slope at x[i+1] seen from cell i.
    MonotoneHermite(std::vector<double> x, std::vector<double> y, std::vector<double> slope_right,
                    std::vector<double> slope_left)
        : x_(std::move(x)), y_(std::move(y)), d0_(std::move(slope_right)), d1_(std::move(slope_left)) {
        // Fritsch-Carlson limiter
        for (std::size_t i = 0; i + 1 < x_.size(); ++i) {
            double delta = (y_[i + 1] - y_[i]) / (x_[i + 1] - x_[i]);
            if (delta <= 0.0) {
                d0_[i] = d1_[i] = 0.0;
                continue;
            }
            double alpha = d0_[i] / delta;
            double beta = d1_[i] / delta;
            double r = alpha * alpha + beta * beta;
            if (r > 9.0) {
                double tau = 3.0 / std::sqrt(r);
                d0_[i] = tau * alpha * delta;
                d1_[i] = tau * beta * delta;
            }
        }
    }

    double operator()(double x) const {
        auto it = std::upper_bound(x_.begin(), x_.end(), x);
        std::size_t i = it == x_.begin() ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
        i = std::min(i, x_.size() - 2);
        double h = x_[i + 1] - x_[i];
        double t = std::clamp((x - x_[i]) / h, 0.0, 1.0);
        double t2 = t * t;
        double t3 = t2 * t;
        return (2 * t3 - 3 * t2 + 1) * y_[i] + (t3 - 2 * t2 + t) * h * d0_[i] + (-2 * t3 + 3 * t2) * y_[i + 1] +
               (t3 - t2) * h * d1_[i];
    }

    const std::vector<double>& nodes() const noexcept { return x_; }
    const std::vector<double>& values() const noexcept { return y_; }

private:
    std::vector<double> x_, y_, d0_, d1_;
};

} // namespace detail

class ChangeOfVariables {
public:
    ChangeOfVariables(detail::MonotoneHermite forward, detail::MonotoneHermite inverse, double length,
                      double transformed_length)
        : forward_(std::move(forward)), inverse_(std::move(inverse)), length_(length), ell_(transformed_length) {}

    /// y = P(x)
    double forward(double x) const { return forward_(x); }
    /// x = P^{-1}(y)
    double inverse(double y) const { return inverse_(y); }
    double length() const noexcept { return length_; }
    /// ell = P(L)
    double transformed_length() const noexcept { return ell_; }
    const std::vector<double>& grid() const noexcept { return forward_.nodes(); }
    const std::vector<double>& grid_values() const noexcept { return forward_.values(); }

private:
    detail::MonotoneHermite forward_, inverse_;
    double length_;
    double ell_;
};

inline ChangeOfVariables build_transform(const PiecewiseWeight& a, double p, int n_grid = 4096) {
    PExponent e(p);
    if (n_grid < 16) throw DomainError("build_transform: n_grid must be >= 16");
    if (!(a.min_value() > 0.0)) throw DomainError("build_transform: coefficient must be positive");
    const double L = a.length();
    const double gamma = -e.inv_pm1();

    std::vector<double> x;
    for (int i = 0; i <= n_grid; ++i) x.push_back(L * i / n_grid);
    for (double b : a.breakpoints()) x.push_back(b);
    std::sort(x.begin(), x.end());
    std::vector<double> nodes;
    for (double v : x)
        if (nodes.empty() || v - nodes.back() > 1e-13 * L) nodes.push_back(v);
    nodes.back() = L;

    const std::size_t n = nodes.size();
    std::vector<double> y(n, 0.0), d_right(n - 1), d_left(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const auto& seg = a.segments()[a.segment_index(0.5 * (nodes[i] + nodes[i + 1]))];
        y[i + 1] = y[i] + seg.power_integral(nodes[i], nodes[i + 1], gamma);
        d_right[i] = std::pow(seg.value(nodes[i]), gamma);
        d_left[i] = std::pow(seg.value(nodes[i + 1]), gamma);
        if (!std::isfinite(y[i + 1])) throw DomainError("build_transform: quadrature diverged");
    }
    std::vector<double> inv_right(n - 1), inv_left(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        inv_right[i] = 1.0 / d_right[i];
        inv_left[i] = 1.0 / d_left[i];
    }
    double ell = y.back();
    detail::MonotoneHermite fwd(nodes, y, d_right, d_left);
    detail::MonotoneHermite inv(y, nodes, inv_right, inv_left);
    return ChangeOfVariables(std::move(fwd), std::move(inv), L, ell);
}

/// Q(y) = a(x)^{1/(p-1)} rho(x), x = P^{-1}(y), sampled on [0, ell] with about
/// `resolution` nodes; the images of the breakpoints of a and rho become piece
/// boundaries so jumps stay sharp.
inline SampledWeight transformed_weight(const ChangeOfVariables& cov, const PiecewiseWeight& a,
                                        const PiecewiseWeight& rho, double p, int resolution = 4096) {
    PExponent e(p);
    const double L = cov.length();
    if (std::abs(rho.length() - L) > 1e-12 * L || std::abs(a.length() - L) > 1e-12 * L)
        throw DomainError("transformed_weight: domain lengths differ");
    const double gamma = -e.inv_pm1();
    const double ell = cov.transformed_length();

    std::vector<double> cuts = a.breakpoints();
    for (double b : rho.breakpoints()) cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    std::vector<double> xs;
    for (double v : cuts)
        if (xs.empty() || v - xs.back() > 1e-13 * L) xs.push_back(v);
    xs.back() = L;

    std::vector<double> ys{0.0};
    for (std::size_t j = 1; j < xs.size(); ++j) ys.push_back(ys.back() + power_integral(a, gamma, xs[j - 1], xs[j]));
    ys.back() = ell;

    std::vector<SampledWeight::Piece> pieces;
    for (std::size_t j = 0; j + 1 < xs.size(); ++j) {
        const double x0 = xs[j], x1 = xs[j + 1];
        const double y0 = ys[j], y1 = ys[j + 1];
        const double mid = 0.5 * (x0 + x1);
        const auto& sa = a.segments()[a.segment_index(mid)];
        const auto& sr = rho.segments()[rho.segment_index(mid)];
        auto count = static_cast<std::size_t>(std::ceil(resolution * (y1 - y0) / ell));
        count = std::max<std::size_t>(count, 4);
        SampledWeight::Piece piece{y0, y1, {}};
        piece.values.reserve(count + 1);
        for (std::size_t i = 0; i <= count; ++i) {
            double y = y0 + (y1 - y0) * static_cast<double>(i) / static_cast<double>(count);
            double x = i == 0 ? x0 : (i == count ? x1 : std::clamp(cov.inverse(y), x0, x1));
            piece.values.push_back(std::pow(sa.value(x), e.inv_pm1()) * sr.value(x));
        }
        pieces.push_back(std::move(piece));
    }
    return SampledWeight(std::move(pieces));
}

} // namespace plyap
