#pragma once

// Dormand-Prince 5(4) for two-component systems with the 4th-order continuous
// extension of Hairer & Wanner (DOPRI5 "contd5"), used to locate sign changes
// and to sample solutions between accepted steps.

#include <algorithm>
#include <array>
#include <cmath>

#include "errors.hpp"

namespace plyap::ode {

using State = std::array<double, 2>;

/// Interpolant over one accepted step [x0, x0 + h].
struct DenseStep {
    double x0 = 0.0;
    double h = 0.0;
    State r1{}, r2{}, r3{}, r4{}, r5{};

    double x1() const noexcept { return x0 + h; }

    State operator()(double x) const {
        double t = (x - x0) / h;
        double t1 = 1.0 - t;
        State out;
        for (int i = 0; i < 2; ++i) out[i] = r1[i] + t * (r2[i] + t1 * (r3[i] + t * (r4[i] + t1 * r5[i])));
        return out;
    }

    double component(double x, int i) const {
        double t = (x - x0) / h;
        double t1 = 1.0 - t;
        return r1[i] + t * (r2[i] + t1 * (r3[i] + t * (r4[i] + t1 * r5[i])));
    }
};

class DormandPrince {
public:
    /// `length_scale` sets the initial step and the underflow threshold.
    DormandPrince(double x0, State y0, double tol, double length_scale, long max_steps = 20'000'000)
        : x_(x0), y_(y0), tol_(tol), h_(1e-4 * length_scale), h_min_(1e-14 * length_scale), max_steps_(max_steps) {
        peak_ = {std::abs(y0[0]), std::abs(y0[1])};
    }

    double x() const noexcept { return x_; }
    const State& state() const noexcept { return y_; }
    long steps() const noexcept { return steps_; }

    /// Multiplies the components by (s0, s1); used to keep homogeneous systems in range.
    void rescale(double s0, double s1) {
        y_[0] *= s0;
        y_[1] *= s1;
        peak_[0] *= std::abs(s0);
        peak_[1] *= std::abs(s1);
        have_k1_ = false;
    }

    /// Integrates to x_end with right-hand side f(x, y) -> dy/dx, calling
    /// on_step(const DenseStep&) after every accepted step. The right-hand side
    /// may change between calls (piecewise problems), so k1 is re-evaluated on entry.
    template <class F, class OnStep>
    void advance(F&& f, double x_end, OnStep&& on_step) {
        have_k1_ = false;
        while (x_ < x_end) {
            if (!have_k1_) {
                k1_ = f(x_, y_);
                have_k1_ = true;
            }
            double h = std::min(h_, x_end - x_);
            bool last = false;
            if (x_end - (x_ + h) <= 1e-13 * (x_end - x_ + std::abs(x_end))) {
                h = x_end - x_;
                last = true;
            }
            if (h < h_min_ && !last) throw IntegrationError("step size underflow", x_);
            if (++steps_ > max_steps_) throw IntegrationError("step budget exhausted", x_);

            State k2, k3, k4, k5, k6, k7, yt, y5;
            for (int i = 0; i < 2; ++i) yt[i] = y_[i] + h * (a21 * k1_[i]);
            k2 = f(x_ + c2 * h, yt);
            for (int i = 0; i < 2; ++i) yt[i] = y_[i] + h * (a31 * k1_[i] + a32 * k2[i]);
            k3 = f(x_ + c3 * h, yt);
            for (int i = 0; i < 2; ++i) yt[i] = y_[i] + h * (a41 * k1_[i] + a42 * k2[i] + a43 * k3[i]);
            k4 = f(x_ + c4 * h, yt);
            for (int i = 0; i < 2; ++i) yt[i] = y_[i] + h * (a51 * k1_[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
            k5 = f(x_ + c5 * h, yt);
            for (int i = 0; i < 2; ++i)
                yt[i] = y_[i] + h * (a61 * k1_[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
            k6 = f(x_ + h, yt);
            for (int i = 0; i < 2; ++i)
                y5[i] = y_[i] + h * (a71 * k1_[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
            k7 = f(x_ + h, y5);

            double err = 0.0;
            for (int i = 0; i < 2; ++i) {
                double e = h * (e1 * k1_[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
                double sc = tol_ * std::max({std::abs(y_[i]), std::abs(y5[i]), peak_[i]});
                sc = std::max(sc, 1e-300);
                err += (e / sc) * (e / sc);
            }
            err = std::sqrt(0.5 * err);
            if (!std::isfinite(err)) err = 1e10;

            if (err <= 1.0) {
                DenseStep d;
                d.x0 = x_;
                d.h = h;
                for (int i = 0; i < 2; ++i) {
                    double dy = y5[i] - y_[i];
                    double bspl = h * k1_[i] - dy;
                    d.r1[i] = y_[i];
                    d.r2[i] = dy;
                    d.r3[i] = bspl;
                    d.r4[i] = dy - h * k7[i] - bspl;
                    d.r5[i] = h * (d1 * k1_[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
                }
                x_ = last ? x_end : x_ + h;
                y_ = y5;
                k1_ = k7;
                for (int i = 0; i < 2; ++i) peak_[i] = std::max(peak_[i], std::abs(y_[i]));
                double fac = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
                if (!last || h >= h_) h_ = h * std::clamp(fac, 0.2, rejected_ ? 1.0 : 5.0);
                rejected_ = false;
                on_step(d);
            } else {
                h_ = h * std::max(0.2, 0.9 * std::pow(err, -0.2));
                rejected_ = true;
            }
        }
    }

private:
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                            a65 = -5103.0 / 18656;
    static constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                            a76 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                            e6 = 22.0 / 525, e7 = -1.0 / 40;
    static constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                            d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                            d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

    double x_;
    State y_;
    double tol_;
    double h_;
    double h_min_;
    long max_steps_;
    long steps_ = 0;
    State peak_{};
    State k1_{};
    bool have_k1_ = false;
    bool rejected_ = false;
};

} // namespace plyap::ode
