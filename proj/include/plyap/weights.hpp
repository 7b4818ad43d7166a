#pragma once

// Exact piecewise coefficients and weights on [0, L].
//
// Every segment is constant, linear or sinusoidal, so point values, primitives,
// sign changes and extrema of the primitive are all available in closed form.
// Only powers of sinusoidal segments fall back to quadrature.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "errors.hpp"
#include "pmath.hpp"
#include "quadrature.hpp"

namespace plyap {

struct Constant {
    double value = 0.0;
};

/// Straight line through (start, left) and (end, right).
struct Linear {
    double left = 0.0;
    double right = 0.0;
};

/// amplitude * sin(omega * x + phase) + offset, in the global coordinate x.
struct Sinusoid {
    double amplitude = 0.0;
    double omega = 0.0;
    double phase = 0.0;
    double offset = 0.0;
};

using Shape = std::variant<Constant, Linear, Sinusoid>;

struct Segment {
    double start = 0.0;
    double end = 0.0;
    Shape shape;

    double width() const noexcept { return end - start; }

    double value(double x) const {
        return std::visit(
            [&](const auto& s) -> double {
                using S = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<S, Constant>) {
                    return s.value;
                } else if constexpr (std::is_same_v<S, Linear>) {
                    double t = (x - start) / (end - start);
                    return s.left + (s.right - s.left) * t;
                } else {
                    return s.amplitude * std::sin(s.omega * x + s.phase) + s.offset;
                }
            },
            shape);
    }

    /// \int_{x0}^{x1} f, exact.
    double integral(double x0, double x1) const {
        return std::visit(
            [&](const auto& s) -> double {
                using S = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<S, Constant>) {
                    return s.value * (x1 - x0);
                } else if constexpr (std::is_same_v<S, Linear>) {
                    return 0.5 * (value(x0) + value(x1)) * (x1 - x0);
                } else {
                    if (s.omega == 0.0) return (s.amplitude * std::sin(s.phase) + s.offset) * (x1 - x0);
                    // cos a - cos b = 2 sin((a+b)/2) sin((b-a)/2) avoids cancellation on short pieces
                    double a = s.omega * x0 + s.phase;
                    double b = s.omega * x1 + s.phase;
                    double cos_diff = 2.0 * std::sin(0.5 * (a + b)) * std::sin(0.5 * (b - a));
                    return s.offset * (x1 - x0) + s.amplitude / s.omega * cos_diff;
                }
            },
            shape);
    }

    /// Points of [start, end] strictly inside the segment where f vanishes.
    /// A segment that is identically zero has no isolated roots.
    std::vector<double> roots() const {
        std::vector<double> out;
        std::visit(
            [&](const auto& s) {
                using S = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<S, Linear>) {
                    if (s.left != s.right && ((s.left < 0.0) != (s.right < 0.0))) {
                        double t = s.left / (s.left - s.right);
                        out.push_back(start + t * (end - start));
                    }
                } else if constexpr (std::is_same_v<S, Sinusoid>) {
                    if (s.amplitude == 0.0 || s.omega == 0.0) return;
                    double r = -s.offset / s.amplitude;
                    if (std::abs(r) > 1.0) return;
                    double base = std::asin(r);
                    append_phase_solutions(s, base, out);
                    append_phase_solutions(s, std::numbers::pi - base, out);
                }
            },
            shape);
        std::sort(out.begin(), out.end());
        out.erase(std::remove_if(out.begin(), out.end(), [&](double x) { return !(x > start && x < end); }), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

    /// (min, max) of f over the closed segment.
    std::pair<double, double> range() const {
        std::vector<double> xs{start, end};
        if (const auto* s = std::get_if<Sinusoid>(&shape); s && s->amplitude != 0.0 && s->omega != 0.0) {
            append_phase_solutions(*s, 0.5 * std::numbers::pi, xs);
            append_phase_solutions(*s, -0.5 * std::numbers::pi, xs);
        }
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (double x : xs) {
            if (x < start || x > end) continue;
            double v = value(x);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        return {lo, hi};
    }

    /// \int_{x0}^{x1} f^gamma for a piece on which f >= 0 (f > 0 when gamma < 0).
    double power_integral(double x0, double x1, double gamma) const {
        if (x1 <= x0) return 0.0;
        return std::visit(
            [&](const auto& s) -> double {
                using S = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<S, Constant>) {
                    if (s.value < 0.0 || (s.value == 0.0 && gamma <= 0.0))
                        throw DomainError("power of a non-positive constant segment");
                    return std::pow(s.value, gamma) * (x1 - x0);
                } else if constexpr (std::is_same_v<S, Linear>) {
                    double f0 = value(x0);
                    double f1 = value(x1);
                    if (std::min(f0, f1) < 0.0 || (std::min(f0, f1) == 0.0 && gamma <= -1.0))
                        throw DomainError("power integral of a linear segment diverges or is undefined");
                    double slope = (f1 - f0) / (x1 - x0);
                    if (std::abs(f1 - f0) <= 1e-14 * std::max(std::abs(f0), std::abs(f1))) {
                        return std::pow(0.5 * (f0 + f1), gamma) * (x1 - x0);
                    }
                    if (gamma == -1.0) return std::log(f1 / f0) / slope;
                    return (std::pow(f1, gamma + 1.0) - std::pow(f0, gamma + 1.0)) / ((gamma + 1.0) * slope);
                } else {
                    auto f = [&](double x) {
                        double v = value(x);
                        if (v <= 0.0) {
                            if (gamma <= 0.0) throw DomainError("non-positive sinusoid under a negative power");
                            return 0.0;
                        }
                        return std::pow(v, gamma);
                    };
                    auto [lo, hi] = Segment{x0, x1, shape}.range();
                    if (lo > 0.0) return quad::smooth(f, x0, x1, 1e-14);
                    return quad::endpoint_singular(f, x0, x1, 1e-14);
                }
            },
            shape);
    }

    /// The same function restricted to [x0, x1] within this segment.
    Segment restricted(double x0, double x1) const {
        Segment out{x0, x1, shape};
        if (std::holds_alternative<Linear>(shape)) out.shape = Linear{value(x0), value(x1)};
        return out;
    }

private:
    // x with omega * x + phase = theta + 2 pi n, inside [start, end].
    void append_phase_solutions(const Sinusoid& s, double theta, std::vector<double>& out) const {
        constexpr double two_pi = 2.0 * std::numbers::pi;
        double ta = s.omega * start + s.phase;
        double tb = s.omega * end + s.phase;
        if (ta > tb) std::swap(ta, tb);
        double n0 = std::ceil((ta - theta) / two_pi);
        for (double n = n0; theta + two_pi * n <= tb; n += 1.0) {
            double x = (theta + two_pi * n - s.phase) / s.omega;
            out.push_back(std::clamp(x, start, end));
        }
    }
};

/// A piecewise function on [0, L]. Immutable after construction.
class PiecewiseWeight {
public:
    PiecewiseWeight() = default;

    explicit PiecewiseWeight(std::vector<Segment> segments) : segments_(std::move(segments)) { validate(); }

    static PiecewiseWeight constant(double length, double value) {
        return PiecewiseWeight({Segment{0.0, length, Constant{value}}});
    }

    static PiecewiseWeight sinusoid(double length, double amplitude, double omega, double phase, double offset) {
        return PiecewiseWeight({Segment{0.0, length, Sinusoid{amplitude, omega, phase, offset}}});
    }

    /// Piecewise constant: values[i] on [ends[i-1], ends[i]), with ends.back() = L.
    static PiecewiseWeight steps(const std::vector<double>& ends, const std::vector<double>& values) {
        if (ends.size() != values.size() || ends.empty()) throw DomainError("steps: ends/values size mismatch");
        std::vector<Segment> segs;
        double start = 0.0;
        for (std::size_t i = 0; i < ends.size(); ++i) {
            segs.push_back(Segment{start, ends[i], Constant{values[i]}});
            start = ends[i];
        }
        return PiecewiseWeight(std::move(segs));
    }

    double length() const noexcept { return segments_.empty() ? 0.0 : segments_.back().end; }
    std::span<const Segment> segments() const noexcept { return segments_; }
    std::size_t size() const noexcept { return segments_.size(); }

    /// x_0 = 0 < x_1 < ... < x_n = L.
    std::vector<double> breakpoints() const {
        std::vector<double> out;
        out.reserve(segments_.size() + 1);
        out.push_back(0.0);
        for (const auto& s : segments_) out.push_back(s.end);
        return out;
    }

    /// Segment containing x under the right-continuous convention (last segment at x = L).
    std::size_t segment_index(double x) const {
        if (!(x >= 0.0 && x <= length())) {
            throw DomainError("x = " + std::to_string(x) + " outside [0, " + std::to_string(length()) + "]");
        }
        auto it = std::upper_bound(segments_.begin(), segments_.end(), x,
                                   [](double v, const Segment& s) { return v < s.end; });
        if (it == segments_.end()) return segments_.size() - 1;
        return static_cast<std::size_t>(it - segments_.begin());
    }

    double value(double x) const { return segments_[segment_index(x)].value(x); }
    double operator()(double x) const { return value(x); }

    /// The closed-form segment covering [x0, x1]; callable on that whole interval.
    class View {
    public:
        explicit View(const Segment* s) : seg_(s) {}
        double operator()(double x) const { return seg_->value(x); }
        const Segment& segment() const noexcept { return *seg_; }

    private:
        const Segment* seg_;
    };

    View local(double x0, double x1) const { return View(&segments_[segment_index(0.5 * (x0 + x1))]); }

    double min_value() const {
        double lo = std::numeric_limits<double>::infinity();
        for (const auto& s : segments_) lo = std::min(lo, s.range().first);
        return lo;
    }

    double max_value() const {
        double hi = -std::numeric_limits<double>::infinity();
        for (const auto& s : segments_) hi = std::max(hi, s.range().second);
        return hi;
    }

    bool is_constant(double c) const {
        for (const auto& s : segments_) {
            auto [lo, hi] = s.range();
            if (lo != c || hi != c) return false;
        }
        return true;
    }

    /// c * w.
    PiecewiseWeight scaled(double c) const {
        std::vector<Segment> segs(segments_.begin(), segments_.end());
        for (auto& s : segs) {
            std::visit(
                [c](auto& sh) {
                    using S = std::decay_t<decltype(sh)>;
                    if constexpr (std::is_same_v<S, Constant>) {
                        sh.value *= c;
                    } else if constexpr (std::is_same_v<S, Linear>) {
                        sh.left *= c;
                        sh.right *= c;
                    } else {
                        sh.amplitude *= c;
                        sh.offset *= c;
                    }
                },
                s.shape);
        }
        return PiecewiseWeight(std::move(segs));
    }

    PiecewiseWeight negated() const { return scaled(-1.0); }

    /// w + c.
    PiecewiseWeight shifted(double c) const {
        std::vector<Segment> segs(segments_.begin(), segments_.end());
        for (auto& s : segs) s.shape = add_constant(s.shape, c);
        return PiecewiseWeight(std::move(segs));
    }

    /// Pointwise sum. Closed under constant + anything and linear + linear;
    /// other combinations leave the family and throw DomainError.
    PiecewiseWeight plus(const PiecewiseWeight& other) const {
        if (std::abs(other.length() - length()) > 1e-12 * length()) throw DomainError("plus: domain lengths differ");
        std::vector<double> cuts = breakpoints();
        for (double x : other.breakpoints()) cuts.push_back(x);
        std::sort(cuts.begin(), cuts.end());
        std::vector<double> merged;
        for (double x : cuts) {
            if (merged.empty() || x - merged.back() > 1e-13 * length()) merged.push_back(x);
        }
        merged.back() = length();
        std::vector<Segment> segs;
        for (std::size_t i = 0; i + 1 < merged.size(); ++i) {
            double x0 = merged[i];
            double x1 = merged[i + 1];
            double mid = 0.5 * (x0 + x1);
            Segment a = segments_[segment_index(mid)].restricted(x0, x1);
            Segment b = other.segments_[other.segment_index(mid)].restricted(x0, x1);
            segs.push_back(Segment{x0, x1, sum_shapes(a, b)});
        }
        return PiecewiseWeight(std::move(segs));
    }

private:
    static Shape add_constant(const Shape& sh, double c) {
        return std::visit(
            [c](auto s) -> Shape {
                using S = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<S, Constant>) {
                    s.value += c;
                } else if constexpr (std::is_same_v<S, Linear>) {
                    s.left += c;
                    s.right += c;
                } else {
                    s.offset += c;
                }
                return s;
            },
            sh);
    }

    static Shape sum_shapes(const Segment& a, const Segment& b) {
        if (const auto* c = std::get_if<Constant>(&b.shape)) return add_constant(a.shape, c->value);
        if (const auto* c = std::get_if<Constant>(&a.shape)) return add_constant(b.shape, c->value);
        if (std::holds_alternative<Linear>(a.shape) && std::holds_alternative<Linear>(b.shape)) {
            return Linear{a.value(a.start) + b.value(b.start), a.value(a.end) + b.value(b.end)};
        }
        throw DomainError("plus: sum of these segment kinds is not representable");
    }

    void validate() const {
        if (segments_.empty()) throw DomainError("weight needs at least one segment");
        if (segments_.front().start != 0.0) throw DomainError("first segment must start at 0");
        for (std::size_t i = 0; i < segments_.size(); ++i) {
            const auto& s = segments_[i];
            if (!(s.end > s.start) || !std::isfinite(s.end)) {
                throw DomainError("breakpoints must be strictly increasing (segment " + std::to_string(i) + ")");
            }
            if (i > 0 && s.start != segments_[i - 1].end) {
                throw DomainError("segment " + std::to_string(i) + " does not start where the previous one ends");
            }
            bool finite = std::visit(
                [](const auto& sh) {
                    using S = std::decay_t<decltype(sh)>;
                    if constexpr (std::is_same_v<S, Constant>) return std::isfinite(sh.value);
                    else if constexpr (std::is_same_v<S, Linear>) return std::isfinite(sh.left) && std::isfinite(sh.right);
                    else
                        return std::isfinite(sh.amplitude) && std::isfinite(sh.omega) && std::isfinite(sh.phase) &&
                               std::isfinite(sh.offset);
                },
                s.shape);
            if (!finite) throw DomainError("segment " + std::to_string(i) + " has non-finite parameters");
        }
    }

    std::vector<Segment> segments_;
};

struct Extremes {
    double min = 0.0;
    double max = 0.0;
    double argmin = 0.0;
    double argmax = 0.0;
};

/// Q(x) = \int_0^x w, closed form per segment.
class Primitive {
public:
    explicit Primitive(PiecewiseWeight w) : base_(std::move(w)) {
        nodes_.reserve(base_.size() + 1);
        nodes_.push_back(0.0);
        for (const auto& s : base_.segments()) nodes_.push_back(nodes_.back() + s.integral(s.start, s.end));
    }

    const PiecewiseWeight& base() const noexcept { return base_; }
    /// Q at the breakpoints x_0 .. x_n.
    std::span<const double> breakpoint_values() const noexcept { return nodes_; }
    double total() const noexcept { return nodes_.back(); }

    double operator()(double x) const {
        std::size_t i = base_.segment_index(x);
        const auto& s = base_.segments()[i];
        return nodes_[i] + s.integral(s.start, x);
    }

    /// Extrema of Q over [0, L]: breakpoints plus the sign changes of w inside segments.
    Extremes extremes() const {
        Extremes e{0.0, 0.0, 0.0, 0.0};
        auto consider = [&](double x, double q) {
            if (q < e.min) e = Extremes{q, e.max, x, e.argmax};
            if (q > e.max) e = Extremes{e.min, q, e.argmin, x};
        };
        const auto segs = base_.segments();
        for (std::size_t i = 0; i < segs.size(); ++i) {
            for (double r : segs[i].roots()) consider(r, nodes_[i] + segs[i].integral(segs[i].start, r));
            consider(segs[i].end, nodes_[i + 1]);
        }
        return e;
    }

    /// Extrema of Q over [x0, x1] in absolute terms (not shifted to Q(x0) = 0).
    Extremes extremes(double x0, double x1) const {
        const double q0 = (*this)(x0);
        Extremes e{q0, q0, x0, x0};
        auto consider = [&](double x, double q) {
            if (q < e.min) e = Extremes{q, e.max, x, e.argmax};
            if (q > e.max) e = Extremes{e.min, q, e.argmin, x};
        };
        const auto segs = base_.segments();
        for (std::size_t i = base_.segment_index(x0); i < segs.size() && segs[i].start < x1; ++i) {
            for (double r : segs[i].roots())
                if (r > x0 && r < x1) consider(r, nodes_[i] + segs[i].integral(segs[i].start, r));
            if (segs[i].end < x1) consider(segs[i].end, nodes_[i + 1]);
        }
        consider(x1, (*this)(x1));
        return e;
    }

private:
    PiecewiseWeight base_;
    std::vector<double> nodes_;
};

inline Primitive primitive(const PiecewiseWeight& w) { return Primitive(w); }

/// sup_{0<=x<=L} |\int_0^x w|.
inline double sup_abs_primitive(const PiecewiseWeight& w) {
    auto e = Primitive(w).extremes();
    return std::max(std::abs(e.min), std::abs(e.max));
}

/// sup_{0<=x<=L} \int_0^x w (signed; never negative because Q(0) = 0).
inline double sup_primitive(const PiecewiseWeight& w) { return Primitive(w).extremes().max; }

/// sup_{0<=x<=L} \int_x^L w = Q(L) - min Q.
inline double sup_tail_integral(const PiecewiseWeight& w) {
    Primitive q(w);
    return q.total() - q.extremes().min;
}

/// sup over subintervals (a, b) of |\int_a^b w| = max Q - min Q.
inline double max_oscillation(const PiecewiseWeight& w) {
    auto e = Primitive(w).extremes();
    return e.max - e.min;
}

struct SplitParts {
    double positive = 0.0; ///< \int w^+
    double negative = 0.0; ///< \int w^-
    double mean = 0.0;
    double l1 = 0.0;
};

namespace detail {

/// Calls f(segment, x0, x1, sign) for every maximal sign-definite piece.
template <class F>
void for_each_signed_piece(const PiecewiseWeight& w, F&& f) {
    for (const auto& s : w.segments()) {
        std::vector<double> cuts{s.start};
        for (double r : s.roots()) cuts.push_back(r);
        cuts.push_back(s.end);
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
            double x0 = cuts[i];
            double x1 = cuts[i + 1];
            if (x1 <= x0) continue;
            double v = s.value(0.5 * (x0 + x1));
            int sign = v > 0.0 ? 1 : (v < 0.0 ? -1 : 0);
            f(s, x0, x1, sign);
        }
    }
}

} // namespace detail

inline SplitParts split_parts(const PiecewiseWeight& w) {
    SplitParts out;
    detail::for_each_signed_piece(w, [&](const Segment& s, double x0, double x1, int sign) {
        double v = s.integral(x0, x1);
        if (sign > 0) out.positive += std::max(v, 0.0);
        if (sign < 0) out.negative += std::max(-v, 0.0);
    });
    out.l1 = out.positive + out.negative;
    out.mean = (out.positive - out.negative) / w.length();
    return out;
}

inline double positive_mass(const PiecewiseWeight& w) { return split_parts(w).positive; }
inline double negative_mass(const PiecewiseWeight& w) { return split_parts(w).negative; }

/// \int_{x0}^{x1} w^gamma for a weight that is positive on [x0, x1].
inline double power_integral(const PiecewiseWeight& w, double gamma, double x0, double x1) {
    double total = 0.0;
    for (const auto& s : w.segments()) {
        double lo = std::max(x0, s.start);
        double hi = std::min(x1, s.end);
        if (hi > lo) total += s.power_integral(lo, hi, gamma);
    }
    return total;
}

inline double power_integral(const PiecewiseWeight& w, double gamma) {
    return power_integral(w, gamma, 0.0, w.length());
}

/// \int_0^L a^{-1/(p-1)} for a coefficient bounded away from zero.
inline double inverse_power_integral(const PiecewiseWeight& a, double p) {
    PExponent e(p);
    if (!(a.min_value() > 0.0)) throw DomainError("coefficient a must be positive");
    double v = power_integral(a, -e.inv_pm1());
    if (!std::isfinite(v) || v <= 0.0) throw DomainError("\\int a^{-1/(p-1)} is not finite");
    return v;
}

/// (\int_0^L a^{-1/(p-1)})^{1-p}.
inline double harmonic_mean_star(const PiecewiseWeight& a, double p) {
    return std::pow(inverse_power_integral(a, p), 1.0 - p);
}

/// \int_0^L (w^+)^{1/p} (positive = true) or \int_0^L (w^-)^{1/p}.
inline double root_integral(const PiecewiseWeight& w, double p, bool positive) {
    PExponent e(p);
    double total = 0.0;
    detail::for_each_signed_piece(w, [&](const Segment& s, double x0, double x1, int sign) {
        if (sign == (positive ? 1 : -1)) {
            auto f = [&](double x) {
                double v = positive ? s.value(x) : -s.value(x);
                return v > 0.0 ? std::pow(v, 1.0 / e.p()) : 0.0;
            };
            total += quad::endpoint_singular(f, x0, x1, 1e-13);
        }
    });
    return total;
}

inline constexpr std::size_t default_segment_cap = std::size_t{1} << 20;

/// x -> w((x / eps) mod L) on [0, L]; the period in x is eps * L and a partial
/// last period is cut exactly at x = L.
inline PiecewiseWeight rescale_periodic(const PiecewiseWeight& w, double eps,
                                        std::size_t segment_cap = default_segment_cap) {
    if (!(eps > 0.0) || !std::isfinite(eps)) throw DomainError("rescale_periodic: eps must be positive");
    const double L = w.length();
    const auto base = w.segments();
    const double periods_real = 1.0 / eps;
    const auto periods = static_cast<std::size_t>(std::ceil(periods_real - 1e-12));
    const std::size_t required = periods * base.size();
    if (required > segment_cap) throw ResourceError("rescale_periodic: segment count exceeds cap", required);

    std::vector<Segment> segs;
    segs.reserve(required);
    const double snap = 1e-12 * L;
    double prev_end = 0.0;
    bool done = false;
    for (std::size_t j = 0; j < periods && !done; ++j) {
        const double jd = static_cast<double>(j);
        for (const auto& s : base) {
            double x_end = (jd + s.end / L) * eps * L;
            if (x_end > L - snap) {
                x_end = L;
                done = true;
            }
            if (x_end - prev_end <= snap) {
                if (done) break;
                continue;
            }
            // base coordinate of a rescaled point x: (x - j eps L) / eps
            auto base_at = [&](double x) { return x / eps - jd * L; };
            Shape sh = std::visit(
                [&](const auto& b) -> Shape {
                    using S = std::decay_t<decltype(b)>;
                    if constexpr (std::is_same_v<S, Constant>) {
                        return b;
                    } else if constexpr (std::is_same_v<S, Linear>) {
                        double t0 = std::clamp(base_at(prev_end), s.start, s.end);
                        double t1 = std::clamp(base_at(x_end), s.start, s.end);
                        return Linear{s.value(t0), s.value(t1)};
                    } else {
                        double phase = std::remainder(b.phase - b.omega * jd * L, 2.0 * std::numbers::pi);
                        return Sinusoid{b.amplitude, b.omega / eps, phase, b.offset};
                    }
                },
                s.shape);
            segs.push_back(Segment{prev_end, x_end, sh});
            prev_end = x_end;
            if (done) break;
        }
    }
    if (segs.empty() || segs.back().end != L) throw DomainError("rescale_periodic: failed to cover [0, L]");
    return PiecewiseWeight(std::move(segs));
}

/// Grid lower estimate of the Muckenhoupt constant:
/// max over intervals B with endpoints on an (n+1)-point grid of
/// (\int_B a)(\int_B a^{-1/(p-1)})^{p-1} / |B|^p.
inline double ap_constant(const PiecewiseWeight& a, double p, int n_intervals = 256) {
    PExponent e(p);
    if (n_intervals < 1) throw DomainError("ap_constant: n_intervals must be >= 1");
    if (!(a.min_value() > 0.0)) throw DomainError("ap_constant: coefficient must be positive");
    const double L = a.length();
    const auto n = static_cast<std::size_t>(n_intervals);
    Primitive qa(a);
    std::vector<double> x(n + 1), ia(n + 1), ib(n + 1, 0.0);
    for (std::size_t i = 0; i <= n; ++i) {
        x[i] = L * static_cast<double>(i) / static_cast<double>(n);
        ia[i] = qa(x[i]);
        if (i > 0) ib[i] = ib[i - 1] + power_integral(a, -e.inv_pm1(), x[i - 1], x[i]);
    }
    double best = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j <= n; ++j) {
            double len = x[j] - x[i];
            double v = (ia[j] - ia[i]) * std::pow(ib[j] - ib[i], p - 1.0) / std::pow(len, p);
            best = std::max(best, v);
        }
    }
    return best;
}

} // namespace plyap
