#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "errors.hpp"

namespace plyap {

/// A weight known only on a grid. The domain is split into pieces; inside a
/// piece the nodes are uniform and the function is interpolated by cubic
/// Hermite splines with finite-difference slopes. Jumps are allowed only at
/// piece boundaries, where the value is right-continuous.
class SampledWeight {
public:
    struct Piece {
        double start = 0.0;
        double end = 0.0;
        std::vector<double> values; ///< at start + i * (end - start) / (values.size() - 1)
    };

    /// Cubic interpolant on one piece; callable anywhere in [start, end].
    class View {
    public:
        explicit View(const Piece* piece) : piece_(piece) {}

        double operator()(double x) const {
            const auto& v = piece_->values;
            const std::size_t n = v.size() - 1;
            const double h = (piece_->end - piece_->start) / static_cast<double>(n);
            double s = (x - piece_->start) / h;
            auto i = static_cast<std::size_t>(std::clamp(std::floor(s), 0.0, static_cast<double>(n - 1)));
            double t = std::clamp(s - static_cast<double>(i), 0.0, 1.0);
            if (n == 1) return v[0] + (v[1] - v[0]) * t;
            double m0 = slope(i);
            double m1 = slope(i + 1);
            double t2 = t * t;
            double t3 = t2 * t;
            return (2 * t3 - 3 * t2 + 1) * v[i] + (t3 - 2 * t2 + t) * m0 + (-2 * t3 + 3 * t2) * v[i + 1] +
                   (t3 - t2) * m1;
        }

    private:
        // slope in units of the node index
        double slope(std::size_t i) const {
            const auto& v = piece_->values;
            const std::size_t n = v.size() - 1;
            if (i == 0) return -1.5 * v[0] + 2.0 * v[1] - 0.5 * v[2];
            if (i == n) return 1.5 * v[n] - 2.0 * v[n - 1] + 0.5 * v[n - 2];
            return 0.5 * (v[i + 1] - v[i - 1]);
        }

        const Piece* piece_;
    };

    SampledWeight() = default;

    explicit SampledWeight(std::vector<Piece> pieces) : pieces_(std::move(pieces)) {
        if (pieces_.empty() || pieces_.front().start != 0.0) throw DomainError("sampled weight must start at 0");
        for (std::size_t i = 0; i < pieces_.size(); ++i) {
            const auto& p = pieces_[i];
            if (!(p.end > p.start) || p.values.size() < 2) throw DomainError("sampled weight: degenerate piece");
            if (i > 0 && p.start != pieces_[i - 1].end) throw DomainError("sampled weight: pieces not contiguous");
        }
    }

    double length() const noexcept { return pieces_.back().end; }
    const std::vector<Piece>& pieces() const noexcept { return pieces_; }

    std::vector<double> breakpoints() const {
        std::vector<double> out{0.0};
        for (const auto& p : pieces_) out.push_back(p.end);
        return out;
    }

    std::size_t piece_index(double x) const {
        if (!(x >= 0.0 && x <= length())) throw DomainError("x outside the sampled domain");
        auto it = std::upper_bound(pieces_.begin(), pieces_.end(), x, [](double v, const Piece& p) { return v < p.end; });
        if (it == pieces_.end()) return pieces_.size() - 1;
        return static_cast<std::size_t>(it - pieces_.begin());
    }

    View local(double x0, double x1) const { return View(&pieces_[piece_index(0.5 * (x0 + x1))]); }

    double value(double x) const { return View(&pieces_[piece_index(x)])(x); }
    double operator()(double x) const { return value(x); }

    SampledWeight negated() const {
        SampledWeight out = *this;
        for (auto& p : out.pieces_)
            for (auto& v : p.values) v = -v;
        return out;
    }

    /// Trapezoidal \int w^+ over the nodes.
    double positive_mass() const { return signed_mass(+1); }
    double negative_mass() const { return signed_mass(-1); }

private:
    double signed_mass(int sign) const {
        double total = 0.0;
        for (const auto& p : pieces_) {
            const double h = (p.end - p.start) / static_cast<double>(p.values.size() - 1);
            for (std::size_t i = 0; i + 1 < p.values.size(); ++i) {
                double a = std::max(sign * p.values[i], 0.0);
                double b = std::max(sign * p.values[i + 1], 0.0);
                total += 0.5 * (a + b) * h;
            }
        }
        return total;
    }

    std::vector<Piece> pieces_;
};

inline double positive_mass(const SampledWeight& w) { return w.positive_mass(); }
inline double negative_mass(const SampledWeight& w) { return w.negative_mass(); }

} // namespace plyap
