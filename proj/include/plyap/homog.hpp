#pragma once

// epsilon-sweeps of the periodic problem
//
//     -(a(x/eps) |u'|^{p-2} u')' = lambda rho(x/eps) |u|^{p-2} u  on (0, L),
//
// with a and rho L-periodic. Depending on the sign of the mean of rho one
// ladder converges to the constant-coefficient limit and the other diverges
// (both diverge for zero mean). Each row carries a certified lower bound and,
// when it applies, the explicit test-function upper bound.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "errors.hpp"
#include "pmath.hpp"
#include "quadrature.hpp"
#include "shooting.hpp"
#include "weights.hpp"

namespace plyap {

enum class SignSelection { plus, minus, both };

enum class Classification { diverges_plus, diverges_minus, converges };

inline const char* to_string(Classification c) {
    switch (c) {
    case Classification::diverges_plus: return "diverges_plus";
    case Classification::diverges_minus: return "diverges_minus";
    case Classification::converges: return "converges";
    }
    return "unknown";
}

/// (mean over [0, L] of a^{-1/(p-1)})^{1-p}: the effective coefficient of the limit problem.
inline double effective_coefficient(const PiecewiseWeight& a, double p) {
    return std::pow(inverse_power_integral(a, p) / a.length(), 1.0 - p);
}

/// (a* / rho_bar) (k pi_p / L)^p, for rho_bar > 0.
inline double limit_eigenvalue(double a_star, double rho_bar, double p, double L, int k) {
    if (rho_bar == 0.0) throw NoEigenvalue("limit_eigenvalue: zero mean weight has no finite limit");
    if (!(rho_bar > 0.0)) throw DomainError("limit_eigenvalue: needs rho_bar > 0 (use |rho_bar| for the negative ladder)");
    if (!(a_star > 0.0) || !(L > 0.0) || k < 1) throw DomainError("limit_eigenvalue: invalid arguments");
    return a_star / rho_bar * std::pow(k * pi_p(p) / L, p);
}

/// k^{p-1} / (eps p ||rho||_1) (\int_0^L a(x/eps)^{-1/(p-1)})^{1-p}, the lower bound
/// on lambda_{eps,k}^+ for a zero-mean weight.
inline double divergence_lower_bound(double eps, int k, double p, const PiecewiseWeight& a_scaled,
                                     const PiecewiseWeight& rho_base) {
    if (!(eps > 0.0) || k < 1) throw DomainError("divergence_lower_bound: invalid eps or k");
    const double l1 = split_parts(rho_base).l1;
    if (l1 == 0.0) return std::numeric_limits<double>::infinity();
    return std::pow(k, p - 1.0) / (eps * p * l1) * harmonic_mean_star(a_scaled, p);
}

/// The same bound applied to sigma = rho - rho_bar, which lies above rho, for rho_bar < 0.
inline double comparison_shift_bound(double eps, int k, double p, const PiecewiseWeight& a_scaled,
                                     const PiecewiseWeight& rho_base) {
    const double mean = Primitive(rho_base).total() / rho_base.length();
    if (!(mean < 0.0)) throw DomainError("comparison_shift_bound: needs a weight with negative mean");
    return divergence_lower_bound(eps, k, p, a_scaled, rho_base.shifted(-mean));
}

/// 8 k^{p+3} ||a||_1 / (h^p L^2 rho_bar), the explicit form of the test-function bound.
inline double test_function_upper_bound(int k, double p, double L, double h, double a_l1, double rho_bar) {
    PExponent e(p);
    if (k < 1) throw DomainError("test_function_upper_bound: k must be >= 1");
    if (!(rho_bar > 0.0)) throw DomainError("test_function_upper_bound: needs rho_bar > 0");
    if (!(L > 0.0) || !(h > 0.0) || !(h < 0.5 * L)) throw DomainError("test_function_upper_bound: needs 0 < h < L/2");
    if (!(a_l1 > 0.0)) throw DomainError("test_function_upper_bound: ||a||_1 must be positive");
    return 8.0 * std::pow(k, p + 3.0) * a_l1 / (std::pow(h, p) * L * L * rho_bar);
}

/// 8 k^{p+3} / (L^2 rho_bar): the closing display of the argument, without ||a||_1 / h^p.
inline double printed_upper_bound(int k, double p, double L, double rho_bar) {
    if (!(rho_bar > 0.0)) throw DomainError("printed_upper_bound: needs rho_bar > 0");
    return 8.0 * std::pow(k, p + 3.0) / (L * L * rho_bar);
}

/// Evaluates the k disjoint trapezoid test functions w_i (ramp width h/k,
/// support [(i-1)L/k, iL/k]) against the rescaled coefficients.
struct TestFunctionCheck {
    std::vector<double> energy;  ///< \int a_eps |w_i'|^p
    std::vector<double> mass;    ///< \int rho_eps |w_i|^p
    double minmax_bound = std::numeric_limits<double>::infinity(); ///< max energy / min mass
    bool applicable = false; ///< both estimates behind the explicit bound hold
};

inline TestFunctionCheck check_test_functions(int k, double p, double h, const PiecewiseWeight& a_scaled,
                                              const PiecewiseWeight& rho_scaled, double a_l1, double rho_bar) {
    PExponent e(p);
    const double L = rho_scaled.length();
    if (k < 1 || !(h > 0.0) || !(h < 0.5 * L)) throw DomainError("check_test_functions: needs k >= 1, 0 < h < L/2");
    const double ramp = h / k;
    const double slope_p = std::pow(k / h, p);
    Primitive qa(a_scaled);

    TestFunctionCheck out;
    for (int i = 0; i < k; ++i) {
        const double s0 = L * i / k;
        const double s1 = L * (i + 1) / k;
        out.energy.push_back(slope_p * ((qa(s0 + ramp) - qa(s0)) + (qa(s1) - qa(s1 - ramp))));

        auto w = [&](double x) {
            if (x < s0 + ramp) return (x - s0) / ramp;
            if (x > s1 - ramp) return (s1 - x) / ramp;
            return 1.0;
        };
        const double cuts[] = {s0, s0 + ramp, s1 - ramp, s1};
        double total = 0.0;
        for (const auto& seg : rho_scaled.segments()) {
            for (int c = 0; c < 3; ++c) {
                const double lo = std::max(seg.start, cuts[c]);
                const double hi = std::min(seg.end, cuts[c + 1]);
                if (hi <= lo) continue;
                if (c == 1) {
                    total += seg.integral(lo, hi);
                } else {
                    total += quad::fixed([&](double x) { return seg.value(x) * std::pow(w(x), p); }, lo, hi);
                }
            }
        }
        out.mass.push_back(total);
    }
    const double min_mass = *std::min_element(out.mass.begin(), out.mass.end());
    const double max_energy = *std::max_element(out.energy.begin(), out.energy.end());
    if (min_mass > 0.0) out.minmax_bound = max_energy / min_mass;
    const double mass_floor = L * L * L * rho_bar / (2.0 * k * k * k);
    const double energy_cap = 4.0 * L * std::pow(h, -p) * std::pow(k, p) * a_l1;
    out.applicable = rho_bar > 0.0 && min_mass >= mass_floor && max_energy <= energy_cap;
    return out;
}

/// Least-squares slope of log err against log eps over the entries with err > 0;
/// NaN when fewer than two remain.
inline double fit_rate(const std::vector<double>& eps, const std::vector<double>& err) {
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < eps.size() && i < err.size(); ++i) {
        if (err[i] > 0.0 && std::isfinite(err[i])) {
            xs.push_back(std::log(eps[i]));
            ys.push_back(std::log(err[i]));
        }
    }
    if (xs.size() < 2) return std::numeric_limits<double>::quiet_NaN();
    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double den = n * sxx - sx * sx;
    if (den == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return (n * sxy - sx * sy) / den;
}

struct SweepConfig {
    explicit SweepConfig(ProblemSpec period) : base(std::move(period)) {}

    ProblemSpec base; ///< one period of a and rho on [0, L]
    std::vector<double> epsilons{0.25, 0.125, 0.0625, 0.03125, 0.015625};
    std::vector<int> k_list{1};
    SignSelection sign = SignSelection::both;
    ShootingOptions shooting;
    double ramp = 0.0; ///< test-function ramp width h; 0 means L/4
    std::size_t segment_cap = default_segment_cap;
    unsigned threads = 0; ///< 0 means hardware concurrency
    double zero_mean_tol = 1e-12; ///< |rho_bar| <= tol * mean|rho| counts as zero mean

    void validate() const {
        if (epsilons.empty()) throw DomainError("sweep: empty epsilon grid");
        for (std::size_t i = 0; i < epsilons.size(); ++i) {
            if (!(epsilons[i] > 0.0 && epsilons[i] <= 1.0)) throw DomainError("sweep: epsilons must lie in (0, 1]");
            if (i > 0 && !(epsilons[i] < epsilons[i - 1])) throw DomainError("sweep: epsilons must strictly decrease");
        }
        if (k_list.empty()) throw DomainError("sweep: empty k list");
        for (int k : k_list)
            if (k < 1) throw DomainError("sweep: k must be >= 1");
        const double L = base.length();
        if (ramp != 0.0 && !(ramp > 0.0 && ramp < 0.5 * L)) throw DomainError("sweep: ramp must lie in (0, L/2)");
        const std::size_t need = static_cast<std::size_t>(std::ceil(1.0 / epsilons.back() - 1e-12)) *
                                 std::max(base.a.size(), base.rho.size());
        if (need > segment_cap) throw ResourceError("sweep: rescaled segment count exceeds cap", need);
    }
};

/// Bounds are on |lambda|. upper_bound is +inf where no finite bound applies;
/// limit and abs_error are NaN for diverging ladders.
struct SweepRow {
    double epsilon = 0.0;
    int k = 1;
    Sign sign = Sign::plus;
    double lambda = std::numeric_limits<double>::quiet_NaN();
    double lower_bound = 0.0;
    double upper_bound = std::numeric_limits<double>::infinity();
    double printed_upper_bound = std::numeric_limits<double>::quiet_NaN();
    double minmax_upper_bound = std::numeric_limits<double>::infinity();
    double limit = std::numeric_limits<double>::quiet_NaN();
    double abs_error = std::numeric_limits<double>::quiet_NaN();
    bool failed = false;
    std::string error;
};

struct LadderSummary {
    int k = 1;
    Sign sign = Sign::plus;
    Classification expected = Classification::converges;
    std::string observed; ///< "diverges", "converges" or "undetermined" from the two smallest eps
    double limit = std::numeric_limits<double>::quiet_NaN();
    double rate = std::numeric_limits<double>::quiet_NaN();
    double final_relative_error = std::numeric_limits<double>::quiet_NaN();
    bool monotone_tail = false; ///< |error| decreases over the last three eps
    bool consistent = false;    ///< observed agrees with expected
};

struct SweepResult {
    double p = 2.0;
    double L = 1.0;
    double mean = 0.0;
    double a_star = 1.0;
    double a_l1 = 0.0;
    double ramp = 0.0;
    std::vector<SweepRow> rows; ///< ordered by (eps desc, k asc, + then -)
    std::vector<LadderSummary> ladders;
};

namespace detail {

template <class F>
void parallel_for(std::size_t count, unsigned threads, F&& f) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) f(i);
        });
    }
    for (auto& th : pool) th.join();
}

inline Classification expected_class(double signed_mean, Sign sign) {
    if (signed_mean > 0.0) return Classification::converges;
    return sign == Sign::plus ? Classification::diverges_plus : Classification::diverges_minus;
}

} // namespace detail

inline SweepResult sweep(const SweepConfig& cfg) {
    cfg.validate();
    const auto& base = cfg.base;
    const double p = base.p.p();
    const double L = base.length();

    SweepResult res;
    res.p = p;
    res.L = L;
    res.mean = Primitive(base.rho).total() / L;
    if (std::abs(res.mean) <= cfg.zero_mean_tol * split_parts(base.rho).l1 / L) res.mean = 0.0;
    res.a_star = effective_coefficient(base.a, p);
    res.a_l1 = Primitive(base.a).total();
    res.ramp = cfg.ramp > 0.0 ? cfg.ramp : 0.25 * L;

    std::vector<Sign> signs;
    if (cfg.sign != SignSelection::minus) signs.push_back(Sign::plus);
    if (cfg.sign != SignSelection::plus) signs.push_back(Sign::minus);

    for (double eps : cfg.epsilons)
        for (int k : cfg.k_list)
            for (Sign s : signs) {
                SweepRow r;
                r.epsilon = eps;
                r.k = k;
                r.sign = s;
                res.rows.push_back(r);
            }

    detail::parallel_for(res.rows.size(), cfg.threads, [&](std::size_t idx) {
        SweepRow& row = res.rows[idx];
        const double sgn = row.sign == Sign::plus ? 1.0 : -1.0;
        const double mean_s = sgn * res.mean;
        try {
            const auto a_eps = rescale_periodic(base.a, row.epsilon, cfg.segment_cap);
            const auto rho_base_s = row.sign == Sign::plus ? base.rho : base.rho.negated();
            const auto rho_eps_s = rescale_periodic(rho_base_s, row.epsilon, cfg.segment_cap);

            if (mean_s == 0.0) {
                row.lower_bound = divergence_lower_bound(row.epsilon, row.k, p, a_eps, rho_base_s);
            } else if (mean_s < 0.0) {
                row.lower_bound = comparison_shift_bound(row.epsilon, row.k, p, a_eps, rho_base_s);
            } else {
                const double osc = max_oscillation(rho_eps_s);
                row.lower_bound = osc > 0.0 ? std::pow(row.k, p - 1.0) / p * harmonic_mean_star(a_eps, p) / osc
                                            : std::numeric_limits<double>::infinity();
                row.limit = sgn * limit_eigenvalue(res.a_star, mean_s, p, L, row.k);
                row.printed_upper_bound = printed_upper_bound(row.k, p, L, mean_s);
                const auto tf = check_test_functions(row.k, p, res.ramp, a_eps, rho_eps_s, res.a_l1, mean_s);
                row.minmax_upper_bound = tf.minmax_bound;
                if (tf.applicable)
                    row.upper_bound = test_function_upper_bound(row.k, p, L, res.ramp, res.a_l1, mean_s);
            }

            const ProblemSpec spec{base.p, a_eps, rescale_periodic(base.rho, row.epsilon, cfg.segment_cap)};
            row.lambda = eigenvalue(spec, row.k, row.sign, cfg.shooting).lambda;
            if (std::isfinite(row.limit)) row.abs_error = std::abs(row.lambda - row.limit);
        } catch (const Error& e) {
            row.failed = true;
            row.error = e.what();
        }
    });

    for (int k : cfg.k_list) {
        for (Sign s : signs) {
            LadderSummary lad;
            lad.k = k;
            lad.sign = s;
            const double sgn = s == Sign::plus ? 1.0 : -1.0;
            lad.expected = detail::expected_class(sgn * res.mean, s);
            std::vector<double> eps, lam, err;
            for (const auto& r : res.rows) {
                if (r.k != k || r.sign != s || r.failed) continue;
                eps.push_back(r.epsilon);
                lam.push_back(std::abs(r.lambda));
                err.push_back(r.abs_error);
                lad.limit = r.limit;
            }
            lad.observed = "undetermined";
            if (lam.size() >= 2) {
                const double prev = lam[lam.size() - 2];
                const double last = lam.back();
                if (last > 1.5 * prev) lad.observed = "diverges";
                else if (std::abs(last - prev) < 0.05 * last) lad.observed = "converges";
            }
            if (lad.expected == Classification::converges && !err.empty()) {
                lad.rate = fit_rate(eps, err);
                lad.final_relative_error = err.back() / std::abs(lad.limit);
                const std::size_t n = err.size();
                lad.monotone_tail = n >= 3 ? (err[n - 1] <= err[n - 2] && err[n - 2] <= err[n - 3]) : n >= 1;
            }
            lad.consistent = (lad.expected == Classification::converges) == (lad.observed == "converges") &&
                             lad.observed != "undetermined";
            res.ladders.push_back(lad);
        }
    }
    return res;
}

} // namespace plyap
