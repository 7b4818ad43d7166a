#pragma once

// Eigenvalue ladders of -(a |u'|^{p-2} u')' = lambda rho |u|^{p-2} u, u(0) = u(L) = 0,
// for sign-changing rho, by shooting on the first-order system
//
//     u' = a^{-1/(p-1)} phi_q(v),   v' = -lambda rho phi_p(u),   v = a phi_p(u'),
//
// with zero counting. For lambda > 0 the number of sign changes of u on (0, L]
// is nondecreasing in lambda, and lambda_k^+ is where it steps from k-1 to k.
// The step is isolated by bisection on the count and then refined on the
// scale-free mismatch u(L) / (|u(L)| + |phi_q(v(L))|).

#include <boost/math/tools/toms748_solve.hpp>

#include <algorithm>
#include <cmath>
#include <concepts>
#include <limits>
#include <cstdint>
#include <string>
#include <type_traits>
#include <vector>

#include "errors.hpp"
#include "ode.hpp"
#include "pmath.hpp"
#include "sampled_weight.hpp"
#include "weights.hpp"

namespace plyap {

enum class Sign { plus, minus };

inline const char* to_string(Sign s) { return s == Sign::plus ? "+" : "-"; }

/// Anything the solver can use as a coefficient or a weight.
template <class W>
concept WeightFunction = requires(const W& w, double x) {
    { w.length() } -> std::convertible_to<double>;
    { w.value(x) } -> std::convertible_to<double>;
    { w.breakpoints() } -> std::same_as<std::vector<double>>;
    { w.local(x, x)(x) } -> std::convertible_to<double>;
    { w.negated() } -> std::same_as<W>;
    { positive_mass(w) } -> std::convertible_to<double>;
};

template <WeightFunction Coef = PiecewiseWeight, WeightFunction Dens = PiecewiseWeight>
struct Problem {
    PExponent p;
    Coef a;
    Dens rho;

    double length() const { return rho.length(); }
};

using ProblemSpec = Problem<PiecewiseWeight, PiecewiseWeight>;

/// Validated constructor: equal domains, a bounded below by a positive constant.
inline ProblemSpec make_problem(double p, PiecewiseWeight a, PiecewiseWeight rho) {
    PExponent e(p);
    if (std::abs(a.length() - rho.length()) > 1e-12 * rho.length())
        throw DomainError("coefficient and weight live on different intervals");
    if (!(a.min_value() > 0.0)) throw DomainError("coefficient a must be bounded below by a positive constant");
    return ProblemSpec{e, std::move(a), std::move(rho)};
}

struct Sample {
    double x = 0.0;
    double u = 0.0;
};

struct IvpOptions {
    double tol = 0.0;            ///< local error tolerance; 0 picks the default for p
    double sample_spacing = 0.0; ///< 0 disables sampling
    double residual_tol = 1e-8;  ///< |u(L)| <= residual_tol * max|u| counts x = L as a zero
};

struct IvpResult {
    double u_end = 0.0;
    double v_end = 0.0;
    int zero_count = 0;   ///< zeros in [0, L]: x = 0, interior sign changes, x = L if |u(L)| is within tolerance
    int sign_changes = 0; ///< raw sign changes of u on (0, L]
    std::vector<double> zeros;
    std::vector<Sample> samples;
    double u_max = 0.0;
    long steps = 0;
};

/// 1e-10, widened to 1e-8 below p = 1.5 where phi_p is non-Lipschitz at the nodes.
inline double default_tolerance(double p) { return p < 1.5 ? 1e-8 : 1e-10; }

namespace detail {

inline std::vector<double> merged_breakpoints(std::vector<double> a, const std::vector<double>& b, double L) {
    a.insert(a.end(), b.begin(), b.end());
    std::sort(a.begin(), a.end());
    std::vector<double> out;
    for (double x : a) {
        if (x < 0.0 || x > L * (1 + 1e-12)) continue;
        if (out.empty() || x - out.back() > 1e-13 * L) out.push_back(x);
    }
    out.back() = L;
    if (out.front() != 0.0) out.insert(out.begin(), 0.0);
    return out;
}

/// Sample grid: uniform inside every breakpoint interval, spacing <= h, breakpoints included.
inline std::vector<double> sample_grid(const std::vector<double>& cuts, double h) {
    std::vector<double> out{cuts.front()};
    for (std::size_t j = 0; j + 1 < cuts.size(); ++j) {
        double x0 = cuts[j], x1 = cuts[j + 1];
        auto m = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil((x1 - x0) / h - 1e-9)));
        for (std::int64_t i = 1; i <= m; ++i) {
            out.push_back(i == m ? x1 : x0 + (x1 - x0) * static_cast<double>(i) / static_cast<double>(m));
        }
    }
    return out;
}

/// A sample of the scale-covariant pair (u, w), w = phi_q(v) = a^{1/(p-1)} u'.
/// Under the symmetry (u, v) -> (s u, s^{p-1} v) both entries scale by s.
struct StateSample {
    double x = 0.0;
    double u = 0.0;
    double w = 0.0;
};

struct Trajectory {
    double u_end = 0.0;
    double w_end = 0.0; ///< in the original orientation
    double v_end = 0.0; ///< in the integration orientation
    int sign_changes = 0;
    std::vector<double> zeros; ///< located sign changes, in original coordinates, in integration order
    std::vector<StateSample> samples;
    double u_max = 0.0;
    long steps = 0;
};

/// Integrates u(start) = 0, v(start) = 1 from x = 0 (forward) or x = L
/// (backward) up to x_stop. Backward integration runs the reflected problem
/// in t = L - x, where the flux changes sign. Samples are taken at `grid`
/// points (ascending, in original coordinates) that the sweep passes.
template <class C, class D>
Trajectory sweep(const Problem<C, D>& spec, double lambda, double tol, bool backward, double x_stop,
                 const std::vector<double>& cuts, const std::vector<double>* grid) {
    const double L = spec.length();
    const double p = spec.p.p();
    const double q = spec.p.q();
    const double inv = spec.p.inv_pm1();
    const double t_stop = backward ? L - x_stop : x_stop;

    std::vector<double> tcuts;
    if (!backward) {
        for (double c : cuts)
            if (c < t_stop) tcuts.push_back(c);
    } else {
        for (auto it = cuts.rbegin(); it != cuts.rend(); ++it)
            if (L - *it < t_stop) tcuts.push_back(L - *it);
        tcuts.front() = 0.0;
    }
    tcuts.push_back(t_stop);

    Trajectory out;
    std::vector<double> tgrid, xgrid;
    if (grid) {
        if (!backward) {
            for (double x : *grid)
                if (x <= x_stop * (1 + 1e-14)) xgrid.push_back(x);
            tgrid = xgrid;
        } else {
            for (auto it = grid->rbegin(); it != grid->rend(); ++it)
                if (*it >= x_stop * (1 - 1e-14)) {
                    xgrid.push_back(*it);
                    tgrid.push_back(L - *it);
                }
        }
        out.samples.reserve(xgrid.size());
    }
    std::size_t next_sample = 0;
    const double wsign = backward ? -1.0 : 1.0;
    if (!tgrid.empty() && tgrid.front() <= 0.0) {
        out.samples.push_back({xgrid.front(), 0.0, wsign});
        next_sample = 1;
    }

    ode::DormandPrince dp(0.0, {0.0, 1.0}, tol, L);
    int last_sign = 0;

    for (std::size_t j = 0; j + 1 < tcuts.size(); ++j) {
        const double t0 = tcuts[j];
        const double t1 = tcuts[j + 1];
        if (!(t1 > t0)) continue;
        const double xa = backward ? L - t1 : t0;
        const double xb = backward ? L - t0 : t1;
        const auto av = spec.a.local(xa, xb);
        const auto rv = spec.rho.local(xa, xb);
        double const_coef = std::numeric_limits<double>::quiet_NaN();
        if constexpr (std::is_same_v<C, PiecewiseWeight>) {
            if (const auto* c = std::get_if<Constant>(&av.segment().shape)) const_coef = std::pow(c->value, -inv);
        }
        auto rhs = [&](double t, const ode::State& y) -> ode::State {
            const double x = backward ? L - t : t;
            double c = std::isnan(const_coef) ? (p == 2.0 ? 1.0 / av(x) : std::pow(av(x), -inv)) : const_coef;
            return {c * phi_p(y[1], q), -lambda * rv(x) * phi_p(y[0], p)};
        };
        auto on_step = [&](const ode::DenseStep& d) {
            const double t_end = d.x1();
            while (next_sample < tgrid.size() && tgrid[next_sample] <= t_end * (1 + 1e-14) + 1e-300) {
                const double ts = std::min(tgrid[next_sample], t_end);
                const double us = d.component(ts, 0);
                const double ws = wsign * phi_p(d.component(ts, 1), q);
                out.samples.push_back({xgrid[next_sample], us, ws});
                out.u_max = std::max(out.u_max, std::abs(us));
                ++next_sample;
            }
            const double u1 = d.r1[0] + d.r2[0];
            out.u_max = std::max(out.u_max, std::abs(u1));
            const int s1 = (u1 > 0.0) - (u1 < 0.0);
            if (s1 != 0 && last_sign != 0 && s1 != last_sign) {
                ++out.sign_changes;
                double lo = d.x0, hi = t_end;
                for (int it = 0; it < 200 && hi - lo > 1e-12 * L; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    const double um = d.component(mid, 0);
                    if (((um > 0.0) - (um < 0.0)) == last_sign) lo = mid;
                    else hi = mid;
                }
                const double tz = 0.5 * (lo + hi);
                out.zeros.push_back(backward ? L - tz : tz);
            }
            if (s1 != 0) last_sign = s1;

            const auto& y = dp.state();
            const double mag = std::max(std::abs(y[0]), std::abs(phi_p(y[1], q)));
            if (mag > 1e100 || (mag < 1e-100 && mag > 0.0)) {
                const double s = 1.0 / mag;
                dp.rescale(s, std::pow(s, p - 1.0));
                for (auto& smp : out.samples) {
                    smp.u *= s;
                    smp.w *= s;
                }
                out.u_max *= s;
            }
        };
        dp.advance(rhs, t1, on_step);
    }

    out.u_end = dp.state()[0];
    out.v_end = dp.state()[1];
    out.w_end = wsign * phi_p(out.v_end, q);
    out.steps = dp.steps();
    return out;
}

} // namespace detail

/// Integrates the initial value problem u(0) = 0, v(0) = 1 across [0, L],
/// restarting at every breakpoint of a and rho.
template <class C, class D>
IvpResult integrate_ivp(const Problem<C, D>& spec, double lambda, const IvpOptions& opt = {}) {
    const double L = spec.length();
    const double tol = opt.tol > 0.0 ? opt.tol : default_tolerance(spec.p.p());
    const auto cuts = detail::merged_breakpoints(spec.a.breakpoints(), spec.rho.breakpoints(), L);
    std::vector<double> grid;
    if (opt.sample_spacing > 0.0) grid = detail::sample_grid(cuts, opt.sample_spacing);

    auto tr = detail::sweep(spec, lambda, tol, false, L, cuts, grid.empty() ? nullptr : &grid);
    IvpResult out;
    out.u_end = tr.u_end;
    out.v_end = tr.v_end;
    out.sign_changes = tr.sign_changes;
    out.u_max = tr.u_max;
    out.steps = tr.steps;
    out.zeros = std::move(tr.zeros);
    out.samples.reserve(tr.samples.size());
    for (const auto& s : tr.samples) out.samples.push_back({s.x, s.u});

    const bool end_is_zero = std::abs(out.u_end) <= opt.residual_tol * out.u_max;
    if (end_is_zero && !out.zeros.empty() && out.zeros.back() > L * (1.0 - 1e-8)) out.zeros.pop_back();
    out.zero_count = 1 + static_cast<int>(out.zeros.size()) + (end_is_zero ? 1 : 0);
    out.zeros.insert(out.zeros.begin(), 0.0);
    if (end_is_zero) out.zeros.push_back(L);
    return out;
}

struct EigenPair {
    double lambda = 0.0;
    Sign sign = Sign::plus;
    int k = 0;
    int nodal_count = 0;
    std::vector<Sample> samples; ///< max |u| = 1, u'(0) > 0
    std::vector<double> zeros;   ///< all k+1 zeros, including 0 and L
    /// |u(L)| / max|u| for a single forward sweep; for a two-sided solve, the
    /// angular defect |sin| between the two sweeps at the matching point.
    double terminal_residual = 0.0;
    bool two_sided = false;
    double matching_point = 0.0;
    int ivp_solves = 0;
};

struct ShootingOptions {
    double tol = 0.0;                  ///< 0 picks default_tolerance(p)
    double lambda_max = 1e13;          ///< bracket expansion cap
    int samples = 2048;                ///< sample spacing is L / samples
    double residual_tol = 1e-8;
    int max_bisections = 400;
};

/// (k pi_p / \int (rho^+/-)^{1/p})^p with the factor k restored; the magnitude
/// of the asymptotic value of lambda_k^+/-. Only for a = 1.
inline double weyl_estimate(const ProblemSpec& spec, int k, Sign sign) {
    if (k < 1) throw DomainError("weyl_estimate: k must be >= 1");
    if (!spec.a.is_constant(1.0)) throw DomainError("weyl_estimate requires a = 1");
    const double p = spec.p.p();
    double mass = root_integral(spec.rho, p, sign == Sign::plus);
    if (!(mass > 0.0)) throw DomainError("weyl_estimate: weight has no part of the requested sign");
    return std::pow(k * pi_p(p) / mass, p);
}

namespace detail {

inline double angle_defect(double u1, double w1, double u2, double w2) {
    const double n = std::hypot(u1, w1) * std::hypot(u2, w2);
    return n > 0.0 ? (u1 * w2 - u2 * w1) / n : 0.0;
}

/// Sign-changing weights make single-direction shooting lose the eigenfunction
/// wherever it decays through a region with rho < 0: the growing mode swamps
/// it at rate exp(sqrt(lambda |rho|) x). The cure is to integrate both ends
/// towards a matching point inside the region the two sweeps agree on.
template <class C, class D>
EigenPair two_sided(const Problem<C, D>& spec, int k, double lo, double hi, double guess, double tol,
                    const std::vector<double>& cuts, const std::vector<double>& grid, int& solves) {
    const double L = spec.length();

    auto fwd = sweep(spec, guess, tol, false, L, cuts, &grid);
    auto bwd = sweep(spec, guess, tol, true, 0.0, cuts, &grid);
    solves += 2;
    // both sample the same grid; bwd is stored in descending x
    const std::size_t n = fwd.samples.size();
    double best = std::numeric_limits<double>::infinity();
    double xm = 0.5 * L;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const auto& f = fwd.samples[i];
        const auto& b = bwd.samples[n - 1 - i];
        const double d = std::abs(angle_defect(f.u, f.w, b.u, b.w));
        if (d < best) {
            best = d;
            xm = f.x;
        }
    }

    auto defect = [&](double lambda) {
        auto l = sweep(spec, lambda, tol, false, xm, cuts, nullptr);
        auto r = sweep(spec, lambda, tol, true, xm, cuts, nullptr);
        solves += 2;
        return angle_defect(l.u_end, l.w_end, r.u_end, r.w_end);
    };
    double flo = defect(lo);
    double fhi = defect(hi);
    double root = guess;
    if (flo == 0.0) {
        root = lo;
    } else if (fhi == 0.0) {
        root = hi;
    } else if ((flo > 0.0) != (fhi > 0.0)) {
        std::uintmax_t iters = 200;
        auto br = boost::math::tools::toms748_solve(defect, lo, hi, flo, fhi,
                                                    boost::math::tools::eps_tolerance<double>(50), iters);
        root = 0.5 * (br.first + br.second);
    }

    auto l = sweep(spec, root, tol, false, xm, cuts, &grid);
    auto r = sweep(spec, root, tol, true, xm, cuts, &grid);
    solves += 2;
    const double s = (l.u_end * r.u_end + l.w_end * r.w_end) / (r.u_end * r.u_end + r.w_end * r.w_end);

    EigenPair e;
    e.lambda = root;
    e.k = k;
    e.two_sided = true;
    e.matching_point = xm;
    e.terminal_residual = std::abs(angle_defect(l.u_end, l.w_end, r.u_end, r.w_end));
    for (const auto& smp : l.samples) e.samples.push_back({smp.x, smp.u});
    if (!e.samples.empty() && !r.samples.empty() && r.samples.back().x <= e.samples.back().x) r.samples.pop_back();
    for (auto it = r.samples.rbegin(); it != r.samples.rend(); ++it) e.samples.push_back({it->x, s * it->u});
    e.zeros.push_back(0.0);
    e.zeros.insert(e.zeros.end(), l.zeros.begin(), l.zeros.end());
    e.zeros.insert(e.zeros.end(), r.zeros.rbegin(), r.zeros.rend());
    e.zeros.push_back(L);
    e.nodal_count = static_cast<int>(e.zeros.size());
    double scale = 0.0;
    for (const auto& smp : e.samples) scale = std::max(scale, std::abs(smp.u));
    for (auto& smp : e.samples) smp.u /= scale;
    return e;
}

} // namespace detail

template <class C, class D>
EigenPair eigenvalue(const Problem<C, D>& spec, int k, Sign sign, const ShootingOptions& opt = {}) {
    if (k < 1) throw DomainError("eigenvalue: k must be >= 1");
    if (sign == Sign::minus) {
        Problem<C, D> flipped{spec.p, spec.a, spec.rho.negated()};
        EigenPair e = eigenvalue(flipped, k, Sign::plus, opt);
        e.lambda = -e.lambda;
        e.sign = Sign::minus;
        return e;
    }
    if (!(positive_mass(spec.rho) > 0.0)) {
        throw NoEigenvalue("weight has no positive part: the admissible class {\\int rho |u|^p > 0} is empty");
    }

    const double L = spec.length();
    const double q = spec.p.q();
    const double tol = opt.tol > 0.0 ? opt.tol : default_tolerance(spec.p.p());
    const auto cuts = detail::merged_breakpoints(spec.a.breakpoints(), spec.rho.breakpoints(), L);
    int solves = 0;

    struct Probe {
        double lambda;
        int count;
        double mismatch;
    };
    auto probe = [&](double lambda) {
        ++solves;
        auto r = detail::sweep(spec, lambda, tol, false, L, cuts, nullptr);
        double denom = std::abs(r.u_end) + std::abs(phi_p(r.v_end, q));
        return Probe{lambda, r.sign_changes, denom > 0.0 ? r.u_end / denom : 0.0};
    };

    double start = 1.0;
    if constexpr (std::is_same_v<C, PiecewiseWeight> && std::is_same_v<D, PiecewiseWeight>) {
        if (spec.a.is_constant(1.0)) {
            try {
                start = weyl_estimate(spec, k, Sign::plus) / 4.0;
            } catch (const DomainError&) {
                start = 1.0;
            }
        }
    }

    Probe lo = probe(start);
    Probe hi = lo;
    if (lo.count >= k) {
        while (lo.count >= k) {
            hi = lo;
            if (lo.lambda < 1e-280) throw SearchError("eigenvalue: could not find a lower bracket");
            lo = probe(lo.lambda / 2.0);
        }
    } else {
        hi = probe(2.0 * start);
        while (hi.count < k) {
            lo = hi;
            if (hi.lambda * 2.0 > opt.lambda_max) {
                throw SearchError("eigenvalue: bracket expansion exceeded lambda_max = " +
                                  std::to_string(opt.lambda_max) + " for k = " + std::to_string(k));
            }
            hi = probe(hi.lambda * 2.0);
        }
    }

    for (int it = 0; !(lo.count == k - 1 && hi.count == k); ++it) {
        if (it >= opt.max_bisections || hi.lambda - lo.lambda <= 1e-15 * hi.lambda) {
            throw SearchError("eigenvalue: could not isolate lambda_" + std::to_string(k) + " (counts " +
                              std::to_string(lo.count) + ", " + std::to_string(hi.count) + " at [" +
                              std::to_string(lo.lambda) + ", " + std::to_string(hi.lambda) + "])");
        }
        double mid = hi.lambda > 4.0 * lo.lambda ? std::sqrt(lo.lambda * hi.lambda) : 0.5 * (lo.lambda + hi.lambda);
        Probe m = probe(mid);
        if (m.count >= k) hi = m;
        else lo = m;
    }

    double root = 0.0;
    if (lo.mismatch == 0.0) {
        root = lo.lambda;
    } else if (hi.mismatch == 0.0) {
        root = hi.lambda;
    } else if ((lo.mismatch > 0.0) == (hi.mismatch > 0.0)) {
        throw SearchError("eigenvalue: boundary mismatch does not change sign across the isolating bracket");
    } else {
        auto f = [&](double lambda) { return probe(lambda).mismatch; };
        std::uintmax_t iters = 200;
        auto bracket = boost::math::tools::toms748_solve(f, lo.lambda, hi.lambda, lo.mismatch, hi.mismatch,
                                                         boost::math::tools::eps_tolerance<double>(50), iters);
        root = 0.5 * (bracket.first + bracket.second);
    }

    IvpOptions final_opt;
    final_opt.tol = tol;
    final_opt.residual_tol = opt.residual_tol;
    final_opt.sample_spacing = L / std::max(opt.samples, 16);
    auto r = integrate_ivp(spec, root, final_opt);
    ++solves;

    EigenPair e;
    double scale = 0.0;
    for (const auto& s : r.samples) scale = std::max(scale, std::abs(s.u));
    scale = std::max(scale, r.u_max);
    if (r.zero_count == k + 1 && std::abs(r.u_end) / scale <= opt.residual_tol) {
        e.lambda = root;
        e.k = k;
        e.nodal_count = r.zero_count;
        e.zeros = std::move(r.zeros);
        for (auto& s : r.samples) s.u /= scale;
        e.samples = std::move(r.samples);
        e.terminal_residual = std::abs(r.u_end) / scale;
    } else {
        const auto grid = detail::sample_grid(cuts, final_opt.sample_spacing);
        e = detail::two_sided(spec, k, lo.lambda, hi.lambda, root, tol, cuts, grid, solves);
        if (e.nodal_count != k + 1 || !(e.terminal_residual <= opt.residual_tol)) {
            throw SearchError("eigenvalue: lambda = " + std::to_string(e.lambda) + " has " +
                              std::to_string(e.nodal_count) + " zeros (expected " + std::to_string(k + 1) +
                              ") and matching defect " + std::to_string(e.terminal_residual));
        }
    }
    e.sign = Sign::plus;
    e.ivp_solves = solves;
    return e;
}

/// \int a |u'|^p / \int rho |u|^p on a sample grid: u' by the centred difference
/// at each cell midpoint, both integrals by the midpoint rule.
template <class C, class D>
double rayleigh_quotient(const Problem<C, D>& spec, const std::vector<Sample>& samples) {
    if (samples.size() < 3) throw DomainError("rayleigh_quotient: need at least 3 samples");
    const double p = spec.p.p();
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
        const double h = samples[i + 1].x - samples[i].x;
        if (h <= 0.0) continue;
        const double xm = 0.5 * (samples[i].x + samples[i + 1].x);
        const double du = (samples[i + 1].u - samples[i].u) / h;
        const double um = 0.5 * (samples[i].u + samples[i + 1].u);
        num += spec.a.value(xm) * std::pow(std::abs(du), p) * h;
        den += spec.rho.value(xm) * std::pow(std::abs(um), p) * h;
    }
    if (std::abs(den) < 1e-12) throw DegenerateDenominator("rayleigh_quotient: \\int rho |u|^p vanishes");
    return num / den;
}

} // namespace plyap
