#pragma once

// Both sides of the Lyapunov-type inequalities for the weighted p-Laplacian
// and its higher-order analogue. A report whose left side exceeds its right
// side certifies that no nontrivial solution exists for the given data.

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "pmath.hpp"
#include "shooting.hpp"
#include "weights.hpp"

namespace plyap {

enum class BoundKind {
    thm_lyapi,
    thm_lyapu,
    classical,
    harris_kong_left,
    harris_kong_right,
    thm_lyapi2,
    thm_lyapimp,
    das_vatsala_reference,
};

inline const char* to_string(BoundKind k) {
    switch (k) {
    case BoundKind::thm_lyapi: return "thm_lyapi";
    case BoundKind::thm_lyapu: return "thm_lyapu";
    case BoundKind::classical: return "classical";
    case BoundKind::harris_kong_left: return "harris_kong_left";
    case BoundKind::harris_kong_right: return "harris_kong_right";
    case BoundKind::thm_lyapi2: return "thm_lyapi2";
    case BoundKind::thm_lyapimp: return "thm_lyapimp";
    case BoundKind::das_vatsala_reference: return "das_vatsala_reference";
    }
    return "unknown";
}

struct BoundReport {
    BoundKind kind = BoundKind::thm_lyapi;
    double lhs = 0.0;
    double rhs = 0.0;
    bool satisfied = false;
    double slack = 0.0; ///< rhs - lhs
    std::vector<std::pair<std::string, double>> inputs;

    /// slack / |rhs|; infinite when rhs = 0.
    double relative_slack() const {
        return rhs != 0.0 ? slack / std::abs(rhs) : (slack >= 0.0 ? 0.0 : -INFINITY);
    }
    const char* verdict() const {
        return satisfied ? "satisfied" : "certifies nonexistence of a nontrivial solution";
    }
};

inline BoundReport make_report(BoundKind kind, double lhs, double rhs,
                               std::vector<std::pair<std::string, double>> inputs) {
    BoundReport r;
    r.kind = kind;
    r.lhs = lhs;
    r.rhs = rhs;
    r.slack = rhs - lhs;
    r.satisfied = lhs <= rhs + 1e-12 * std::max(1.0, std::abs(rhs));
    r.inputs = std::move(inputs);
    return r;
}

namespace detail {

inline double coefficient_term(const PiecewiseWeight& a, double p, double x0, double x1) {
    return std::pow(power_integral(a, -1.0 / (p - 1.0), x0, x1), 1.0 - p);
}

inline double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

inline void require_unit_coefficient(const PiecewiseWeight& a, const char* what) {
    if (!a.is_constant(1.0)) throw UnsupportedCoefficient(std::string(what) + " is stated for a = 1 only");
}

} // namespace detail

/// (1/p) (\int a^{-1/(p-1)})^{1-p} <= sup_x |\int_0^x rho|, for rho with a
/// nontrivial Dirichlet solution of the equation with lambda absorbed into rho.
inline BoundReport bound_lyapi(const ProblemSpec& spec) {
    const double p = spec.p.p();
    const double L = spec.length();
    const double lhs = detail::coefficient_term(spec.a, p, 0.0, L) / p;
    return make_report(BoundKind::thm_lyapi, lhs, sup_abs_primitive(spec.rho), {{"p", p}, {"L", L}});
}

/// The same inequality on a subinterval [x0, x1] with Dirichlet data at both ends,
/// with rho scaled by `scale`: the per-nodal-domain form.
inline BoundReport bound_lyapi_on(const ProblemSpec& spec, double x0, double x1, double scale = 1.0) {
    const double p = spec.p.p();
    const double lhs = detail::coefficient_term(spec.a, p, x0, x1) / p;
    Primitive q(spec.rho);
    const auto e = q.extremes(x0, x1);
    const double q0 = q(x0);
    const double rhs = std::abs(scale) * std::max(std::abs(e.max - q0), std::abs(e.min - q0));
    return make_report(BoundKind::thm_lyapi, lhs, rhs, {{"p", p}, {"x0", x0}, {"x1", x1}, {"scale", scale}});
}

/// (k^{p-1}/p) (\int a^{-1/(p-1)})^{1-p} <= |lambda_k| sup_{(s,t)} |\int_s^t rho|.
/// For the negative ladder the bound is applied to -rho and -lambda.
inline BoundReport bound_lyapu(const ProblemSpec& spec, int k, double lambda_k) {
    if (k < 1) throw DomainError("bound_lyapu: k must be >= 1");
    const double p = spec.p.p();
    const double L = spec.length();
    const double lhs = std::pow(k, p - 1.0) / p * detail::coefficient_term(spec.a, p, 0.0, L);
    const double rhs = std::abs(lambda_k) * max_oscillation(spec.rho);
    return make_report(BoundKind::thm_lyapu, lhs, rhs,
                       {{"p", p}, {"L", L}, {"k", static_cast<double>(k)}, {"lambda", lambda_k}});
}

/// 2^p k^p / L^{p-1} <= |lambda_k| \int rho^{+/-}, with the part matching the sign of lambda.
inline BoundReport bound_classical(const ProblemSpec& spec, int k, double lambda_k) {
    if (k < 1) throw DomainError("bound_classical: k must be >= 1");
    detail::require_unit_coefficient(spec.a, "the classical positive-part bound");
    const double p = spec.p.p();
    const double L = spec.length();
    const double lhs = std::pow(2.0 * k, p) / std::pow(L, p - 1.0);
    const auto parts = split_parts(spec.rho);
    const double mass = lambda_k >= 0.0 ? parts.positive : parts.negative;
    return make_report(BoundKind::classical, lhs, std::abs(lambda_k) * mass,
                       {{"p", p}, {"L", L}, {"k", static_cast<double>(k)}, {"lambda", lambda_k}});
}

/// Mixed-condition bounds: 1 <= L^{p-1} sup_x \int_0^x rho for u'(0) = u(L) = 0 and
/// 1 <= L^{p-1} sup_x \int_x^L rho for u(0) = u'(L) = 0. Signed sups.
inline std::pair<BoundReport, BoundReport> bounds_harris_kong(const ProblemSpec& spec) {
    detail::require_unit_coefficient(spec.a, "the mixed-condition bounds");
    const double p = spec.p.p();
    const double L = spec.length();
    const double factor = std::pow(L, p - 1.0);
    return {make_report(BoundKind::harris_kong_left, 1.0, factor * sup_primitive(spec.rho), {{"p", p}, {"L", L}}),
            make_report(BoundKind::harris_kong_right, 1.0, factor * sup_tail_integral(spec.rho),
                        {{"p", p}, {"L", L}})};
}

/// Left side of the order-2m bound:
/// (m-1)^{p-1} [(m-2)!]^p / (p L^{mp-p}) (\int a^{-1/(p-1)})^{1-p}.
inline double higher_order_constant(int m, double p, const PiecewiseWeight& a) {
    if (m < 2) throw DomainError("the order-2m bound needs m >= 2: its constant contains (m-2)!");
    PExponent e(p);
    const double L = a.length();
    return std::pow(m - 1.0, p - 1.0) * std::pow(detail::factorial(m - 2), p) /
           (p * std::pow(L, m * p - p)) * detail::coefficient_term(a, p, 0.0, L);
}

/// Order-2m bound against the signed sup of the primitive. Reported as
/// thm_lyapi2 for p = 2 with a = 1 and as thm_lyapimp otherwise.
inline BoundReport bound_higher_order(int m, double p, const PiecewiseWeight& a, const PiecewiseWeight& rho) {
    if (std::abs(a.length() - rho.length()) > 1e-12 * rho.length())
        throw DomainError("bound_higher_order: coefficient and weight live on different intervals");
    const double lhs = higher_order_constant(m, p, a);
    const auto kind = (p == 2.0 && a.is_constant(1.0)) ? BoundKind::thm_lyapi2 : BoundKind::thm_lyapimp;
    return make_report(kind, lhs, sup_primitive(rho), {{"m", static_cast<double>(m)}, {"p", p}, {"L", rho.length()}});
}

/// 2 4^{2m-1} (2m-1) [(m-2)!]^2 / (2 L^{2m-1}); reference constant for p = 2, a = 1, rho >= 0.
inline double das_vatsala_constant(int m, double L) {
    if (m < 2) throw DomainError("das_vatsala_constant needs m >= 2: it contains (m-2)!");
    if (!(L > 0.0)) throw DomainError("das_vatsala_constant: L must be positive");
    const double f = detail::factorial(m - 2);
    return 2.0 * std::pow(4.0, 2 * m - 1) * (2 * m - 1) * f * f / (2.0 * std::pow(L, 2 * m - 1));
}

/// The reference constant against \int rho^+, for comparison only.
inline BoundReport das_vatsala_report(int m, const PiecewiseWeight& rho) {
    const double L = rho.length();
    return make_report(BoundKind::das_vatsala_reference, das_vatsala_constant(m, L), positive_mass(rho),
                       {{"m", static_cast<double>(m)}, {"L", L}});
}

/// C in ||u||_inf <= C (\int a |u^{(m)}|^p)^{1/p} for u vanishing to order m at 0:
/// C = L^{m-1}/(m-1)! (\int a^{-1/(p-1)})^{(p-1)/p}.
inline double taylor_embedding_constant(int m, double p, const PiecewiseWeight& a) {
    if (m < 1) throw DomainError("taylor_embedding_constant: m must be >= 1");
    PExponent e(p);
    const double L = a.length();
    return std::pow(L, m - 1) / detail::factorial(m - 1) *
           std::pow(power_integral(a, -1.0 / (p - 1.0)), (p - 1.0) / p);
}

} // namespace plyap
