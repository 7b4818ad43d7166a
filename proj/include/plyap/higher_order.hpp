#pragma once

// p = 2 solutions of the clamped 2m-th order problem
//
//     (-1)^m u^{(2m)} = lambda rho u,   u^{(j)}(0) = u^{(j)}(L) = 0,  0 <= j <= m-1,
//
// on a uniform mesh. The operator is D^T D / h^{2m} where D is the m-th forward
// difference acting on the unknowns padded with m zeros at each end; the zero
// blocks straddle the endpoints and impose the clamped conditions. The result
// is the banded Toeplitz matrix of the central 2m-th difference, truncated at
// the edges. With n unknowns, h = L / (n + m) and node i (1-based) sits at
// (i + (m - 1)/2) h. For m = 1 this is the usual (2, -1) matrix on h = L/(n+1).

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "errors.hpp"
#include "lyapunov.hpp"
#include "weights.hpp"

namespace plyap {

struct BeamProblem {
    int m = 2;
    double L = 1.0;
    PiecewiseWeight rho;
    int n = 400; ///< interior unknowns

    void validate() const {
        if (m < 1) throw DomainError("beam: m must be >= 1");
        if (!(L > 0.0)) throw DomainError("beam: L must be positive");
        if (n < 8 * m) throw DomainError("beam: need n >= 8m interior nodes");
        if (std::abs(rho.length() - L) > 1e-12 * L) throw DomainError("beam: weight domain differs from [0, L]");
    }
};

/// Dense symmetric matrix, row-major.
struct Matrix {
    int n = 0;
    std::vector<double> data;

    Matrix() = default;
    explicit Matrix(int size) : n(size), data(static_cast<std::size_t>(size) * size, 0.0) {}

    double& operator()(int i, int j) { return data[static_cast<std::size_t>(i) * n + j]; }
    double operator()(int i, int j) const { return data[static_cast<std::size_t>(i) * n + j]; }
};

struct DensePencil {
    Matrix A;               ///< symmetric positive definite
    std::vector<double> B;  ///< diagonal of B: rho at the nodes
    std::vector<double> nodes;
    double h = 0.0;
    int m = 1;
};

/// Coefficients of the m-th forward difference: (-1)^{m-j} C(m, j).
inline std::vector<double> difference_stencil(int m) {
    std::vector<double> c(static_cast<std::size_t>(m) + 1);
    double binom = 1.0;
    for (int j = 0; j <= m; ++j) {
        c[static_cast<std::size_t>(j)] = ((m - j) % 2 == 0 ? 1.0 : -1.0) * binom;
        binom = binom * (m - j) / (j + 1);
    }
    return c;
}

inline DensePencil assemble(const BeamProblem& bp) {
    bp.validate();
    const int n = bp.n;
    const int m = bp.m;
    DensePencil out;
    out.m = m;
    out.h = bp.L / (n + m);
    out.A = Matrix(n);
    const auto c = difference_stencil(m);
    const double scale = std::pow(out.h, -2 * m);
    for (int d = 0; d <= m; ++d) {
        double t = 0.0;
        for (int j = 0; j + d <= m; ++j) t += c[static_cast<std::size_t>(j)] * c[static_cast<std::size_t>(j + d)];
        for (int i = 0; i + d < n; ++i) {
            out.A(i, i + d) = t * scale;
            out.A(i + d, i) = t * scale;
        }
    }
    out.nodes.resize(static_cast<std::size_t>(n));
    out.B.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double x = (i + 1 + 0.5 * (m - 1)) * out.h;
        out.nodes[static_cast<std::size_t>(i)] = x;
        out.B[static_cast<std::size_t>(i)] = bp.rho.value(x);
    }
    return out;
}

/// Upper triangular R with A = R^T R.
inline Matrix cholesky(const Matrix& A) {
    const int n = A.n;
    Matrix R(n);
    for (int j = 0; j < n; ++j) {
        double d = A(j, j);
        for (int k = 0; k < j; ++k) d -= R(k, j) * R(k, j);
        if (!(d > 0.0)) throw DomainError("cholesky: matrix is not positive definite (pivot " + std::to_string(j) + ")");
        const double rjj = std::sqrt(d);
        R(j, j) = rjj;
        for (int i = j + 1; i < n; ++i) {
            double s = A(j, i);
            for (int k = 0; k < j; ++k) s -= R(k, j) * R(k, i);
            R(j, i) = s / rjj;
        }
    }
    return R;
}

/// Inverse of an upper triangular matrix.
inline Matrix upper_inverse(const Matrix& R) {
    const int n = R.n;
    Matrix M(n);
    for (int j = n - 1; j >= 0; --j) {
        M(j, j) = 1.0 / R(j, j);
        for (int i = j - 1; i >= 0; --i) {
            double s = 0.0;
            for (int k = i + 1; k <= j; ++k) s += R(i, k) * M(k, j);
            M(i, j) = -s / R(i, i);
        }
    }
    return M;
}

struct SymmetricEigen {
    std::vector<double> values;
    Matrix vectors; ///< column j is the eigenvector of values[j]
    int sweeps = 0;
};

/// Cyclic Jacobi rotations until the off-diagonal Frobenius norm is at most
/// tol times the Frobenius norm of the matrix.
inline SymmetricEigen jacobi_eigen(Matrix C, double tol = 1e-12, int max_sweeps = 100) {
    const int n = C.n;
    Matrix V(n);
    for (int i = 0; i < n; ++i) V(i, i) = 1.0;
    double total = 0.0;
    for (double v : C.data) total += v * v;
    total = std::sqrt(total);

    auto off_norm = [&] {
        double s = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) s += 2.0 * C(i, j) * C(i, j);
        return std::sqrt(s);
    };

    SymmetricEigen out;
    while (off_norm() > tol * total) {
        if (out.sweeps++ >= max_sweeps) throw ResourceError("jacobi_eigen: sweep budget exhausted", max_sweeps);
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = C(p, q);
                if (apq == 0.0) continue;
                const double app = C(p, p);
                const double aqq = C(q, q);
                const double theta = (aqq - app) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double ckp = C(k, p);
                    const double ckq = C(k, q);
                    C(k, p) = c * ckp - s * ckq;
                    C(k, q) = s * ckp + c * ckq;
                }
                for (int k = 0; k < n; ++k) {
                    const double cpk = C(p, k);
                    const double cqk = C(q, k);
                    C(p, k) = c * cpk - s * cqk;
                    C(q, k) = s * cpk + c * cqk;
                }
                C(p, q) = 0.0;
                C(q, p) = 0.0;
                for (int k = 0; k < n; ++k) {
                    const double vkp = V(k, p);
                    const double vkq = V(k, q);
                    V(k, p) = c * vkp - s * vkq;
                    V(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
    out.values.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out.values[static_cast<std::size_t>(i)] = C(i, i);
    out.vectors = std::move(V);
    return out;
}

/// The pencil reduced to a standard symmetric problem: with A = R^T R and
/// M = R^{-1}, C = M^T B M has eigenvalues mu = 1/lambda.
struct ReducedPencil {
    Matrix M;
    SymmetricEigen eigen;
};

inline ReducedPencil reduce(const DensePencil& pencil) {
    const int n = pencil.A.n;
    if (static_cast<int>(pencil.B.size()) != n) throw DomainError("pencil: B has the wrong size");
    ReducedPencil out;
    out.M = upper_inverse(cholesky(pencil.A));
    const Matrix& M = out.M;
    Matrix C(n);
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            double s = 0.0;
            for (int k = 0; k <= std::min(i, j); ++k) s += M(k, i) * pencil.B[static_cast<std::size_t>(k)] * M(k, j);
            C(i, j) = s;
            C(j, i) = s;
        }
    }
    out.eigen = jacobi_eigen(std::move(C));
    return out;
}

/// All finite eigenvalues lambda = 1/mu of A u = lambda B u, ascending.
inline std::vector<double> pencil_spectrum(const DensePencil& pencil) {
    auto red = reduce(pencil);
    double scale = 0.0;
    for (double mu : red.eigen.values) scale = std::max(scale, std::abs(mu));
    std::vector<double> out;
    for (double mu : red.eigen.values)
        if (std::abs(mu) > 1e-13 * scale) out.push_back(1.0 / mu);
    std::sort(out.begin(), out.end());
    return out;
}

struct BeamEigen {
    double lambda = 0.0;
    std::vector<double> nodes;
    std::vector<double> u; ///< max |u| = 1, positive at the maximum
};

inline BeamEigen smallest_positive_eigenvalue(const DensePencil& pencil) {
    if (std::none_of(pencil.B.begin(), pencil.B.end(), [](double b) { return b > 0.0; }))
        throw NoEigenvalue("beam: weight has no positive node value, no positive eigenvalue exists");
    auto red = reduce(pencil);
    const auto& vals = red.eigen.values;
    const int n = pencil.A.n;
    double scale = 0.0;
    for (double mu : vals) scale = std::max(scale, std::abs(mu));
    int best = -1;
    for (int i = 0; i < n; ++i)
        if (vals[static_cast<std::size_t>(i)] > 1e-13 * scale &&
            (best < 0 || vals[static_cast<std::size_t>(i)] > vals[static_cast<std::size_t>(best)]))
            best = i;
    if (best < 0) throw NoEigenvalue("beam: reduced pencil has no positive eigenvalue");

    BeamEigen out;
    out.lambda = 1.0 / vals[static_cast<std::size_t>(best)];
    out.nodes = pencil.nodes;
    out.u.assign(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int k = i; k < n; ++k) s += red.M(i, k) * red.eigen.vectors(k, best);
        out.u[static_cast<std::size_t>(i)] = s;
    }
    double peak = 0.0;
    for (double v : out.u)
        if (std::abs(v) > std::abs(peak)) peak = v;
    for (double& v : out.u) v /= peak;
    return out;
}

/// Makes lambda_1 rho the solution weight and checks the order-2m bound with
/// p = 2, a = 1 against it; lambda_1 is the smallest positive eigenvalue of bp.
inline BoundReport verify_lyapi2(const BeamProblem& bp, double lambda1) {
    if (bp.m < 2) throw DomainError("verify_lyapi2 needs m >= 2: the constant contains (m-2)!");
    if (!(lambda1 > 0.0)) throw DomainError("verify_lyapi2: lambda_1 must be positive");
    auto report = bound_higher_order(bp.m, 2.0, PiecewiseWeight::constant(bp.L, 1.0), bp.rho.scaled(lambda1));
    report.inputs.emplace_back("lambda", lambda1);
    report.inputs.emplace_back("n", static_cast<double>(bp.n));
    return report;
}

inline BoundReport verify_lyapi2(const BeamProblem& bp) {
    if (bp.m < 2) throw DomainError("verify_lyapi2 needs m >= 2: the constant contains (m-2)!");
    return verify_lyapi2(bp, smallest_positive_eigenvalue(assemble(bp)).lambda);
}

} // namespace plyap
