// Independent oracle implementations for the test suite. Everything here is
// deliberately written on a different algebraic route than the library:
// characteristic-polynomial eigenvalues, quadrature tail probabilities, and
// the fully reduced diagonal-case moment formulas.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "coda/matrix.hpp"

namespace oracle {

// Eigenvalues of a symmetric 2x2 [[a, b], [b, c]] via the quadratic formula,
// descending.
inline std::array<double, 2> sym2_eigvals(double a, double b, double c) {
    const double tr = a + c;
    const double disc = std::sqrt((a - c) * (a - c) + 4.0 * b * b);
    return {0.5 * (tr + disc), 0.5 * (tr - disc)};
}

// Eigenvalues of a symmetric 3x3 via the trigonometric solution of the
// characteristic cubic, descending.
// https://en.wikipedia.org/wiki/Eigenvalue_algorithm#3.C3.973_matrices
inline std::array<double, 3> sym3_eigvals(const coda::Matrix& m) {
    const double p1 = m(0, 1) * m(0, 1) + m(0, 2) * m(0, 2) + m(1, 2) * m(1, 2);
    if (p1 == 0.0) {
        std::array<double, 3> d{m(0, 0), m(1, 1), m(2, 2)};
        std::sort(d.begin(), d.end(), std::greater<>());
        return d;
    }
    const double q = (m(0, 0) + m(1, 1) + m(2, 2)) / 3.0;
    const double p2 = (m(0, 0) - q) * (m(0, 0) - q) + (m(1, 1) - q) * (m(1, 1) - q) +
                      (m(2, 2) - q) * (m(2, 2) - q) + 2.0 * p1;
    const double p = std::sqrt(p2 / 6.0);
    coda::Matrix b(3, 3);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            b(i, j) = (m(i, j) - (i == j ? q : 0.0)) / p;
    double r = b.determinant() / 2.0;
    r = std::clamp(r, -1.0, 1.0);
    const double phi = std::acos(r) / 3.0;
    const double e1 = q + 2.0 * p * std::cos(phi);
    const double e3 = q + 2.0 * p * std::cos(phi + 2.0 * M_PI / 3.0);
    const double e2 = 3.0 * q - e1 - e3;
    return {e1, e2, e3};
}

// Sample covariance straight from the definition (nested loops, no shared
// code with the library path).
inline coda::Matrix covariance_by_definition(const coda::Matrix& rows) {
    const std::size_t n = rows.rows();
    const std::size_t p = rows.cols();
    std::vector<double> mean(p, 0.0);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t j = 0; j < p; ++j) mean[j] += rows(r, j) / double(n);
    coda::Matrix cov(p, p);
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < p; ++j) {
            double s = 0.0;
            for (std::size_t r = 0; r < n; ++r)
                s += (rows(r, i) - mean[i]) * (rows(r, j) - mean[j]);
            cov(i, j) = s / double(n - 1);
        }
    return cov;
}

// Brute-force subspace statistic for the D=4, q=1 layout (Y coordinates 2-d,
// Z coordinates 3-d): covariances by definition, eigenvalues by
// characteristic polynomial.
inline double statistic_d4_q1(const coda::Matrix& y_tilde, const coda::Matrix& z_tilde,
                              int k) {
    const coda::Matrix cy = covariance_by_definition(y_tilde);
    const coda::Matrix cz = covariance_by_definition(z_tilde);
    const double wy = double(y_tilde.rows() - 1);
    const double wz = double(z_tilde.rows() - 1);
    coda::Matrix pooled(3, 3);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) {
            double v = wz * cz(i, j);
            if (i < 2 && j < 2) v += wy * cy(i, j);
            pooled(i, j) = v;
        }
    const auto a = sym2_eigvals(cy(0, 0), cy(0, 1), cy(1, 1));
    const auto b = sym3_eigvals(cz);
    const auto g = sym3_eigvals(pooled);
    double t = 0.0;
    for (int i = 0; i < k; ++i) t += wy * a[std::size_t(i)] + wz * b[std::size_t(i)] - g[std::size_t(i)];
    return t;
}

// Upper-tail chi-square probability for df=1 by Simpson quadrature after the
// substitution x = u^2: P(X >= x) = 1 - sqrt(2/pi) * int_0^sqrt(x) e^{-u^2/2} du.
inline double chi2_sf_df1_quadrature(double x) {
    const double hi = std::sqrt(x);
    const int n = 20000;  // even
    const double h = hi / n;
    auto f = [](double u) { return std::exp(-0.5 * u * u); };
    double s = f(0.0) + f(hi);
    for (int i = 1; i < n; ++i) s += f(h * i) * (i % 2 ? 4.0 : 2.0);
    const double integral = s * h / 3.0;
    return 1.0 - std::sqrt(2.0 / M_PI) * integral;
}

// Fully reduced moment formulas for exactly diagonal covariances with the
// pooled diagonal already descending. Derived by collapsing the alignment
// matrices to the identity and simplifying on paper; shares no code with the
// library's general quadruple-sum evaluation.
struct DiagonalMoments {
    double mu = 0.0;
    double sigma2 = 0.0;
};

inline DiagonalMoments diagonal_case_moments(std::vector<double> y_diag,
                                             const std::vector<double>& z_diag,
                                             std::size_t n_y, std::size_t n_z, int k) {
    const std::size_t p = z_diag.size();
    y_diag.resize(p, 0.0);
    const double wy = double(n_y - 1);
    const double wz = double(n_z - 1);
    DiagonalMoments out;
    for (std::size_t i = 0; i < std::size_t(k); ++i) {
        for (std::size_t j = std::size_t(k); j < p; ++j) {
            const double ga = y_diag[i] - y_diag[j];
            const double gb = z_diag[i] - z_diag[j];
            const double pooled_gap = wy * ga + wz * gb;  // (N-2) * psi gap
            const double aa = y_diag[i] * y_diag[j];
            const double bb = z_diag[i] * z_diag[j];
            out.mu += (wz * aa * gb * gb + wy * bb * ga * ga) / (ga * gb * pooled_gap);
            const double w = wy * aa + wz * bb;
            out.sigma2 += (aa / ga) * (aa / ga) + (bb / gb) * (bb / gb) -
                          2.0 * (wy * aa * aa / ga + wz * bb * bb / gb) / pooled_gap +
                          (w / pooled_gap) * (w / pooled_gap);
        }
    }
    out.sigma2 *= 2.0;
    return out;
}

// Kolmogorov asymptotic tail Q(lambda) = 2 sum (-1)^{k-1} exp(-2 k^2 lambda^2).
inline double kolmogorov_tail(double lambda) {
    if (lambda <= 0.0) return 1.0;
    double s = 0.0;
    for (int j = 1; j <= 100; ++j) {
        const double term = 2.0 * std::pow(-1.0, j - 1) * std::exp(-2.0 * j * j * lambda * lambda);
        s += term;
        if (std::fabs(term) < 1e-14) break;
    }
    return std::clamp(s, 0.0, 1.0);
}

// One-sample KS p-value against Uniform(0, 1).
inline double ks_uniform_pvalue(std::vector<double> u) {
    std::sort(u.begin(), u.end());
    const double n = double(u.size());
    double d = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        d = std::max(d, std::fabs(double(i + 1) / n - u[i]));
        d = std::max(d, std::fabs(u[i] - double(i) / n));
    }
    const double rn = std::sqrt(n);
    return kolmogorov_tail((rn + 0.12 + 0.11 / rn) * d);
}

// Two-sample KS p-value.
inline double ks_two_sample_pvalue(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] <= b[j]) ++i;
        else ++j;
        d = std::max(d, std::fabs(double(i) / a.size() - double(j) / b.size()));
    }
    const double ne = double(a.size()) * double(b.size()) / double(a.size() + b.size());
    const double rn = std::sqrt(ne);
    return kolmogorov_tail((rn + 0.12 + 0.11 / rn) * d);
}

// Principal angles between the column spans of two orthonormal P x k blocks:
// angles are acos of the singular values of U1' U2 (k = 2 here, so the
// singular values come from the 2x2 Gram matrix).
inline std::array<double, 2> principal_angles_2d(const coda::Matrix& u1,
                                                 const coda::Matrix& u2) {
    const coda::Matrix m = u1.transposed() * u2;  // 2x2
    const coda::Matrix g = m.transposed() * m;
    const auto ev = sym2_eigvals(g(0, 0), g(0, 1), g(1, 1));
    const double s1 = std::sqrt(std::clamp(ev[0], 0.0, 1.0));  // largest cosine
    const double s2 = std::sqrt(std::clamp(ev[1], 0.0, 1.0));
    return {std::acos(s1), std::acos(s2)};  // {smallest angle, largest angle}
}

}  // namespace oracle
