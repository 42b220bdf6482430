#include "coda/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "coda/errors.hpp"

namespace coda {

SymmetricMatrix::SymmetricMatrix(Matrix m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols())
        throw DimensionMismatch("symmetric matrix must be square");
    for (std::size_t i = 0; i < m_.rows(); ++i)
        for (std::size_t j = i + 1; j < m_.cols(); ++j) {
            const double avg = 0.5 * (m_(i, j) + m_(j, i));
            m_(i, j) = avg;
            m_(j, i) = avg;
        }
}

SymmetricMatrix sample_covariance(const Matrix& rows) {
    const std::size_t n = rows.rows();
    const std::size_t p = rows.cols();
    if (n < 2)
        throw TooFewRows("sample covariance needs at least 2 rows, got " + std::to_string(n));
    std::vector<double> mean(p, 0.0);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t j = 0; j < p; ++j) mean[j] += rows(r, j);
    for (double& m : mean) m /= static_cast<double>(n);
    Matrix cov(p, p);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t i = 0; i < p; ++i) {
            const double di = rows(r, i) - mean[i];
            for (std::size_t j = i; j < p; ++j)
                cov(i, j) += di * (rows(r, j) - mean[j]);
        }
    }
    const double denom = static_cast<double>(n - 1);
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = i; j < p; ++j) {
            cov(i, j) /= denom;
            cov(j, i) = cov(i, j);
        }
    return SymmetricMatrix(std::move(cov));
}

namespace {

constexpr int kMaxJacobiSweeps = 100;
constexpr double kJacobiTol = 1e-12;

double off_diagonal_norm(const Matrix& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = i + 1; j < a.cols(); ++j) s += a(i, j) * a(i, j);
    return std::sqrt(2.0 * s);
}

// Cyclic Jacobi on a working copy; accumulates rotations into *vectors when
// given. Dimensions here never exceed ~10, where Jacobi is both robust and
// effectively exact.
// https://en.wikipedia.org/wiki/Jacobi_eigenvalue_algorithm
std::vector<double> jacobi_eigen(const SymmetricMatrix& m, Matrix* vectors) {
    const std::size_t n = m.dim();
    Matrix a = m.mat();
    if (vectors) *vectors = Matrix::identity(n);
    if (n == 1) return {a(0, 0)};

    const double scale = std::max(1.0, a.max_abs());
    bool converged = false;
    for (int sweep = 0; sweep < kMaxJacobiSweeps; ++sweep) {
        if (off_diagonal_norm(a) <= kJacobiTol * scale) {
            converged = true;
            break;
        }
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                                 (std::fabs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                if (vectors) {
                    for (std::size_t k = 0; k < n; ++k) {
                        const double vkp = (*vectors)(k, p);
                        const double vkq = (*vectors)(k, q);
                        (*vectors)(k, p) = c * vkp - s * vkq;
                        (*vectors)(k, q) = s * vkp + c * vkq;
                    }
                }
            }
        }
    }
    if (!converged && off_diagonal_norm(a) > kJacobiTol * scale)
        throw ConvergenceFailure("Jacobi eigensolver exceeded " +
                                 std::to_string(kMaxJacobiSweeps) + " sweeps");

    std::vector<double> values(n);
    for (std::size_t i = 0; i < n; ++i) values[i] = a(i, i);

    // Descending order; stable so exact ties keep the solver's output order.
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t x, std::size_t y) { return values[x] > values[y]; });

    std::vector<double> sorted(n);
    for (std::size_t i = 0; i < n; ++i) sorted[i] = values[idx[i]];
    if (vectors) {
        Matrix ordered(n, n);
        for (std::size_t j = 0; j < n; ++j) {
            // Sign rule: largest-magnitude entry of each column positive.
            std::size_t arg = 0;
            double best = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double v = std::fabs((*vectors)(i, idx[j]));
                if (v > best) { best = v; arg = i; }
            }
            const double sgn = (*vectors)(arg, idx[j]) < 0.0 ? -1.0 : 1.0;
            for (std::size_t i = 0; i < n; ++i)
                ordered(i, j) = sgn * (*vectors)(i, idx[j]);
        }
        *vectors = std::move(ordered);
    }
    return sorted;
}

}  // namespace

EigenDecomposition sym_eig_desc(const SymmetricMatrix& m) {
    EigenDecomposition dec;
    dec.values = jacobi_eigen(m, &dec.vectors);
    return dec;
}

std::vector<double> sym_eigvals_desc(const SymmetricMatrix& m) {
    return jacobi_eigen(m, nullptr);
}

namespace {

// Regularized lower incomplete gamma P(a, x) by its power series; valid and
// fast for x not much larger than a.
double gamma_p_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    double ap = a;
    for (int n = 0; n < 1000; ++n) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Regularized upper incomplete gamma Q(a, x) by modified-Lentz continued
// fraction; complements the series branch.
double gamma_q_contfrac(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 1000; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-16) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double chi2_sf(double x, int df) {
    if (df < 1) throw InvalidDf("chi-square degrees of freedom must be >= 1");
    // Tiny negative inputs are the numerical slack of a nonnegative statistic.
    if (x <= 0.0) return 1.0;
    const double a = 0.5 * static_cast<double>(df);
    const double xg = 0.5 * x;
    if (x < static_cast<double>(df) + 1.0) return 1.0 - gamma_p_series(a, xg);
    return gamma_q_contfrac(a, xg);
}

Matrix haar_orthonormal(std::size_t d, RandomStream& rng) {
    if (d < 1) throw DimensionTooSmall("orthogonal matrix needs dimension >= 1");
    Matrix g(d, d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) g(i, j) = rng.normal();
    // Modified Gram-Schmidt with one re-orthogonalization pass. Normalizing
    // with positive lengths fixes the QR sign ambiguity, which is what makes
    // the resulting Q exactly Haar-distributed.
    for (std::size_t j = 0; j < d; ++j) {
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t prev = 0; prev < j; ++prev) {
                double proj = 0.0;
                for (std::size_t i = 0; i < d; ++i) proj += g(i, prev) * g(i, j);
                for (std::size_t i = 0; i < d; ++i) g(i, j) -= proj * g(i, prev);
            }
        }
        double norm = 0.0;
        for (std::size_t i = 0; i < d; ++i) norm += g(i, j) * g(i, j);
        norm = std::sqrt(norm);
        for (std::size_t i = 0; i < d; ++i) g(i, j) /= norm;
    }
    return g;
}

Matrix haar_rotation(std::size_t d, RandomStream& rng) {
    Matrix q = haar_orthonormal(d, rng);
    if (q.determinant() < 0.0)
        for (std::size_t i = 0; i < d; ++i) q(i, d - 1) = -q(i, d - 1);
    return q;
}

Matrix cholesky_lower(const SymmetricMatrix& m) {
    const std::size_t n = m.dim();
    Matrix l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double diag = m(j, j);
        for (std::size_t k = 0; k < j; ++k) diag -= l(j, k) * l(j, k);
        if (!(diag > 0.0))
            throw NotPositiveDefinite("Cholesky pivot " + std::to_string(j) +
                                      " is not positive");
        l(j, j) = std::sqrt(diag);
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = m(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            l(i, j) = s / l(j, j);
        }
    }
    return l;
}

}  // namespace coda
