#pragma once

#include <vector>

#include "coda/matrix.hpp"
#include "coda/rng.hpp"

namespace coda {

// Square matrix symmetrized on construction as (M + M^T)/2.
class SymmetricMatrix {
public:
    SymmetricMatrix() = default;
    explicit SymmetricMatrix(Matrix m);

    std::size_t dim() const noexcept { return m_.rows(); }
    const Matrix& mat() const noexcept { return m_; }
    double operator()(std::size_t i, std::size_t j) const { return m_(i, j); }

private:
    Matrix m_;
};

// Eigenvalues sorted descending with the matching orthonormal eigenvectors
// as columns. Each column is sign-normalized so its largest-magnitude entry
// is positive; together with the stable descending sort this makes the
// decomposition a deterministic function of the input.
struct EigenDecomposition {
    std::vector<double> values;
    Matrix vectors;
};

// Sample covariance with denominator n-1 (rows are observations).
SymmetricMatrix sample_covariance(const Matrix& rows);

// Full symmetric eigendecomposition by cyclic Jacobi sweeps.
EigenDecomposition sym_eig_desc(const SymmetricMatrix& m);

// Eigenvalues only (descending); skips the eigenvector accumulation.
std::vector<double> sym_eigvals_desc(const SymmetricMatrix& m);

// Upper tail P(chi^2(df) >= x) via the regularized incomplete gamma function.
double chi2_sf(double x, int df);

// Orthogonal matrix distributed by Haar measure: QR of a standard Gaussian
// matrix with the R-diagonal kept positive.
Matrix haar_orthonormal(std::size_t d, RandomStream& rng);

// As haar_orthonormal with the determinant forced to +1 (last column negated
// when needed).
Matrix haar_rotation(std::size_t d, RandomStream& rng);

// Lower-triangular L with L L^T = m; throws NotPositiveDefinite otherwise.
Matrix cholesky_lower(const SymmetricMatrix& m);

}  // namespace coda
