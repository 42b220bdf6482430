#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "coda/dataset.hpp"
#include "coda/kernels.hpp"
#include "coda/matrix.hpp"
#include "coda/rng.hpp"

namespace coda {

enum class TestMethod { Schott, Bootstrap, Both };
enum class DfRounding { Nearest, Floor };

struct SubspaceTestConfig {
    int k = 1;                              // tested subspace size, 1 <= k <= D-q-1
    TestMethod method = TestMethod::Both;
    int n_boot = 1000;
    std::uint64_t seed = 0;
    double eigengap_tol = 1e-8;             // relative to the leading eigenvalue
    DfRounding df_rounding = DfRounding::Nearest;
    bool rotate_per_replicate = false;      // redraw the bootstrap rotation per replicate
};

// Chi-square approximation of the null law of the statistic: T is treated as
// scale * chi2(df) with the two moments matched.
struct SchottNullParams {
    double mu_t = 0.0;      // approximate null mean of T
    double sigma2_t = 0.0;  // approximate null variance of T
    int df = 1;             // round(2 mu^2 / sigma^2), at least 1
    double scale = 1.0;     // sigma^2 / (2 mu)
};

struct TestResult {
    double statistic = 0.0;
    double p_value = 1.0;
    std::string method;  // "schott" or "bootstrap"
    int k = 0;
    std::optional<SchottNullParams> null_params;
    std::optional<int> n_boot_used;
    std::vector<std::string> warnings;
};

// (n_y-1) * [omega_y embedded top-left] + (n_z-1) * omega_z, in the ilr space
// of the full composition.
SymmetricMatrix pooled_matrix(const SymmetricMatrix& omega_y,
                              const SymmetricMatrix& omega_z,
                              std::size_t n_y, std::size_t n_z);

// The common-subspace statistic: sum over the k leading eigenvalues of
// (n_y-1) a_i + (n_z-1) b_i - g_i, where a, b, g are the descending
// eigenvalues of the two block covariances and of pooled_matrix. Nonnegative
// up to roundoff.
double test_statistic(const IlrDatasets& ilr, int k);

// How the group eigenbases are aligned with the pooled eigenbasis inside the
// moment formulas. The two coincide when the tested subspace hypothesis holds
// exactly, but differ away from it:
//   ProjectedEigenvectors - eigenbases of the group scatters projected onto
//     the leading/trailing pooled eigenvectors (the estimation recipe);
//   BasisChange - the pooled basis' inner products with the (embedded) group
//     eigenbases, the form the approximation is stated in for known
//     covariance matrices. Stays well defined under the alternative, where
//     the projected recipe can produce invalid (negative) moments.
enum class AlignmentRoute { ProjectedEigenvectors, BasisChange };

// Moment parameters of the chi-square approximation computed from covariance
// matrices (sample covariances for the estimated test; population matrices
// for the simulation-only theoretical variant).
SchottNullParams schott_params_from_cov(const SymmetricMatrix& omega_y,
                                        const SymmetricMatrix& omega_z,
                                        std::size_t n_y, std::size_t n_z, int k,
                                        double eigengap_tol = 1e-8,
                                        DfRounding rounding = DfRounding::Nearest,
                                        AlignmentRoute route =
                                            AlignmentRoute::ProjectedEigenvectors);

SchottNullParams schott_null_params(const IlrDatasets& ilr, int k,
                                    double eigengap_tol = 1e-8,
                                    DfRounding rounding = DfRounding::Nearest);

// Upper-tail probability of the fitted scaled chi-square at t.
double schott_p_value(double t, const SchottNullParams& params);

struct RotatedZ {
    Matrix z_rotated;  // n_z x (D-1)
    Matrix rotation;   // (D-1) x (D-1)
};

// Builds the bootstrap-aligned copy of the Z block: the Y eigenbasis is
// embedded, its leading-k block and trailing block are randomly rotated, and
// Z is mapped onto the resulting basis.
RotatedZ build_rotated_z(const IlrDatasets& ilr, int k, RandomStream& rng);

// Deterministic variant used by tests: the two block rotations are supplied.
RotatedZ build_rotated_z(const IlrDatasets& ilr, int k, const Matrix& rot_lead,
                         const Matrix& rot_trail);

struct BootstrapResult {
    double p_value = 1.0;
    double statistic = 0.0;
    int n_at_least = 0;  // replicates with t^b >= t
};

// Nonparametric bootstrap p-value: resamples rows of the Y block and of the
// rotated Z block with replacement, n_boot times. Fully determined by
// (ilr, k, n_boot, seed); replicate b uses the stream (seed, b+1).
BootstrapResult bootstrap_p_value(const IlrDatasets& ilr, int k, int n_boot,
                                  std::uint64_t seed,
                                  bool rotate_per_replicate = false);

// Full pipeline on a dataset; returns one result per requested method.
std::vector<TestResult> run_test(const CompositionalDataset& ds,
                                 const SubspaceTestConfig& cfg);

namespace detail {
// Moment formulas evaluated on explicit spectra and alignment blocks; the
// alignment matrices express each group's eigenbasis in the basis of the
// pooled matrix, split into the leading k columns and the trailing ones.
// Exposed for the diagonal-reduction and sign-invariance tests.
struct SchottMoments {
    double mu = 0.0;
    double sigma2 = 0.0;
};
SchottMoments schott_moments(const std::vector<double>& y_vals_padded,
                             const std::vector<double>& z_vals,
                             const std::vector<double>& pooled_vals,
                             const Matrix& y_align_lead, const Matrix& y_align_trail,
                             const Matrix& z_align_lead, const Matrix& z_align_trail,
                             std::size_t n_y, std::size_t n_z, int k);

// Smallest gap between a leading (index < k) and trailing (index >= k)
// eigenvalue, for the degenerate-denominator guard.
double min_leading_trailing_gap(const std::vector<double>& values, int k);
}  // namespace detail

}  // namespace coda
