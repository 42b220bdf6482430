#include "coda/subspace.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "coda/errors.hpp"

namespace coda {

namespace {

void check_block_shapes(const IlrDatasets& ilr, int k) {
    const std::size_t py = ilr.y_tilde.cols();
    const std::size_t pz = ilr.z_tilde.cols();
    if (py == 0 || pz == 0 || py > pz)
        throw DimensionMismatch("ilr blocks have inconsistent widths");
    if (k < 1 || static_cast<std::size_t>(k) > py)
        throw BadK("k must satisfy 1 <= k <= " + std::to_string(py) + ", got " +
                   std::to_string(k));
    if (ilr.y_tilde.rows() < 2 || ilr.z_tilde.rows() < 2)
        throw TooFewRows("both blocks need at least 2 rows");
}

// Eigenvalues of the two block covariances and of their weighted pooled sum,
// all descending; the workhorse of the statistic and of the bootstrap loop.
struct BlockSpectra {
    std::vector<double> y_vals;       // size D-q-1
    std::vector<double> z_vals;       // size D-1
    std::vector<double> pooled_vals;  // size D-1
};

BlockSpectra block_spectra(const Matrix& y_tilde, const Matrix& z_tilde) {
    BlockSpectra s;
    const SymmetricMatrix cov_y = sample_covariance(y_tilde);
    const SymmetricMatrix cov_z = sample_covariance(z_tilde);
    s.y_vals = sym_eigvals_desc(cov_y);
    s.z_vals = sym_eigvals_desc(cov_z);
    s.pooled_vals = sym_eigvals_desc(
        pooled_matrix(cov_y, cov_z, y_tilde.rows(), z_tilde.rows()));
    return s;
}

double statistic_from_spectra(const BlockSpectra& s, std::size_t n_y, std::size_t n_z,
                              int k) {
    const double wy = static_cast<double>(n_y - 1);
    const double wz = static_cast<double>(n_z - 1);
    double t = 0.0;
    for (int i = 0; i < k; ++i)
        t += wy * s.y_vals[static_cast<std::size_t>(i)] +
             wz * s.z_vals[static_cast<std::size_t>(i)] -
             s.pooled_vals[static_cast<std::size_t>(i)];
    return t;
}

}  // namespace

SymmetricMatrix pooled_matrix(const SymmetricMatrix& omega_y,
                              const SymmetricMatrix& omega_z,
                              std::size_t n_y, std::size_t n_z) {
    if (omega_y.dim() > omega_z.dim())
        throw DimensionMismatch("Y covariance cannot be larger than Z covariance");
    if (n_y < 2 || n_z < 2) throw TooFewRows("pooled matrix needs n_y, n_z >= 2");
    Matrix sum = embed_top_left(omega_y.mat(), omega_z.dim());
    sum *= static_cast<double>(n_y - 1);
    Matrix zc = omega_z.mat();
    zc *= static_cast<double>(n_z - 1);
    sum += zc;
    return SymmetricMatrix(std::move(sum));
}

double test_statistic(const IlrDatasets& ilr, int k) {
    check_block_shapes(ilr, k);
    const BlockSpectra s = block_spectra(ilr.y_tilde, ilr.z_tilde);
    return statistic_from_spectra(s, ilr.y_tilde.rows(), ilr.z_tilde.rows(), k);
}

namespace detail {

double min_leading_trailing_gap(const std::vector<double>& values, int k) {
    // values are descending, so the tightest (leading, trailing) gap is
    // between positions k-1 and k.
    if (static_cast<std::size_t>(k) >= values.size()) return values[values.size() - 1];
    return values[static_cast<std::size_t>(k - 1)] - values[static_cast<std::size_t>(k)];
}

SchottMoments schott_moments(const std::vector<double>& y_vals_padded,
                             const std::vector<double>& z_vals,
                             const std::vector<double>& pooled_vals,
                             const Matrix& y_align_lead, const Matrix& y_align_trail,
                             const Matrix& z_align_lead, const Matrix& z_align_trail,
                             std::size_t n_y, std::size_t n_z, int k) {
    const std::size_t p = z_vals.size();
    const std::size_t ku = static_cast<std::size_t>(k);
    const double wy = static_cast<double>(n_y - 1);
    const double wz = static_cast<double>(n_z - 1);
    const double pooled_w = static_cast<double>(n_y + n_z - 2);

    const std::vector<double>& a = y_vals_padded;  // size p, zeros appended
    const std::vector<double>& b = z_vals;
    const std::vector<double>& psi = pooled_vals;  // already divided by pooled_w

    // Scatter of each group expressed in the pooled eigenbasis, restricted to
    // the leading and trailing blocks: lead(i,h) = sum_s vals_s L(i,s) L(h,s).
    auto scatter = [](const Matrix& align, const std::vector<double>& vals,
                      std::size_t offset) {
        const std::size_t m = align.rows();
        Matrix out(m, m);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t h = i; h < m; ++h) {
                double s = 0.0;
                for (std::size_t c = 0; c < m; ++c)
                    s += vals[offset + c] * align(i, c) * align(h, c);
                out(i, h) = s;
                out(h, i) = s;
            }
        return out;
    };
    const Matrix ya_ll = scatter(y_align_lead, a, 0);
    const Matrix ya_tt = scatter(y_align_trail, a, ku);
    const Matrix za_ll = scatter(z_align_lead, b, 0);
    const Matrix za_tt = scatter(z_align_trail, b, ku);

    SchottMoments mom;
    for (std::size_t i = 0; i < ku; ++i) {
        for (std::size_t j = ku; j < p; ++j) {
            const std::size_t jt = j - ku;
            const double gap_a = a[i] - a[j];
            const double gap_b = b[i] - b[j];
            const double gap_psi = psi[i] - psi[j];

            // Mean: marginal perturbation terms of each block minus the
            // pooled-term correction.
            double cross = 0.0;
            // Variance pieces: squared marginal terms, the mixed correction,
            // and the quadruple alignment sum.
            double mixed = 0.0;
            double quad = 0.0;
            for (std::size_t h = 0; h < ku; ++h) {
                for (std::size_t l = ku; l < p; ++l) {
                    const std::size_t lt = l - ku;
                    const double uy = y_align_lead(i, h) * y_align_trail(jt, lt);
                    const double uz = z_align_lead(i, h) * z_align_trail(jt, lt);
                    cross += wy * uy * uy * a[h] * a[l] + wz * uz * uz * b[h] * b[l];

                    const double num_a = a[h] * a[l] * uy;
                    if (num_a != 0.0) mixed += wy * num_a * num_a / (a[h] - a[l]);
                    const double num_b = b[h] * b[l] * uz;
                    if (num_b != 0.0) mixed += wz * num_b * num_b / (b[h] - b[l]);

                    const double w_hl = wy * ya_ll(i, h) * ya_tt(jt, lt) +
                                        wz * za_ll(i, h) * za_tt(jt, lt);
                    quad += w_hl * w_hl / (psi[h] - psi[l]);
                }
            }
            mom.mu += a[i] * a[j] / gap_a + b[i] * b[j] / gap_b -
                      cross / (pooled_w * gap_psi);
            const double ra = a[i] * a[j] / gap_a;
            const double rb = b[i] * b[j] / gap_b;
            mom.sigma2 += ra * ra + rb * rb - 2.0 * mixed / (pooled_w * gap_psi) +
                          quad / (pooled_w * pooled_w * gap_psi);
        }
    }
    mom.sigma2 *= 2.0;
    return mom;
}

}  // namespace detail

namespace {

SchottNullParams params_from_moments(const detail::SchottMoments& mom,
                                     DfRounding rounding) {
    if (!(mom.mu > 0.0) || !(mom.sigma2 > 0.0))
        throw ApproximationInvalid("moment estimates are not positive (mu=" +
                                   std::to_string(mom.mu) + ", sigma2=" +
                                   std::to_string(mom.sigma2) + ")");
    SchottNullParams p;
    p.mu_t = mom.mu;
    p.sigma2_t = mom.sigma2;
    const double raw_df = 2.0 * mom.mu * mom.mu / mom.sigma2;
    const double bracketed =
        rounding == DfRounding::Nearest ? std::round(raw_df) : std::floor(raw_df);
    p.df = static_cast<int>(std::max(1.0, bracketed));
    p.scale = mom.sigma2 / (2.0 * mom.mu);
    return p;
}

void check_eigengaps(const std::vector<double>& vals, int k, double tol,
                     const char* label) {
    const double scale = std::max(std::fabs(vals.front()), 1e-300);
    if (detail::min_leading_trailing_gap(vals, k) <= tol * scale)
        throw DegenerateEigengap(std::string(label) +
                                 " eigenvalue gap across position k is below tolerance");
}

}  // namespace

SchottNullParams schott_params_from_cov(const SymmetricMatrix& omega_y,
                                        const SymmetricMatrix& omega_z,
                                        std::size_t n_y, std::size_t n_z, int k,
                                        double eigengap_tol, DfRounding rounding,
                                        AlignmentRoute route) {
    const std::size_t py = omega_y.dim();
    const std::size_t p = omega_z.dim();
    if (py > p) throw DimensionMismatch("Y covariance larger than Z covariance");
    if (k < 1 || static_cast<std::size_t>(k) > py)
        throw BadK("k must satisfy 1 <= k <= " + std::to_string(py));
    const std::size_t ku = static_cast<std::size_t>(k);
    if (ku >= p) throw BadK("k leaves no trailing eigenvalues");

    const double wy = static_cast<double>(n_y - 1);
    const double wz = static_cast<double>(n_z - 1);
    const double pooled_w = static_cast<double>(n_y + n_z - 2);

    const EigenDecomposition y_dec = sym_eig_desc(omega_y);
    const EigenDecomposition z_dec = sym_eig_desc(omega_z);
    std::vector<double> y_vals = y_dec.values;
    y_vals.resize(p, 0.0);  // the Y spectrum is zero on the embedded directions
    const std::vector<double>& z_vals = z_dec.values;

    const SymmetricMatrix pooled = pooled_matrix(omega_y, omega_z, n_y, n_z);
    const EigenDecomposition pooled_dec = sym_eig_desc(pooled);
    std::vector<double> psi(p);
    for (std::size_t i = 0; i < p; ++i) psi[i] = pooled_dec.values[i] / pooled_w;

    check_eigengaps(y_vals, k, eigengap_tol, "Y");
    check_eigengaps(z_vals, k, eigengap_tol, "Z");
    check_eigengaps(psi, k, eigengap_tol, "pooled");

    Matrix y_align_lead, y_align_trail, z_align_lead, z_align_trail;
    if (route == AlignmentRoute::ProjectedEigenvectors) {
        // Project each group's scatter onto the leading / trailing pooled
        // eigenvectors and take the eigenbases of the projections.
        const Matrix basis_lead = pooled_dec.vectors.block(0, 0, p, ku);
        const Matrix basis_trail = pooled_dec.vectors.block(0, ku, p, p - ku);
        const Matrix y_embedded = embed_top_left(omega_y.mat(), p);

        auto aligned_eigvecs = [](const Matrix& basis, const Matrix& scatter, double w) {
            Matrix projected = basis.transposed() * scatter * basis;
            projected *= w;
            return sym_eig_desc(SymmetricMatrix(std::move(projected))).vectors;
        };
        y_align_lead = aligned_eigvecs(basis_lead, y_embedded, wy);
        y_align_trail = aligned_eigvecs(basis_trail, y_embedded, wy);
        z_align_lead = aligned_eigvecs(basis_lead, omega_z.mat(), wz);
        z_align_trail = aligned_eigvecs(basis_trail, omega_z.mat(), wz);
    } else {
        // Express the (embedded) group eigenbases in the pooled basis and
        // take the diagonal blocks directly.
        const Matrix y_star = pooled_dec.vectors.transposed() *
                              block_diag(y_dec.vectors, Matrix::identity(p - py));
        const Matrix z_star = pooled_dec.vectors.transposed() * z_dec.vectors;
        y_align_lead = y_star.block(0, 0, ku, ku);
        y_align_trail = y_star.block(ku, ku, p - ku, p - ku);
        z_align_lead = z_star.block(0, 0, ku, ku);
        z_align_trail = z_star.block(ku, ku, p - ku, p - ku);
    }

    const auto mom = detail::schott_moments(y_vals, z_vals, psi, y_align_lead,
                                            y_align_trail, z_align_lead,
                                            z_align_trail, n_y, n_z, k);
    return params_from_moments(mom, rounding);
}

SchottNullParams schott_null_params(const IlrDatasets& ilr, int k,
                                    double eigengap_tol, DfRounding rounding) {
    check_block_shapes(ilr, k);
    return schott_params_from_cov(sample_covariance(ilr.y_tilde),
                                  sample_covariance(ilr.z_tilde),
                                  ilr.y_tilde.rows(), ilr.z_tilde.rows(), k,
                                  eigengap_tol, rounding);
}

double schott_p_value(double t, const SchottNullParams& params) {
    return chi2_sf(t / params.scale, params.df);
}

RotatedZ build_rotated_z(const IlrDatasets& ilr, int k, const Matrix& rot_lead,
                         const Matrix& rot_trail) {
    check_block_shapes(ilr, k);
    const std::size_t py = ilr.y_tilde.cols();
    const std::size_t p = ilr.z_tilde.cols();
    const std::size_t q = p - py;
    const std::size_t ku = static_cast<std::size_t>(k);
    if (rot_lead.rows() != ku || rot_trail.rows() != p - ku)
        throw DimensionMismatch("rotation blocks have wrong sizes");

    const Matrix y_basis = sym_eig_desc(sample_covariance(ilr.y_tilde)).vectors;
    const Matrix z_basis = sym_eig_desc(sample_covariance(ilr.z_tilde)).vectors;

    // Embedded Y basis with identity on the zero-part directions, then the
    // two-block random rotation.
    const Matrix target_basis = block_diag(y_basis, Matrix::identity(q)) *
                                block_diag(rot_lead, rot_trail);
    RotatedZ out;
    out.rotation = target_basis * z_basis.transposed();
    out.z_rotated = ilr.z_tilde * out.rotation.transposed();
    return out;
}

RotatedZ build_rotated_z(const IlrDatasets& ilr, int k, RandomStream& rng) {
    check_block_shapes(ilr, k);
    const std::size_t p = ilr.z_tilde.cols();
    const Matrix rot_lead = haar_rotation(static_cast<std::size_t>(k), rng);
    const Matrix rot_trail = haar_rotation(p - static_cast<std::size_t>(k), rng);
    return build_rotated_z(ilr, k, rot_lead, rot_trail);
}

BootstrapResult bootstrap_p_value(const IlrDatasets& ilr, int k, int n_boot,
                                  std::uint64_t seed, bool rotate_per_replicate) {
    check_block_shapes(ilr, k);
    if (n_boot < 1) throw ConfigError("n_boot must be >= 1");

    BootstrapResult res;
    res.statistic = test_statistic(ilr, k);

    RandomStream rotation_stream = RandomStream::substream(seed, 0);
    const RotatedZ fixed = build_rotated_z(ilr, k, rotation_stream);

    const std::size_t n_y = ilr.y_tilde.rows();
    const std::size_t n_z = ilr.z_tilde.rows();
    const std::size_t py = ilr.y_tilde.cols();
    const std::size_t pz = ilr.z_tilde.cols();

    int count = 0;
    Matrix y_boot(n_y, py);
    Matrix z_boot(n_z, pz);
    for (int b = 0; b < n_boot; ++b) {
        RandomStream rs = RandomStream::substream(seed, static_cast<std::uint64_t>(b) + 1);
        const Matrix* z_source = &fixed.z_rotated;
        RotatedZ redrawn;
        if (rotate_per_replicate) {
            redrawn = build_rotated_z(ilr, k, rs);
            z_source = &redrawn.z_rotated;
        }
        for (std::size_t r = 0; r < n_y; ++r) {
            const std::size_t pick = rs.uniform_index(n_y);
            for (std::size_t j = 0; j < py; ++j) y_boot(r, j) = ilr.y_tilde(pick, j);
        }
        for (std::size_t r = 0; r < n_z; ++r) {
            const std::size_t pick = rs.uniform_index(n_z);
            for (std::size_t j = 0; j < pz; ++j) z_boot(r, j) = (*z_source)(pick, j);
        }
        const BlockSpectra s = block_spectra(y_boot, z_boot);
        if (statistic_from_spectra(s, n_y, n_z, k) >= res.statistic) ++count;
    }
    res.n_at_least = count;
    res.p_value = static_cast<double>(count) / static_cast<double>(n_boot);
    return res;
}

std::vector<TestResult> run_test(const CompositionalDataset& ds,
                                 const SubspaceTestConfig& cfg) {
    const IlrDatasets ilr = ilr_transform_split(ds);
    check_block_shapes(ilr, cfg.k);
    if (cfg.n_boot < 1) throw ConfigError("n_boot must be >= 1");

    const double t = test_statistic(ilr, cfg.k);

    // Eigengap diagnostics are fatal for the chi-square approximation but
    // only advisory for the bootstrap (no gap denominators there).
    std::vector<std::string> gap_warnings;
    {
        const BlockSpectra s = block_spectra(ilr.y_tilde, ilr.z_tilde);
        auto warn_if_tight = [&](const std::vector<double>& vals, const char* label) {
            const double scale = std::max(std::fabs(vals.front()), 1e-300);
            if (detail::min_leading_trailing_gap(vals, cfg.k) <= cfg.eigengap_tol * scale)
                gap_warnings.push_back(std::string("near-degenerate ") + label +
                                       " eigengap at position k");
        };
        warn_if_tight(s.y_vals, "Y");
        warn_if_tight(s.z_vals, "Z");
        warn_if_tight(s.pooled_vals, "pooled");
    }

    std::vector<TestResult> results;
    if (cfg.method == TestMethod::Schott || cfg.method == TestMethod::Both) {
        TestResult r;
        r.statistic = t;
        r.method = "schott";
        r.k = cfg.k;
        r.null_params = schott_null_params(ilr, cfg.k, cfg.eigengap_tol, cfg.df_rounding);
        r.p_value = schott_p_value(t, *r.null_params);
        r.warnings = gap_warnings;
        results.push_back(std::move(r));
    }
    if (cfg.method == TestMethod::Bootstrap || cfg.method == TestMethod::Both) {
        TestResult r;
        r.statistic = t;
        r.method = "bootstrap";
        r.k = cfg.k;
        const BootstrapResult boot = bootstrap_p_value(ilr, cfg.k, cfg.n_boot, cfg.seed,
                                                       cfg.rotate_per_replicate);
        r.p_value = boot.p_value;
        r.n_boot_used = cfg.n_boot;
        r.warnings = gap_warnings;
        if (boot.n_at_least == 0)
            r.warnings.push_back("bootstrap p-value is 0, i.e. < 1/" +
                                 std::to_string(cfg.n_boot));
        results.push_back(std::move(r));
    }
    return results;
}

}  // namespace coda
