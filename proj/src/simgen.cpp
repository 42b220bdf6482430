#include "coda/simgen.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "coda/dataset.hpp"
#include "coda/errors.hpp"
#include "coda/parallel.hpp"

namespace coda {

namespace {

SymmetricMatrix basis_times_spectrum(const Matrix& basis, const std::vector<double>& vals) {
    const std::size_t p = basis.rows();
    Matrix scaled = basis;
    for (std::size_t j = 0; j < p; ++j)
        for (std::size_t i = 0; i < p; ++i) scaled(i, j) *= vals[j];
    return SymmetricMatrix(scaled * basis.transposed());
}

void check_spectrum(const std::vector<double>& vals, const char* label) {
    if (vals.empty()) throw ConfigError(std::string(label) + " spectrum is empty");
    for (std::size_t i = 0; i < vals.size(); ++i) {
        if (!(vals[i] > 0.0))
            throw ConfigError(std::string(label) + " spectrum must be strictly positive");
        if (i > 0 && vals[i] > vals[i - 1])
            throw ConfigError(std::string(label) + " spectrum must be non-increasing");
    }
}

}  // namespace

void validate(const ScenarioSpec& spec) {
    if (spec.d < 3 || spec.q < 1 || spec.q > spec.d - 2)
        throw ConfigError("scenario needs d >= 3 and 1 <= q <= d-2");
    check_spectrum(spec.alpha, "alpha");
    check_spectrum(spec.beta, "beta");
    if (spec.alpha.size() != spec.d - spec.q - 1)
        throw ConfigError("alpha must have d-q-1 entries");
    if (spec.beta.size() != spec.d - 1)
        throw ConfigError("beta must have d-1 entries");
    if (spec.k < 1 || static_cast<std::size_t>(spec.k) > spec.d - spec.q - 1)
        throw ConfigError("scenario k must satisfy 1 <= k <= d-q-1");
    // Ties inside a block are harmless, but the spectra must separate the
    // shared block from the rest (the gap denominators cross position k).
    const auto ku = static_cast<std::size_t>(spec.k);
    if (ku < spec.alpha.size() && !(spec.alpha[ku - 1] > spec.alpha[ku]))
        throw ConfigError("alpha must decrease strictly across position k");
    if (ku < spec.beta.size() && !(spec.beta[ku - 1] > spec.beta[ku]))
        throw ConfigError("beta must decrease strictly across position k");
}

void validate(const DistributionSpec& dist) {
    if (dist.family == DistFamily::Student) {
        if (!dist.dof)
            throw ConfigError("Student distribution requires degrees of freedom");
        if (*dist.dof <= 2)
            throw ConfigError("Student degrees of freedom must exceed 2");
    }
}

void validate(const ExperimentConfig& cfg) {
    validate(cfg.scenario);
    validate(cfg.dist);
    if (cfg.n_sim < 1) throw ConfigError("n_sim must be >= 1");
    if (!(cfg.level > 0.0 && cfg.level < 1.0)) throw ConfigError("level must be in (0,1)");
    if (cfg.sizes.empty()) throw ConfigError("at least one (n_y, n_z) pair is required");
    for (const auto& [ny, nz] : cfg.sizes)
        if (ny < 2 || nz < 2) throw ConfigError("sample sizes must be >= 2");
    if (cfg.methods.empty()) throw ConfigError("at least one method is required");
    if (cfg.n_boot < 1) throw ConfigError("n_boot must be >= 1");
    if (cfg.k < 1 || static_cast<std::size_t>(cfg.k) > cfg.scenario.d - cfg.scenario.q - 1)
        throw ConfigError("k must satisfy 1 <= k <= d-q-1");
}

std::pair<SymmetricMatrix, SymmetricMatrix> scenario_covariances(
    const ScenarioSpec& spec, RandomStream& rng) {
    validate(spec);
    const std::size_t py = spec.d - spec.q - 1;
    const std::size_t pz = spec.d - 1;
    const std::size_t ku = static_cast<std::size_t>(spec.k);

    const Matrix y_basis = haar_orthonormal(py, rng);
    const SymmetricMatrix omega_y = basis_times_spectrum(y_basis, spec.alpha);

    Matrix z_basis;
    switch (spec.scenario) {
        case Scenario::S1: {
            // Shared leading-k subspace: embed the Y basis and rotate the
            // leading and trailing blocks independently.
            const Matrix rot_lead = haar_rotation(ku, rng);
            const Matrix rot_trail = haar_rotation(pz - ku, rng);
            z_basis = block_diag(y_basis, Matrix::identity(spec.q)) *
                      block_diag(rot_lead, rot_trail);
            break;
        }
        case Scenario::S2: {
            // Only the first axis is shared.
            const Matrix rot_trail = haar_rotation(pz - 1, rng);
            z_basis = block_diag(y_basis, Matrix::identity(spec.q)) *
                      block_diag(Matrix::identity(1), rot_trail);
            break;
        }
        case Scenario::S3:
            z_basis = haar_orthonormal(pz, rng);
            break;
    }
    return {omega_y, basis_times_spectrum(z_basis, spec.beta)};
}

Matrix sample_ilr(const DistributionSpec& dist, const SymmetricMatrix& omega,
                  std::size_t n, RandomStream& rng) {
    validate(dist);
    if (n < 1) throw ConfigError("sample size must be >= 1");
    const std::size_t p = omega.dim();
    const Matrix chol = cholesky_lower(omega);
    Matrix out(n, p);
    std::vector<double> draw(p);

    const double root3 = std::sqrt(3.0);
    double student_scale = 1.0;
    if (dist.family == DistFamily::Student) {
        const double nu = static_cast<double>(*dist.dof);
        student_scale = std::sqrt((nu - 2.0) / nu);
    }

    for (std::size_t r = 0; r < n; ++r) {
        if (dist.family == DistFamily::Uniform) {
            // Unit-variance coordinates on [-sqrt(3), sqrt(3)].
            for (std::size_t j = 0; j < p; ++j)
                draw[j] = root3 * (2.0 * rng.uniform01() - 1.0);
        } else {
            for (std::size_t j = 0; j < p; ++j) draw[j] = rng.normal();
        }
        // row = L * draw, so that the population covariance is L L^T = omega.
        for (std::size_t i = 0; i < p; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j <= i; ++j) s += chol(i, j) * draw[j];
            out(r, i) = s;
        }
        if (dist.family == DistFamily::Student) {
            const double nu = static_cast<double>(*dist.dof);
            const double mix = std::sqrt(rng.chi_square(*dist.dof) / nu);
            for (std::size_t i = 0; i < p; ++i)
                out(r, i) = student_scale * out(r, i) / mix;
        }
    }
    return out;
}

namespace {

struct ReplicateOutcome {
    // Indexed like cfg.methods; -1 = failed, 0 = retained, 1 = rejected.
    std::vector<int> verdict;
};

ReplicateOutcome run_replicate(const ExperimentConfig& cfg, std::size_t n_y,
                               std::size_t n_z, RandomStream& rs) {
    ReplicateOutcome out;
    out.verdict.assign(cfg.methods.size(), -1);

    const auto [omega_y, omega_z] = scenario_covariances(cfg.scenario, rs);
    IlrDatasets ilr;
    ilr.y_tilde = sample_ilr(cfg.dist, omega_y, n_y, rs);
    ilr.z_tilde = sample_ilr(cfg.dist, omega_z, n_z, rs);
    const std::uint64_t boot_seed = rs.next_u64();

    const double t = test_statistic(ilr, cfg.k);
    for (std::size_t m = 0; m < cfg.methods.size(); ++m) {
        try {
            double p = 1.0;
            switch (cfg.methods[m]) {
                case Method::SchottTheo: {
                    const auto params = schott_params_from_cov(
                        omega_y, omega_z, n_y, n_z, cfg.k, 1e-8,
                        DfRounding::Nearest, AlignmentRoute::BasisChange);
                    p = schott_p_value(t, params);
                    break;
                }
                case Method::SchottEst: {
                    const auto params = schott_null_params(ilr, cfg.k);
                    p = schott_p_value(t, params);
                    break;
                }
                case Method::Bootstrap: {
                    p = bootstrap_p_value(ilr, cfg.k, cfg.n_boot, boot_seed).p_value;
                    break;
                }
            }
            out.verdict[m] = p <= cfg.level ? 1 : 0;
        } catch (const DegenerateEigengap&) {
            out.verdict[m] = -1;
        } catch (const ApproximationInvalid&) {
            out.verdict[m] = -1;
        }
    }
    return out;
}

}  // namespace

RejectionTable run_rejection_experiment(const ExperimentConfig& cfg) {
    validate(cfg);
    RejectionTable table;
    for (std::size_t cell = 0; cell < cfg.sizes.size(); ++cell) {
        const std::size_t n_y = cfg.sizes[cell].first;
        const std::size_t n_z = cfg.sizes[cell].second;
        std::vector<ReplicateOutcome> outcomes(static_cast<std::size_t>(cfg.n_sim));
        parallel_for(static_cast<std::size_t>(cfg.n_sim), cfg.jobs, [&](std::size_t r) {
            RandomStream rs = RandomStream::substream(cfg.seed, cell, r);
            outcomes[r] = run_replicate(cfg, n_y, n_z, rs);
        });
        for (std::size_t m = 0; m < cfg.methods.size(); ++m) {
            RejectionCell rc;
            rc.scenario = cfg.scenario.scenario;
            rc.dist = cfg.dist.family;
            rc.dof = cfg.dist.dof;
            rc.n_y = n_y;
            rc.n_z = n_z;
            rc.method = cfg.methods[m];
            rc.n_sim = cfg.n_sim;
            int rejected = 0;
            for (const auto& o : outcomes) {
                if (o.verdict[m] < 0) ++rc.n_failed;
                else rejected += o.verdict[m];
            }
            const int valid = cfg.n_sim - rc.n_failed;
            rc.rejection_rate =
                valid > 0 ? static_cast<double>(rejected) / static_cast<double>(valid)
                          : 0.0;
            table.cells.push_back(rc);
        }
    }
    return table;
}

double fitted_cdf(const SchottNullParams& params, double t) {
    return 1.0 - chi2_sf(t / params.scale, params.df);
}

CdfExperiment null_statistic_cdf(const ExperimentConfig& cfg) {
    validate(cfg);
    if (cfg.scenario.scenario != Scenario::S1)
        throw ConfigError("the null-distribution experiment requires scenario s1");

    const std::size_t n_y = cfg.sizes.front().first;
    const std::size_t n_z = cfg.sizes.front().second;

    // One scenario draw defines both the sampling law and the fitted curve.
    RandomStream scenario_stream = RandomStream::substream(cfg.seed, 0);
    const auto matrices = scenario_covariances(cfg.scenario, scenario_stream);
    const SymmetricMatrix& omega_y = matrices.first;
    const SymmetricMatrix& omega_z = matrices.second;

    CdfExperiment out;
    out.fitted = schott_params_from_cov(omega_y, omega_z, n_y, n_z, cfg.k, 1e-8,
                                        DfRounding::Nearest, AlignmentRoute::BasisChange);

    out.statistics.resize(static_cast<std::size_t>(cfg.n_sim));
    parallel_for(static_cast<std::size_t>(cfg.n_sim), cfg.jobs, [&](std::size_t r) {
        RandomStream rs = RandomStream::substream(cfg.seed, 1, r);
        IlrDatasets ilr;
        ilr.y_tilde = sample_ilr(cfg.dist, omega_y, n_y, rs);
        ilr.z_tilde = sample_ilr(cfg.dist, omega_z, n_z, rs);
        out.statistics[r] = test_statistic(ilr, cfg.k);
    });
    std::sort(out.statistics.begin(), out.statistics.end());

    const double n = static_cast<double>(out.statistics.size());
    double ks = 0.0;
    for (std::size_t i = 0; i < out.statistics.size(); ++i) {
        const double f = fitted_cdf(out.fitted, out.statistics[i]);
        ks = std::max(ks, std::fabs(static_cast<double>(i + 1) / n - f));
        ks = std::max(ks, std::fabs(static_cast<double>(i) / n - f));
    }
    out.ks_distance = ks;
    return out;
}

const char* to_string(Scenario s) {
    switch (s) {
        case Scenario::S1: return "s1";
        case Scenario::S2: return "s2";
        case Scenario::S3: return "s3";
    }
    return "?";
}

const char* to_string(DistFamily f) {
    switch (f) {
        case DistFamily::Gaussian: return "gaussian";
        case DistFamily::Student: return "student";
        case DistFamily::Uniform: return "uniform";
    }
    return "?";
}

const char* to_string(Method m) {
    switch (m) {
        case Method::SchottTheo: return "schott_theo";
        case Method::SchottEst: return "schott_est";
        case Method::Bootstrap: return "bootstrap";
    }
    return "?";
}

}  // namespace coda
