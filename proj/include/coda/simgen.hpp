#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "coda/kernels.hpp"
#include "coda/matrix.hpp"
#include "coda/rng.hpp"
#include "coda/subspace.hpp"

namespace coda {

// Covariance construction scenarios for the Monte Carlo study:
//   S1 - the two groups share their leading-k principal subspace (null true);
//   S2 - only the first principal axis is shared;
//   S3 - independent eigenstructures (no common subspace).
enum class Scenario { S1, S2, S3 };

enum class DistFamily { Gaussian, Student, Uniform };

enum class Method { SchottTheo, SchottEst, Bootstrap };

struct ScenarioSpec {
    Scenario scenario = Scenario::S1;
    std::size_t d = 8;
    std::size_t q = 2;
    int k = 2;  // size of the shared subspace built into S1
    std::vector<double> alpha = {10.0, 9.0, 1.0, 1.0, 0.5};
    std::vector<double> beta = {6.0, 5.0, 1.0, 0.9, 0.3, 0.1, 0.02};
};

struct DistributionSpec {
    DistFamily family = DistFamily::Gaussian;
    std::optional<int> dof;  // required (> 2) for Student
};

struct ExperimentConfig {
    ScenarioSpec scenario;
    DistributionSpec dist;
    std::vector<std::pair<std::size_t, std::size_t>> sizes = {{100, 100}};
    int n_sim = 1000;
    double level = 0.05;
    std::vector<Method> methods = {Method::SchottTheo, Method::SchottEst,
                                   Method::Bootstrap};
    int n_boot = 1000;
    int k = 2;
    std::uint64_t seed = 0;
    unsigned jobs = 1;
};

struct RejectionCell {
    Scenario scenario;
    DistFamily dist;
    std::optional<int> dof;
    std::size_t n_y = 0;
    std::size_t n_z = 0;
    Method method;
    double rejection_rate = 0.0;
    int n_sim = 0;
    int n_failed = 0;
};

struct RejectionTable {
    std::vector<RejectionCell> cells;
};

struct CdfExperiment {
    std::vector<double> statistics;  // sorted ascending; cdf step i/n at entry i-1
    SchottNullParams fitted;         // from the true covariance matrices
    double ks_distance = 0.0;        // sup |empirical - fitted|
};

void validate(const ScenarioSpec& spec);
void validate(const DistributionSpec& dist);
void validate(const ExperimentConfig& cfg);

// Draws the pair (Omega_Y, Omega_Z) for the scenario: Omega_Y from a Haar
// basis with spectrum alpha; Omega_Z from a basis sharing k axes (S1), one
// axis (S2) or nothing (S3), with spectrum beta.
std::pair<SymmetricMatrix, SymmetricMatrix> scenario_covariances(
    const ScenarioSpec& spec, RandomStream& rng);

// n draws with population covariance exactly omega: Gaussian, scaled Student
// t (dof > 2), or a unit-variance uniform cube pushed through the Cholesky
// factor.
Matrix sample_ilr(const DistributionSpec& dist, const SymmetricMatrix& omega,
                  std::size_t n, RandomStream& rng);

// Rejection-rate table over the (n_y, n_z) grid and method set; per-replicate
// degenerate-eigengap failures are counted per method, not fatal.
RejectionTable run_rejection_experiment(const ExperimentConfig& cfg);

// Null-distribution experiment (scenario S1 only): one scenario draw, n_sim
// simulated statistics, and the fitted chi-square law from the true matrices.
CdfExperiment null_statistic_cdf(const ExperimentConfig& cfg);

// Fitted cdf value at t.
double fitted_cdf(const SchottNullParams& params, double t);

const char* to_string(Scenario s);
const char* to_string(DistFamily f);
const char* to_string(Method m);

}  // namespace coda
