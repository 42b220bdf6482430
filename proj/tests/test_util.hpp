#pragma once

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "coda/dataset.hpp"
#include "coda/matrix.hpp"
#include "coda/rng.hpp"
#include "coda/simgen.hpp"
#include "coda/simplex.hpp"

namespace testutil {

inline std::filesystem::path scratch_dir() {
    static const std::filesystem::path dir = [] {
        auto d = std::filesystem::temp_directory_path() /
                 ("coda_tests_" + std::to_string(::getpid()));
        std::filesystem::create_directories(d);
        return d;
    }();
    return dir;
}

inline std::string scratch_file(const std::string& name) {
    return (scratch_dir() / name).string();
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    out << content;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct CliResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

// Runs the installed CLI binary; stdout/stderr captured through files.
inline CliResult run_cli(const std::string& args, const std::string& tag) {
    const std::string out_path = scratch_file("cli_" + tag + ".out");
    const std::string err_path = scratch_file("cli_" + tag + ".err");
    const std::string cmd = std::string(CODA_CLI_PATH) + " " + args + " > " + out_path +
                            " 2> " + err_path;
    const int status = std::system(cmd.c_str());
    CliResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = read_file(out_path);
    r.err = read_file(err_path);
    return r;
}

// Random composition with parts bounded away from zero.
inline coda::Composition random_composition(std::size_t d, coda::RandomStream& rng) {
    std::vector<double> w(d);
    for (auto& x : w) x = std::exp(1.5 * rng.normal());
    return coda::closure(w);
}

inline coda::Matrix random_gaussian_matrix(std::size_t n, std::size_t p,
                                           coda::RandomStream& rng) {
    coda::Matrix m(n, p);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < p; ++j) m(i, j) = rng.normal();
    return m;
}

// A generic S1-style dataset in coordinates, for statistic-level tests.
inline coda::IlrDatasets random_ilr_pair(std::size_t d, std::size_t q, std::size_t n_y,
                                         std::size_t n_z, coda::RandomStream& rng) {
    coda::ScenarioSpec spec;
    spec.scenario = coda::Scenario::S1;
    spec.d = d;
    spec.q = q;
    spec.k = 1;
    spec.alpha.resize(d - q - 1);
    spec.beta.resize(d - 1);
    for (std::size_t i = 0; i < spec.alpha.size(); ++i)
        spec.alpha[i] = 8.0 / double(i + 1);
    for (std::size_t i = 0; i < spec.beta.size(); ++i)
        spec.beta[i] = 6.0 / double(i + 1);
    auto [oy, oz] = coda::scenario_covariances(spec, rng);
    coda::IlrDatasets ilr;
    ilr.y_tilde = coda::sample_ilr({}, oy, n_y, rng);
    ilr.z_tilde = coda::sample_ilr({}, oz, n_z, rng);
    return ilr;
}

inline double max_abs_diff(const coda::Matrix& a, const coda::Matrix& b) {
    coda::Matrix d = a;
    d -= b;
    return d.max_abs();
}

}  // namespace testutil
