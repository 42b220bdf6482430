// coda-subspace: common principal-subspace testing for compositional data
// with structural zeros.
//
// Subcommands:
//   test       run the subspace test on a CSV dataset
//   simulate   Monte Carlo rejection-rate tables over scenario/distribution grids
//   transform  pivot-coordinate transform of a dataset (and its inverse)
//   cdf        empirical null cdf of the statistic vs. the fitted chi-square law
//
// Exit codes: 0 success, 1 statistical-input error, 2 usage error.

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "coda/dataset.hpp"
#include "coda/errors.hpp"
#include "coda/simgen.hpp"
#include "coda/subspace.hpp"

namespace {

using nlohmann::json;

std::string fmt(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

std::string csv_quote(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') { cur += '"'; ++i; }
                else quoted = false;
            } else cur += c;
        } else if (c == '"' && cur.empty()) {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else cur += c;
    }
    fields.push_back(cur);
    return fields;
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
    if (flag) return *flag;
    if (const char* env = std::getenv("CODA_SEED")) {
        try {
            return std::stoull(env);
        } catch (...) {
            throw coda::ConfigError("CODA_SEED is not a valid integer");
        }
    }
    throw coda::ConfigError("a seed is required (--seed or CODA_SEED)");
}

unsigned resolve_jobs(const std::optional<unsigned>& flag) {
    if (flag) return std::max(1u, *flag);
    if (const char* env = std::getenv("CODA_JOBS")) {
        try {
            return std::max(1u, static_cast<unsigned>(std::stoul(env)));
        } catch (...) {
            throw coda::ConfigError("CODA_JOBS is not a valid integer");
        }
    }
    return 1;
}

std::vector<std::pair<std::size_t, std::size_t>> parse_sizes(const std::string& text) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto x = item.find('x');
        if (x == std::string::npos)
            throw coda::ConfigError("sizes must look like 100x100[,60x20...]");
        try {
            out.emplace_back(std::stoul(item.substr(0, x)), std::stoul(item.substr(x + 1)));
        } catch (...) {
            throw coda::ConfigError("cannot parse size pair '" + item + "'");
        }
    }
    if (out.empty()) throw coda::ConfigError("no size pairs given");
    return out;
}

coda::Scenario parse_scenario(const std::string& s) {
    if (s == "s1") return coda::Scenario::S1;
    if (s == "s2") return coda::Scenario::S2;
    if (s == "s3") return coda::Scenario::S3;
    throw coda::ConfigError("scenario must be one of s1|s2|s3");
}

coda::DistFamily parse_dist(const std::string& s) {
    if (s == "gaussian") return coda::DistFamily::Gaussian;
    if (s == "student") return coda::DistFamily::Student;
    if (s == "uniform") return coda::DistFamily::Uniform;
    throw coda::ConfigError("dist must be one of gaussian|student|uniform");
}

std::vector<coda::Method> parse_methods(const std::string& text) {
    std::vector<coda::Method> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item == "schott_theo") out.push_back(coda::Method::SchottTheo);
        else if (item == "schott_est") out.push_back(coda::Method::SchottEst);
        else if (item == "bootstrap") out.push_back(coda::Method::Bootstrap);
        else throw coda::ConfigError("unknown method '" + item + "'");
    }
    if (out.empty()) throw coda::ConfigError("no methods given");
    return out;
}

// Streams to --out when given, stdout otherwise.
class OutputTarget {
public:
    explicit OutputTarget(const std::string& path) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) throw coda::ConfigError("cannot write '" + path + "'");
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

private:
    std::ofstream file_;
};

// ---------------------------------------------------------------------------
// test
// ---------------------------------------------------------------------------

struct TestArgs {
    std::string csv_path;
    std::optional<int> k;
    std::string k_range;
    std::string method = "both";
    int n_boot = 1000;
    std::optional<std::uint64_t> seed;
    double level = 0.05;
    double eigengap_tol = 1e-8;
    std::string df_rounding = "nearest";
    bool json_output = false;
    bool allow_no_zeros = false;
    std::string zero_parts;
    std::string out;
};

std::pair<int, int> parse_k_range(const std::string& text) {
    const auto pos = text.find("..");
    if (pos == std::string::npos)
        throw coda::ConfigError("k range must look like 1..4");
    try {
        return {std::stoi(text.substr(0, pos)), std::stoi(text.substr(pos + 2))};
    } catch (...) {
        throw coda::ConfigError("cannot parse k range '" + text + "'");
    }
}

int run_test_command(const TestArgs& args) {
    if (!args.k && args.k_range.empty())
        throw coda::ConfigError("either --k or --k-range is required");
    coda::TestMethod method;
    if (args.method == "schott") method = coda::TestMethod::Schott;
    else if (args.method == "bootstrap") method = coda::TestMethod::Bootstrap;
    else if (args.method == "both") method = coda::TestMethod::Both;
    else throw coda::ConfigError("method must be one of schott|bootstrap|both");

    if (!(args.level > 0.0 && args.level < 1.0))
        throw coda::ConfigError("level must be in (0,1)");
    coda::LoadOptions load_opts;
    if (!args.zero_parts.empty())
        load_opts.zero_parts = split_fields(args.zero_parts);

    const coda::CompositionalDataset ds = coda::load_csv(args.csv_path, load_opts);
    if (ds.q == 0 && !args.allow_no_zeros)
        throw coda::ConfigError(
            "dataset has no structural zeros; pass --allow-no-zeros to test anyway");

    coda::SubspaceTestConfig cfg;
    cfg.method = method;
    cfg.n_boot = args.n_boot;
    cfg.eigengap_tol = args.eigengap_tol;
    if (args.df_rounding == "nearest") cfg.df_rounding = coda::DfRounding::Nearest;
    else if (args.df_rounding == "floor") cfg.df_rounding = coda::DfRounding::Floor;
    else throw coda::ConfigError("df rounding must be nearest|floor");
    if (method != coda::TestMethod::Schott) cfg.seed = resolve_seed(args.seed);

    int k_lo, k_hi;
    if (args.k) k_lo = k_hi = *args.k;
    else std::tie(k_lo, k_hi) = parse_k_range(args.k_range);
    if (k_lo < 1 || k_hi < k_lo)
        throw coda::ConfigError("invalid k range");

    OutputTarget target(args.out);
    std::ostream& os = target.stream();

    if (!args.json_output) {
        os << "dataset: " << args.csv_path << "\n";
        os << "parts: D=" << ds.n_parts() << " (q=" << ds.q
           << " structural zeros), n_y=" << ds.n_y() << ", n_z=" << ds.n_z() << "\n";
        for (const auto& w : ds.warnings) os << "note: " << w << "\n";
    }

    bool any_failed = false;
    for (int k = k_lo; k <= k_hi; ++k) {
        cfg.k = k;
        std::vector<coda::TestResult> results;
        try {
            results = coda::run_test(ds, cfg);
        } catch (const coda::Error& e) {
            std::cerr << e.name() << " (k=" << k << "): " << e.what() << "\n";
            any_failed = true;
            continue;
        }
        for (const auto& r : results) {
            if (args.json_output) {
                json rec;
                rec["command"] = "test";
                rec["input"] = args.csv_path;
                rec["k"] = r.k;
                rec["method"] = r.method;
                rec["statistic"] = r.statistic;
                rec["p_value"] = r.p_value;
                rec["level"] = args.level;
                rec["reject"] = r.p_value <= args.level;
                if (r.null_params) {
                    rec["mu_t"] = r.null_params->mu_t;
                    rec["sigma2_t"] = r.null_params->sigma2_t;
                    rec["df"] = r.null_params->df;
                    rec["scale"] = r.null_params->scale;
                }
                if (r.n_boot_used) {
                    rec["n_boot"] = *r.n_boot_used;
                    rec["seed"] = cfg.seed;
                }
                std::vector<std::string> warnings = ds.warnings;
                warnings.insert(warnings.end(), r.warnings.begin(), r.warnings.end());
                rec["warnings"] = warnings;
                os << rec.dump() << "\n";
            } else {
                os << "k=" << r.k << "  method=" << r.method << "  T=" << fmt(r.statistic)
                   << "  p=" << fmt(r.p_value);
                if (r.null_params)
                    os << "  df=" << r.null_params->df
                       << "  scale=" << fmt(r.null_params->scale);
                if (r.n_boot_used) os << "  n_boot=" << *r.n_boot_used;
                os << (r.p_value <= args.level ? "  [reject" : "  [retain")
                   << " at " << fmt(args.level) << "]\n";
                for (const auto& w : r.warnings) os << "warning: " << w << "\n";
            }
        }
    }
    return any_failed ? 1 : 0;
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

struct SimulateArgs {
    std::string scenario;
    std::string dist;
    std::optional<int> dof;
    std::string sizes;
    int n_sim = 1000;
    int n_boot = 1000;
    std::string methods = "schott_theo,schott_est,bootstrap";
    int k = 2;
    double level = 0.05;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> jobs;
    bool reduced = false;
    std::string out;
};

int run_simulate_command(const SimulateArgs& args) {
    coda::ExperimentConfig cfg;
    cfg.scenario.scenario = parse_scenario(args.scenario);
    cfg.dist.family = parse_dist(args.dist);
    cfg.dist.dof = args.dof;
    cfg.sizes = parse_sizes(args.sizes);
    cfg.n_sim = args.reduced ? 200 : args.n_sim;
    cfg.n_boot = args.reduced ? 200 : args.n_boot;
    cfg.methods = parse_methods(args.methods);
    cfg.k = args.k;
    cfg.scenario.k = args.k;
    cfg.level = args.level;
    cfg.seed = resolve_seed(args.seed);
    cfg.jobs = resolve_jobs(args.jobs);
    coda::validate(cfg);

    const coda::RejectionTable table = coda::run_rejection_experiment(cfg);

    OutputTarget target(args.out);
    std::ostream& os = target.stream();
    os << "# coda-subspace simulate scenario=" << args.scenario << " dist=" << args.dist
       << " dof=" << (args.dof ? std::to_string(*args.dof) : "") << " sizes=" << args.sizes
       << " n_sim=" << cfg.n_sim << " n_boot=" << cfg.n_boot << " k=" << cfg.k
       << " level=" << fmt(cfg.level) << " seed=" << cfg.seed
       << " methods=" << args.methods << "\n";
    os << "scenario,dist,dof,n_y,n_z,method,rejection_rate,n_sim,n_failed\n";
    for (const auto& c : table.cells) {
        os << coda::to_string(c.scenario) << "," << coda::to_string(c.dist) << ","
           << (c.dof ? std::to_string(*c.dof) : "") << "," << c.n_y << "," << c.n_z << ","
           << coda::to_string(c.method) << "," << fmt(c.rejection_rate) << "," << c.n_sim
           << "," << c.n_failed << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------------------
// transform
// ---------------------------------------------------------------------------

struct TransformArgs {
    std::string csv_path;
    bool inverse = false;
    std::string zero_parts;
    std::string out;
};

void write_transform(const coda::CompositionalDataset& ds, std::ostream& os) {
    const coda::IlrDatasets ilr = coda::ilr_transform_split(ds);
    const std::size_t pz = ilr.z_tilde.cols();
    const std::size_t py = pz - ds.q;
    os << "# q=" << ds.q << "\n";
    os << "# parts=";
    for (std::size_t j = 0; j < ds.n_parts(); ++j)
        os << (j ? "," : "") << csv_quote(ds.part_names[j]);
    os << "\n";
    os << "block";
    for (std::size_t j = 0; j < pz; ++j) os << ",c" << (j + 1);
    os << "\n";
    for (std::size_t r = 0; r < ilr.y_tilde.rows(); ++r) {
        os << "Y";
        for (std::size_t j = 0; j < py; ++j) os << "," << fmt(ilr.y_tilde(r, j));
        for (std::size_t j = py; j < pz; ++j) os << ",";
        os << "\n";
    }
    for (std::size_t r = 0; r < ilr.z_tilde.rows(); ++r) {
        os << "Z";
        for (std::size_t j = 0; j < pz; ++j) os << "," << fmt(ilr.z_tilde(r, j));
        os << "\n";
    }
}

coda::CompositionalDataset read_transform(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw coda::ParseError("cannot open '" + path + "'");
    std::optional<std::size_t> q;
    std::vector<std::string> parts;
    std::vector<std::vector<double>> y_rows, z_rows;
    std::size_t pz = 0;
    std::string line;
    bool header_seen = false;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            const std::string body = line.substr(1);
            const auto trimmed = body.find_first_not_of(' ');
            if (trimmed == std::string::npos) continue;
            const std::string payload = body.substr(trimmed);
            if (payload.rfind("q=", 0) == 0) q = std::stoul(payload.substr(2));
            else if (payload.rfind("parts=", 0) == 0)
                parts = split_fields(payload.substr(6));
            continue;
        }
        if (!header_seen) {
            const auto fields = split_fields(line);
            if (fields.empty() || fields[0] != "block")
                throw coda::ParseError("coordinate file must start with a 'block' header");
            pz = fields.size() - 1;
            header_seen = true;
            continue;
        }
        const auto fields = split_fields(line);
        if (fields.size() != pz + 1)
            throw coda::ParseError("line " + std::to_string(line_no) +
                                   " has the wrong number of fields");
        if (!q) throw coda::ParseError("coordinate file is missing the '# q=' line");
        const std::size_t py = pz - *q;
        std::vector<double> coords;
        const std::size_t width = fields[0] == "Y" ? py : pz;
        for (std::size_t j = 0; j < width; ++j) {
            try {
                coords.push_back(std::stod(fields[j + 1]));
            } catch (...) {
                throw coda::ParseError("non-numeric coordinate on line " +
                                       std::to_string(line_no));
            }
        }
        if (fields[0] == "Y") y_rows.push_back(std::move(coords));
        else if (fields[0] == "Z") z_rows.push_back(std::move(coords));
        else throw coda::ParseError("block tag must be Y or Z on line " +
                                    std::to_string(line_no));
    }
    if (!q) throw coda::ParseError("coordinate file is missing the '# q=' line");
    auto to_matrix = [](const std::vector<std::vector<double>>& rows, std::size_t cols) {
        coda::Matrix m(rows.size(), cols);
        for (std::size_t r = 0; r < rows.size(); ++r)
            for (std::size_t j = 0; j < cols; ++j) m(r, j) = rows[r][j];
        return m;
    };
    const std::size_t py = pz - *q;
    return coda::dataset_from_ilr(to_matrix(y_rows, py), to_matrix(z_rows, pz), *q,
                                  std::move(parts), path);
}

int run_transform_command(const TransformArgs& args) {
    OutputTarget target(args.out);
    if (args.inverse) {
        const coda::CompositionalDataset ds = read_transform(args.csv_path);
        coda::write_csv(ds, target.stream());
        return 0;
    }
    coda::LoadOptions load_opts;
    if (!args.zero_parts.empty())
        load_opts.zero_parts = split_fields(args.zero_parts);
    const coda::CompositionalDataset ds = coda::load_csv(args.csv_path, load_opts);
    write_transform(ds, target.stream());
    return 0;
}

// ---------------------------------------------------------------------------
// cdf
// ---------------------------------------------------------------------------

struct CdfArgs {
    std::string scenario = "s1";
    std::string dist = "gaussian";
    std::optional<int> dof;
    std::string sizes = "100x100";
    int n_sim = 1000;
    int k = 2;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> jobs;
    std::string out;
};

double fitted_quantile(const coda::SchottNullParams& params, double prob, double hi) {
    double lo = 0.0;
    while (coda::fitted_cdf(params, hi) < prob) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (coda::fitted_cdf(params, mid) < prob) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

int run_cdf_command(const CdfArgs& args) {
    if (args.scenario != "s1")
        throw coda::ConfigError("the cdf experiment is defined for scenario s1 only");

    coda::ExperimentConfig cfg;
    cfg.scenario.scenario = coda::Scenario::S1;
    cfg.dist.family = parse_dist(args.dist);
    cfg.dist.dof = args.dof;
    cfg.sizes = parse_sizes(args.sizes);
    cfg.n_sim = args.n_sim;
    cfg.k = args.k;
    cfg.scenario.k = args.k;
    cfg.seed = resolve_seed(args.seed);
    cfg.jobs = resolve_jobs(args.jobs);
    coda::validate(cfg);

    const coda::CdfExperiment exp = coda::null_statistic_cdf(cfg);
    const std::size_t n = exp.statistics.size();

    const auto q_index = static_cast<std::size_t>(
        std::ceil(0.95 * static_cast<double>(n))) - 1;
    const double emp_q95 = exp.statistics[std::min(q_index, n - 1)];
    const double fit_q95 = fitted_quantile(exp.fitted, 0.95,
                                           std::max(1.0, exp.statistics.back()));
    const char* tail = emp_q95 > fit_q95 ? "right" : (emp_q95 < fit_q95 ? "left" : "match");

    std::ostringstream header;
    header << "# coda-subspace cdf scenario=s1 dist=" << args.dist << " dof="
           << (args.dof ? std::to_string(*args.dof) : "") << " n_y=" << cfg.sizes[0].first
           << " n_z=" << cfg.sizes[0].second << " n_sim=" << cfg.n_sim << " k=" << cfg.k
           << " seed=" << cfg.seed << "\n"
           << "# fitted: mu_t=" << fmt(exp.fitted.mu_t)
           << " sigma2_t=" << fmt(exp.fitted.sigma2_t) << " df=" << exp.fitted.df
           << " scale=" << fmt(exp.fitted.scale) << "\n"
           << "# ks_distance=" << fmt(exp.ks_distance) << "\n"
           << "# q95_empirical=" << fmt(emp_q95) << " q95_fitted=" << fmt(fit_q95)
           << " empirical_tail=" << tail << "\n";

    if (!args.out.empty()) {
        std::ofstream emp(args.out + ".empirical.csv");
        std::ofstream fit(args.out + ".fitted.csv");
        if (!emp || !fit)
            throw coda::ConfigError("cannot write output files at '" + args.out + "'");
        emp << header.str() << "x,cdf\n";
        fit << header.str() << "x,cdf\n";
        for (std::size_t i = 0; i < n; ++i) {
            emp << fmt(exp.statistics[i]) << ","
                << fmt(static_cast<double>(i + 1) / static_cast<double>(n)) << "\n";
            fit << fmt(exp.statistics[i]) << ","
                << fmt(coda::fitted_cdf(exp.fitted, exp.statistics[i])) << "\n";
        }
        std::cout << header.str();
        return 0;
    }
    std::cout << header.str() << "stream,x,cdf\n";
    for (std::size_t i = 0; i < n; ++i)
        std::cout << "empirical," << fmt(exp.statistics[i]) << ","
                  << fmt(static_cast<double>(i + 1) / static_cast<double>(n)) << "\n";
    for (std::size_t i = 0; i < n; ++i)
        std::cout << "fitted," << fmt(exp.statistics[i]) << ","
                  << fmt(coda::fitted_cdf(exp.fitted, exp.statistics[i])) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Common principal-subspace testing for compositional data "
                 "with structural zeros"};
    app.require_subcommand(1);

    TestArgs test_args;
    auto* test = app.add_subcommand("test", "Run the subspace test on a CSV dataset");
    test->add_option("csv", test_args.csv_path, "Input CSV file")->required();
    auto* k_opt = test->add_option("--k", test_args.k, "Subspace size to test");
    test->add_option("--k-range", test_args.k_range, "Loop over k, e.g. 1..4")
        ->excludes(k_opt);
    test->add_option("--method", test_args.method, "schott|bootstrap|both")
        ->default_val("both");
    test->add_option("--n-boot", test_args.n_boot, "Bootstrap replicates")
        ->default_val(1000);
    test->add_option("--seed", test_args.seed, "Random seed (or CODA_SEED)");
    test->add_option("--level", test_args.level, "Significance level")->default_val(0.05);
    test->add_option("--eigengap-tol", test_args.eigengap_tol,
                     "Relative eigengap tolerance")->default_val(1e-8);
    test->add_option("--df-rounding", test_args.df_rounding,
                     "Degrees-of-freedom rounding: nearest|floor")
        ->default_val("nearest");
    test->add_flag("--json", test_args.json_output, "Emit line-delimited JSON records");
    test->add_flag("--allow-no-zeros", test_args.allow_no_zeros,
                   "Accept datasets without structural zeros");
    test->add_option("--zero-parts", test_args.zero_parts,
                     "Comma-separated structural-zero part names");
    test->add_option("--out", test_args.out, "Write output to a file");

    SimulateArgs sim_args;
    auto* sim = app.add_subcommand("simulate", "Monte Carlo rejection-rate table");
    sim->add_option("--scenario", sim_args.scenario, "s1|s2|s3")->required();
    sim->add_option("--dist", sim_args.dist, "gaussian|student|uniform")->required();
    sim->add_option("--dof", sim_args.dof, "Student degrees of freedom");
    sim->add_option("--sizes", sim_args.sizes, "Size grid, e.g. 100x100,60x20")
        ->required();
    sim->add_option("--n-sim", sim_args.n_sim, "Simulations per cell")->default_val(1000);
    sim->add_option("--n-boot", sim_args.n_boot, "Bootstrap replicates")
        ->default_val(1000);
    sim->add_option("--methods", sim_args.methods,
                    "Comma list of schott_theo|schott_est|bootstrap")
        ->default_val("schott_theo,schott_est,bootstrap");
    sim->add_option("--k", sim_args.k, "Subspace size")->default_val(2);
    sim->add_option("--level", sim_args.level, "Significance level")->default_val(0.05);
    sim->add_option("--seed", sim_args.seed, "Random seed (or CODA_SEED)");
    sim->add_option("--jobs", sim_args.jobs, "Parallel replicate workers (or CODA_JOBS)");
    sim->add_flag("--reduced", sim_args.reduced, "Desk-scale preset (n_sim=200, n_boot=200)");
    sim->add_option("--out", sim_args.out, "Write the CSV table to a file");

    TransformArgs tr_args;
    auto* tr = app.add_subcommand("transform", "Pivot-coordinate transform of a dataset");
    tr->add_option("csv", tr_args.csv_path, "Input CSV file")->required();
    tr->add_flag("--inverse", tr_args.inverse,
                 "Input is a coordinate file; reconstruct compositions");
    tr->add_option("--zero-parts", tr_args.zero_parts,
                   "Comma-separated structural-zero part names");
    tr->add_option("--out", tr_args.out, "Write output to a file");

    CdfArgs cdf_args;
    auto* cdf = app.add_subcommand("cdf", "Empirical vs fitted null cdf of the statistic");
    cdf->add_option("--scenario", cdf_args.scenario, "Must be s1")->default_val("s1");
    cdf->add_option("--dist", cdf_args.dist, "gaussian|student|uniform")
        ->default_val("gaussian");
    cdf->add_option("--dof", cdf_args.dof, "Student degrees of freedom");
    cdf->add_option("--sizes", cdf_args.sizes, "One size pair, e.g. 100x100")
        ->default_val("100x100");
    cdf->add_option("--n-sim", cdf_args.n_sim, "Number of simulated statistics")
        ->default_val(1000);
    cdf->add_option("--k", cdf_args.k, "Subspace size")->default_val(2);
    cdf->add_option("--seed", cdf_args.seed, "Random seed (or CODA_SEED)");
    cdf->add_option("--jobs", cdf_args.jobs, "Parallel workers (or CODA_JOBS)");
    cdf->add_option("--out", cdf_args.out,
                    "Base path; writes <base>.empirical.csv and <base>.fitted.csv");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        std::cerr << "run with --help for usage\n";
        return 2;
    }

    try {
        if (test->parsed()) return run_test_command(test_args);
        if (sim->parsed()) return run_simulate_command(sim_args);
        if (tr->parsed()) return run_transform_command(tr_args);
        if (cdf->parsed()) return run_cdf_command(cdf_args);
    } catch (const coda::ConfigError& e) {
        std::cerr << e.name() << ": " << e.what() << "\n";
        return 2;
    } catch (const coda::Error& e) {
        std::cerr << e.name() << ": " << e.what() << "\n";
        return 1;
    }
    return 0;
}
