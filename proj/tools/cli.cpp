#include "cli.hpp"

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "tplcov/bench.hpp"
#include "tplcov/errors.hpp"
#include "tplcov/estimator.hpp"
#include "tplcov/io.hpp"
#include "tplcov/simulate.hpp"

namespace tplcov::cli {

namespace {

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::ofstream open_for_write(const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw UsageError("cannot write " + path);
    return os;
}

const CLI::Validator kOpenUnit(
    [](std::string& s) -> std::string {
        const double v = std::stod(s);
        return (v > 0.0 && v < 1.0) ? "" : "must lie strictly between 0 and 1";
    },
    "(0,1)");

const CLI::Validator kNonNegative(
    [](std::string& s) -> std::string {
        const double v = std::stod(s);
        return (std::isfinite(v) && v >= 0.0) ? "" : "must be finite and non-negative";
    },
    ">=0");

const CLI::Validator kPositive(
    [](std::string& s) -> std::string {
        const double v = std::stod(s);
        return (std::isfinite(v) && v > 0.0) ? "" : "must be finite and positive";
    },
    ">0");

Structure structure_from(const std::string& name) {
    const auto s = parse_structure(name);
    if (!s) throw UsageError("unknown structure '" + name + "' (expected block or random)");
    return *s;
}

struct EstimateArgs {
    std::string input, output, summary;
    std::string format = "triplet";
    std::optional<double> alpha, lambda;
    bool center = false;
    double tol = OptimizerConfig{}.tol;
    std::size_t max_sweeps = OptimizerConfig{}.max_sweeps;
};

int cmd_estimate(const EstimateArgs& a, std::ostream& out, std::ostream& err) {
    const DataMatrix data = read_data_csv_file(a.input);

    std::ofstream est_os = open_for_write(a.output);
    std::optional<std::ofstream> summary_os;
    if (!a.summary.empty()) summary_os.emplace(open_for_write(a.summary));

    TplOptions opts;
    opts.alpha = a.alpha;
    opts.lambda = a.lambda;
    if (!opts.alpha && !opts.lambda) opts.alpha = 0.1;
    opts.center = a.center;
    opts.cd.tol = a.tol;
    opts.cd.max_sweeps = a.max_sweeps;
    const TplFit fit = tpl_estimate(data, opts);
    if (!fit.converged) {
        err << "warning: coordinate descent stopped at max-sweeps before reaching tol\n";
    }

    if (a.format == "dense") {
        write_dense(est_os, fit.theta_hat);
    } else {
        write_triplets(est_os, fit.theta_hat);
    }

    nlohmann::ordered_json rec;
    rec["schema"] = 1;
    rec["p"] = data.p();
    rec["n"] = data.n();
    rec["lambda_hat"] = fit.lambda_hat;
    rec["gamma"] = fit.gamma ? nlohmann::ordered_json(*fit.gamma) : nlohmann::ordered_json();
    rec["alpha"] = opts.alpha ? nlohmann::ordered_json(*opts.alpha) : nlohmann::ordered_json();
    rec["support_size"] = fit.support.size();
    rec["sweeps_total"] = fit.sweeps_total;
    rec["kkt_residual"] = fit.kkt_residual;
    rec["converged"] = fit.converged;
    rec["centered"] = a.center;
    std::ostream& sos = summary_os ? static_cast<std::ostream&>(*summary_os) : out;
    sos << rec.dump(2) << '\n';
    return kOk;
}

struct SimulateArgs {
    std::string structure = "block";
    std::size_t p = 20;
    std::size_t n = 100;
    double tau = 0.9;
    std::uint64_t seed = 1;
    std::string out, truth;
};

int cmd_simulate(const SimulateArgs& a) {
    const CovSpec spec{structure_from(a.structure), a.p, a.tau, a.seed};
    validate(spec);
    if (a.n < 2) throw UsageError("--n must be at least 2");
    Rng rng = make_stream(a.seed, {});
    const Truth truth = generate_truth(spec, rng);
    const DataMatrix data = sample_mvn(truth.theta, a.n, rng);

    std::ofstream data_os = open_for_write(a.out);
    std::ofstream truth_os = open_for_write(a.truth);
    write_data_csv(data_os, data);
    write_triplets(truth_os, truth.theta);
    return kOk;
}

struct BenchmarkArgs {
    std::string profile;
    std::vector<std::string> structures;
    std::vector<std::size_t> p_list, n_list;
    std::vector<double> tau_list;
    std::optional<std::size_t> reps;
    std::uint64_t seed = 1;
    double alpha = 0.1;
    std::size_t threads = 0;
    std::string out_dir = ".";
};

int cmd_benchmark(const BenchmarkArgs& a, std::ostream& out, std::ostream& err) {
    BenchConfig cfg;
    if (a.profile == "desk") {
        cfg = desk_profile();
    } else if (a.profile == "table1") {
        cfg = table1_profile();
    } else {
        if (!a.structures.empty()) {
            cfg.structures.clear();
            for (const auto& s : a.structures) cfg.structures.push_back(structure_from(s));
        }
        if (!a.p_list.empty()) cfg.p_list = a.p_list;
        if (!a.n_list.empty()) cfg.n_list = a.n_list;
        if (!a.tau_list.empty()) cfg.tau_list = a.tau_list;
    }
    if (a.reps) cfg.reps = *a.reps;
    cfg.master_seed = a.seed;
    cfg.alpha = a.alpha;
    cfg.threads = a.threads;
    expand_grid(cfg);

    std::filesystem::create_directories(a.out_dir);
    const std::filesystem::path dir(a.out_dir);
    std::ofstream results_os = open_for_write((dir / "results.csv").string());
    std::ofstream reps_os = open_for_write((dir / "replicates.csv").string());

    const BenchOutput res = run_benchmark(cfg);
    write_results_csv(results_os, res.cells);
    write_replicates_csv(reps_os, res, cfg.master_seed);
    const auto rows = aggregate_to_table(res.cells);
    out << render_table(rows);

    std::size_t failed = 0, total = 0;
    for (const auto& c : res.cells) {
        failed += c.failed;
        total += c.reps;
        if (c.failed > 0) {
            err << "warning: " << to_string(c.cell.structure) << " p=" << c.cell.p
                << " n=" << c.cell.n << " tau=" << c.cell.tau << ": " << c.failed << " of "
                << c.reps << " replicates failed\n";
        }
    }
    if (total > 0 && failed == total) {
        err << "error: every replicate failed\n";
        return kNumericError;
    }
    return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Sparse covariance estimation by truncated pairwise likelihood", "tplcov"};
    app.require_subcommand(1);

    EstimateArgs est;
    auto* estimate = app.add_subcommand("estimate", "Estimate a sparse covariance from a CSV file");
    estimate->add_option("--input", est.input, "Data CSV, one row per observation")->required();
    estimate->add_option("--output", est.output, "Estimate output path")->required();
    estimate->add_option("--format", est.format, "Output format")
        ->check(CLI::IsMember({"dense", "triplet"}));
    estimate->add_option("--summary", est.summary, "Summary JSON path (default: stdout)");
    auto* alpha_opt = estimate->add_option("--alpha", est.alpha, "Chi-square level")->check(kOpenUnit);
    auto* lambda_opt =
        estimate->add_option("--lambda", est.lambda, "Fixed penalty")->check(kNonNegative);
    alpha_opt->excludes(lambda_opt);
    estimate->add_flag("--center", est.center, "Subtract column means first");
    estimate->add_option("--tol", est.tol, "Coordinate descent tolerance")->check(kPositive);
    estimate->add_option("--max-sweeps", est.max_sweeps, "Coordinate descent sweep cap")
        ->check(CLI::PositiveNumber);

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "Draw a synthetic dataset and its truth");
    simulate->add_option("--structure", sim.structure, "block or random");
    simulate->add_option("--p", sim.p, "Dimension")->check(CLI::Range(std::size_t{2}, std::size_t{1} << 20));
    simulate->add_option("--n", sim.n, "Sample size")->check(CLI::Range(std::size_t{2}, std::size_t{1} << 30));
    simulate->add_option("--tau", sim.tau, "Proportion of zero off-diagonals")->check(kOpenUnit);
    simulate->add_option("--seed", sim.seed, "Master seed");
    simulate->add_option("--out", sim.out, "Data CSV path")->required();
    simulate->add_option("--truth", sim.truth, "Truth triplet CSV path")->required();

    BenchmarkArgs bench;
    auto* benchmark = app.add_subcommand("benchmark", "Monte Carlo support-recovery benchmark");
    auto* profile_opt = benchmark->add_option("--profile", bench.profile, "Named grid")
                            ->check(CLI::IsMember({"desk", "table1"}));
    auto* s_opt = benchmark->add_option("--structure", bench.structures, "Structures")->delimiter(',');
    auto* p_opt = benchmark->add_option("--p", bench.p_list, "Dimensions")->delimiter(',');
    auto* n_opt = benchmark->add_option("--n", bench.n_list, "Sample sizes")->delimiter(',');
    auto* t_opt = benchmark->add_option("--tau", bench.tau_list, "Sparsity levels")
                      ->delimiter(',')
                      ->check(kOpenUnit);
    for (auto* o : {s_opt, p_opt, n_opt, t_opt}) profile_opt->excludes(o);
    benchmark->add_option("--reps", bench.reps, "Replicates per cell")->check(CLI::PositiveNumber);
    benchmark->add_option("--seed", bench.seed, "Master seed");
    benchmark->add_option("--alpha", bench.alpha, "Chi-square level")->check(kOpenUnit);
    benchmark->add_option("--threads", bench.threads, "Worker threads (0: all cores)")
        ->envname("TPLCOV_THREADS");
    benchmark->add_option("--out-dir", bench.out_dir, "Directory for results.csv and replicates.csv");

    std::vector<const char*> argv{"tplcov"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*estimate) return cmd_estimate(est, out, err);
        if (*simulate) return cmd_simulate(sim);
        return cmd_benchmark(bench, out, err);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const DataError& e) {
        err << "error: " << e.what() << '\n';
        return kDataError;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return kNumericError;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kNumericError;
    }
}

}  // namespace tplcov::cli
