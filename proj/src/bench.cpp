#include "tplcov/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <exception>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "tplcov/estimator.hpp"
#include "tplcov/io.hpp"

namespace tplcov {

std::uint64_t Cell::key() const noexcept {
    std::uint64_t tau_bits = 0;
    std::memcpy(&tau_bits, &tau, sizeof tau_bits);
    return derive_seed(static_cast<std::uint64_t>(structure), {p, n, tau_bits});
}

BenchConfig desk_profile() {
    BenchConfig cfg;
    cfg.structures = {Structure::block_diagonal, Structure::sparse_random};
    cfg.p_list = {20, 50};
    cfg.n_list = {40, 100, 250};
    cfg.tau_list = {0.5, 0.9};
    cfg.reps = 50;
    return cfg;
}

BenchConfig table1_profile() {
    BenchConfig cfg = desk_profile();
    cfg.p_list = {20, 50, 150};
    cfg.reps = 100;
    return cfg;
}

std::vector<Cell> expand_grid(const BenchConfig& cfg) {
    if (cfg.structures.empty() || cfg.p_list.empty() || cfg.n_list.empty() ||
        cfg.tau_list.empty()) {
        throw std::invalid_argument("benchmark grid: every list must be nonempty");
    }
    if (cfg.reps < 1) throw std::invalid_argument("benchmark grid: reps must be at least 1");
    if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) {
        throw std::invalid_argument("benchmark grid: alpha must lie in (0, 1)");
    }
    std::vector<Cell> cells;
    for (Structure s : cfg.structures)
        for (double tau : cfg.tau_list)
            for (std::size_t p : cfg.p_list)
                for (std::size_t n : cfg.n_list) {
                    validate(CovSpec{s, p, tau, 0});
                    if (n < 2) throw std::invalid_argument("benchmark grid: n must be at least 2");
                    cells.push_back({s, p, n, tau});
                }
    return cells;
}

ReplicateResult run_replicate(const Cell& cell, double alpha, std::uint64_t master_seed,
                              std::size_t rep) {
    ReplicateResult out;
    try {
        Rng rng = make_stream(master_seed, {cell.key(), rep});
        const CovSpec spec{cell.structure, cell.p, cell.tau, master_seed};
        const Truth truth = generate_truth(spec, rng);
        const DataMatrix data = sample_mvn(truth.theta, cell.n, rng);
        TplOptions opts;
        opts.alpha = alpha;
        const TplFit fit = tpl_estimate(data, opts);
        const SupportMetrics metrics = support_metrics(fit.support, truth.support, cell.p);
        out.ok = true;
        out.sn = metrics.sn;
        out.sp = metrics.sp;
        out.ac = metrics.ac;
        out.lambda_hat = fit.lambda_hat;
        out.support_size = fit.support.size();
        out.m0 = truth.support.m0();
        out.kkt_residual = fit.kkt_residual;
        out.sweeps = fit.sweeps_total;
    } catch (const std::exception& e) {
        out.ok = false;
        out.error = e.what();
    }
    return out;
}

namespace {

MetricSummary summarize(const std::vector<double>& values) {
    MetricSummary out;
    out.count = values.size();
    if (values.empty()) return out;
    double sum = 0.0;
    for (double v : values) sum += v;
    const double mean = sum / static_cast<double>(values.size());
    out.mean = mean;
    if (values.size() >= 2) {
        double ss = 0.0;
        for (double v : values) ss += (v - mean) * (v - mean);
        const double var = ss / static_cast<double>(values.size() - 1);
        out.se = std::sqrt(var / static_cast<double>(values.size()));
    }
    return out;
}

}  // namespace

CellResult aggregate_cell(const Cell& cell, std::span<const ReplicateResult> reps) {
    CellResult out;
    out.cell = cell;
    out.reps = reps.size();
    std::vector<double> sn, sp, ac;
    double lambda_sum = 0.0;
    double support_sum = 0.0;
    for (const auto& r : reps) {
        if (!r.ok) {
            ++out.failed;
            continue;
        }
        ++out.reps_used;
        if (r.sn) sn.push_back(*r.sn);
        if (r.sp) sp.push_back(*r.sp);
        ac.push_back(r.ac);
        lambda_sum += r.lambda_hat;
        support_sum += static_cast<double>(r.support_size);
    }
    out.sn = summarize(sn);
    out.sp = summarize(sp);
    out.ac = summarize(ac);
    if (out.reps_used > 0) {
        out.mean_lambda_hat = lambda_sum / static_cast<double>(out.reps_used);
        out.mean_support_size = support_sum / static_cast<double>(out.reps_used);
    }
    return out;
}

BenchOutput run_benchmark(const BenchConfig& cfg) {
    const std::vector<Cell> cells = expand_grid(cfg);
    BenchOutput out;
    out.replicates.assign(cells.size(), std::vector<ReplicateResult>(cfg.reps));

    const std::size_t total = cells.size() * cfg.reps;
    std::size_t threads = cfg.threads;
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, total);

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t t = next.fetch_add(1); t < total; t = next.fetch_add(1)) {
            const std::size_t c = t / cfg.reps;
            const std::size_t r = t % cfg.reps;
            out.replicates[c][r] = run_replicate(cells[c], cfg.alpha, cfg.master_seed, r);
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
    }

    out.cells.reserve(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
        out.cells.push_back(aggregate_cell(cells[c], out.replicates[c]));
    }
    return out;
}

std::vector<TableRow> aggregate_to_table(std::span<const CellResult> results) {
    using RowKey = std::tuple<int, double, std::size_t>;
    std::map<RowKey, std::map<std::size_t, const CellResult*>> grouped;
    for (const auto& r : results) {
        grouped[{static_cast<int>(r.cell.structure), r.cell.tau, r.cell.p}][r.cell.n] = &r;
    }
    std::set<std::size_t> all_n;
    for (const auto& r : results) all_n.insert(r.cell.n);

    std::vector<TableRow> rows;
    for (const auto& [key, by_n] : grouped) {
        TableRow row{static_cast<Structure>(std::get<0>(key)), std::get<1>(key), std::get<2>(key),
                     {}, {}, {}, {}};
        for (std::size_t n : all_n) {
            row.n_values.push_back(n);
            const auto it = by_n.find(n);
            if (it == by_n.end()) {
                row.sn.emplace_back();
                row.sp.emplace_back();
                row.ac.emplace_back();
            } else {
                row.sn.push_back(it->second->sn.mean);
                row.sp.push_back(it->second->sp.mean);
                row.ac.push_back(it->second->ac.mean);
            }
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string render_table(std::span<const TableRow> rows) {
    if (rows.empty()) return {};
    std::ostringstream os;
    auto cell = [&](const std::optional<double>& v) {
        char buf[16];
        if (v) {
            std::snprintf(buf, sizeof buf, " %5.2f", *v);
        } else {
            std::snprintf(buf, sizeof buf, " %5s", "-");
        }
        os << buf;
    };
    const auto& ns = rows.front().n_values;
    char head[64];
    std::snprintf(head, sizeof head, "%-9s %5s %4s", "structure", "tau", "p");
    os << head;
    for (const char* metric : {"SN", "SP", "AC"}) {
        os << " |";
        for (std::size_t n : ns) {
            char buf[16];
            std::snprintf(buf, sizeof buf, " %2s%-3zu", metric, n);
            os << buf;
        }
    }
    os << '\n';
    for (const auto& row : rows) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%-9s %5.2f %4zu", std::string(to_string(row.structure)).c_str(),
                      row.tau, row.p);
        os << buf;
        for (const auto* metric : {&row.sn, &row.sp, &row.ac}) {
            os << " |";
            for (const auto& v : *metric) cell(v);
        }
        os << '\n';
    }
    return os.str();
}

namespace {

std::string opt_num(const std::optional<double>& v) { return v ? format_number(*v) : ""; }

}  // namespace

void write_results_csv(std::ostream& os, std::span<const CellResult> results) {
    os << "structure,p,n,tau,reps,reps_used,failed,mean_sn,se_sn,count_sn,mean_sp,se_sp,count_sp,"
          "mean_ac,se_ac,count_ac,mean_lambda_hat,mean_support_size\n";
    for (const auto& r : results) {
        os << to_string(r.cell.structure) << ',' << r.cell.p << ',' << r.cell.n << ','
           << format_number(r.cell.tau) << ',' << r.reps << ',' << r.reps_used << ',' << r.failed;
        for (const auto* m : {&r.sn, &r.sp, &r.ac}) {
            os << ',' << opt_num(m->mean) << ',' << opt_num(m->se) << ',' << m->count;
        }
        os << ',' << format_number(r.mean_lambda_hat) << ',' << format_number(r.mean_support_size)
           << '\n';
    }
}

void write_replicates_csv(std::ostream& os, const BenchOutput& out, std::uint64_t master_seed) {
    os << "structure,p,n,tau,rep,seed,status,sn,sp,ac,lambda_hat,support_size,m0,kkt_residual,"
          "sweeps,error\n";
    for (std::size_t c = 0; c < out.cells.size(); ++c) {
        const Cell& cell = out.cells[c].cell;
        for (std::size_t r = 0; r < out.replicates[c].size(); ++r) {
            const auto& rep = out.replicates[c][r];
            os << to_string(cell.structure) << ',' << cell.p << ',' << cell.n << ','
               << format_number(cell.tau) << ',' << r << ','
               << derive_seed(master_seed, {cell.key(), r}) << ',' << (rep.ok ? "ok" : "failed")
               << ',' << opt_num(rep.sn) << ',' << opt_num(rep.sp) << ','
               << (rep.ok ? format_number(rep.ac) : "") << ',' << format_number(rep.lambda_hat)
               << ',' << rep.support_size << ',' << rep.m0 << ',' << format_number(rep.kkt_residual)
               << ',' << rep.sweeps << ',';
            // Errors are free text; keep the CSV one line per replicate.
            std::string msg = rep.error;
            std::replace(msg.begin(), msg.end(), ',', ';');
            std::replace(msg.begin(), msg.end(), '\n', ' ');
            os << msg << '\n';
        }
    }
}

}  // namespace tplcov
