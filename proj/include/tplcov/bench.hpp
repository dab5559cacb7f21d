#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "tplcov/simulate.hpp"

namespace tplcov {

struct Cell {
    Structure structure = Structure::block_diagonal;
    std::size_t p = 20;
    std::size_t n = 100;
    double tau = 0.9;

    // Stable key mixed into replicate seeds; depends only on the cell's
    // parameters, so a cell draws the same data alone or inside a grid.
    std::uint64_t key() const noexcept;
};

struct BenchConfig {
    std::vector<Structure> structures{Structure::block_diagonal};
    std::vector<std::size_t> p_list{20};
    std::vector<std::size_t> n_list{100};
    std::vector<double> tau_list{0.9};
    std::size_t reps = 50;
    double alpha = 0.1;
    std::uint64_t master_seed = 1;
    std::size_t threads = 0;  // 0 = hardware concurrency
};

// {block, random} x p {20, 50} x n {40, 100, 250} x tau {0.5, 0.9}, B = 50.
BenchConfig desk_profile();
// Full grid with p = 150 and B = 100.
BenchConfig table1_profile();

// Cells in (structure, tau, p, n) order. Throws std::invalid_argument on an
// empty list, reps == 0 or an invalid cell.
std::vector<Cell> expand_grid(const BenchConfig& cfg);

struct ReplicateResult {
    bool ok = false;
    std::string error;
    std::optional<double> sn, sp;
    double ac = 0.0;
    double lambda_hat = 0.0;
    std::size_t support_size = 0;
    std::size_t m0 = 0;
    double kkt_residual = 0.0;
    std::size_t sweeps = 0;
};

// truth -> data -> estimate -> metrics, all drawn from one stream seeded by
// derive_seed(master_seed, {cell.key(), rep}). Errors are captured in the
// result rather than thrown.
ReplicateResult run_replicate(const Cell& cell, double alpha, std::uint64_t master_seed,
                              std::size_t rep);

struct MetricSummary {
    std::optional<double> mean;
    std::optional<double> se;  // needs at least two defined values
    std::size_t count = 0;
};

struct CellResult {
    Cell cell;
    MetricSummary sn, sp, ac;
    std::size_t reps = 0;
    std::size_t reps_used = 0;  // replicates that completed
    std::size_t failed = 0;
    double mean_lambda_hat = 0.0;
    double mean_support_size = 0.0;
};

CellResult aggregate_cell(const Cell& cell, std::span<const ReplicateResult> reps);

struct BenchOutput {
    std::vector<CellResult> cells;
    std::vector<std::vector<ReplicateResult>> replicates;  // parallel to cells
};

// Replicates run on a pool of worker threads; aggregation walks them in
// (cell, rep) order, so results do not depend on the thread count.
BenchOutput run_benchmark(const BenchConfig& cfg);

struct TableRow {
    Structure structure;
    double tau;
    std::size_t p;
    std::vector<std::size_t> n_values;           // ascending
    std::vector<std::optional<double>> sn, sp, ac;  // one per n_values entry
};

// Rows sorted by (structure, tau, p) with one column per n for each metric.
std::vector<TableRow> aggregate_to_table(std::span<const CellResult> results);
// Fixed-width text rendering, two decimals.
std::string render_table(std::span<const TableRow> rows);

void write_results_csv(std::ostream& os, std::span<const CellResult> results);
void write_replicates_csv(std::ostream& os, const BenchOutput& out, std::uint64_t master_seed);

}  // namespace tplcov
