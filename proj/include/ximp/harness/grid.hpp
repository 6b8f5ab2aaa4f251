#pragma once

#include <string>
#include <vector>

#include "ximp/harness/dataset.hpp"
#include "ximp/harness/split.hpp"
#include "ximp/model/config.hpp"

namespace ximp::harness {

struct GridSpec {
    std::vector<model::RunConfig> cells;
};

GridSpec load_grid(const std::string& path);

struct CellResult {
    int cell_index = 0;
    std::string config_id;               // short content hash of the cell config
    std::vector<double> fold_val_mae;    // one per CV fold
    double mean_val_mae = 0.0;
    std::vector<double> test_maes;       // one per final-retrain seed
    double test_mean = 0.0;
    double test_std = 0.0;
    double wall_seconds = 0.0;           // informational, kept out of the CSVs
};

struct GridResult {
    std::vector<CellResult> cells;
    int validation_selected = -1;  // argmin mean validation MAE
    int test_selected = -1;        // argmin test mean (optimistic upper bound)
};

// Runs every cell: 10-fold CV for validation MAE, then n_final_seeds full
// retrains scored on the scaffold test set. Cells run in parallel worker
// threads (capped by XIMP_THREADS) with PRNG streams derived from
// (master_seed, cell, run), so the result is independent of scheduling.
GridResult grid_search(const Dataset& ds, const GridSpec& grid, const SplitPlan& plan,
                       uint64_t master_seed, int n_final_seeds = 10,
                       int max_threads = 0);

// cells.csv and summary.csv with fixed columns and 6-decimal formatting;
// byte-identical across reruns with the same master seed.
void write_grid_csvs(const GridResult& res, const std::string& out_dir);

}  // namespace ximp::harness
