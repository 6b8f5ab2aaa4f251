#include "ximp/harness/grid.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <thread>

#include <json.hpp>

#include "ximp/errors.hpp"
#include "ximp/harness/train.hpp"

namespace ximp::harness {

GridSpec load_grid(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open " + path);
    nlohmann::json j;
    try {
        f >> j;
    } catch (const nlohmann::json::exception& e) {
        throw IoError(path + " is not valid JSON: " + e.what());
    }
    GridSpec spec;
    if (!j.contains("cells") || !j["cells"].is_array() || j["cells"].empty())
        throw ConfigError(path + " needs a non-empty 'cells' array");
    for (const auto& cell : j["cells"]) {
        model::RunConfig cfg = cell.get<model::RunConfig>();
        cfg.validate();
        spec.cells.push_back(std::move(cfg));
    }
    return spec;
}

namespace {

std::string config_hash(const model::RunConfig& cfg) {
    nlohmann::json j = cfg;
    std::string s = j.dump();
    uint64_t h = 0xcbf29ce484222325ull;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

CellResult run_cell(const Dataset& ds, const model::RunConfig& cfg,
                    const SplitPlan& plan, int cell, uint64_t master_seed,
                    int n_final_seeds) {
    auto t0 = std::chrono::steady_clock::now();
    CellResult res;
    res.cell_index = cell;
    res.config_id = config_hash(cfg);

    for (size_t fold = 0; fold < plan.folds.size(); ++fold) {
        uint64_t seed = Rng::derive(master_seed, cell, fold).next();
        AnyModel m(cfg, seed);
        auto train_set = m.prepare_all(ds, plan.train_indices(static_cast<int>(fold)));
        auto val_set = m.prepare_all(ds, plan.folds[fold]);
        train_model(m, train_set, nullptr, seed);
        res.fold_val_mae.push_back(evaluate_model(m, val_set));
    }
    res.mean_val_mae = 0.0;
    for (double v : res.fold_val_mae) res.mean_val_mae += v;
    res.mean_val_mae /= static_cast<double>(res.fold_val_mae.size());

    for (int run = 0; run < n_final_seeds; ++run) {
        uint64_t seed = Rng::derive(master_seed, cell, 1000 + run).next();
        AnyModel m(cfg, seed);
        auto full_train = m.prepare_all(ds, plan.cv_pool());
        auto test_set = m.prepare_all(ds, plan.test_indices);
        train_model(m, full_train, nullptr, seed);
        res.test_maes.push_back(evaluate_model(m, test_set));
    }
    double mean = 0.0;
    for (double v : res.test_maes) mean += v;
    mean /= static_cast<double>(res.test_maes.size());
    double var = 0.0;
    for (double v : res.test_maes) var += (v - mean) * (v - mean);
    var /= static_cast<double>(res.test_maes.size());
    res.test_mean = mean;
    res.test_std = std::sqrt(var);
    res.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

}  // namespace

GridResult grid_search(const Dataset& ds, const GridSpec& grid, const SplitPlan& plan,
                       uint64_t master_seed, int n_final_seeds, int max_threads) {
    if (grid.cells.empty()) throw ConfigError("empty grid");
    if (max_threads <= 0) {
        if (const char* env = std::getenv("XIMP_THREADS")) max_threads = std::atoi(env);
        if (max_threads <= 0)
            max_threads = static_cast<int>(std::thread::hardware_concurrency());
        if (max_threads <= 0) max_threads = 1;
    }
    const int n_cells = static_cast<int>(grid.cells.size());
    GridResult result;
    result.cells.resize(n_cells);

    std::atomic<int> next{0};
    std::vector<std::thread> workers;
    std::atomic<bool> failed{false};
    std::string error_message;
    std::mutex error_mutex;
    int n_workers = std::min(max_threads, n_cells);
    for (int w = 0; w < n_workers; ++w) {
        workers.emplace_back([&] {
            while (true) {
                int cell = next.fetch_add(1);
                if (cell >= n_cells || failed.load()) return;
                try {
                    result.cells[cell] = run_cell(ds, grid.cells[cell], plan, cell,
                                                  master_seed, n_final_seeds);
                } catch (const std::exception& e) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    error_message = "cell " + std::to_string(cell) + ": " + e.what();
                    failed.store(true);
                    return;
                }
            }
        });
    }
    for (auto& t : workers) t.join();
    if (failed.load()) throw Error("grid search failed: " + error_message);

    result.validation_selected = 0;
    result.test_selected = 0;
    for (int c = 1; c < n_cells; ++c) {
        if (result.cells[c].mean_val_mae <
            result.cells[result.validation_selected].mean_val_mae)
            result.validation_selected = c;
        if (result.cells[c].test_mean < result.cells[result.test_selected].test_mean)
            result.test_selected = c;
    }
    return result;
}

void write_grid_csvs(const GridResult& res, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    auto fmt = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.6f", v);
        return std::string(buf);
    };

    std::ofstream cells(out_dir + "/cells.csv");
    if (!cells) throw IoError("cannot write " + out_dir + "/cells.csv");
    cells << "cell,config_id";
    size_t n_folds = res.cells.empty() ? 0 : res.cells[0].fold_val_mae.size();
    for (size_t f = 0; f < n_folds; ++f) cells << ",fold" << f << "_val_mae";
    cells << ",mean_val_mae,test_mean,test_std\n";
    for (const auto& c : res.cells) {
        cells << c.cell_index << "," << c.config_id;
        for (double v : c.fold_val_mae) cells << "," << fmt(v);
        cells << "," << fmt(c.mean_val_mae) << "," << fmt(c.test_mean) << ","
              << fmt(c.test_std) << "\n";
    }

    std::ofstream summary(out_dir + "/summary.csv");
    if (!summary) throw IoError("cannot write " + out_dir + "/summary.csv");
    summary << "selection,cell,config_id,test_mean,test_std\n";
    const auto& vs = res.cells[res.validation_selected];
    summary << "validation," << vs.cell_index << "," << vs.config_id << ","
            << fmt(vs.test_mean) << "," << fmt(vs.test_std) << "\n";
    const auto& ts = res.cells[res.test_selected];
    summary << "test," << ts.cell_index << "," << ts.config_id << ","
            << fmt(ts.test_mean) << "," << fmt(ts.test_std) << "\n";
}

}  // namespace ximp::harness
