#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ximp/chem/mol.hpp"
#include "ximp/chem/reductions.hpp"
#include "ximp/errors.hpp"
#include "ximp/harness/dataset.hpp"
#include "ximp/harness/grid.hpp"
#include "ximp/harness/profile.hpp"
#include "ximp/harness/split.hpp"
#include "ximp/harness/train.hpp"
#include "ximp/wl/wl.hpp"

namespace {

using namespace ximp;

int cmd_prep(const std::string& input, const std::string& cache_dir) {
    harness::Dataset ds = harness::load_csv(input);
    std::filesystem::create_directories(cache_dir);
    harness::write_rejections_csv(ds, cache_dir + "/rejects.csv");

    nlohmann::json parsed = nlohmann::json::array();
    for (const auto& r : ds.records) {
        parsed.push_back({{"smiles", r.smiles},
                          {"target", r.target},
                          {"id", r.id},
                          {"atoms", r.graph.atom_count()},
                          {"bonds", r.graph.bond_count()},
                          {"rings", r.graph.rings.size()},
                          {"scaffold", chem::murcko_scaffold(r.graph)}});
    }
    std::ofstream f(cache_dir + "/parsed.json");
    f << parsed.dump(2) << "\n";
    std::cout << "parsed " << ds.records.size() << " records, rejected "
              << ds.rejected.size() << " (see " << cache_dir << "/rejects.csv)\n";
    return 0;
}

model::RunConfig load_run_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open " + path);
    nlohmann::json j;
    f >> j;
    model::RunConfig cfg = j.get<model::RunConfig>();
    cfg.validate();
    return cfg;
}

int cmd_train(const std::string& config_path, const std::string& data_path,
              uint64_t seed, const std::string& out_path) {
    model::RunConfig cfg = load_run_config(config_path);
    harness::Dataset ds = harness::load_csv(data_path);
    harness::AnyModel m(cfg, seed);
    std::vector<int> all(ds.size());
    for (int i = 0; i < ds.size(); ++i) all[i] = i;
    auto prepared = m.prepare_all(ds, all);
    auto result = harness::train_model(m, prepared, nullptr, seed);
    harness::save_checkpoint(m, out_path);
    for (size_t e = 0; e < result.curve.size(); ++e)
        std::cout << "epoch " << e << " train_mae "
                  << result.curve[e].train_mae << "\n";
    std::cout << "final train MAE " << result.final_train_mae << ", checkpoint "
              << out_path << "\n";
    return 0;
}

int cmd_eval(const std::string& ckpt_path, const std::string& data_path) {
    auto m = harness::load_checkpoint(ckpt_path);
    harness::Dataset ds = harness::load_csv(data_path);
    std::vector<int> all(ds.size());
    for (int i = 0; i < ds.size(); ++i) all[i] = i;
    auto prepared = m->prepare_all(ds, all);
    double mae = harness::evaluate_model(*m, prepared);
    std::printf("MAE %.6f over %d records\n", mae, ds.size());
    return 0;
}

int cmd_gridsearch(const std::string& grid_path, const std::string& data_path,
                   uint64_t seed, const std::string& out_dir, int final_seeds) {
    harness::GridSpec grid = harness::load_grid(grid_path);
    harness::Dataset ds = harness::load_csv(data_path);
    harness::SplitPlan plan = harness::make_split(ds, seed);
    harness::GridResult res = harness::grid_search(ds, grid, plan, seed, final_seeds);
    harness::write_grid_csvs(res, out_dir);
    for (const auto& c : res.cells)
        std::printf("cell %d (%s): val %.6f test %.6f +- %.6f  [%.1fs]\n", c.cell_index,
                    c.config_id.c_str(), c.mean_val_mae, c.test_mean, c.test_std,
                    c.wall_seconds);
    std::printf("validation-selected cell: %d\ntest-selected cell: %d\n",
                res.validation_selected, res.test_selected);
    return 0;
}

int cmd_wl_check(const std::string& smiles_a, const std::string& smiles_b,
                 const std::string& views) {
    auto ga = chem::parse_smiles(smiles_a);
    auto gb = chem::parse_smiles(smiles_b);

    auto jt_a = chem::build_junction_tree(ga);
    auto jt_b = chem::build_junction_tree(gb);
    auto erg_a = chem::build_erg(ga);
    auto erg_b = chem::build_erg(gb);

    std::printf("%-10s %s\n", "view", "distinguishable");
    std::stringstream ss(views);
    std::string view;
    while (std::getline(ss, view, ',')) {
        bool dist;
        if (view == "g") {
            dist = wl::wl_distinguishable(wl::from_molecule(ga), wl::from_molecule(gb));
        } else if (view == "jt") {
            dist = wl::wl_distinguishable(wl::from_reduced(jt_a.first),
                                          wl::from_reduced(jt_b.first));
        } else if (view == "erg") {
            dist = wl::wl_distinguishable(wl::from_reduced(erg_a.first),
                                          wl::from_reduced(erg_b.first));
        } else if (view == "compound") {
            auto ca = wl::build_compound(ga, {&jt_a.first, &erg_a.first},
                                         {&jt_a.second, &erg_a.second});
            auto cb = wl::build_compound(gb, {&jt_b.first, &erg_b.first},
                                         {&jt_b.second, &erg_b.second});
            dist = wl::wl_distinguishable(ca.graph, cb.graph);
        } else {
            throw ConfigError("unknown view: " + view + " (use g,jt,erg,compound)");
        }
        std::printf("%-10s %s\n", view.c_str(), dist ? "true" : "false");
    }
    return 0;
}

int cmd_profile(const std::string& results_path, double tau,
                const std::string& out_path) {
    auto res = harness::profile_from_csv(results_path, tau);
    harness::write_profile_csvs(res, out_path);
    std::printf("%-12s %12s %12s\n", "model", "win_frac", "tau_frac");
    for (const auto& row : res.rows)
        std::printf("%-12s %12.6f %12.6f\n", row.model.c_str(), row.win_fraction,
                    row.tau_fraction);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cross-graph inter-message passing for molecular property prediction"};
    app.require_subcommand(1);

    std::string input, cache_dir, config_path, data_path, out_path, ckpt_path;
    std::string grid_path, out_dir, smiles_a, smiles_b, views = "g,jt,erg,compound";
    std::string results_path;
    uint64_t seed = 0;
    int final_seeds = 10;
    double tau = 1.05;

    auto* prep = app.add_subcommand("prep", "parse a CSV and write the cache report");
    prep->add_option("--input", input)->required();
    prep->add_option("--cache", cache_dir)->required();

    auto* train = app.add_subcommand("train", "train one configuration");
    train->add_option("--config", config_path)->required();
    train->add_option("--data", data_path)->required();
    train->add_option("--seed", seed);
    train->add_option("--out", out_path)->required();

    auto* eval = app.add_subcommand("eval", "evaluate a checkpoint");
    eval->add_option("--checkpoint", ckpt_path)->required();
    eval->add_option("--input", data_path)->required();

    auto* grid = app.add_subcommand("gridsearch", "grid search with CV and retrains");
    grid->add_option("--grid", grid_path)->required();
    grid->add_option("--data", data_path)->required();
    grid->add_option("--seed", seed);
    grid->add_option("--out", out_dir)->required();
    grid->add_option("--final-seeds", final_seeds);

    auto* wlc = app.add_subcommand("wl-check", "1-WL distinguishability per view");
    wlc->add_option("--smiles-a", smiles_a)->required();
    wlc->add_option("--smiles-b", smiles_b)->required();
    wlc->add_option("--views", views);

    auto* prof = app.add_subcommand("profile", "performance profile from a MAE table");
    prof->add_option("--results", results_path)->required();
    prof->add_option("--tau", tau);
    prof->add_option("--out", out_path)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (prep->parsed()) return cmd_prep(input, cache_dir);
        if (train->parsed()) return cmd_train(config_path, data_path, seed, out_path);
        if (eval->parsed()) return cmd_eval(ckpt_path, data_path);
        if (grid->parsed())
            return cmd_gridsearch(grid_path, data_path, seed, out_dir, final_seeds);
        if (wlc->parsed()) return cmd_wl_check(smiles_a, smiles_b, views);
        if (prof->parsed()) return cmd_profile(results_path, tau, out_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
