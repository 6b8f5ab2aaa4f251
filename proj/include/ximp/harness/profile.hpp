#pragma once

#include <string>
#include <vector>

namespace ximp::harness {

struct ProfileRow {
    std::string model;
    std::vector<double> rho_sorted;  // one ratio per task, ascending
    double win_fraction = 0.0;       // tasks with rho == 1
    double tau_fraction = 0.0;       // tasks with rho <= tau
};

struct ProfileResult {
    std::vector<ProfileRow> rows;  // in input model order
    double tau = 1.05;
};

// Performance profile over a complete model x task MAE table:
// rho(model, task) = MAE(model, task) / min over models of MAE(task).
ProfileResult performance_profile(const std::vector<std::string>& models,
                                  const std::vector<std::vector<double>>& mae,
                                  double tau);

// CSV with header model,task1,...: one row per model.
ProfileResult profile_from_csv(const std::string& path, double tau);

// Writes <out> with ECDF plot points (model,rho,ecdf) and
// <out minus .csv>_summary.csv with the win/tolerance fractions.
void write_profile_csvs(const ProfileResult& res, const std::string& out_path);

}  // namespace ximp::harness
