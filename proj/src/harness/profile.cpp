#include "ximp/harness/profile.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ximp/errors.hpp"

namespace ximp::harness {

ProfileResult performance_profile(const std::vector<std::string>& models,
                                  const std::vector<std::vector<double>>& mae,
                                  double tau) {
    if (models.empty() || mae.size() != models.size())
        throw IncompleteTable("need one MAE row per model");
    const size_t n_tasks = mae[0].size();
    if (n_tasks == 0) throw IncompleteTable("no tasks in the MAE table");
    for (const auto& row : mae) {
        if (row.size() != n_tasks)
            throw IncompleteTable("ragged MAE table");
        for (double v : row)
            if (!(v > 0.0) || !std::isfinite(v))
                throw IncompleteTable("MAE entries must be positive and finite");
    }

    std::vector<double> best(n_tasks);
    for (size_t t = 0; t < n_tasks; ++t) {
        best[t] = mae[0][t];
        for (size_t m = 1; m < mae.size(); ++m) best[t] = std::min(best[t], mae[m][t]);
    }

    constexpr double kTieTol = 1e-9;
    ProfileResult res;
    res.tau = tau;
    for (size_t m = 0; m < models.size(); ++m) {
        ProfileRow row;
        row.model = models[m];
        int wins = 0, within = 0;
        for (size_t t = 0; t < n_tasks; ++t) {
            double rho = mae[m][t] / best[t];
            row.rho_sorted.push_back(rho);
            if (rho <= 1.0 + kTieTol) ++wins;
            if (rho <= tau + kTieTol) ++within;
        }
        std::sort(row.rho_sorted.begin(), row.rho_sorted.end());
        row.win_fraction = static_cast<double>(wins) / static_cast<double>(n_tasks);
        row.tau_fraction = static_cast<double>(within) / static_cast<double>(n_tasks);
        res.rows.push_back(std::move(row));
    }
    return res;
}

ProfileResult profile_from_csv(const std::string& path, double tau) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open " + path);
    std::string line;
    if (!std::getline(f, line)) throw IncompleteTable(path + " is empty");
    std::vector<std::string> models;
    std::vector<std::vector<double>> mae;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (fields.size() < 2) throw IncompleteTable("row with no values: " + line);
        models.push_back(fields[0]);
        std::vector<double> row;
        for (size_t i = 1; i < fields.size(); ++i) {
            try {
                row.push_back(std::stod(fields[i]));
            } catch (const std::exception&) {
                throw IncompleteTable("non-numeric MAE entry '" + fields[i] + "'");
            }
        }
        mae.push_back(std::move(row));
    }
    return performance_profile(models, mae, tau);
}

void write_profile_csvs(const ProfileResult& res, const std::string& out_path) {
    auto fmt = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.6f", v);
        return std::string(buf);
    };
    std::ofstream f(out_path);
    if (!f) throw IoError("cannot write " + out_path);
    f << "model,rho,ecdf\n";
    for (const auto& row : res.rows) {
        const size_t n = row.rho_sorted.size();
        for (size_t i = 0; i < n; ++i)
            f << row.model << "," << fmt(row.rho_sorted[i]) << ","
              << fmt(static_cast<double>(i + 1) / static_cast<double>(n)) << "\n";
    }

    std::string summary_path = out_path;
    if (summary_path.size() > 4 && summary_path.substr(summary_path.size() - 4) == ".csv")
        summary_path = summary_path.substr(0, summary_path.size() - 4);
    summary_path += "_summary.csv";
    std::ofstream s(summary_path);
    if (!s) throw IoError("cannot write " + summary_path);
    s << "model,win_fraction,tau_fraction,tau\n";
    for (const auto& row : res.rows)
        s << row.model << "," << fmt(row.win_fraction) << "," << fmt(row.tau_fraction)
          << "," << fmt(res.tau) << "\n";
}

}  // namespace ximp::harness
