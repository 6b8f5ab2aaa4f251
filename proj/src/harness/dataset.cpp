#include "ximp/harness/dataset.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "ximp/errors.hpp"

namespace ximp::harness {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) {
        while (!field.empty() && (field.back() == '\r' || field.back() == ' '))
            field.pop_back();
        size_t start = field.find_first_not_of(' ');
        out.push_back(start == std::string::npos ? "" : field.substr(start));
    }
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

}  // namespace

Dataset load_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open " + path);
    std::string line;
    if (!std::getline(f, line)) throw EmptyDataset(path + " is empty");
    auto header = split_csv_line(line);
    int smiles_col = -1, target_col = -1, id_col = -1;
    for (size_t i = 0; i < header.size(); ++i) {
        if (header[i] == "smiles") smiles_col = static_cast<int>(i);
        if (header[i] == "target") target_col = static_cast<int>(i);
        if (header[i] == "id") id_col = static_cast<int>(i);
    }
    if (smiles_col < 0) throw MissingColumn("no 'smiles' column in " + path);
    if (target_col < 0) throw MissingColumn("no 'target' column in " + path);

    Dataset ds;
    int row = 0;
    while (std::getline(f, line)) {
        ++row;
        if (line.empty()) continue;
        auto fields = split_csv_line(line);
        if (static_cast<int>(fields.size()) <= std::max(smiles_col, target_col)) {
            ds.rejected.push_back({row, line, "too few columns"});
            continue;
        }
        Record r;
        r.smiles = fields[smiles_col];
        if (id_col >= 0 && id_col < static_cast<int>(fields.size())) r.id = fields[id_col];
        try {
            size_t used = 0;
            r.target = std::stod(fields[target_col], &used);
            if (used != fields[target_col].size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            ds.rejected.push_back({row, r.smiles, "non-numeric target"});
            continue;
        }
        if (!std::isfinite(r.target)) {
            ds.rejected.push_back({row, r.smiles, "non-finite target"});
            continue;
        }
        try {
            r.graph = chem::parse_smiles(r.smiles);
        } catch (const Error& e) {
            ds.rejected.push_back({row, r.smiles, e.what()});
            continue;
        }
        ds.records.push_back(std::move(r));
    }
    if (ds.records.empty()) throw EmptyDataset(path + " contains no parseable records");
    return ds;
}

Dataset dataset_from_pairs(const std::vector<std::pair<std::string, double>>& rows) {
    Dataset ds;
    int row = 0;
    for (const auto& [smiles, target] : rows) {
        ++row;
        Record r;
        r.smiles = smiles;
        r.target = target;
        try {
            r.graph = chem::parse_smiles(smiles);
        } catch (const Error& e) {
            ds.rejected.push_back({row, smiles, e.what()});
            continue;
        }
        ds.records.push_back(std::move(r));
    }
    if (ds.records.empty()) throw EmptyDataset("no parseable records");
    return ds;
}

void write_rejections_csv(const Dataset& ds, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw IoError("cannot write " + path);
    f << "row,smiles,reason\n";
    for (const auto& r : ds.rejected) {
        std::string reason = r.reason;
        for (char& c : reason)
            if (c == ',' || c == '\n') c = ';';
        f << r.row << "," << r.smiles << "," << reason << "\n";
    }
}

}  // namespace ximp::harness
