#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ximp/chem/mol.hpp"

namespace ximp::harness {

struct Record {
    std::string smiles;
    double target = 0.0;
    std::string id;
    chem::MolecularGraph graph;  // parsed once at load time
};

struct Rejection {
    int row = 0;  // 1-based data row
    std::string smiles;
    std::string reason;
};

struct Dataset {
    std::vector<Record> records;
    std::vector<Rejection> rejected;

    int size() const { return static_cast<int>(records.size()); }
};

// CSV with header columns smiles,target[,id]. Rows that fail to parse or
// carry a non-numeric target are collected in `rejected`, never dropped
// silently.
Dataset load_csv(const std::string& path);

// In-memory variant used by tests and the synthetic benchmark.
Dataset dataset_from_pairs(const std::vector<std::pair<std::string, double>>& rows);

void write_rejections_csv(const Dataset& ds, const std::string& path);

}  // namespace ximp::harness
