#pragma once

#include <vector>

#include "ximp/chem/mol.hpp"
#include "ximp/chem/reductions.hpp"
#include "ximp/nn/tensor.hpp"

namespace ximp::nn {

// Edge lists in both directions; aggregation goes through gather/scatter so
// cost stays linear in graph size.
struct GraphTopology {
    int n_nodes = 0;
    std::vector<int> src;  // message source per directed edge
    std::vector<int> dst;  // message target per directed edge
    std::vector<std::vector<double>> edge_features;  // per directed edge, may be empty
};

constexpr int kAtomFeatureWidth = 26;  // element(10) + degree(5) + charge(5) + aromatic + H(5)
constexpr int kBondFeatureWidth = 4;   // bond order one-hot

GraphTopology molecule_topology(const chem::MolecularGraph& g);
GraphTopology reduced_topology(const chem::ReducedGraph& t);

std::vector<std::vector<double>> atom_features(const chem::MolecularGraph& g);
std::vector<std::vector<double>> reduced_features(const chem::ReducedGraph& t);
int reduced_feature_width(const chem::ReducedGraph& t);

struct GinRefs {
    TensorRef eps = nullptr;  // 1x1
    TensorRef w1 = nullptr, b1 = nullptr;
    TensorRef w2 = nullptr, b2 = nullptr;
};

// MLP((A + (1+eps) I) X)
TensorRef gin_forward(Tape& t, TensorRef x, const GraphTopology& topo,
                      const GinRefs& p);

// MLP((1+eps) X + sum_u A_vu relu(x_u + E_vu W_e)); edge features are
// projected to the node width by edge_w.
TensorRef gine_forward(Tape& t, TensorRef x, const GraphTopology& topo,
                       const GinRefs& p, TensorRef edge_w);

struct HeadRefs {
    TensorRef w1 = nullptr, b1 = nullptr;
    TensorRef w2 = nullptr, b2 = nullptr;
};

// Two-layer ReLU regression head mapping 1 x w to a scalar.
TensorRef mlp_head(Tape& t, TensorRef h, const HeadRefs& p);

}  // namespace ximp::nn
