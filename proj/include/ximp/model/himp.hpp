#pragma once

#include <cstdint>

#include "ximp/chem/mol.hpp"
#include "ximp/chem/reductions.hpp"
#include "ximp/model/config.hpp"
#include "ximp/nn/gnn.hpp"
#include "ximp/nn/optim.hpp"
#include "ximp/rng.hpp"

namespace ximp::model {

// Molecular graph plus its junction tree, prepared for HIMP.
struct HimpInputs {
    chem::MolecularGraph graph;
    nn::GraphTopology topo;
    std::vector<std::vector<double>> atom_feats;
    chem::ReducedGraph jt;
    chem::Correspondence corr;
    nn::GraphTopology jt_topo;
    std::vector<std::vector<double>> jt_feats;
};

HimpInputs prepare_himp_inputs(const chem::MolecularGraph& g, int jt_resolution = 1);

// Two coupled encoders (GIN-E on the molecular graph, GIN on the junction
// tree) with sequential inter-message passing inside each layer: the graph
// update reads the tree's GNN output, the tree update reads the already
// updated graph embeddings. Readout is mean(X) + mean(T) into the head.
// Kept independent of the XimpModel code path on purpose.
class HimpModel {
  public:
    HimpModel(HimpConfig cfg, uint64_t seed);

    const HimpConfig& config() const { return cfg_; }
    nn::ParameterStore& params() { return store_; }
    const nn::ParameterStore& params() const { return store_; }

    nn::TensorRef forward(nn::Tape& tape, const HimpInputs& in, bool training,
                          Rng* dropout_rng);

  private:
    HimpConfig cfg_;
    nn::ParameterStore store_;
};

}  // namespace ximp::model
