#pragma once

#include <cstdint>
#include <vector>

#include "ximp/chem/mol.hpp"
#include "ximp/chem/reductions.hpp"
#include "ximp/model/config.hpp"
#include "ximp/nn/gnn.hpp"
#include "ximp/nn/optim.hpp"
#include "ximp/nn/tensor.hpp"
#include "ximp/rng.hpp"

namespace ximp::model {

// Everything a forward pass needs about one molecule, precomputed once:
// topology, input features, abstractions with correspondences, and the
// doubly-normalized pairwise projections for direct messages.
struct MoleculeInputs {
    chem::MolecularGraph graph;
    nn::GraphTopology topo;
    std::vector<std::vector<double>> atom_feats;

    struct AbstractionInput {
        Abstraction kind;
        chem::ReducedGraph rg;
        chem::Correspondence corr;
        nn::GraphTopology topo;
        std::vector<std::vector<double>> feats;
    };
    std::vector<AbstractionInput> abstractions;

    // s_ik[i][k]: projection from abstraction k into abstraction i (i != k).
    std::vector<std::vector<std::vector<std::vector<double>>>> s_ik;
};

MoleculeInputs prepare_inputs(const chem::MolecularGraph& g, const ModelConfig& cfg);

// Node embeddings after a layer: X for the molecular graph and one T per
// abstraction, in config order.
struct LayerState {
    nn::TensorRef x = nullptr;
    std::vector<nn::TensorRef> t;
};

class XimpModel {
  public:
    XimpModel(ModelConfig cfg, uint64_t seed);

    const ModelConfig& config() const { return cfg_; }
    nn::ParameterStore& params() { return store_; }
    const nn::ParameterStore& params() const { return store_; }

    // Full forward pass on the caller's tape. dropout_rng must be provided
    // when training is true; evaluation never applies dropout.
    nn::TensorRef forward(nn::Tape& tape, const MoleculeInputs& in, bool training,
                          Rng* dropout_rng);

    // Pieces of the layer computation, exposed for direct testing.
    LayerState initial_state(nn::Tape& tape, const MoleculeInputs& in);
    LayerState layer_forward(nn::Tape& tape, const MoleculeInputs& in,
                             const LayerState& state, int layer, bool training,
                             Rng* dropout_rng);
    // X_i terms (per abstraction, messages into G) and M_i terms (into T_i).
    std::pair<std::vector<nn::TensorRef>, std::vector<nn::TensorRef>> i2mp_step(
        nn::Tape& tape, const MoleculeInputs& in, nn::TensorRef x_src,
        const std::vector<nn::TensorRef>& t_src, int layer);
    // Messages m[i][k] from abstraction k into abstraction i, i != k.
    std::vector<std::vector<nn::TensorRef>> dimp_step(
        nn::Tape& tape, const MoleculeInputs& in,
        const std::vector<nn::TensorRef>& t_src, int layer);
    nn::TensorRef readout(nn::Tape& tape, const LayerState& state);
    nn::TensorRef head(nn::Tape& tape, nn::TensorRef h);

    int readout_width() const;

  private:
    nn::GinRefs gin_refs(nn::Tape& tape, const std::string& prefix);
    nn::TensorRef dropped(nn::Tape& tape, nn::TensorRef x, bool training,
                          Rng* dropout_rng);

    ModelConfig cfg_;
    nn::ParameterStore store_;
};

// Fingerprint-input baseline: a trainable regression head over fixed ECFP
// bits.
class EcfpModel {
  public:
    EcfpModel(EcfpConfig cfg, uint64_t seed);
    EcfpConfig config() const { return cfg_; }
    nn::ParameterStore& params() { return store_; }
    nn::TensorRef forward(nn::Tape& tape, const chem::Fingerprint& fp);

  private:
    EcfpConfig cfg_;
    nn::ParameterStore store_;
};

}  // namespace ximp::model
