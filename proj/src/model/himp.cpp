#include "ximp/model/himp.hpp"

#include "ximp/errors.hpp"
#include "ximp/nn/tensor.hpp"

namespace ximp::model {

using nn::Tape;
using nn::TensorRef;

HimpInputs prepare_himp_inputs(const chem::MolecularGraph& g, int jt_resolution) {
    HimpInputs in;
    in.graph = g;
    in.topo = nn::molecule_topology(in.graph);
    in.atom_feats = nn::atom_features(in.graph);
    auto [t, c] = chem::build_junction_tree(in.graph);
    if (jt_resolution > 1)
        std::tie(t, c) = chem::coarsen_junction_tree(t, c, jt_resolution);
    in.jt = std::move(t);
    in.corr = std::move(c);
    in.jt_topo = nn::reduced_topology(in.jt);
    in.jt_feats = nn::reduced_features(in.jt);
    return in;
}

HimpModel::HimpModel(HimpConfig cfg, uint64_t seed) : cfg_(cfg) {
    Rng rng(seed);
    const int d = cfg_.hidden;
    using Init = nn::ParameterStore::Init;
    store_.add("embed.atom.w", nn::kAtomFeatureWidth, d, Init::Uniform, rng);
    store_.add("embed.bond.w", nn::kBondFeatureWidth, d, Init::Uniform, rng);
    store_.add("embed.jt.w", chem::kJtCategoryCount, d, Init::Uniform, rng);
    for (int l = 0; l < cfg_.n_layers; ++l) {
        std::string lp = "layer" + std::to_string(l) + ".";
        store_.add(lp + "g.eps", 1, 1, Init::Zero, rng);
        store_.add(lp + "g.mlp.w1", d, d, Init::Uniform, rng);
        store_.add(lp + "g.mlp.b1", 1, d, Init::Zero, rng);
        store_.add(lp + "g.mlp.w2", d, d, Init::Uniform, rng);
        store_.add(lp + "g.mlp.b2", 1, d, Init::Zero, rng);
        store_.add(lp + "jt.eps", 1, 1, Init::Zero, rng);
        store_.add(lp + "jt.mlp.w1", d, d, Init::Uniform, rng);
        store_.add(lp + "jt.mlp.b1", 1, d, Init::Zero, rng);
        store_.add(lp + "jt.mlp.w2", d, d, Init::Uniform, rng);
        store_.add(lp + "jt.mlp.b2", 1, d, Init::Zero, rng);
        if (cfg_.inter_mp) {
            store_.add(lp + "inter.w1", d, d, Init::Uniform, rng);
            store_.add(lp + "inter.w2", d, d, Init::Uniform, rng);
        }
    }
    store_.add("head.w1", d, cfg_.head_hidden, Init::Uniform, rng);
    store_.add("head.b1", 1, cfg_.head_hidden, Init::Zero, rng);
    store_.add("head.w2", cfg_.head_hidden, 1, Init::Uniform, rng);
    store_.add("head.b2", 1, 1, Init::Zero, rng);
}

TensorRef HimpModel::forward(Tape& tape, const HimpInputs& in, bool training,
                             Rng* dropout_rng) {
    auto leaf = [&](const std::string& n) { return tape.leaf(store_.at(n)); };
    auto gin_refs = [&](const std::string& prefix) {
        nn::GinRefs refs;
        refs.eps = leaf(prefix + "eps");
        refs.w1 = leaf(prefix + "mlp.w1");
        refs.b1 = leaf(prefix + "mlp.b1");
        refs.w2 = leaf(prefix + "mlp.w2");
        refs.b2 = leaf(prefix + "mlp.b2");
        return refs;
    };
    auto maybe_dropout = [&](TensorRef x) {
        if (!training || cfg_.dropout_p <= 0.0) return x;
        if (!dropout_rng)
            throw ConfigError("training forward pass needs a dropout RNG stream");
        std::vector<double> mask(x->size());
        const double keep = 1.0 - cfg_.dropout_p;
        for (double& m : mask)
            m = dropout_rng->uniform() < cfg_.dropout_p ? 0.0 : 1.0 / keep;
        return nn::dropout(tape, x, mask);
    };

    TensorRef x = nn::matmul(tape, tape.constant(in.atom_feats), leaf("embed.atom.w"));
    TensorRef t = nn::matmul(tape, tape.constant(in.jt_feats), leaf("embed.jt.w"));
    TensorRef edge_w = leaf("embed.bond.w");

    for (int l = 0; l < cfg_.n_layers; ++l) {
        std::string lp = "layer" + std::to_string(l) + ".";
        TensorRef gx = nn::gine_forward(tape, x, in.topo, gin_refs(lp + "g."), edge_w);
        gx = maybe_dropout(gx);
        TensorRef gt = nn::gin_forward(tape, t, in.jt_topo, gin_refs(lp + "jt."));
        gt = maybe_dropout(gt);
        if (cfg_.inter_mp) {
            // sequential update: graph reads the tree GNN output, then the
            // tree reads the already-updated graph embeddings
            x = nn::add(tape, gx,
                        nn::relu(tape,
                                 nn::matmul(tape,
                                            nn::proj_matmul(tape, in.corr.row_normalized, gt),
                                            leaf(lp + "inter.w1"))));
            t = nn::add(tape, gt,
                        nn::relu(tape,
                                 nn::matmul(tape,
                                            nn::proj_matmul(tape, in.corr.col_normalized, x),
                                            leaf(lp + "inter.w2"))));
        } else {
            x = gx;
            t = gt;
        }
    }

    TensorRef pooled = nn::add(tape, nn::mean_rows(tape, x), nn::mean_rows(tape, t));
    nn::HeadRefs refs;
    refs.w1 = leaf("head.w1");
    refs.b1 = leaf("head.b1");
    refs.w2 = leaf("head.w2");
    refs.b2 = leaf("head.b2");
    return nn::mlp_head(tape, pooled, refs);
}

}  // namespace ximp::model
