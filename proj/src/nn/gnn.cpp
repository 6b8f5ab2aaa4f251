#include "ximp/nn/gnn.hpp"

#include <algorithm>

#include "ximp/errors.hpp"

namespace ximp::nn {

using chem::BondOrder;
using chem::MolecularGraph;
using chem::ReducedGraph;

GraphTopology molecule_topology(const MolecularGraph& g) {
    GraphTopology topo;
    topo.n_nodes = g.atom_count();
    for (const auto& b : g.bonds) {
        std::vector<double> feat(kBondFeatureWidth, 0.0);
        feat[static_cast<int>(b.order)] = 1.0;
        topo.src.push_back(b.a);
        topo.dst.push_back(b.b);
        topo.edge_features.push_back(feat);
        topo.src.push_back(b.b);
        topo.dst.push_back(b.a);
        topo.edge_features.push_back(feat);
    }
    return topo;
}

GraphTopology reduced_topology(const ReducedGraph& t) {
    GraphTopology topo;
    topo.n_nodes = t.node_count();
    for (const auto& [a, b] : t.edges) {
        topo.src.push_back(a);
        topo.dst.push_back(b);
        topo.src.push_back(b);
        topo.dst.push_back(a);
    }
    return topo;
}

std::vector<std::vector<double>> atom_features(const MolecularGraph& g) {
    std::vector<std::vector<double>> out(g.atom_count(),
                                         std::vector<double>(kAtomFeatureWidth, 0.0));
    for (int v = 0; v < g.atom_count(); ++v) {
        const auto& a = g.atoms[v];
        auto& f = out[v];
        f[static_cast<int>(a.element)] = 1.0;
        f[10 + std::min(g.degree(v), 4)] = 1.0;
        f[15 + std::clamp(a.formal_charge, -2, 2) + 2] = 1.0;
        f[20] = a.aromatic ? 1.0 : 0.0;
        f[21 + std::min(a.implicit_h, 4)] = 1.0;
    }
    return out;
}

std::vector<std::vector<double>> reduced_features(const ReducedGraph& t) {
    const int width = reduced_feature_width(t);
    std::vector<std::vector<double>> out(t.node_count(), std::vector<double>(width, 0.0));
    for (int v = 0; v < t.node_count(); ++v) {
        const auto& node = t.nodes[v];
        if (node.jt_category)
            out[v][static_cast<int>(*node.jt_category)] = 1.0;
        else if (node.erg_features)
            for (int i = 0; i < chem::kErgFeatureCount; ++i)
                out[v][i] = (*node.erg_features)[i] ? 1.0 : 0.0;
    }
    return out;
}

int reduced_feature_width(const ReducedGraph& t) {
    return t.kind == chem::ReducedKind::JunctionTree ? chem::kJtCategoryCount
                                                     : chem::kErgFeatureCount;
}

namespace {

TensorRef mlp2(Tape& t, TensorRef z, const GinRefs& p) {
    TensorRef h = add_rowvec(t, matmul(t, z, p.w1), p.b1);
    h = relu(t, h);
    return add_rowvec(t, matmul(t, h, p.w2), p.b2);
}

}  // namespace

TensorRef gin_forward(Tape& t, TensorRef x, const GraphTopology& topo,
                      const GinRefs& p) {
    if (x->rows != topo.n_nodes)
        throw ShapeMismatch("gin_forward: " + std::to_string(x->rows) +
                            " embedding rows for " + std::to_string(topo.n_nodes) +
                            " nodes");
    TensorRef self = smul(t, add_const(t, p.eps, 1.0), x);
    TensorRef agg;
    if (topo.src.empty()) {
        agg = self;
    } else {
        TensorRef neigh = scatter_add_rows(t, gather_rows(t, x, topo.src), topo.dst,
                                           topo.n_nodes);
        agg = add(t, neigh, self);
    }
    return mlp2(t, agg, p);
}

TensorRef gine_forward(Tape& t, TensorRef x, const GraphTopology& topo,
                       const GinRefs& p, TensorRef edge_w) {
    if (x->rows != topo.n_nodes)
        throw ShapeMismatch("gine_forward: " + std::to_string(x->rows) +
                            " embedding rows for " + std::to_string(topo.n_nodes) +
                            " nodes");
    TensorRef self = smul(t, add_const(t, p.eps, 1.0), x);
    TensorRef agg;
    if (topo.src.empty()) {
        agg = self;
    } else {
        if (topo.edge_features.size() != topo.src.size())
            throw MissingEdgeFeature("gine_forward: " +
                                     std::to_string(topo.edge_features.size()) +
                                     " edge features for " +
                                     std::to_string(topo.src.size()) + " edges");
        TensorRef e = t.constant(topo.edge_features);
        TensorRef e_proj = matmul(t, e, edge_w);
        TensorRef msg = relu(t, add(t, gather_rows(t, x, topo.src), e_proj));
        TensorRef neigh = scatter_add_rows(t, msg, topo.dst, topo.n_nodes);
        agg = add(t, self, neigh);
    }
    return mlp2(t, agg, p);
}

TensorRef mlp_head(Tape& t, TensorRef h, const HeadRefs& p) {
    TensorRef z = relu(t, add_rowvec(t, matmul(t, h, p.w1), p.b1));
    return add_rowvec(t, matmul(t, z, p.w2), p.b2);
}

}  // namespace ximp::nn
