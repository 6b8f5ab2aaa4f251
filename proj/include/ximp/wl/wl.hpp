#pragma once

#include <utility>
#include <vector>

#include "ximp/chem/mol.hpp"
#include "ximp/chem/reductions.hpp"

namespace ximp::wl {

// Unlabeled simple undirected graph, the input to color refinement.
struct SimpleGraph {
    int n = 0;
    std::vector<std::pair<int, int>> edges;

    std::vector<std::vector<int>> neighbor_lists() const;
};

SimpleGraph from_molecule(const chem::MolecularGraph& g);
SimpleGraph from_reduced(const chem::ReducedGraph& t);

struct ColoringResult {
    std::vector<int> colors;         // stable color per node
    int rounds = 0;                  // refining rounds until fixpoint
    std::vector<int> histogram;      // sorted class sizes (relabel-invariant)
};

// Color refinement with constant initialization: each round rehashes
// (own color, sorted multiset of neighbor colors) through an injective
// relabeling until the partition stops refining.
ColoringResult wl_refine(const SimpleGraph& g);

// Standard 1-WL graph test: refine both graphs with a shared signature
// dictionary and compare the stable color multisets.
bool wl_distinguishable(const SimpleGraph& g1, const SimpleGraph& g2);

// Disjoint union of the molecular graph and its abstractions plus one cross
// edge per 1-entry of each correspondence matrix. Labels are dropped.
struct CompoundGraph {
    SimpleGraph graph;
    std::vector<std::pair<int, int>> origin;  // (view: 0=G, i>=1 abstraction; local index)
};

CompoundGraph build_compound(
    const chem::MolecularGraph& g,
    const std::vector<const chem::ReducedGraph*>& abstractions,
    const std::vector<const chem::Correspondence*>& correspondences);

}  // namespace ximp::wl
