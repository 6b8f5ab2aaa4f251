#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ximp/chem/mol.hpp"

namespace ximp::chem {

enum class ReducedKind : uint8_t { JunctionTree, Erg };

enum class JtCategory : uint8_t { Singleton, Bond, Ring, BridgedCompound };
constexpr int kJtCategoryCount = 4;

// ErG node feature bits.
enum ErgFeature : int {
    kErgDonor = 0,
    kErgAcceptor,
    kErgPositive,
    kErgNegative,
    kErgHydrophobic,  // endcap groups and thioether S
    kErgAromatic,
    kErgFlipFlop,
    kErgCentroidAromatic,
    kErgCentroidAliphatic,
    kErgFeatureCount,
};

struct ReducedNode {
    std::optional<JtCategory> jt_category;
    std::optional<std::array<bool, kErgFeatureCount>> erg_features;
};

struct ReducedGraph {
    ReducedKind kind = ReducedKind::JunctionTree;
    std::vector<ReducedNode> nodes;
    std::vector<std::pair<int, int>> edges;     // unordered, a < b
    std::vector<std::vector<int>> atom_sets;    // per node, sorted atom indices

    int node_count() const { return static_cast<int>(nodes.size()); }
    std::vector<std::vector<int>> neighbor_lists() const;
    bool is_forest() const;
    int component_count() const;
};

// Node correspondence matrix S linking molecular atoms (rows) to reduced
// nodes (columns), with the two normalized forms used in message passing:
// row_normalized = D^-1 S with D = diag(S 1), and col_normalized holding the
// row-normalized transpose (each column of S scaled by its sum, transposed).
struct Correspondence {
    std::vector<std::vector<double>> s;
    std::vector<std::vector<double>> row_normalized;  // |V(G)| x |V(T)|
    std::vector<std::vector<double>> col_normalized;  // |V(T)| x |V(G)|

    int atom_count() const { return static_cast<int>(s.size()); }
    int node_count() const { return s.empty() ? 0 : static_cast<int>(s[0].size()); }

    static Correspondence from_atom_sets(int n_atoms,
                                         const std::vector<std::vector<int>>& atom_sets);
    static Correspondence from_matrix(std::vector<std::vector<double>> s);
};

// Junction tree per Jin-style tree decomposition: SSSR rings and non-cycle
// bonds are clusters; rings sharing more than two atoms merge into a bridged
// compound; atoms in three or more clusters become singleton clusters and
// re-route the edges that would otherwise close cycles.
std::pair<ReducedGraph, Correspondence> build_junction_tree(const MolecularGraph& g);

// resolution=1 is the identity; each further round merges every bond or
// singleton node into its lowest-index neighbor (union-find semantics, the
// lowest index in a merged group absorbs and keeps its category).
std::pair<ReducedGraph, Correspondence> coarsen_junction_tree(const ReducedGraph& t,
                                                              const Correspondence& c,
                                                              int resolution);

// Extended reduced graph: physiological charging, donor/acceptor/flip-flop
// assignment, endcap collapsing, then ring abstraction with centroids.
std::pair<ReducedGraph, Correspondence> build_erg(const MolecularGraph& g);

// Doubly-normalized |V(T_i)| x |V(T_k)| projection used for direct messages
// between abstractions over the same molecule.
std::vector<std::vector<double>> dimp_correspondence(const Correspondence& c_i,
                                                     const Correspondence& c_k);

struct Fingerprint {
    std::vector<uint8_t> bits;
    int n_bits = 0;
    int radius = 0;

    bool test(int i) const { return bits[i] != 0; }
    int popcount() const;
};

// Distinct Morgan identifiers from rounds 0..radius (sorted).
std::vector<uint64_t> ecfp_identifiers(const MolecularGraph& g, int radius);

Fingerprint ecfp(const MolecularGraph& g, int radius, int n_bits);

// Canonical scaffold key after iteratively deleting acyclic leaves; empty
// string for acyclic molecules.
std::string murcko_scaffold(const MolecularGraph& g);

}  // namespace ximp::chem
