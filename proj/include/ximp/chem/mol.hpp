#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace ximp::chem {

enum class Element : uint8_t { B, C, N, O, P, S, F, Cl, Br, I };

const char* element_symbol(Element e);

enum class BondOrder : uint8_t { Single, Double, Triple, Aromatic };

// Bond order as used for valence accounting (aromatic counts 1; the pi
// contribution is handled separately in the parser).
int bond_order_int(BondOrder o);

struct Atom {
    Element element = Element::C;
    int formal_charge = 0;  // in [-2, 2]
    bool aromatic = false;
    int implicit_h = 0;
    int index = 0;  // position in SMILES token order
};

struct Bond {
    int a = 0;
    int b = 0;
    BondOrder order = BondOrder::Single;
    bool in_ring = false;  // lies on some cycle of the bond graph
};

// Immutable after construction; parse_smiles is the only producer.
struct MolecularGraph {
    std::vector<Atom> atoms;
    std::vector<Bond> bonds;
    std::vector<std::vector<int>> neighbors;  // atom -> adjacent atom indices
    std::vector<std::vector<int>> incident;   // atom -> incident bond indices
    std::vector<std::vector<int>> rings;      // SSSR, each a sorted atom list

    int atom_count() const { return static_cast<int>(atoms.size()); }
    int bond_count() const { return static_cast<int>(bonds.size()); }
    int degree(int atom) const { return static_cast<int>(neighbors[atom].size()); }
    bool atom_in_ring(int atom) const;
    int component_count() const;
    int cycle_rank() const;

    // Dense symmetric 0/1 adjacency with zero diagonal.
    std::vector<std::vector<uint8_t>> adjacency() const;

    // Bond index between two atoms, or -1.
    int bond_between(int u, int v) const;
};

// Parses the supported SMILES subset: organic-subset atoms B C N O P S F Cl
// Br I (lowercase b c n o p s for aromatic), bracket atoms with charge and
// explicit H, ring closures 1-9 and %nn, branches, bond symbols - = # :, and
// dots. Stereo, isotopes, and anything else are hard errors.
MolecularGraph parse_smiles(std::string_view text);

// Smallest set of smallest rings, computed as a minimum cycle basis from
// per-edge BFS shortest cycles with deterministic tie-breaking (smaller ring
// first, then lexicographically smaller sorted atom tuple). Returns exactly
// cycle-rank many rings; empty for acyclic input.
std::vector<std::vector<int>> perceive_sssr(const MolecularGraph& g);

}  // namespace ximp::chem
