#pragma once

// Deterministic generators shared by unit tests and the acceptance suite:
// a fuzz corpus of valid subset SMILES and random left-total correspondence
// matrices. Everything is a pure function of the seed.

#include <array>
#include <algorithm>
#include <cstdlib>
#include <string>
#include <vector>

#include "ximp/rng.hpp"

namespace ximp::testing {

struct GenAtom {
    char symbol;
    int max_valence;
    int used = 0;
};

// Writes a SMILES string for a generated graph. A first DFS classifies tree
// vs back edges and assigns ring-closure digits; a second pass emits atoms,
// branches, '=' bond symbols, and the digits at both endpoints.
class SmilesWriter {
  public:
    SmilesWriter(const std::vector<GenAtom>& atoms,
                 const std::vector<std::array<int, 3>>& edges)  // a, b, order
        : atoms_(atoms), adj_(atoms.size()) {
        for (size_t i = 0; i < edges.size(); ++i) {
            adj_[edges[i][0]].push_back({edges[i][1], edges[i][2], static_cast<int>(i)});
            adj_[edges[i][1]].push_back({edges[i][0], edges[i][2], static_cast<int>(i)});
        }
        n_edges_ = static_cast<int>(edges.size());
    }

    std::string write() {
        visited_.assign(atoms_.size(), false);
        edge_used_.assign(n_edges_, false);
        digits_.assign(atoms_.size(), {});
        int next_digit = 1;
        // classify: walk the DFS, tree edges consume, remaining adjacency to
        // visited nodes becomes a ring closure with a fresh digit
        for (size_t i = 0; i < atoms_.size(); ++i)
            if (!visited_[i]) classify(static_cast<int>(i), -1, next_digit);

        visited_.assign(atoms_.size(), false);
        edge_used_.assign(n_edges_, false);
        std::string out;
        for (size_t i = 0; i < atoms_.size(); ++i) {
            if (visited_[i]) continue;
            if (!out.empty()) out += '.';
            emit(static_cast<int>(i), 0, out);
        }
        return out;
    }

  private:
    struct Adj {
        int to, order, edge;
    };

    void classify(int v, int in_edge, int& next_digit) {
        visited_[v] = true;
        for (const Adj& e : adj_[v]) {
            if (e.edge == in_edge || edge_used_[e.edge]) continue;
            edge_used_[e.edge] = true;
            if (visited_[e.to]) {
                int digit = next_digit++;
                digits_[v].push_back({digit, e.order, e.edge});
                digits_[e.to].push_back({digit, 0, e.edge});  // symbol once
            } else {
                classify(e.to, e.edge, next_digit);
            }
        }
    }

    void emit(int v, int order_in, std::string& out) {
        visited_[v] = true;
        if (order_in == 2) out += '=';
        if (order_in == 3) out += '#';
        out += atoms_[v].symbol;
        for (const auto& [digit, order, edge] : digits_[v]) {
            if (order == 2) out += '=';
            if (digit <= 9)
                out += static_cast<char>('0' + digit);
            else
                out += "%" + std::to_string(digit);
        }
        std::vector<Adj> children;
        for (const Adj& e : adj_[v])
            if (!visited_[e.to] && !is_ring_edge(e.edge)) children.push_back(e);
        for (size_t i = 0; i < children.size(); ++i) {
            bool last = i + 1 == children.size();
            if (!last) out += '(';
            emit(children[i].to, children[i].order, out);
            if (!last) out += ')';
        }
    }

    bool is_ring_edge(int edge) const {
        for (const auto& per_atom : digits_)
            for (const auto& [digit, order, e] : per_atom)
                if (e == edge) return true;
        return false;
    }

    const std::vector<GenAtom>& atoms_;
    std::vector<std::vector<Adj>> adj_;
    std::vector<bool> visited_;
    std::vector<bool> edge_used_;
    std::vector<std::vector<std::array<int, 3>>> digits_;  // digit, order, edge
    int n_edges_ = 0;
};

inline std::string random_smiles(ximp::Rng& rng) {
    int n = 3 + static_cast<int>(rng.below(12));
    std::vector<GenAtom> atoms;
    for (int i = 0; i < n; ++i) {
        double r = rng.uniform();
        if (r < 0.70)
            atoms.push_back({'C', 4});
        else if (r < 0.82)
            atoms.push_back({'N', 3});
        else if (r < 0.94)
            atoms.push_back({'O', 2});
        else
            atoms.push_back({'S', 2});
    }
    std::vector<std::array<int, 3>> edges;
    auto try_edge = [&](int a, int b, int order) {
        if (a == b) return false;
        for (const auto& e : edges)
            if ((e[0] == a && e[1] == b) || (e[0] == b && e[1] == a)) return false;
        if (atoms[a].used + order > atoms[a].max_valence) return false;
        if (atoms[b].used + order > atoms[b].max_valence) return false;
        edges.push_back({a, b, order});
        atoms[a].used += order;
        atoms[b].used += order;
        return true;
    };
    // random spanning tree
    for (int i = 1; i < n; ++i) {
        int parent = static_cast<int>(rng.below(i));
        int order = (rng.uniform() < 0.12) ? 2 : 1;
        if (!try_edge(parent, i, order)) try_edge(parent, i, 1);
    }
    // occasional rings: connect nodes at index distance >= 2
    int extra = static_cast<int>(rng.below(3));
    for (int k = 0; k < extra; ++k) {
        int a = static_cast<int>(rng.below(n));
        int b = static_cast<int>(rng.below(n));
        if (std::abs(a - b) >= 2) try_edge(std::min(a, b), std::max(a, b), 1);
    }
    return SmilesWriter(atoms, edges).write();
}

// Generated molecules interleaved with a fixed pool of aromatic and
// fused-ring structures the random walk cannot produce.
inline std::vector<std::string> fuzz_corpus(int count, uint64_t seed) {
    static const std::vector<std::string> pool = {
        "c1ccccc1",
        "c1ccncc1",
        "Oc1cnccc1",
        "Oc1ccncc1",
        "c1ccc2ccccc2c1",
        "C1CCC2CCCCC2C1",
        "C1CCC(C1)C1CCCC1",
        "Cc1ccccc1",
        "Oc1ccccc1",
        "Nc1ccccc1",
        "CC(=O)O",
        "CC(=O)[O-]",
        "C[NH3+]",
        "CCN",
        "CSC",
        "c1cc[nH]c1",
        "c1ccsc1",
        "c1ccoc1",
        "CC(C)Cc1ccccc1",
        "OCC1CCCCC1N",
    };
    ximp::Rng rng(seed);
    std::vector<std::string> out;
    out.reserve(count);
    for (int i = 0; i < count; ++i) {
        if (i % 10 == 0)
            out.push_back(pool[(i / 10) % pool.size()]);
        else
            out.push_back(random_smiles(rng));
    }
    return out;
}

// Random binary matrix (rows x cols) that is left-total (every row has a 1)
// and has no empty column, as the paper assumes for abstractions.
inline std::vector<std::vector<double>> random_left_total(ximp::Rng& rng, int rows,
                                                          int cols) {
    std::vector<std::vector<double>> s(rows, std::vector<double>(cols, 0.0));
    for (int r = 0; r < rows; ++r) {
        int ones = 1 + static_cast<int>(rng.below(std::min(cols, 3)));
        for (int k = 0; k < ones; ++k) s[r][rng.below(cols)] = 1.0;
    }
    for (int c = 0; c < cols; ++c) {
        bool any = false;
        for (int r = 0; r < rows; ++r) any = any || s[r][c] > 0;
        if (!any) s[rng.below(rows)][c] = 1.0;
    }
    return s;
}

}  // namespace ximp::testing
