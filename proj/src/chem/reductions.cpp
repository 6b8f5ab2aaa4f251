#include "ximp/chem/reductions.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <numeric>
#include <set>

#include "ximp/errors.hpp"

namespace ximp::chem {

namespace {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    // Keeps the smaller index as representative.
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (a > b) std::swap(a, b);
        parent[b] = a;
    }
};

std::vector<int> sorted_union(const std::vector<int>& a, const std::vector<int>& b) {
    std::vector<int> out;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

int shared_count(const std::vector<int>& a, const std::vector<int>& b) {
    std::vector<int> inter;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                          std::back_inserter(inter));
    return static_cast<int>(inter.size());
}

uint64_t mix64(uint64_t x) {
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ull;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebull;
    x ^= x >> 31;
    return x;
}

}  // namespace

std::vector<std::vector<int>> ReducedGraph::neighbor_lists() const {
    std::vector<std::vector<int>> adj(nodes.size());
    for (const auto& [a, b] : edges) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    return adj;
}

bool ReducedGraph::is_forest() const {
    UnionFind uf(node_count());
    for (const auto& [a, b] : edges) {
        if (uf.find(a) == uf.find(b)) return false;
        uf.unite(a, b);
    }
    return true;
}

int ReducedGraph::component_count() const {
    UnionFind uf(node_count());
    for (const auto& [a, b] : edges) uf.unite(a, b);
    int count = 0;
    for (int i = 0; i < node_count(); ++i) count += uf.find(i) == i;
    return count;
}

Correspondence Correspondence::from_atom_sets(
    int n_atoms, const std::vector<std::vector<int>>& atom_sets) {
    std::vector<std::vector<double>> s(n_atoms,
                                       std::vector<double>(atom_sets.size(), 0.0));
    for (size_t t = 0; t < atom_sets.size(); ++t)
        for (int v : atom_sets[t]) s[v][t] = 1.0;
    return from_matrix(std::move(s));
}

Correspondence Correspondence::from_matrix(std::vector<std::vector<double>> mat) {
    Correspondence c;
    c.s = std::move(mat);
    const int rows = c.atom_count();
    const int cols = c.node_count();
    c.row_normalized.assign(rows, std::vector<double>(cols, 0.0));
    c.col_normalized.assign(cols, std::vector<double>(rows, 0.0));
    for (int v = 0; v < rows; ++v) {
        double sum = std::accumulate(c.s[v].begin(), c.s[v].end(), 0.0);
        if (sum <= 0.0)
            throw ShapeMismatch("correspondence is not left-total: atom " +
                                std::to_string(v) + " belongs to no reduced node");
        for (int t = 0; t < cols; ++t) c.row_normalized[v][t] = c.s[v][t] / sum;
    }
    for (int t = 0; t < cols; ++t) {
        double sum = 0.0;
        for (int v = 0; v < rows; ++v) sum += c.s[v][t];
        if (sum <= 0.0)
            throw ShapeMismatch("reduced node " + std::to_string(t) +
                                " covers no atoms");
        for (int v = 0; v < rows; ++v) c.col_normalized[t][v] = c.s[v][t] / sum;
    }
    return c;
}

std::pair<ReducedGraph, Correspondence> build_junction_tree(const MolecularGraph& g) {
    struct Cluster {
        std::vector<int> atoms;  // sorted
        JtCategory category;
    };
    std::vector<Cluster> clusters;

    for (const auto& ring : g.rings) clusters.push_back({ring, JtCategory::Ring});

    // Merge rings sharing more than two atoms (bridged ring systems).
    bool merged = true;
    while (merged) {
        merged = false;
        for (size_t i = 0; i < clusters.size() && !merged; ++i) {
            for (size_t j = i + 1; j < clusters.size() && !merged; ++j) {
                if (shared_count(clusters[i].atoms, clusters[j].atoms) > 2) {
                    clusters[i].atoms = sorted_union(clusters[i].atoms, clusters[j].atoms);
                    clusters[i].category = JtCategory::BridgedCompound;
                    clusters.erase(clusters.begin() + j);
                    merged = true;
                }
            }
        }
    }

    for (int bi = 0; bi < g.bond_count(); ++bi) {
        const Bond& b = g.bonds[bi];
        if (!b.in_ring)
            clusters.push_back(
                {{std::min(b.a, b.b), std::max(b.a, b.b)}, JtCategory::Bond});
    }
    for (int v = 0; v < g.atom_count(); ++v)
        if (g.degree(v) == 0) clusters.push_back({{v}, JtCategory::Singleton});

    std::vector<std::vector<int>> member(g.atom_count());
    for (size_t ci = 0; ci < clusters.size(); ++ci)
        for (int v : clusters[ci].atoms) member[v].push_back(static_cast<int>(ci));

    // An atom in three or more clusters becomes its own singleton cluster;
    // direct edges between clusters sharing such an atom are re-routed
    // through it, which is what breaks cluster-graph cycles.
    std::vector<bool> hub(g.atom_count(), false);
    std::vector<int> hub_cluster(g.atom_count(), -1);
    for (int v = 0; v < g.atom_count(); ++v) {
        if (member[v].size() >= 3) {
            hub[v] = true;
            hub_cluster[v] = static_cast<int>(clusters.size());
            clusters.push_back({{v}, JtCategory::Singleton});
        }
    }

    struct EdgeCand {
        int weight;  // shared atoms, for the spanning pass
        int a, b;
    };
    std::vector<EdgeCand> cands;
    const size_t n_base = clusters.size();
    for (size_t i = 0; i < n_base; ++i) {
        for (size_t j = i + 1; j < n_base; ++j) {
            std::vector<int> inter;
            std::set_intersection(clusters[i].atoms.begin(), clusters[i].atoms.end(),
                                  clusters[j].atoms.begin(), clusters[j].atoms.end(),
                                  std::back_inserter(inter));
            if (inter.empty()) continue;
            bool i_is_hub = clusters[i].atoms.size() == 1 && hub[clusters[i].atoms[0]];
            bool j_is_hub = clusters[j].atoms.size() == 1 && hub[clusters[j].atoms[0]];
            if (i_is_hub || j_is_hub) continue;  // hub edges added below
            bool via_hub = std::any_of(inter.begin(), inter.end(),
                                       [&](int v) { return hub[v]; });
            if (via_hub) continue;  // re-routed through the singleton
            cands.push_back({static_cast<int>(inter.size()), static_cast<int>(i),
                             static_cast<int>(j)});
        }
    }
    for (int v = 0; v < g.atom_count(); ++v) {
        if (!hub[v]) continue;
        for (int ci : member[v])
            cands.push_back(
                {1, std::min(ci, hub_cluster[v]), std::max(ci, hub_cluster[v])});
    }

    // Maximum-weight spanning forest keeps the result a tree per component
    // even if re-routing leaves a residual cycle. Deterministic order: larger
    // overlap first, then lower indices.
    std::sort(cands.begin(), cands.end(), [](const EdgeCand& x, const EdgeCand& y) {
        if (x.weight != y.weight) return x.weight > y.weight;
        return std::tie(x.a, x.b) < std::tie(y.a, y.b);
    });
    UnionFind uf(static_cast<int>(clusters.size()));
    std::vector<std::pair<int, int>> edges;
    for (const auto& e : cands) {
        if (uf.find(e.a) == uf.find(e.b)) continue;
        uf.unite(e.a, e.b);
        edges.push_back({e.a, e.b});
    }
    std::sort(edges.begin(), edges.end());

    ReducedGraph t;
    t.kind = ReducedKind::JunctionTree;
    for (const auto& c : clusters) {
        ReducedNode node;
        node.jt_category = c.category;
        t.nodes.push_back(node);
        t.atom_sets.push_back(c.atoms);
    }
    t.edges = std::move(edges);
    return {t, Correspondence::from_atom_sets(g.atom_count(), t.atom_sets)};
}

std::pair<ReducedGraph, Correspondence> coarsen_junction_tree(const ReducedGraph& t,
                                                              const Correspondence& c,
                                                              int resolution) {
    if (resolution < 1 || resolution > 3)
        throw InvalidResolution("junction tree resolution must be in {1,2,3}, got " +
                                std::to_string(resolution));
    if (t.kind != ReducedKind::JunctionTree)
        throw ConfigError("coarsen_junction_tree expects kind=junction_tree");

    ReducedGraph cur = t;
    const int n_atoms = c.atom_count();
    for (int round = 1; round < resolution; ++round) {
        auto adj = cur.neighbor_lists();
        UnionFind uf(cur.node_count());
        for (int v = 0; v < cur.node_count(); ++v) {
            auto cat = *cur.nodes[v].jt_category;
            if (cat != JtCategory::Bond && cat != JtCategory::Singleton) continue;
            if (adj[v].empty()) continue;
            int target = *std::min_element(adj[v].begin(), adj[v].end());
            uf.unite(v, target);
        }
        std::map<int, int> new_index;
        for (int v = 0; v < cur.node_count(); ++v) {
            int r = uf.find(v);
            if (!new_index.count(r)) new_index[r] = static_cast<int>(new_index.size());
        }
        ReducedGraph next;
        next.kind = ReducedKind::JunctionTree;
        next.nodes.resize(new_index.size());
        next.atom_sets.resize(new_index.size());
        for (auto [rep, idx] : new_index) next.nodes[idx] = cur.nodes[rep];
        for (int v = 0; v < cur.node_count(); ++v) {
            int idx = new_index[uf.find(v)];
            next.atom_sets[idx] = sorted_union(next.atom_sets[idx], cur.atom_sets[v]);
        }
        std::set<std::pair<int, int>> edge_set;
        for (const auto& [a, b] : cur.edges) {
            int na = new_index[uf.find(a)], nb = new_index[uf.find(b)];
            if (na == nb) continue;
            edge_set.insert({std::min(na, nb), std::max(na, nb)});
        }
        next.edges.assign(edge_set.begin(), edge_set.end());
        cur = std::move(next);
    }
    return {cur, Correspondence::from_atom_sets(n_atoms, cur.atom_sets)};
}

namespace {

struct ErgAtom {
    int charge;
    int implicit_h;
    bool aromatic;
    Element element;
    bool donor = false, acceptor = false, flipflop = false;
    bool thioether = false;
};

bool is_carbonyl_carbon(const MolecularGraph& g, int v) {
    if (g.atoms[v].element != Element::C) return false;
    for (int bi : g.incident[v]) {
        const Bond& b = g.bonds[bi];
        int w = b.a + b.b - v;
        if (g.atoms[w].element == Element::O && b.order == BondOrder::Double) return true;
    }
    return false;
}

}  // namespace

std::pair<ReducedGraph, Correspondence> build_erg(const MolecularGraph& g) {
    const int n = g.atom_count();

    std::vector<std::vector<int>> ring_ids(n);
    for (size_t r = 0; r < g.rings.size(); ++r)
        for (int v : g.rings[r]) ring_ids[v].push_back(static_cast<int>(r));

    // Step 1: physiological charging on a working copy.
    std::vector<ErgAtom> atoms(n);
    for (int v = 0; v < n; ++v)
        atoms[v] = {g.atoms[v].formal_charge, g.atoms[v].implicit_h, g.atoms[v].aromatic,
                    g.atoms[v].element};
    for (int v = 0; v < n; ++v) {
        if (!is_carbonyl_carbon(g, v)) continue;
        for (int bi : g.incident[v]) {
            const Bond& b = g.bonds[bi];
            int w = b.a + b.b - v;
            if (g.atoms[w].element == Element::O && b.order == BondOrder::Single &&
                atoms[w].implicit_h >= 1 && atoms[w].charge == 0) {
                atoms[w].charge = -1;  // carboxylic acid deprotonates
                atoms[w].implicit_h = 0;
            }
        }
    }
    for (int v = 0; v < n; ++v) {
        if (g.atoms[v].element != Element::N || atoms[v].aromatic || atoms[v].charge != 0)
            continue;
        bool all_single = true, conjugated = false;
        for (int bi : g.incident[v]) {
            const Bond& b = g.bonds[bi];
            all_single = all_single && b.order == BondOrder::Single;
            int w = b.a + b.b - v;
            if (g.atoms[w].aromatic || is_carbonyl_carbon(g, w)) conjugated = true;
        }
        if (all_single && !conjugated) {
            atoms[v].charge = 1;  // aliphatic amine protonates
            atoms[v].implicit_h += 1;
        }
    }

    // Step 2: donors, acceptors, flip-flops.
    for (int v = 0; v < n; ++v) {
        ErgAtom& a = atoms[v];
        if (a.element != Element::N && a.element != Element::O) continue;
        bool donor = a.implicit_h >= 1;
        // A positive charge or a pyrrole-type aromatic N-H consumes the lone pair.
        bool acceptor = a.charge <= 0 && !(a.aromatic && a.implicit_h >= 1);
        if (donor && acceptor) {
            a.flipflop = true;
        } else {
            a.donor = donor;
            a.acceptor = acceptor;
        }
    }

    // Step 3: endcaps. Terminal all-carbon branches of at most three heavy
    // atoms collapse to one hydrophobic node; thioether S is tagged in place.
    std::vector<bool> candidate(n, false);
    for (int v = 0; v < n; ++v) {
        if (atoms[v].element != Element::C || atoms[v].aromatic || !ring_ids[v].empty())
            continue;
        bool single_only = true;
        for (int bi : g.incident[v])
            single_only = single_only && g.bonds[bi].order == BondOrder::Single;
        candidate[v] = single_only;
    }
    std::vector<int> endcap_of(n, -1);
    std::vector<std::vector<int>> endcaps;
    {
        std::vector<bool> seen(n, false);
        for (int v = 0; v < n; ++v) {
            if (!candidate[v] || seen[v]) continue;
            std::vector<int> comp, stack{v};
            seen[v] = true;
            while (!stack.empty()) {
                int x = stack.back();
                stack.pop_back();
                comp.push_back(x);
                for (int w : g.neighbors[x])
                    if (candidate[w] && !seen[w]) {
                        seen[w] = true;
                        stack.push_back(w);
                    }
            }
            std::sort(comp.begin(), comp.end());
            std::set<int> anchors;
            for (int x : comp)
                for (int w : g.neighbors[x])
                    if (!candidate[w]) anchors.insert(w);
            if (comp.size() <= 3 && anchors.size() == 1) {
                for (int x : comp) endcap_of[x] = static_cast<int>(endcaps.size());
                endcaps.push_back(comp);
            }
        }
    }
    for (int v = 0; v < n; ++v) {
        if (atoms[v].element != Element::S || !ring_ids[v].empty() || g.degree(v) != 2)
            continue;
        bool ok = true;
        for (int bi : g.incident[v]) {
            const Bond& b = g.bonds[bi];
            ok = ok && b.order == BondOrder::Single &&
                 g.atoms[b.a + b.b - v].element == Element::C;
        }
        atoms[v].thioether = ok;
    }

    // Step 4: ring abstraction. Retained ring atoms: substituted (neighbor
    // outside every shared ring), bridgeheads, or feature carriers.
    auto featured = [&](int v) {
        const ErgAtom& a = atoms[v];
        return a.donor || a.acceptor || a.flipflop || a.charge != 0 || a.thioether;
    };
    std::vector<bool> retained(n, false);
    for (int v = 0; v < n; ++v) {
        if (endcap_of[v] >= 0) continue;
        if (ring_ids[v].empty()) {
            retained[v] = true;
            continue;
        }
        bool substituted = false;
        for (int w : g.neighbors[v]) {
            bool same_ring = false;
            for (int r : ring_ids[v])
                same_ring = same_ring ||
                            std::find(ring_ids[w].begin(), ring_ids[w].end(), r) !=
                                ring_ids[w].end();
            substituted = substituted || !same_ring;
        }
        bool bridgehead = ring_ids[v].size() >= 2;
        retained[v] = substituted || bridgehead || featured(v);
    }

    // Node order: retained atoms, endcaps, ring centroids.
    ReducedGraph rg;
    rg.kind = ReducedKind::Erg;
    std::vector<int> node_of(n, -1);
    auto blank = [] {
        ReducedNode nd;
        nd.erg_features = std::array<bool, kErgFeatureCount>{};
        return nd;
    };
    for (int v = 0; v < n; ++v) {
        if (!retained[v]) continue;
        ReducedNode nd = blank();
        auto& f = *nd.erg_features;
        f[kErgDonor] = atoms[v].donor;
        f[kErgAcceptor] = atoms[v].acceptor;
        f[kErgFlipFlop] = atoms[v].flipflop;
        f[kErgPositive] = atoms[v].charge > 0;
        f[kErgNegative] = atoms[v].charge < 0;
        f[kErgAromatic] = atoms[v].aromatic;
        f[kErgHydrophobic] = atoms[v].thioether;
        node_of[v] = rg.node_count();
        rg.nodes.push_back(nd);
        rg.atom_sets.push_back({v});
    }
    std::vector<int> endcap_node(endcaps.size());
    for (size_t e = 0; e < endcaps.size(); ++e) {
        ReducedNode nd = blank();
        (*nd.erg_features)[kErgHydrophobic] = true;
        endcap_node[e] = rg.node_count();
        rg.nodes.push_back(nd);
        rg.atom_sets.push_back(endcaps[e]);
    }
    std::vector<int> centroid_node(g.rings.size());
    for (size_t r = 0; r < g.rings.size(); ++r) {
        ReducedNode nd = blank();
        bool aromatic_ring = true;
        for (int v : g.rings[r]) aromatic_ring = aromatic_ring && atoms[v].aromatic;
        (*nd.erg_features)[aromatic_ring ? kErgCentroidAromatic
                                         : kErgCentroidAliphatic] = true;
        centroid_node[r] = rg.node_count();
        rg.nodes.push_back(nd);
        rg.atom_sets.push_back(g.rings[r]);
    }

    std::set<std::pair<int, int>> edge_set;
    auto link = [&](int a, int b) {
        if (a != b && a >= 0 && b >= 0)
            edge_set.insert({std::min(a, b), std::max(a, b)});
    };
    for (const Bond& b : g.bonds) {
        int na = endcap_of[b.a] >= 0 ? endcap_node[endcap_of[b.a]] : node_of[b.a];
        int nb = endcap_of[b.b] >= 0 ? endcap_node[endcap_of[b.b]] : node_of[b.b];
        if (na >= 0 && nb >= 0) link(na, nb);
    }
    for (size_t r = 0; r < g.rings.size(); ++r)
        for (int v : g.rings[r])
            if (retained[v]) link(centroid_node[r], node_of[v]);
    rg.edges.assign(edge_set.begin(), edge_set.end());

    return {rg, Correspondence::from_atom_sets(n, rg.atom_sets)};
}

std::vector<std::vector<double>> dimp_correspondence(const Correspondence& c_i,
                                                     const Correspondence& c_k) {
    if (c_i.atom_count() != c_k.atom_count())
        throw ShapeMismatch("correspondences cover different molecules: " +
                            std::to_string(c_i.atom_count()) + " vs " +
                            std::to_string(c_k.atom_count()) + " atoms");
    const int n_atoms = c_i.atom_count();
    const int rows = c_i.node_count();
    const int cols = c_k.node_count();

    // col_normalized is D_{T,i}^-1 S_i^T and row_normalized is D_{G,k}^-1 S_k;
    // the product of two row-stochastic factors stays row-stochastic.
    std::vector<std::vector<double>> out(rows, std::vector<double>(cols, 0.0));
    for (int i = 0; i < rows; ++i)
        for (int v = 0; v < n_atoms; ++v) {
            double w = c_i.col_normalized[i][v];
            if (w == 0.0) continue;
            for (int k = 0; k < cols; ++k) out[i][k] += w * c_k.row_normalized[v][k];
        }
    return out;
}

int Fingerprint::popcount() const {
    int n = 0;
    for (uint8_t b : bits) n += b != 0;
    return n;
}

std::vector<uint64_t> ecfp_identifiers(const MolecularGraph& g, int radius) {
    constexpr uint64_t kVersionSalt = 0x78696d7020763031ull;  // identifier scheme v01
    const int n = g.atom_count();
    std::vector<uint64_t> id(n);
    for (int v = 0; v < n; ++v) {
        const Atom& a = g.atoms[v];
        uint64_t packed = static_cast<uint64_t>(a.element);
        packed = packed * 31 + static_cast<uint64_t>(g.degree(v));
        packed = packed * 31 + static_cast<uint64_t>(a.formal_charge + 2);
        packed = packed * 31 + static_cast<uint64_t>(a.implicit_h);
        packed = packed * 31 + (g.atom_in_ring(v) ? 1 : 0);
        packed = packed * 31 + (a.aromatic ? 1 : 0);
        id[v] = mix64(packed ^ kVersionSalt);
    }
    std::vector<uint64_t> all(id);
    for (int round = 0; round < radius; ++round) {
        std::vector<uint64_t> next(n);
        for (int v = 0; v < n; ++v) {
            std::vector<std::pair<uint64_t, uint64_t>> env;
            for (int bi : g.incident[v]) {
                const Bond& b = g.bonds[bi];
                env.push_back({static_cast<uint64_t>(b.order), id[b.a + b.b - v]});
            }
            std::sort(env.begin(), env.end());
            uint64_t h = mix64(id[v] ^ (kVersionSalt + round + 1));
            for (const auto& [order, nid] : env)
                h = mix64(h ^ mix64(nid * 0x9e3779b97f4a7c15ull + order));
            next[v] = h;
        }
        id = std::move(next);
        all.insert(all.end(), id.begin(), id.end());
    }
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());
    return all;
}

Fingerprint ecfp(const MolecularGraph& g, int radius, int n_bits) {
    if (radius < 2 || radius > 4)
        throw InvalidRadius("fingerprint radius must be in {2,3,4}, got " +
                            std::to_string(radius));
    if (n_bits != 16 && n_bits != 32 && n_bits != 1024 && n_bits != 2048)
        throw InvalidWidth("fingerprint width must be one of {16,32,1024,2048}, got " +
                           std::to_string(n_bits));
    Fingerprint fp;
    fp.n_bits = n_bits;
    fp.radius = radius;
    fp.bits.assign(n_bits, 0);
    for (uint64_t ident : ecfp_identifiers(g, radius))
        fp.bits[ident % static_cast<uint64_t>(n_bits)] = 1;
    return fp;
}

std::string murcko_scaffold(const MolecularGraph& g) {
    const int n = g.atom_count();
    std::vector<bool> alive(n, true);
    std::vector<int> degree(n);
    for (int v = 0; v < n; ++v) degree[v] = g.degree(v);

    bool changed = true;
    while (changed) {
        changed = false;
        for (int v = 0; v < n; ++v) {
            if (!alive[v] || degree[v] > 1 || g.atom_in_ring(v)) continue;
            alive[v] = false;
            changed = true;
            for (int w : g.neighbors[v])
                if (alive[w]) --degree[w];
            degree[v] = 0;
        }
    }

    std::vector<std::string> atom_keys;
    for (int v = 0; v < n; ++v) {
        if (!alive[v]) continue;
        atom_keys.push_back(std::string(element_symbol(g.atoms[v].element)) + ":" +
                            std::to_string(degree[v]) +
                            (g.atom_in_ring(v) ? ":r" : ":-"));
    }
    if (atom_keys.empty()) return "";
    std::sort(atom_keys.begin(), atom_keys.end());

    std::vector<std::string> edge_keys;
    for (const Bond& b : g.bonds) {
        if (!alive[b.a] || !alive[b.b]) continue;
        std::string ka = std::string(element_symbol(g.atoms[b.a].element)) + ":" +
                         std::to_string(degree[b.a]);
        std::string kb = std::string(element_symbol(g.atoms[b.b].element)) + ":" +
                         std::to_string(degree[b.b]);
        if (kb < ka) std::swap(ka, kb);
        edge_keys.push_back(ka + "~" + kb + (b.in_ring ? ":r" : ":-"));
    }
    std::sort(edge_keys.begin(), edge_keys.end());
    uint64_t h = 0x5ca1ab1e;
    for (const auto& k : edge_keys) {
        for (char c : k) h = mix64(h ^ static_cast<uint64_t>(c));
        h = mix64(h);
    }

    std::string key;
    for (size_t i = 0; i < atom_keys.size(); ++i) {
        if (i) key += "|";
        key += atom_keys[i];
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    key += "#";
    key += buf;
    return key;
}

}  // namespace ximp::chem
