#include "ximp/wl/wl.hpp"

#include <algorithm>
#include <map>

#include "ximp/errors.hpp"

namespace ximp::wl {

std::vector<std::vector<int>> SimpleGraph::neighbor_lists() const {
    std::vector<std::vector<int>> adj(n);
    for (const auto& [a, b] : edges) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    return adj;
}

SimpleGraph from_molecule(const chem::MolecularGraph& g) {
    SimpleGraph s;
    s.n = g.atom_count();
    for (const auto& b : g.bonds) s.edges.push_back({b.a, b.b});
    return s;
}

SimpleGraph from_reduced(const chem::ReducedGraph& t) {
    SimpleGraph s;
    s.n = t.node_count();
    s.edges = t.edges;
    return s;
}

namespace {

using Signature = std::pair<int, std::vector<int>>;

// One refinement pass over the given adjacency; returns the number of
// distinct colors afterwards. The signature dictionary is shared by all
// nodes passed in, which is what makes colors comparable across graphs.
int refine_round(const std::vector<std::vector<int>>& adj, std::vector<int>& colors) {
    std::map<Signature, int> dict;
    std::vector<int> next(colors.size());
    for (size_t v = 0; v < colors.size(); ++v) {
        Signature sig{colors[v], {}};
        sig.second.reserve(adj[v].size());
        for (int w : adj[v]) sig.second.push_back(colors[w]);
        std::sort(sig.second.begin(), sig.second.end());
        auto it = dict.find(sig);
        if (it == dict.end()) it = dict.emplace(std::move(sig), static_cast<int>(dict.size())).first;
        next[v] = it->second;
    }
    colors = std::move(next);
    return static_cast<int>(dict.size());
}

std::vector<int> class_sizes(const std::vector<int>& colors) {
    std::map<int, int> counts;
    for (int c : colors) counts[c]++;
    std::vector<int> sizes;
    for (auto& [c, n] : counts) sizes.push_back(n);
    std::sort(sizes.begin(), sizes.end());
    return sizes;
}

}  // namespace

ColoringResult wl_refine(const SimpleGraph& g) {
    ColoringResult res;
    res.colors.assign(g.n, 0);
    auto adj = g.neighbor_lists();
    int classes = g.n > 0 ? 1 : 0;
    for (int round = 0; round < g.n; ++round) {
        std::vector<int> prev = res.colors;
        int now = refine_round(adj, res.colors);
        if (now == classes) {
            res.colors = std::move(prev);  // keep the stable labeling
            break;
        }
        classes = now;
        res.rounds = round + 1;
    }
    res.histogram = class_sizes(res.colors);
    return res;
}

bool wl_distinguishable(const SimpleGraph& g1, const SimpleGraph& g2) {
    // refine the disjoint union so the color dictionary is shared
    SimpleGraph u;
    u.n = g1.n + g2.n;
    u.edges = g1.edges;
    for (const auto& [a, b] : g2.edges) u.edges.push_back({a + g1.n, b + g1.n});

    std::vector<int> colors(u.n, 0);
    auto adj = u.neighbor_lists();
    int classes = u.n > 0 ? 1 : 0;
    for (int round = 0; round < u.n; ++round) {
        int now = refine_round(adj, colors);
        if (now == classes) break;
        classes = now;
    }
    std::vector<int> h1(colors.begin(), colors.begin() + g1.n);
    std::vector<int> h2(colors.begin() + g1.n, colors.end());
    std::sort(h1.begin(), h1.end());
    std::sort(h2.begin(), h2.end());
    return h1 != h2;
}

CompoundGraph build_compound(
    const chem::MolecularGraph& g,
    const std::vector<const chem::ReducedGraph*>& abstractions,
    const std::vector<const chem::Correspondence*>& correspondences) {
    if (abstractions.size() != correspondences.size())
        throw ShapeMismatch("build_compound: " + std::to_string(abstractions.size()) +
                            " abstractions vs " + std::to_string(correspondences.size()) +
                            " correspondences");
    CompoundGraph out;
    out.graph.n = g.atom_count();
    for (const auto& b : g.bonds) out.graph.edges.push_back({b.a, b.b});
    for (int v = 0; v < g.atom_count(); ++v) out.origin.push_back({0, v});

    for (size_t i = 0; i < abstractions.size(); ++i) {
        const auto& t = *abstractions[i];
        const auto& c = *correspondences[i];
        if (c.atom_count() != g.atom_count() || c.node_count() != t.node_count())
            throw ShapeMismatch("build_compound: correspondence shape does not match");
        const int offset = out.graph.n;
        out.graph.n += t.node_count();
        for (const auto& [a, b] : t.edges)
            out.graph.edges.push_back({a + offset, b + offset});
        for (int u = 0; u < t.node_count(); ++u)
            out.origin.push_back({static_cast<int>(i) + 1, u});
        for (int v = 0; v < c.atom_count(); ++v)
            for (int u = 0; u < c.node_count(); ++u)
                if (c.s[v][u] == 1.0) out.graph.edges.push_back({v, u + offset});
    }
    return out;
}

}  // namespace ximp::wl
