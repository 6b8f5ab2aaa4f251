#include "ximp/chem/mol.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <numeric>
#include <optional>
#include <queue>

#include "ximp/errors.hpp"

namespace ximp::chem {

const char* element_symbol(Element e) {
    switch (e) {
        case Element::B: return "B";
        case Element::C: return "C";
        case Element::N: return "N";
        case Element::O: return "O";
        case Element::P: return "P";
        case Element::S: return "S";
        case Element::F: return "F";
        case Element::Cl: return "Cl";
        case Element::Br: return "Br";
        case Element::I: return "I";
    }
    return "?";
}

int bond_order_int(BondOrder o) {
    switch (o) {
        case BondOrder::Single: return 1;
        case BondOrder::Double: return 2;
        case BondOrder::Triple: return 3;
        case BondOrder::Aromatic: return 1;
    }
    return 1;
}

namespace {

int default_valence(Element e) {
    switch (e) {
        case Element::B: return 3;
        case Element::C: return 4;
        case Element::N: return 3;
        case Element::O: return 2;
        case Element::P: return 3;
        case Element::S: return 2;
        default: return 1;  // halogens
    }
}

// Charge-adjusted valence. Group 15/16 elements and halogens gain a slot per
// positive charge and lose one per negative; C and B lose a slot either way.
int effective_valence(Element e, int charge) {
    int v = default_valence(e);
    if (e == Element::C || e == Element::B) {
        v -= std::abs(charge);
    } else {
        v += charge;
    }
    return std::max(v, 0);
}

std::optional<Element> organic_element(std::string_view sym) {
    if (sym == "B") return Element::B;
    if (sym == "C") return Element::C;
    if (sym == "N") return Element::N;
    if (sym == "O") return Element::O;
    if (sym == "P") return Element::P;
    if (sym == "S") return Element::S;
    if (sym == "F") return Element::F;
    if (sym == "Cl") return Element::Cl;
    if (sym == "Br") return Element::Br;
    if (sym == "I") return Element::I;
    return std::nullopt;
}

struct PendingBond {
    std::optional<BondOrder> order;  // nullopt = unspecified
};

struct RingOpen {
    int atom;
    std::optional<BondOrder> order;
};

struct ParsedBond {
    int a, b;
    std::optional<BondOrder> order;  // resolved after aromatic perception
};

struct Parser {
    std::string_view text;
    size_t pos = 0;

    std::vector<Atom> atoms;
    std::vector<ParsedBond> bonds;
    std::vector<bool> bracket;  // bracket atoms carry explicit H counts
    std::vector<int> explicit_h;

    int prev_atom = -1;
    std::vector<int> branch_stack;
    std::map<int, RingOpen> open_rings;
    PendingBond pending;

    char peek() const { return pos < text.size() ? text[pos] : '\0'; }
    char take() { return text[pos++]; }
    bool done() const { return pos >= text.size(); }

    [[noreturn]] void fail_unsupported(const std::string& what) {
        throw UnsupportedFeature("unsupported SMILES feature at position " +
                                 std::to_string(pos) + ": " + what);
    }

    void add_atom(Element e, bool aromatic, int charge, int h, bool is_bracket) {
        Atom a;
        a.element = e;
        a.aromatic = aromatic;
        a.formal_charge = charge;
        a.index = static_cast<int>(atoms.size());
        atoms.push_back(a);
        bracket.push_back(is_bracket);
        explicit_h.push_back(h);
        int idx = a.index;
        if (prev_atom >= 0) {
            bonds.push_back({prev_atom, idx, pending.order});
        }
        pending = {};
        prev_atom = idx;
    }

    void ring_closure(int label) {
        if (prev_atom < 0) throw UnbalancedRingClosure("ring closure before any atom");
        auto it = open_rings.find(label);
        if (it == open_rings.end()) {
            open_rings[label] = {prev_atom, pending.order};
            pending = {};
            return;
        }
        RingOpen open = it->second;
        open_rings.erase(it);
        if (open.atom == prev_atom)
            throw UnbalancedRingClosure("ring closure bonds an atom to itself");
        std::optional<BondOrder> order;
        if (open.order && pending.order && *open.order != *pending.order)
            throw UnbalancedRingClosure("conflicting bond orders on ring closure " +
                                        std::to_string(label));
        order = open.order ? open.order : pending.order;
        for (const auto& b : bonds)
            if ((b.a == open.atom && b.b == prev_atom) || (b.a == prev_atom && b.b == open.atom))
                throw UnbalancedRingClosure("duplicate bond via ring closure " +
                                            std::to_string(label));
        bonds.push_back({open.atom, prev_atom, order});
        pending = {};
    }

    void parse_bracket() {
        take();  // '['
        if (std::isdigit(static_cast<unsigned char>(peek()))) fail_unsupported("isotope");
        bool aromatic = false;
        std::string sym;
        char c = peek();
        if (std::islower(static_cast<unsigned char>(c))) {
            aromatic = true;
            sym = static_cast<char>(std::toupper(static_cast<unsigned char>(take())));
        } else if (std::isupper(static_cast<unsigned char>(c))) {
            sym += take();
            if (std::islower(static_cast<unsigned char>(peek())) && peek() != 'h') sym += take();
        } else {
            fail_unsupported(std::string("bracket atom starting with '") + c + "'");
        }
        auto elem = organic_element(sym);
        if (!elem) throw UnknownElement("unknown element '" + sym + "'");
        if (aromatic && !(sym == "B" || sym == "C" || sym == "N" || sym == "O" ||
                          sym == "P" || sym == "S"))
            fail_unsupported("aromatic form of " + sym);

        int h = 0;
        int charge = 0;
        while (peek() != ']') {
            char t = peek();
            if (t == '@') fail_unsupported("stereochemistry");
            if (t == 'H') {
                take();
                h = 1;
                if (std::isdigit(static_cast<unsigned char>(peek()))) h = take() - '0';
            } else if (t == '+' || t == '-') {
                int sign = (t == '+') ? 1 : -1;
                take();
                charge = sign;
                if (std::isdigit(static_cast<unsigned char>(peek()))) {
                    charge = sign * (take() - '0');
                } else {
                    while (peek() == t) {
                        take();
                        charge += sign;
                    }
                }
                if (charge < -2 || charge > 2)
                    fail_unsupported("formal charge outside [-2, 2]");
            } else if (t == '\0') {
                fail_unsupported("unterminated bracket atom");
            } else {
                fail_unsupported(std::string("bracket token '") + t + "'");
            }
        }
        take();  // ']'
        add_atom(*elem, aromatic, charge, h, true);
    }

    void run() {
        if (text.empty()) throw UnsupportedFeature("empty SMILES string");
        while (!done()) {
            char c = peek();
            switch (c) {
                case '[':
                    parse_bracket();
                    break;
                case '(': {
                    take();
                    if (prev_atom < 0)
                        throw UnbalancedParenthesis("branch before any atom");
                    if (peek() == ')') throw UnbalancedParenthesis("empty branch");
                    branch_stack.push_back(prev_atom);
                    break;
                }
                case ')': {
                    take();
                    if (branch_stack.empty())
                        throw UnbalancedParenthesis("unmatched ')'");
                    if (pending.order) fail_unsupported("bond symbol before ')'");
                    prev_atom = branch_stack.back();
                    branch_stack.pop_back();
                    break;
                }
                case '-': take(); pending.order = BondOrder::Single; break;
                case '=': take(); pending.order = BondOrder::Double; break;
                case '#': take(); pending.order = BondOrder::Triple; break;
                case ':': take(); pending.order = BondOrder::Aromatic; break;
                case '.': {
                    take();
                    if (pending.order) fail_unsupported("bond symbol before '.'");
                    prev_atom = -1;
                    break;
                }
                case '%': {
                    take();
                    if (!std::isdigit(static_cast<unsigned char>(peek())))
                        throw UnbalancedRingClosure("'%' without two digits");
                    int d1 = take() - '0';
                    if (!std::isdigit(static_cast<unsigned char>(peek())))
                        throw UnbalancedRingClosure("'%' without two digits");
                    int d2 = take() - '0';
                    ring_closure(d1 * 10 + d2);
                    break;
                }
                case '/':
                case '\\':
                case '@':
                    fail_unsupported("stereochemistry");
                case '*':
                    throw UnknownElement("wildcard atom '*'");
                default: {
                    if (std::isdigit(static_cast<unsigned char>(c))) {
                        take();
                        if (c == '0') throw UnbalancedRingClosure("ring label 0");
                        ring_closure(c - '0');
                        break;
                    }
                    if (std::islower(static_cast<unsigned char>(c))) {
                        std::string sym(1, static_cast<char>(
                                               std::toupper(static_cast<unsigned char>(take()))));
                        auto elem = organic_element(sym);
                        if (!elem || !(c == 'b' || c == 'c' || c == 'n' || c == 'o' ||
                                       c == 'p' || c == 's'))
                            throw UnknownElement("unknown aromatic atom '" + std::string(1, c) +
                                                 "'");
                        add_atom(*elem, true, 0, 0, false);
                        break;
                    }
                    if (std::isupper(static_cast<unsigned char>(c))) {
                        std::string sym(1, take());
                        if ((sym == "C" && peek() == 'l') || (sym == "B" && peek() == 'r'))
                            sym += take();
                        auto elem = organic_element(sym);
                        if (!elem) throw UnknownElement("unknown element '" + sym + "'");
                        add_atom(*elem, false, 0, 0, false);
                        break;
                    }
                    fail_unsupported(std::string("character '") + c + "'");
                }
            }
        }
        if (!branch_stack.empty()) throw UnbalancedParenthesis("unclosed '('");
        if (!open_rings.empty())
            throw UnbalancedRingClosure("unclosed ring label " +
                                        std::to_string(open_rings.begin()->first));
        if (pending.order) fail_unsupported("trailing bond symbol");
        if (atoms.empty()) throw UnsupportedFeature("no atoms in SMILES string");
    }
};

// Bonds on some cycle: endpoints stay connected when the bond is removed.
std::vector<bool> cycle_edges(int n_atoms, const std::vector<ParsedBond>& bonds) {
    std::vector<std::vector<std::pair<int, int>>> adj(n_atoms);  // (neighbor, bond)
    for (size_t i = 0; i < bonds.size(); ++i) {
        adj[bonds[i].a].push_back({bonds[i].b, static_cast<int>(i)});
        adj[bonds[i].b].push_back({bonds[i].a, static_cast<int>(i)});
    }
    std::vector<bool> in_cycle(bonds.size(), false);
    std::vector<int> seen(n_atoms, -1);
    for (size_t e = 0; e < bonds.size(); ++e) {
        int src = bonds[e].a, dst = bonds[e].b;
        std::fill(seen.begin(), seen.end(), -1);
        std::queue<int> q;
        q.push(src);
        seen[src] = src;
        bool found = false;
        while (!q.empty() && !found) {
            int v = q.front();
            q.pop();
            for (auto [w, bi] : adj[v]) {
                if (bi == static_cast<int>(e) || seen[w] >= 0) continue;
                seen[w] = v;
                if (w == dst) {
                    found = true;
                    break;
                }
                q.push(w);
            }
        }
        in_cycle[e] = found;
    }
    return in_cycle;
}

}  // namespace

bool MolecularGraph::atom_in_ring(int atom) const {
    for (const auto& r : rings)
        if (std::binary_search(r.begin(), r.end(), atom)) return true;
    return false;
}

int MolecularGraph::component_count() const {
    std::vector<int> parent(atoms.size());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (const auto& b : bonds) parent[find(b.a)] = find(b.b);
    int count = 0;
    for (size_t i = 0; i < parent.size(); ++i)
        if (find(static_cast<int>(i)) == static_cast<int>(i)) ++count;
    return count;
}

int MolecularGraph::cycle_rank() const {
    return bond_count() - atom_count() + component_count();
}

std::vector<std::vector<uint8_t>> MolecularGraph::adjacency() const {
    std::vector<std::vector<uint8_t>> a(atoms.size(),
                                        std::vector<uint8_t>(atoms.size(), 0));
    for (const auto& b : bonds) a[b.a][b.b] = a[b.b][b.a] = 1;
    return a;
}

int MolecularGraph::bond_between(int u, int v) const {
    for (int bi : incident[u]) {
        const Bond& b = bonds[bi];
        if (b.a + b.b - u == v) return bi;
    }
    return -1;
}

std::vector<std::vector<int>> perceive_sssr(const MolecularGraph& g) {
    const int n = g.atom_count();
    const int m = g.bond_count();
    const int rank = g.cycle_rank();
    if (rank == 0) return {};

    std::vector<std::vector<std::pair<int, int>>> adj(n);
    for (int i = 0; i < m; ++i) {
        adj[g.bonds[i].a].push_back({g.bonds[i].b, i});
        adj[g.bonds[i].b].push_back({g.bonds[i].a, i});
    }
    for (auto& lst : adj) std::sort(lst.begin(), lst.end());

    struct Candidate {
        std::vector<int> atoms;       // sorted
        std::vector<uint64_t> edges;  // bitset over bond indices
    };
    const size_t words = (static_cast<size_t>(m) + 63) / 64;
    auto set_bit = [&](std::vector<uint64_t>& bs, int b) { bs[b / 64] |= 1ull << (b % 64); };

    std::vector<Candidate> candidates;
    auto add_cycle_from_path = [&](const std::vector<int>& path_atoms,
                                   const std::vector<int>& path_bonds, int closing_bond) {
        Candidate c;
        c.atoms = path_atoms;
        std::sort(c.atoms.begin(), c.atoms.end());
        c.atoms.erase(std::unique(c.atoms.begin(), c.atoms.end()), c.atoms.end());
        c.edges.assign(words, 0);
        for (int b : path_bonds) set_bit(c.edges, b);
        set_bit(c.edges, closing_bond);
        for (const auto& other : candidates)
            if (other.edges == c.edges) return;
        candidates.push_back(std::move(c));
    };

    // Shortest cycle through each edge: BFS between its endpoints with the
    // edge removed. Neighbor order is ascending, so parents (and therefore
    // the reconstructed path) are deterministic.
    std::vector<int> parent_atom(n), parent_bond(n);
    for (int e = 0; e < m; ++e) {
        int src = g.bonds[e].a, dst = g.bonds[e].b;
        std::fill(parent_atom.begin(), parent_atom.end(), -1);
        std::queue<int> q;
        q.push(src);
        parent_atom[src] = src;
        bool found = false;
        while (!q.empty() && !found) {
            int v = q.front();
            q.pop();
            for (auto [w, bi] : adj[v]) {
                if (bi == e || parent_atom[w] >= 0) continue;
                parent_atom[w] = v;
                parent_bond[w] = bi;
                if (w == dst) {
                    found = true;
                    break;
                }
                q.push(w);
            }
        }
        if (!found) continue;  // bridge
        std::vector<int> path_atoms, path_bonds;
        for (int v = dst; v != src; v = parent_atom[v]) {
            path_atoms.push_back(v);
            path_bonds.push_back(parent_bond[v]);
        }
        path_atoms.push_back(src);
        add_cycle_from_path(path_atoms, path_bonds, e);
    }

    auto candidate_less = [](const Candidate& a, const Candidate& b) {
        if (a.atoms.size() != b.atoms.size()) return a.atoms.size() < b.atoms.size();
        return a.atoms < b.atoms;
    };

    // Greedy GF(2)-independent selection in tie-broken order gives a minimum
    // cycle basis over the candidate set.
    std::vector<std::vector<int>> result;
    std::vector<std::vector<uint64_t>> basis;  // reduced, with recorded pivot
    std::vector<int> pivots;
    auto try_accept = [&](const Candidate& c) {
        std::vector<uint64_t> v = c.edges;
        for (size_t i = 0; i < basis.size(); ++i) {
            int p = pivots[i];
            if (v[p / 64] >> (p % 64) & 1)
                for (size_t w = 0; w < words; ++w) v[w] ^= basis[i][w];
        }
        int pivot = -1;
        for (int b = 0; b < m && pivot < 0; ++b)
            if (v[b / 64] >> (b % 64) & 1) pivot = b;
        if (pivot < 0) return false;
        basis.push_back(std::move(v));
        pivots.push_back(pivot);
        result.push_back(c.atoms);
        return true;
    };

    std::sort(candidates.begin(), candidates.end(), candidate_less);
    for (const auto& c : candidates) {
        if (static_cast<int>(result.size()) == rank) break;
        try_accept(c);
    }

    // Horton-style fallback for graphs where per-edge shortest cycles do not
    // span the cycle space (never seen on the tested corpus, but fuzz inputs
    // should not be able to break the cycle-rank invariant).
    if (static_cast<int>(result.size()) < rank) {
        std::vector<Candidate> extra;
        std::swap(extra, candidates);
        std::vector<int> pa(n), pb(n), depth(n);
        for (int root = 0; root < n; ++root) {
            std::fill(pa.begin(), pa.end(), -1);
            std::queue<int> q;
            q.push(root);
            pa[root] = root;
            depth[root] = 0;
            while (!q.empty()) {
                int v = q.front();
                q.pop();
                for (auto [w, bi] : adj[v]) {
                    if (pa[w] >= 0) continue;
                    pa[w] = v;
                    pb[w] = bi;
                    depth[w] = depth[v] + 1;
                    q.push(w);
                }
            }
            for (int e = 0; e < m; ++e) {
                int u = g.bonds[e].a, v = g.bonds[e].b;
                if (pa[u] < 0 || pa[v] < 0) continue;
                std::vector<int> atoms_u, bonds_u, atoms_v, bonds_v;
                for (int x = u; x != root; x = pa[x]) {
                    atoms_u.push_back(x);
                    bonds_u.push_back(pb[x]);
                }
                for (int x = v; x != root; x = pa[x]) {
                    atoms_v.push_back(x);
                    bonds_v.push_back(pb[x]);
                }
                // Paths must be disjoint apart from the root.
                std::vector<int> su = atoms_u, sv = atoms_v;
                std::sort(su.begin(), su.end());
                std::sort(sv.begin(), sv.end());
                std::vector<int> inter;
                std::set_intersection(su.begin(), su.end(), sv.begin(), sv.end(),
                                      std::back_inserter(inter));
                if (!inter.empty()) continue;
                std::vector<int> atoms_all = atoms_u;
                atoms_all.insert(atoms_all.end(), atoms_v.begin(), atoms_v.end());
                atoms_all.push_back(root);
                std::vector<int> bonds_all = bonds_u;
                bonds_all.insert(bonds_all.end(), bonds_v.begin(), bonds_v.end());
                candidates = std::move(extra);
                add_cycle_from_path(atoms_all, bonds_all, e);
                extra = std::move(candidates);
            }
        }
        std::sort(extra.begin(), extra.end(), candidate_less);
        for (const auto& c : extra) {
            if (static_cast<int>(result.size()) == rank) break;
            try_accept(c);
        }
    }

    std::sort(result.begin(), result.end(), [](const auto& a, const auto& b) {
        if (a.size() != b.size()) return a.size() < b.size();
        return a < b;
    });
    return result;
}

MolecularGraph parse_smiles(std::string_view text) {
    Parser p;
    p.text = text;
    p.run();

    MolecularGraph g;
    g.atoms = std::move(p.atoms);

    // Aromatic bond perception is syntactic: an unspecified or ':' bond
    // between two lowercase atoms becomes aromatic when it lies on a cycle.
    std::vector<bool> on_cycle = cycle_edges(g.atom_count(), p.bonds);
    for (size_t i = 0; i < p.bonds.size(); ++i) {
        const ParsedBond& pb = p.bonds[i];
        Bond b;
        b.a = pb.a;
        b.b = pb.b;
        b.in_ring = on_cycle[i];
        bool both_aromatic = g.atoms[pb.a].aromatic && g.atoms[pb.b].aromatic;
        if (pb.order) {
            b.order = *pb.order;
            if (b.order == BondOrder::Aromatic && !both_aromatic)
                throw UnsupportedFeature("':' bond between non-aromatic atoms");
        } else {
            b.order = (both_aromatic && on_cycle[i]) ? BondOrder::Aromatic
                                                     : BondOrder::Single;
        }
        g.bonds.push_back(b);
    }

    g.neighbors.resize(g.atom_count());
    g.incident.resize(g.atom_count());
    for (int i = 0; i < g.bond_count(); ++i) {
        g.neighbors[g.bonds[i].a].push_back(g.bonds[i].b);
        g.neighbors[g.bonds[i].b].push_back(g.bonds[i].a);
        g.incident[g.bonds[i].a].push_back(i);
        g.incident[g.bonds[i].b].push_back(i);
    }

    // Implicit hydrogens. Aromatic C contributes one valence slot to the pi
    // system; so does aromatic N/P without explicit H (pyridine type). O and
    // S donate a lone pair instead, which consumes no slot.
    for (int i = 0; i < g.atom_count(); ++i) {
        Atom& a = g.atoms[i];
        int bond_sum = 0, arom_bonds = 0;
        for (int bi : g.incident[i]) {
            bond_sum += bond_order_int(g.bonds[bi].order);
            if (g.bonds[bi].order == BondOrder::Aromatic) ++arom_bonds;
        }
        int valence = effective_valence(a.element, a.formal_charge);
        if (p.bracket[i]) {
            a.implicit_h = p.explicit_h[i];
            if (bond_sum + a.implicit_h > valence)
                throw ValenceViolation(std::string(element_symbol(a.element)) +
                                       " atom " + std::to_string(i) + ": bonds " +
                                       std::to_string(bond_sum) + " + H" +
                                       std::to_string(a.implicit_h) + " exceed valence " +
                                       std::to_string(valence));
            continue;
        }
        int pi_slot = 0;
        if (a.aromatic && arom_bonds >= 2 &&
            (a.element == Element::B || a.element == Element::C ||
             a.element == Element::N || a.element == Element::P))
            pi_slot = 1;
        int h = valence - bond_sum - pi_slot;
        if (h < 0)
            throw ValenceViolation(std::string(element_symbol(a.element)) + " atom " +
                                   std::to_string(i) + ": bond order sum " +
                                   std::to_string(bond_sum + pi_slot) + " exceeds valence " +
                                   std::to_string(valence));
        a.implicit_h = h;
    }

    g.rings = perceive_sssr(g);
    return g;
}

}  // namespace ximp::chem
