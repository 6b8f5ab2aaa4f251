#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "support/corpus.hpp"
#include "ximp/chem/mol.hpp"
#include "ximp/errors.hpp"

using namespace ximp;
using namespace ximp::chem;

namespace {

int count_element(const MolecularGraph& g, Element e) {
    int n = 0;
    for (const auto& a : g.atoms) n += a.element == e;
    return n;
}

std::multiset<int> degree_multiset(const MolecularGraph& g) {
    std::multiset<int> d;
    for (int i = 0; i < g.atom_count(); ++i) d.insert(g.degree(i));
    return d;
}

}  // namespace

TEST_CASE("single carbon") {
    auto g = parse_smiles("C");
    CHECK(g.atom_count() == 1);
    CHECK(g.bond_count() == 0);
    CHECK(g.atoms[0].element == Element::C);
    CHECK(g.atoms[0].implicit_h == 4);
    CHECK(g.rings.empty());
}

TEST_CASE("3-hydroxypyridine") {
    auto g = parse_smiles("Oc1cnccc1");
    CHECK(g.atom_count() == 7);
    CHECK(g.bond_count() == 7);
    CHECK(count_element(g, Element::O) == 1);
    CHECK(count_element(g, Element::C) == 5);
    CHECK(count_element(g, Element::N) == 1);
    REQUIRE(g.rings.size() == 1);
    CHECK(g.rings[0].size() == 6);
    int aromatic_atoms = 0;
    for (const auto& a : g.atoms) aromatic_atoms += a.aromatic;
    CHECK(aromatic_atoms == 6);
    CHECK_FALSE(g.atoms[0].aromatic);  // hydroxyl oxygen
    CHECK(g.atoms[0].implicit_h == 1);
    // exocyclic O-C bond stays single even though one end is aromatic
    int ob = g.bond_between(0, 1);
    REQUIRE(ob >= 0);
    CHECK(g.bonds[ob].order == BondOrder::Single);
    CHECK_FALSE(g.bonds[ob].in_ring);
}

TEST_CASE("decalin") {
    auto g = parse_smiles("C1CCC2CCCCC2C1");
    CHECK(g.atom_count() == 10);
    CHECK(g.bond_count() == 11);
    REQUIRE(g.rings.size() == 2);
    CHECK(g.rings[0].size() == 6);
    CHECK(g.rings[1].size() == 6);
    // fused: the two rings share exactly one edge (two atoms)
    std::vector<int> shared;
    std::set_intersection(g.rings[0].begin(), g.rings[0].end(), g.rings[1].begin(),
                          g.rings[1].end(), std::back_inserter(shared));
    CHECK(shared.size() == 2);
    CHECK(degree_multiset(g) == std::multiset<int>{2, 2, 2, 2, 2, 2, 2, 2, 3, 3});
}

TEST_CASE("bicyclopentyl") {
    auto g = parse_smiles("C1CCC(C1)C1CCCC1");
    CHECK(g.atom_count() == 10);
    CHECK(g.bond_count() == 11);
    REQUIRE(g.rings.size() == 2);
    CHECK(g.rings[0].size() == 5);
    CHECK(g.rings[1].size() == 5);
    std::vector<int> shared;
    std::set_intersection(g.rings[0].begin(), g.rings[0].end(), g.rings[1].begin(),
                          g.rings[1].end(), std::back_inserter(shared));
    CHECK(shared.empty());
    CHECK(degree_multiset(g) == std::multiset<int>{2, 2, 2, 2, 2, 2, 2, 2, 3, 3});
}

TEST_CASE("sssr examples") {
    CHECK(perceive_sssr(parse_smiles("CCC")).empty());

    auto benzene = parse_smiles("c1ccccc1");
    auto rings = perceive_sssr(benzene);
    REQUIRE(rings.size() == 1);
    CHECK(rings[0] == std::vector<int>{0, 1, 2, 3, 4, 5});
    for (const auto& b : benzene.bonds) CHECK(b.order == BondOrder::Aromatic);
    for (const auto& a : benzene.atoms) CHECK(a.implicit_h == 1);
}

TEST_CASE("aromatic nitrogen and sulfur get sane hydrogen counts") {
    auto pyridine = parse_smiles("c1ccncc1");
    for (const auto& a : pyridine.atoms)
        CHECK(a.implicit_h == (a.element == Element::N ? 0 : 1));

    auto thiophene = parse_smiles("c1ccsc1");
    for (const auto& a : thiophene.atoms)
        CHECK(a.implicit_h == (a.element == Element::S ? 0 : 1));

    auto naphthalene = parse_smiles("c1ccc2ccccc2c1");
    CHECK(naphthalene.atom_count() == 10);
    CHECK(naphthalene.rings.size() == 2);
    int h_total = 0;
    for (const auto& a : naphthalene.atoms) h_total += a.implicit_h;
    CHECK(h_total == 8);  // bridgeheads carry none
}

TEST_CASE("bracket atoms") {
    auto g = parse_smiles("[NH4+]");
    CHECK(g.atoms[0].formal_charge == 1);
    CHECK(g.atoms[0].implicit_h == 4);

    auto carboxylate = parse_smiles("CC(=O)[O-]");
    CHECK(carboxylate.atoms[3].formal_charge == -1);
    CHECK(carboxylate.atoms[3].implicit_h == 0);

    auto pyrrole = parse_smiles("c1cc[nH]c1");
    int n_idx = 3;
    CHECK(pyrrole.atoms[n_idx].element == Element::N);
    CHECK(pyrrole.atoms[n_idx].implicit_h == 1);
    CHECK(pyrrole.atoms[n_idx].aromatic);
}

TEST_CASE("fragments and explicit bonds") {
    auto salt = parse_smiles("C.C");
    CHECK(salt.atom_count() == 2);
    CHECK(salt.bond_count() == 0);
    CHECK(salt.component_count() == 2);

    auto ethene = parse_smiles("C=C");
    CHECK(ethene.bonds[0].order == BondOrder::Double);
    CHECK(ethene.atoms[0].implicit_h == 2);

    auto ethyne = parse_smiles("C#C");
    CHECK(ethyne.atoms[0].implicit_h == 1);

    auto biphenyl = parse_smiles("c1ccccc1-c1ccccc1");
    int link = biphenyl.bond_between(5, 6);
    REQUIRE(link >= 0);
    CHECK(biphenyl.bonds[link].order == BondOrder::Single);
}

TEST_CASE("ring closures with %nn and reuse") {
    auto g = parse_smiles("C%12CCCCC%12");
    CHECK(g.rings.size() == 1);
    auto reuse = parse_smiles("C1CCC1C1CCC1");
    CHECK(reuse.rings.size() == 2);
}

TEST_CASE("parse errors") {
    CHECK_THROWS_AS(parse_smiles("C/C=C/C"), UnsupportedFeature);
    CHECK_THROWS_AS(parse_smiles("[C@H](N)C"), UnsupportedFeature);
    CHECK_THROWS_AS(parse_smiles("[13C]"), UnsupportedFeature);
    CHECK_THROWS_AS(parse_smiles("C1CC"), UnbalancedRingClosure);
    CHECK_THROWS_AS(parse_smiles("C(C"), UnbalancedParenthesis);
    CHECK_THROWS_AS(parse_smiles("CC)C"), UnbalancedParenthesis);
    CHECK_THROWS_AS(parse_smiles("CXC"), UnknownElement);
    CHECK_THROWS_AS(parse_smiles("[Zn]"), UnknownElement);
    CHECK_THROWS_AS(parse_smiles("C(F)(F)(F)(F)F"), ValenceViolation);
    CHECK_THROWS_AS(parse_smiles("O=S(=O)(O)O"), ValenceViolation);  // outside subset
    CHECK_THROWS_AS(parse_smiles(""), UnsupportedFeature);
}

TEST_CASE("parsing is deterministic") {
    auto a = parse_smiles("CC(=O)Oc1ccccc1C(=O)O");
    auto b = parse_smiles("CC(=O)Oc1ccccc1C(=O)O");
    REQUIRE(a.atom_count() == b.atom_count());
    REQUIRE(a.bond_count() == b.bond_count());
    for (int i = 0; i < a.atom_count(); ++i) {
        CHECK(a.atoms[i].element == b.atoms[i].element);
        CHECK(a.atoms[i].implicit_h == b.atoms[i].implicit_h);
        CHECK(a.atoms[i].aromatic == b.atoms[i].aromatic);
    }
    for (int i = 0; i < a.bond_count(); ++i) {
        CHECK(a.bonds[i].a == b.bonds[i].a);
        CHECK(a.bonds[i].b == b.bonds[i].b);
        CHECK(a.bonds[i].order == b.bonds[i].order);
    }
    CHECK(a.rings == b.rings);
}

TEST_CASE("fuzz corpus: handshake, cycle rank, adjacency") {
    auto corpus = ximp::testing::fuzz_corpus(200, 20260810ull);
    REQUIRE(corpus.size() == 200);
    for (const auto& smiles : corpus) {
        CAPTURE(smiles);
        auto g = parse_smiles(smiles);
        int degree_sum = 0;
        for (int i = 0; i < g.atom_count(); ++i) degree_sum += g.degree(i);
        CHECK(degree_sum == 2 * g.bond_count());
        CHECK(static_cast<int>(g.rings.size()) == g.cycle_rank());
        auto adj = g.adjacency();
        for (int i = 0; i < g.atom_count(); ++i) {
            CHECK(adj[i][i] == 0);
            for (int j = 0; j < g.atom_count(); ++j) CHECK(adj[i][j] == adj[j][i]);
        }
        // every SSSR ring is a simple cycle: each member has exactly two
        // in-ring neighbors within that ring
        for (const auto& ring : g.rings) {
            for (int v : ring) {
                int inside = 0;
                for (int w : g.neighbors[v])
                    inside += std::binary_search(ring.begin(), ring.end(), w) &&
                              g.bonds[g.bond_between(v, w)].in_ring;
                CHECK(inside >= 2);
            }
        }
    }
}
