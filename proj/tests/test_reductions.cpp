#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "support/corpus.hpp"
#include "ximp/chem/reductions.hpp"
#include "ximp/errors.hpp"
#include "ximp/rng.hpp"

using namespace ximp;
using namespace ximp::chem;

namespace {

int count_category(const ReducedGraph& t, JtCategory c) {
    int n = 0;
    for (const auto& node : t.nodes) n += node.jt_category == c;
    return n;
}

std::multiset<int> degree_multiset(const ReducedGraph& t) {
    auto adj = t.neighbor_lists();
    std::multiset<int> out;
    for (const auto& lst : adj) out.insert(static_cast<int>(lst.size()));
    return out;
}

bool left_total(const Correspondence& c) {
    for (const auto& row : c.s) {
        double sum = 0;
        for (double x : row) sum += x;
        if (sum < 1.0) return false;
    }
    return true;
}

// matmul for oracle checks
std::vector<std::vector<double>> matmul(const std::vector<std::vector<double>>& a,
                                        const std::vector<std::vector<double>>& b) {
    std::vector<std::vector<double>> out(a.size(), std::vector<double>(b[0].size(), 0.0));
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t k = 0; k < b.size(); ++k)
            for (size_t j = 0; j < b[0].size(); ++j) out[i][j] += a[i][k] * b[k][j];
    return out;
}

double norm_inf(const std::vector<std::vector<double>>& m) {  // max row abs sum
    double best = 0;
    for (const auto& row : m) {
        double s = 0;
        for (double x : row) s += std::abs(x);
        best = std::max(best, s);
    }
    return best;
}

double norm_1(const std::vector<std::vector<double>>& m) {  // max col abs sum
    double best = 0;
    for (size_t j = 0; j < m[0].size(); ++j) {
        double s = 0;
        for (const auto& row : m) s += std::abs(row[j]);
        best = std::max(best, s);
    }
    return best;
}

}  // namespace

TEST_CASE("junction tree: benzene is a single ring cluster") {
    auto g = parse_smiles("c1ccccc1");
    auto [t, c] = build_junction_tree(g);
    REQUIRE(t.node_count() == 1);
    CHECK(t.nodes[0].jt_category == JtCategory::Ring);
    CHECK(t.edges.empty());
    for (int v = 0; v < 6; ++v) CHECK(c.s[v][0] == 1.0);
}

TEST_CASE("junction tree: chain-ring-chain gives a path through the ring node") {
    auto g = parse_smiles("CCC1CCCC1CC");
    auto [t, c] = build_junction_tree(g);
    CHECK(t.node_count() == 5);
    CHECK(count_category(t, JtCategory::Ring) == 1);
    CHECK(count_category(t, JtCategory::Bond) == 4);
    CHECK(t.is_forest());
    CHECK(t.component_count() == 1);
    CHECK(degree_multiset(t) == std::multiset<int>{1, 1, 2, 2, 2});
    CHECK(left_total(c));
}

TEST_CASE("junction tree: decalin vs bicyclopentyl differ") {
    auto [td, cd] = build_junction_tree(parse_smiles("C1CCC2CCCCC2C1"));
    CHECK(td.node_count() == 2);
    CHECK(count_category(td, JtCategory::Ring) == 2);
    CHECK(td.edges.size() == 1);

    auto [tb, cb] = build_junction_tree(parse_smiles("C1CCC(C1)C1CCCC1"));
    CHECK(tb.node_count() == 3);
    CHECK(count_category(tb, JtCategory::Ring) == 2);
    CHECK(count_category(tb, JtCategory::Bond) == 1);
    CHECK(tb.edges.size() == 2);
    CHECK(degree_multiset(tb) == std::multiset<int>{1, 1, 2});

    CHECK(td.node_count() != tb.node_count());
}

TEST_CASE("junction tree: isolated atom and branching hub") {
    auto [tm, cm] = build_junction_tree(parse_smiles("C"));
    REQUIRE(tm.node_count() == 1);
    CHECK(tm.nodes[0].jt_category == JtCategory::Singleton);
    CHECK(left_total(cm));

    // neopentane: central atom sits in four bond clusters -> own cluster
    auto [tn, cn] = build_junction_tree(parse_smiles("CC(C)(C)C"));
    CHECK(tn.node_count() == 5);
    CHECK(count_category(tn, JtCategory::Singleton) == 1);
    CHECK(count_category(tn, JtCategory::Bond) == 4);
    CHECK(tn.is_forest());
    CHECK(degree_multiset(tn) == std::multiset<int>{1, 1, 1, 1, 4});
}

TEST_CASE("junction tree: bridged rings merge") {
    // norbornane: two 5-rings sharing 3 atoms in the SSSR basis
    auto g = parse_smiles("C1CC2CCC1C2");
    auto [t, c] = build_junction_tree(g);
    CHECK(count_category(t, JtCategory::BridgedCompound) == 1);
    CHECK(t.is_forest());
    CHECK(left_total(c));
}

TEST_CASE("coarsen: resolution 1 is the identity") {
    auto g = parse_smiles("C1CCC(C1)C1CCCC1");
    auto [t, c] = build_junction_tree(g);
    auto [t1, c1] = coarsen_junction_tree(t, c, 1);
    CHECK(t1.node_count() == t.node_count());
    CHECK(t1.edges == t.edges);
    CHECK(c1.s == c.s);
}

TEST_CASE("coarsen: bicyclopentyl resolution 2 absorbs the bond node") {
    auto g = parse_smiles("C1CCC(C1)C1CCCC1");
    auto [t, c] = build_junction_tree(g);
    auto [t2, c2] = coarsen_junction_tree(t, c, 2);
    CHECK(t2.node_count() == 2);
    CHECK(t2.edges.size() == 1);
    CHECK(t2.is_forest());
    for (const auto& node : t2.nodes) CHECK(node.jt_category == JtCategory::Ring);
    CHECK(left_total(c2));
}

TEST_CASE("coarsen: hexane path collapses") {
    auto g = parse_smiles("CCCCCC");
    auto [t, c] = build_junction_tree(g);
    REQUIRE(t.node_count() == 5);
    CHECK(count_category(t, JtCategory::Bond) == 5);
    CHECK(degree_multiset(t) == std::multiset<int>{1, 1, 2, 2, 2});
    auto [t2, c2] = coarsen_junction_tree(t, c, 2);
    CHECK(t2.node_count() == 1);
    CHECK(t2.is_forest());
    auto [t3, c3] = coarsen_junction_tree(t, c, 3);
    CHECK(t3.node_count() == 1);
    CHECK(left_total(c3));
    CHECK_THROWS_AS(coarsen_junction_tree(t, c, 0), InvalidResolution);
    CHECK_THROWS_AS(coarsen_junction_tree(t, c, 4), InvalidResolution);
}

TEST_CASE("erg: hydroxypyridines become the path O-C*-centroid-N") {
    for (const char* smiles : {"Oc1cnccc1", "Oc1ccncc1"}) {
        CAPTURE(smiles);
        auto g = parse_smiles(smiles);
        auto [r, c] = build_erg(g);
        REQUIRE(r.node_count() == 4);
        CHECK(r.edges.size() == 3);
        CHECK(degree_multiset(r) == std::multiset<int>{1, 1, 2, 2});
        CHECK(left_total(c));
        int flipflop = 0, acceptor = 0, centroid_aromatic = 0;
        for (const auto& node : r.nodes) {
            const auto& f = *node.erg_features;
            flipflop += f[kErgFlipFlop];
            acceptor += f[kErgAcceptor];
            centroid_aromatic += f[kErgCentroidAromatic];
        }
        CHECK(flipflop == 1);           // the hydroxyl O
        CHECK(acceptor == 1);           // the ring N
        CHECK(centroid_aromatic == 1);
    }
}

TEST_CASE("erg: methane and benzene base cases") {
    auto [rm, cm] = build_erg(parse_smiles("C"));
    REQUIRE(rm.node_count() == 1);
    for (bool bit : *rm.nodes[0].erg_features) CHECK_FALSE(bit);
    CHECK(cm.s[0][0] == 1.0);

    auto [rb, cb] = build_erg(parse_smiles("c1ccccc1"));
    REQUIRE(rb.node_count() == 1);
    CHECK((*rb.nodes[0].erg_features)[kErgCentroidAromatic]);
    CHECK(rb.edges.empty());
    for (int v = 0; v < 6; ++v) CHECK(cb.s[v][0] == 1.0);
}

TEST_CASE("erg: charging rules") {
    // acetic acid: hydroxyl O deprotonates to anion
    auto [ra, ca] = build_erg(parse_smiles("CC(=O)O"));
    int negative = 0;
    for (const auto& node : ra.nodes) negative += (*node.erg_features)[kErgNegative];
    CHECK(negative == 1);

    // ethylamine: N protonates
    auto [re, ce] = build_erg(parse_smiles("CCN"));
    int positive = 0;
    for (const auto& node : re.nodes) positive += (*node.erg_features)[kErgPositive];
    CHECK(positive == 1);

    // aniline N stays neutral (conjugated with the ring)
    auto [rn, cn] = build_erg(parse_smiles("Nc1ccccc1"));
    for (const auto& node : rn.nodes) CHECK_FALSE((*node.erg_features)[kErgPositive]);
}

TEST_CASE("erg: endcaps and thioether") {
    auto [r, c] = build_erg(parse_smiles("CSC"));
    REQUIRE(r.node_count() == 3);
    int hydrophobic = 0;
    for (const auto& node : r.nodes) hydrophobic += (*node.erg_features)[kErgHydrophobic];
    CHECK(hydrophobic == 3);  // two methyl endcaps plus the thioether S

    // tert-butyl branch has four atoms: too large, atoms stay individual
    auto [rb, cb] = build_erg(parse_smiles("CC(C)(C)c1ccccc1"));
    bool any_endcap_set = false;
    for (size_t i = 0; i < rb.atom_sets.size(); ++i)
        any_endcap_set = any_endcap_set || (rb.atom_sets[i].size() > 1 &&
                                            (*rb.nodes[i].erg_features)[kErgHydrophobic]);
    CHECK_FALSE(any_endcap_set);
}

TEST_CASE("erg: decalin keeps bridgeheads with bonds to both centroids") {
    auto [r, c] = build_erg(parse_smiles("C1CCC2CCCCC2C1"));
    // 2 bridgeheads + 2 centroids
    REQUIRE(r.node_count() == 4);
    CHECK(r.edges.size() == 5);
    int aliphatic = 0;
    for (const auto& node : r.nodes) aliphatic += (*node.erg_features)[kErgCentroidAliphatic];
    CHECK(aliphatic == 2);
    CHECK(left_total(c));
}

TEST_CASE("dimp correspondence: identity and partition forms") {
    auto ci = Correspondence::from_matrix({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
    auto s = dimp_correspondence(ci, ci);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(s[i][j] == (i == j ? 1.0 : 0.0));

    // when S_k partitions the atoms, S~_ik = D_Ti^-1 S_i^T S_k exactly
    auto c_i = Correspondence::from_matrix({{1, 1}, {1, 0}, {0, 1}, {0, 1}});
    auto c_k = Correspondence::from_matrix({{1, 0}, {1, 0}, {0, 1}, {0, 1}});
    auto got = dimp_correspondence(c_i, c_k);
    // D_Ti = diag(2, 3); S_i^T S_k rows: [2,0],[1,2]
    CHECK(got[0][0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(got[0][1] == doctest::Approx(0.0));
    CHECK(got[1][0] == doctest::Approx(1.0 / 3).epsilon(1e-15));
    CHECK(got[1][1] == doctest::Approx(2.0 / 3).epsilon(1e-15));

    auto bad = Correspondence::from_matrix({{1, 0}, {0, 1}});
    CHECK_THROWS_AS(dimp_correspondence(ci, bad), ShapeMismatch);
}

TEST_CASE("dimp correspondence: row-stochastic and norm bounds on random pairs") {
    Rng rng(7);
    for (int trial = 0; trial < 100; ++trial) {
        int n_atoms = 2 + static_cast<int>(rng.below(11));
        int ti = 1 + static_cast<int>(rng.below(5));
        int tk = 1 + static_cast<int>(rng.below(5));
        auto c_i = Correspondence::from_matrix(
            ximp::testing::random_left_total(rng, n_atoms, ti));
        auto c_k = Correspondence::from_matrix(
            ximp::testing::random_left_total(rng, n_atoms, tk));
        auto s = dimp_correspondence(c_i, c_k);
        for (const auto& row : s) {
            double sum = 0;
            for (double x : row) {
                CHECK(x >= 0.0);
                sum += x;
            }
            CHECK(std::abs(sum - 1.0) < 1e-12);
        }

        // norm bounds against a random dense T
        int d = 3;
        std::vector<std::vector<double>> t(tk, std::vector<double>(d));
        for (auto& row : t)
            for (double& x : row) x = rng.uniform(-3, 3);
        auto m = matmul(s, t);
        CHECK(norm_inf(m) <= norm_inf(t) + 1e-12);
        CHECK(norm_1(m) <= ti * norm_1(t) + 1e-12);

        // constant preservation
        std::vector<std::vector<double>> ones_x(tk, {1.5, -2.0, 0.25});
        auto preserved = matmul(s, ones_x);
        for (const auto& row : preserved) {
            CHECK(std::abs(row[0] - 1.5) < 1e-12);
            CHECK(std::abs(row[1] + 2.0) < 1e-12);
            CHECK(std::abs(row[2] - 0.25) < 1e-12);
        }
    }
}

TEST_CASE("ecfp: determinism, sensitivity, growth") {
    auto g1 = parse_smiles("CCO");
    auto g2 = parse_smiles("CCO");
    CHECK(ecfp(g1, 2, 2048).bits == ecfp(g2, 2, 2048).bits);

    auto methane = ecfp(parse_smiles("C"), 2, 2048);
    auto ethane = ecfp(parse_smiles("CC"), 2, 2048);
    CHECK(methane.bits != ethane.bits);
    CHECK(methane.popcount() <= methane.n_bits);

    CHECK_THROWS_AS(ecfp(g1, 1, 2048), InvalidRadius);
    CHECK_THROWS_AS(ecfp(g1, 2, 100), InvalidWidth);

    auto corpus = ximp::testing::fuzz_corpus(60, 99ull);
    for (const auto& smiles : corpus) {
        auto g = parse_smiles(smiles);
        size_t prev = 0;
        for (int radius = 2; radius <= 4; ++radius) {
            size_t n = ecfp_identifiers(g, radius).size();
            CHECK(n >= prev);
            prev = n;
        }
    }
}

TEST_CASE("murcko scaffold") {
    CHECK(murcko_scaffold(parse_smiles("CCC")) == "");
    auto toluene = murcko_scaffold(parse_smiles("Cc1ccccc1"));
    auto phenol = murcko_scaffold(parse_smiles("Oc1ccccc1"));
    auto benzene = murcko_scaffold(parse_smiles("c1ccccc1"));
    CHECK(toluene == phenol);
    CHECK(toluene == benzene);

    auto decalin = murcko_scaffold(parse_smiles("C1CCC2CCCCC2C1"));
    auto bicyclopentyl = murcko_scaffold(parse_smiles("C1CCC(C1)C1CCCC1"));
    CHECK(decalin != bicyclopentyl);
}

TEST_CASE("fuzz corpus: junction trees are forests, correspondences left-total") {
    auto corpus = ximp::testing::fuzz_corpus(200, 20260810ull);
    for (const auto& smiles : corpus) {
        CAPTURE(smiles);
        auto g = parse_smiles(smiles);
        auto [t, c] = build_junction_tree(g);
        CHECK(t.is_forest());
        CHECK(t.component_count() == g.component_count());
        CHECK(left_total(c));
        for (int r = 2; r <= 3; ++r) {
            auto [tc, cc] = coarsen_junction_tree(t, c, r);
            CHECK(tc.is_forest());
            CHECK(tc.component_count() == g.component_count());
            CHECK(left_total(cc));
        }
        auto [e, ce] = build_erg(g);
        CHECK(left_total(ce));
        // every molecular atom appears in at least one JT node's atom set
        std::vector<bool> covered(g.atom_count(), false);
        for (const auto& s : t.atom_sets)
            for (int v : s) covered[v] = true;
        for (bool b : covered) CHECK(b);
    }
}
