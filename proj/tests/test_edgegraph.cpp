#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <set>

#include "chienn/datagen.hpp"
#include "chienn/edgegraph.hpp"
#include "test_util.hpp"

using namespace chienn;
using namespace chienn::testutil;

namespace {

// Brute-force oracle: incoming neighbors of (j,k) are all (i,j) with a bond
// (i,j) in the source graph and i != k. Enumerates bond pairs directly.
std::set<std::pair<int, int>> incoming_oracle(const MolecularGraph& g, int j, int k) {
    std::set<std::pair<int, int>> out;
    for (const auto& b : g.bonds)
        if (b.dst == j && b.src != k) out.insert({b.src, b.dst});
    return out;
}

std::set<std::pair<int, int>> incoming_impl(const EdgeGraph& eg, int node) {
    std::set<std::pair<int, int>> out;
    for (int n : incoming_neighbors(eg, node)) out.insert({eg.nodes[n].src, eg.nodes[n].dst});
    return out;
}

}  // namespace

TEST_CASE("path A-B-C: node and edge counts from hand enumeration") {
    MolecularGraph g = path3();
    EdgeGraph eg = to_edge_graph(g);
    CHECK(eg.num_nodes() == 4);
    // incoming edges into (B,C)=(1,2): from (A,B)=(0,1) and the parallel (C,B)=(2,1)
    int bc = eg.node_index(1, 2);
    CHECK(eg.incoming_all[bc].size() == 2);
    // with the parallel node excluded only (A,B) remains
    auto nb = incoming_neighbors(eg, bc);
    REQUIRE(nb.size() == 1);
    CHECK(eg.nodes[nb[0]].src == 0);
    CHECK(eg.nodes[nb[0]].dst == 1);
}

TEST_CASE("single bond A-B: two nodes, only the parallel edges") {
    MolecularGraph g = make_graph({{"C", {0, 0, 0}}, {"O", {1.2, 0, 0}}}, {{0, 1}});
    EdgeGraph eg = to_edge_graph(g);
    CHECK(eg.num_nodes() == 2);
    CHECK(eg.edges.size() == 2);  // ((A,B),(B,A)) and ((B,A),(A,B))
    CHECK(incoming_neighbors(eg, eg.node_index(0, 1)).empty());
}

TEST_CASE("methane: 8 nodes, 4 incoming per (C,Hi) including the parallel") {
    MolecularGraph g = methane();
    EdgeGraph eg = to_edge_graph(g);
    CHECK(eg.num_nodes() == 8);
    for (int h = 1; h <= 4; ++h) {
        int n = eg.node_index(0, h);
        CHECK(eg.incoming_all[n].size() == 4);
        auto nb = incoming_neighbors(eg, n);
        CHECK(nb.size() == 3);  // parallel (h,0) excluded
        for (int m : nb) CHECK(eg.nodes[m].dst == 0);
    }
}

TEST_CASE("node features are copied from bonds and coords concatenated") {
    MolecularGraph g = path3();
    EdgeGraph eg = to_edge_graph(g);
    int ab = eg.node_index(0, 1);
    CHECK(eg.nodes[ab].feature == g.bonds[0].features);
    for (int c = 0; c < 3; ++c) {
        CHECK(eg.nodes[ab].coord6[c] == g.atoms[0].coords[c]);
        CHECK(eg.nodes[ab].coord6[3 + c] == g.atoms[1].coords[c]);
    }
}

TEST_CASE("dual edge features are e_ij | x_j | e_jk") {
    MolecularGraph g = path3();
    EdgeGraph eg = to_edge_graph(g);
    int ab = eg.node_index(0, 1);
    int bc = eg.node_index(1, 2);
    bool found = false;
    for (const auto& e : eg.edges) {
        if (e.from == ab && e.to == bc) {
            found = true;
            CHECK(e.feature.size() == 2 * kBondFeatureDim + kNodeFeatureDim);
            std::vector<double> expect = g.bonds[0].features;
            expect.insert(expect.end(), g.atoms[1].features.begin(), g.atoms[1].features.end());
            expect.insert(expect.end(), g.bonds[2].features.begin(), g.bonds[2].features.end());
            CHECK(e.feature == expect);
        }
    }
    CHECK(found);
}

TEST_CASE("incoming_neighbors matches brute-force oracle on random graphs") {
    for (std::uint64_t s = 0; s < 200; ++s) {
        MolecularGraph g = random_molecule(s, 12);
        EdgeGraph eg = to_edge_graph(g);
        CHECK(eg.num_nodes() == g.num_bonds());
        for (int n = 0; n < eg.num_nodes(); ++n)
            CHECK(incoming_impl(eg, n) == incoming_oracle(g, eg.nodes[n].src, eg.nodes[n].dst));
    }
}

TEST_CASE("construction commutes with atom relabeling") {
    MolecularGraph g = random_molecule(7, 8);
    int n = g.num_atoms();
    // reversal relabeling
    std::vector<int> relabel(n);
    for (int i = 0; i < n; ++i) relabel[i] = n - 1 - i;
    MolecularGraph h = g;
    for (int i = 0; i < n; ++i) h.atoms[relabel[i]] = g.atoms[i];
    for (auto& b : h.bonds) {
        b.src = relabel[b.src];
        b.dst = relabel[b.dst];
    }
    EdgeGraph ge = to_edge_graph(g);
    EdgeGraph he = to_edge_graph(h);
    CHECK(ge.num_nodes() == he.num_nodes());
    for (int node = 0; node < ge.num_nodes(); ++node) {
        int mapped = he.node_index(relabel[ge.nodes[node].src], relabel[ge.nodes[node].dst]);
        std::set<std::pair<int, int>> a, b;
        for (int m : incoming_neighbors(ge, node))
            a.insert({relabel[ge.nodes[m].src], relabel[ge.nodes[m].dst]});
        for (int m : incoming_neighbors(he, mapped)) b.insert({he.nodes[m].src, he.nodes[m].dst});
        CHECK(a == b);
    }
}

TEST_CASE("unknown node key raises") {
    EdgeGraph eg = to_edge_graph(path3());
    CHECK_THROWS_AS(eg.node_index(0, 2), std::invalid_argument);
    CHECK_THROWS_AS(incoming_neighbors(eg, 99), std::invalid_argument);
}

TEST_CASE("json dump is deterministic") {
    EdgeGraph eg = to_edge_graph(methane());
    CHECK(edge_graph_to_json(eg) == edge_graph_to_json(eg));
    CHECK(edge_graph_to_json(eg).find("0->1") != std::string::npos);
}
