#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "chienn/datagen.hpp"
#include "chienn/ordering.hpp"
#include "chienn/rng.hpp"
#include "test_util.hpp"

using namespace chienn;
using namespace chienn::testutil;

TEST_CASE("canonical_transform: already canonical bond gives identity") {
    RigidTransform t = canonical_transform({0, 0, 0}, {2, 0, 0});
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            CHECK(t.rotation(i, j) == doctest::Approx(i == j ? 1 : 0).epsilon(1e-12));
    CHECK(norm(t.translation) == doctest::Approx(0));
}

TEST_CASE("canonical_transform maps +z bond onto +x") {
    RigidTransform t = canonical_transform({1, 1, 1}, {1, 1, 2});
    Vec3 img = t.apply({1, 1, 2});
    CHECK(img[0] == doctest::Approx(1).epsilon(1e-12));
    CHECK(std::abs(img[1]) < 1e-12);
    CHECK(std::abs(img[2]) < 1e-12);
    Vec3 origin_img = t.apply({1, 1, 1});
    CHECK(norm(origin_img) < 1e-12);
}

TEST_CASE("canonical_transform property: c_j to origin, c_k to +x axis") {
    for (std::uint64_t s = 0; s < 1000; ++s) {
        auto rng = make_rng(s, "canon");
        Vec3 cj = {uniform(rng, -5, 5), uniform(rng, -5, 5), uniform(rng, -5, 5)};
        Vec3 ck = {uniform(rng, -5, 5), uniform(rng, -5, 5), uniform(rng, -5, 5)};
        if (norm(ck - cj) <= 1e-6) continue;
        RigidTransform t = canonical_transform(cj, ck);
        t.validate();
        CHECK(norm(t.apply(cj)) < 1e-9);
        Vec3 img = t.apply(ck);
        CHECK(std::abs(img[1]) < 1e-9);
        CHECK(std::abs(img[2]) < 1e-9);
        CHECK(img[0] > 0);
    }
}

TEST_CASE("canonical_transform rejects degenerate bonds") {
    CHECK_THROWS_WITH_AS(canonical_transform({1, 2, 3}, {1, 2, 3}),
                         doctest::Contains("zero-length bond"), std::invalid_argument);
}

TEST_CASE("projection_angle on the axes") {
    CHECK(projection_angle({5, 1, 0}) == doctest::Approx(0));
    CHECK(projection_angle({0, 0, 1}) == doctest::Approx(std::numbers::pi / 2));
    CHECK(projection_angle({0, -1, 0}) == doctest::Approx(std::numbers::pi));
    CHECK_THROWS_WITH_AS(projection_angle({3, 0, 0}),
                         doctest::Contains("parallel to reference bond"), std::invalid_argument);
}

namespace {

// center at origin bonded to three neighbors placed at chosen yz angles plus
// an anchor atom on -x so the reference bond (center -> anchor... ) no:
// reference bond center->tip on +x; neighbors bond into center.
MolecularGraph star_at_angles(const std::vector<double>& degs) {
    std::vector<std::pair<std::string, Vec3>> atoms = {{"C", {0, 0, 0}}, {"H", {1.5, 0, 0}}};
    std::vector<std::pair<int, int>> bonds = {{0, 1}};
    const std::vector<std::string> elems = {"N", "O", "F", "Cl", "S"};
    for (std::size_t i = 0; i < degs.size(); ++i) {
        double a = degs[i] * std::numbers::pi / 180.0;
        atoms.push_back({elems[i % elems.size()],
                         {-0.7, 1.4 * std::cos(a), 1.4 * std::sin(a)}});
        bonds.push_back({0, static_cast<int>(atoms.size()) - 1});
    }
    return make_graph(atoms, bonds);
}

std::vector<int> order_src_atoms(const MolecularGraph& g, int j, int k) {
    EdgeGraph eg = to_edge_graph(g);
    NeighborOrder o = neighbor_order(eg, eg.node_index(j, k));
    std::vector<int> out;
    for (int n : o.sequence) out.push_back(eg.nodes[n].src);
    return out;
}

}  // namespace

TEST_CASE("neighbor_order sorts by yz angle; mirror reverses the cyclic order") {
    MolecularGraph g = star_at_angles({10, 130, 250});
    std::vector<int> order = order_src_atoms(g, 0, 1);
    CHECK(order == std::vector<int>{2, 3, 4});

    std::vector<int> mirrored = order_src_atoms(mirror(g), 0, 1);
    std::vector<int> reversed(order.rbegin(), order.rend());
    CHECK(is_cyclic_shift(mirrored, reversed));
    CHECK_FALSE(is_cyclic_shift(mirrored, order));
}

TEST_CASE("neighbor_order: singleton and empty orders") {
    MolecularGraph p = path3();
    EdgeGraph eg = to_edge_graph(p);
    NeighborOrder bc = neighbor_order(eg, eg.node_index(1, 2));
    CHECK(bc.sequence.size() == 1);
    NeighborOrder ab = neighbor_order(eg, eg.node_index(0, 1));
    CHECK(ab.sequence.empty());
}

TEST_CASE("neighbor_order: parallel neighbor raises unless permissive") {
    // neighbor exactly opposite the reference bond
    MolecularGraph g = make_graph(
        {{"C", {0, 0, 0}}, {"H", {1.5, 0, 0}}, {"N", {-1.5, 0, 0}}, {"O", {0, 1.4, 0}}},
        {{0, 1}, {0, 2}, {0, 3}});
    EdgeGraph eg = to_edge_graph(g);
    int node = eg.node_index(0, 1);
    CHECK_THROWS_WITH_AS(neighbor_order(eg, node), doctest::Contains("0->1"),
                         std::runtime_error);
    NeighborOrder o = neighbor_order(eg, node, /*permissive=*/true);
    REQUIRE(o.sequence.size() == 2);
    // parallel neighbor appended last
    CHECK(eg.nodes[o.sequence.back()].src == 2);
}

TEST_CASE("cyclic_equivalent") {
    NeighborOrder a, b;
    a.sequence = {1, 2, 3};
    b.sequence = {3, 1, 2};
    CHECK(cyclic_equivalent(a, b));
    b.sequence = {1, 3, 2};
    CHECK_FALSE(cyclic_equivalent(a, b));
    b.sequence = {1, 2, 4};
    CHECK_THROWS_AS(cyclic_equivalent(a, b), std::invalid_argument);
    NeighborOrder s1, s2;
    s1.sequence = {7};
    s2.sequence = {7};
    CHECK(cyclic_equivalent(s1, s2));
}

TEST_CASE("SE(3) invariance of neighbor orders over random molecules") {
    int checked = 0;
    for (std::uint64_t s = 0; s < 300; ++s) {
        MolecularGraph g = random_molecule(s, 9);
        EdgeGraph eg = to_edge_graph(g);
        MolecularGraph h = apply_rigid(g, random_rigid(substream_seed(s, "se3")));
        EdgeGraph eh = to_edge_graph(h);
        for (int n = 0; n < eg.num_nodes(); ++n) {
            NeighborOrder a = neighbor_order(eg, n);
            NeighborOrder b = neighbor_order(eh, n);
            CHECK(cyclic_equivalent(a, b));
            ++checked;
        }
    }
    CHECK(checked > 1000);
}

TEST_CASE("mirror reversal at every generic node with >= 3 neighbors") {
    for (std::uint64_t s = 0; s < 200; ++s) {
        MolecularGraph g = random_molecule(s, 9);
        EdgeGraph eg = to_edge_graph(g);
        EdgeGraph em = to_edge_graph(mirror(g));
        for (int n = 0; n < eg.num_nodes(); ++n) {
            NeighborOrder a = neighbor_order(eg, n);
            if (a.sequence.size() < 3) continue;
            NeighborOrder b = neighbor_order(em, n);
            std::vector<int> reversed(a.sequence.rbegin(), a.sequence.rend());
            CHECK(is_cyclic_shift(b.sequence, reversed));
        }
    }
}

TEST_CASE("determinism: identical input bytes give identical orders") {
    MolecularGraph g = parse_sdf(methane_mol_block());
    EdgeGraph eg = to_edge_graph(g);
    CHECK(orders_to_text(eg, all_orders(eg)) == orders_to_text(eg, all_orders(eg)));
}

TEST_CASE("angle ties break by ascending source atom index") {
    // two neighbors at identical yz angle but different radii
    MolecularGraph g = make_graph({{"C", {0, 0, 0}},
                                   {"H", {1.5, 0, 0}},
                                   {"N", {-0.5, 1.0, 0}},
                                   {"O", {-0.9, 2.0, 0}},
                                   {"F", {-0.2, 0, 1.3}}},
                                  {{0, 1}, {0, 2}, {0, 3}, {0, 4}});
    std::vector<int> order = order_src_atoms(g, 0, 1);
    // atoms 2 and 3 share angle 0; 2 < 3 so 2 first
    CHECK(order == std::vector<int>{2, 3, 4});
}
