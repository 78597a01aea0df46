#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <set>

#include "chienn/datagen.hpp"
#include "chienn/edgegraph.hpp"
#include "chienn/ordering.hpp"
#include "chienn/rng.hpp"

using namespace chienn;

TEST_CASE("chirality_oracle: hand-computed determinant signs") {
    // ranks 1..4 at (1,0,0), (0,1,0), (0,0,1), (0,0,-1):
    // det[(1,0,1),(0,1,1),(0,0,2)] = 2 > 0 -> R-like (0)
    std::vector<std::pair<int, Vec3>> subs = {
        {1, {1, 0, 0}}, {2, {0, 1, 0}}, {3, {0, 0, 1}}, {4, {0, 0, -1}}};
    CHECK(chirality_oracle({0, 0, 0}, subs) == 0);

    // swapping the rank-1 and rank-2 positions flips the determinant sign
    std::vector<std::pair<int, Vec3>> swapped = {
        {1, {0, 1, 0}}, {2, {1, 0, 0}}, {3, {0, 0, 1}}, {4, {0, 0, -1}}};
    CHECK(chirality_oracle({0, 0, 0}, swapped) == 1);

    // input order must not matter, only the ranks
    std::vector<std::pair<int, Vec3>> scrambled = {
        {4, {0, 0, -1}}, {2, {0, 1, 0}}, {1, {1, 0, 0}}, {3, {0, 0, 1}}};
    CHECK(chirality_oracle({0, 0, 0}, scrambled) == 0);
}

TEST_CASE("chirality_oracle rejects bad input") {
    std::vector<std::pair<int, Vec3>> three = {{1, {1, 0, 0}}, {2, {0, 1, 0}}, {3, {0, 0, 1}}};
    CHECK_THROWS_AS(chirality_oracle({0, 0, 0}, three), std::invalid_argument);

    std::vector<std::pair<int, Vec3>> dup = {
        {1, {1, 0, 0}}, {1, {0, 1, 0}}, {3, {0, 0, 1}}, {4, {0, 0, -1}}};
    CHECK_THROWS_AS(chirality_oracle({0, 0, 0}, dup), std::invalid_argument);

    std::vector<std::pair<int, Vec3>> coplanar = {
        {1, {1, 0, 0}}, {2, {0, 1, 0}}, {3, {-1, 0, 0}}, {4, {0, -1, 0}}};
    CHECK_THROWS_WITH_AS(chirality_oracle({0, 0, 0}, coplanar), doctest::Contains("coplanar"),
                         std::invalid_argument);
}

TEST_CASE("oracle antisymmetry under mirror over many random draws") {
    int checked = 0;
    for (std::uint64_t s = 0; s < 1000; ++s) {
        auto rng = make_rng(s, "oracle-anti");
        std::vector<std::pair<int, Vec3>> subs, mir;
        for (int i = 0; i < 4; ++i) {
            Vec3 v = {normal(rng), normal(rng), normal(rng)};
            subs.push_back({i + 1, v});
            mir.push_back({i + 1, Vec3{-v[0], v[1], v[2]}});
        }
        try {
            int a = chirality_oracle({0, 0, 0}, subs);
            int b = chirality_oracle({0, 0, 0}, mir);
            CHECK(a != b);
            ++checked;
        } catch (const std::invalid_argument&) {
            // coplanar draw
        }
    }
    CHECK(checked > 950);
}

TEST_CASE("gen_tetrahedral: pair structure and labels") {
    auto samples = gen_tetrahedral(12, 2);
    REQUIRE(samples.size() == 2);
    CHECK(samples[0].pair_id == samples[1].pair_id);
    CHECK_FALSE(samples[0].is_mirror);
    CHECK(samples[1].is_mirror);
    CHECK(samples[0].class_label != samples[1].class_label);

    // paired samples are exact mirror images
    REQUIRE(samples[0].graph.num_atoms() == samples[1].graph.num_atoms());
    for (int a = 0; a < samples[0].graph.num_atoms(); ++a) {
        const Vec3& p = samples[0].graph.atoms[a].coords;
        const Vec3& q = samples[1].graph.atoms[a].coords;
        CHECK(q[0] == -p[0]);
        CHECK(q[1] == p[1]);
        CHECK(q[2] == p[2]);
        CHECK(samples[0].graph.atoms[a].element == samples[1].graph.atoms[a].element);
    }

    // each sample: C center with 4 distinct substituent elements
    std::set<std::string> elems;
    for (int a = 1; a <= 4; ++a) elems.insert(samples[0].graph.atoms[a].element);
    CHECK(elems.size() == 4);
    CHECK(samples[0].graph.atoms[0].element == "C");
}

TEST_CASE("gen_tetrahedral: bond lengths and jitter stay in range") {
    auto samples = gen_tetrahedral(77, 20);
    for (const auto& s : samples) {
        for (int a = 1; a <= 4; ++a) {
            double len = norm(s.graph.atoms[a].coords - s.graph.atoms[0].coords);
            CHECK(len >= 1.3 - 1e-9);
            CHECK(len <= 1.8 + 1e-9);
        }
    }
}

TEST_CASE("gen_tetrahedral: label balance within 1 and count=1 allowed") {
    auto samples = gen_tetrahedral(5, 101);
    CHECK(samples.size() == 101);
    long r = 0;
    for (const auto& s : samples) r += s.class_label == 0;
    CHECK(std::abs(r - (101 - r)) <= 1);
    CHECK_THROWS_AS(gen_tetrahedral(5, 0), std::invalid_argument);
    CHECK(gen_tetrahedral(5, 1).size() == 1);
}

TEST_CASE("labels come from the oracle and mirror order reverses at the center") {
    auto samples = gen_tetrahedral(31, 10);
    for (const auto& s : samples) {
        CHECK(s.class_label == chirality_oracle(s.graph.atoms[0].coords,
                                                ranked_substituents(s.graph, 0)));
        CHECK(s.class_label == order_orientation_label(s.graph, 0));
    }
    // ordering cross-check: mirror's cyclic order is the reverse up to shift
    for (int p = 0; p < 5; ++p) {
        EdgeGraph eg = to_edge_graph(samples[2 * p].graph);
        EdgeGraph em = to_edge_graph(samples[2 * p + 1].graph);
        for (int sub = 1; sub <= 4; ++sub) {
            NeighborOrder a = neighbor_order(eg, eg.node_index(0, sub));
            NeighborOrder b = neighbor_order(em, em.node_index(0, sub));
            std::vector<int> reversed(a.sequence.rbegin(), a.sequence.rend());
            CHECK(is_cyclic_shift(b.sequence, reversed));
        }
    }
}

TEST_CASE("gen_ranking_pairs: targets differ by exactly 2*delta") {
    auto samples = gen_ranking_pairs(9, 8, 0.5);
    REQUIRE(samples.size() == 16);
    for (int p = 0; p < 8; ++p) {
        const auto& a = samples[2 * p];
        const auto& b = samples[2 * p + 1];
        CHECK(a.pair_id == b.pair_id);
        CHECK(std::abs(a.target - b.target) == doctest::Approx(1.0).epsilon(1e-12));
        // sign convention: R-like member carries +delta
        CHECK((a.class_label == 0 ? a.target : b.target) >
              (a.class_label == 0 ? b.target : a.target));
    }
    // delta = 0 collapses the pair targets
    auto flat = gen_ranking_pairs(9, 3, 0.0);
    for (int p = 0; p < 3; ++p)
        CHECK(flat[2 * p].target == doctest::Approx(flat[2 * p + 1].target).epsilon(1e-12));
}

TEST_CASE("perturb_conformer: angle 0 and 2pi are identity; orders invariant") {
    MolecularGraph g = random_molecule(3, 8);
    // find a bridge bond by trying until one works
    MolecularGraph h;
    int src = -1, dst = -1;
    for (const auto& b : g.bonds) {
        try {
            h = perturb_conformer(g, b.src, b.dst, 0.0);
            src = b.src;
            dst = b.dst;
            break;
        } catch (const std::invalid_argument&) {
        }
    }
    REQUIRE(src >= 0);
    for (int a = 0; a < g.num_atoms(); ++a)
        CHECK(norm(h.atoms[a].coords - g.atoms[a].coords) == 0.0);

    MolecularGraph full = perturb_conformer(g, src, dst, 2 * std::numbers::pi);
    for (int a = 0; a < g.num_atoms(); ++a)
        CHECK(norm(full.atoms[a].coords - g.atoms[a].coords) < 1e-9);

    auto rng = make_rng(3, "conf-angle");
    EdgeGraph eg = to_edge_graph(g);
    for (int t = 0; t < 20; ++t) {
        MolecularGraph r = perturb_conformer(g, src, dst, uniform(rng, 0, 2 * std::numbers::pi));
        EdgeGraph er = to_edge_graph(r);
        for (int n = 0; n < eg.num_nodes(); ++n)
            CHECK(cyclic_equivalent(neighbor_order(eg, n), neighbor_order(er, n)));
    }
}

TEST_CASE("perturb_conformer rejects ring bonds and missing bonds") {
    // triangle: every bond is in a ring
    MolecularGraph g;
    for (int i = 0; i < 3; ++i) {
        Atom a;
        a.element = "C";
        a.features = featurize_element("C");
        a.coords = {std::cos(2 * std::numbers::pi * i / 3), std::sin(2 * std::numbers::pi * i / 3),
                    0.1 * i};
        g.atoms.push_back(a);
    }
    auto feat = featurize_bond_order(1);
    for (auto [i, j] : {std::pair{0, 1}, {1, 2}, {2, 0}}) {
        g.bonds.push_back({i, j, 1, feat});
        g.bonds.push_back({j, i, 1, feat});
    }
    CHECK_THROWS_WITH_AS(perturb_conformer(g, 0, 1, 1.0), doctest::Contains("not a rotatable"),
                         std::invalid_argument);
    CHECK_THROWS_AS(perturb_conformer(g, 0, 5, 1.0), std::invalid_argument);
}

TEST_CASE("jsonl round trip preserves samples; schema version is checked") {
    auto samples = gen_tetrahedral(55, 6);
    samples[0].target = 1.25;
    std::string path = "datagen_roundtrip_test.jsonl";
    save_samples_jsonl(samples, path);
    auto loaded = load_samples_jsonl(path);
    REQUIRE(loaded.size() == samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        CHECK(loaded[i].class_label == samples[i].class_label);
        CHECK(loaded[i].target == samples[i].target);
        CHECK(loaded[i].seed == samples[i].seed);
        CHECK(loaded[i].is_mirror == samples[i].is_mirror);
        CHECK(loaded[i].pair_id == samples[i].pair_id);
        REQUIRE(loaded[i].graph.num_atoms() == samples[i].graph.num_atoms());
        for (int a = 0; a < samples[i].graph.num_atoms(); ++a)
            CHECK(norm(loaded[i].graph.atoms[a].coords - samples[i].graph.atoms[a].coords) <
                  1e-12);
    }
    std::remove(path.c_str());

    std::string bad = "datagen_badversion_test.jsonl";
    std::FILE* f = std::fopen(bad.c_str(), "w");
    std::fputs("{\"schema_version\":2,\"graph\":{},\"class_label\":0,\"target\":0,"
               "\"meta\":{\"seed\":0,\"is_mirror\":false,\"pair_id\":0}}\n",
               f);
    std::fclose(f);
    CHECK_THROWS_WITH_AS(load_samples_jsonl(bad), doctest::Contains("schema version"),
                         std::runtime_error);
    std::remove(bad.c_str());
}

TEST_CASE("generation is deterministic given (seed, count)") {
    auto a = gen_tetrahedral(99, 10);
    auto b = gen_tetrahedral(99, 10);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].class_label == b[i].class_label);
        for (int at = 0; at < a[i].graph.num_atoms(); ++at)
            CHECK(a[i].graph.atoms[at].coords == b[i].graph.atoms[at].coords);
    }
}

TEST_CASE("random_molecule is connected, valid, and seed-deterministic") {
    for (std::uint64_t s = 0; s < 50; ++s) {
        MolecularGraph g = random_molecule(s, 10);
        validate_graph(g);
        // connectivity via DFS over directed bonds
        std::vector<char> seen(g.num_atoms(), 0);
        std::vector<int> stack{0};
        seen[0] = 1;
        while (!stack.empty()) {
            int a = stack.back();
            stack.pop_back();
            for (const auto& b : g.bonds)
                if (b.src == a && !seen[b.dst]) {
                    seen[b.dst] = 1;
                    stack.push_back(b.dst);
                }
        }
        for (char c : seen) CHECK(c == 1);
    }
}
