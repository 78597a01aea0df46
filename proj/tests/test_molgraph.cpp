#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "chienn/molgraph.hpp"
#include "chienn/rng.hpp"
#include "test_util.hpp"

using namespace chienn;
using namespace chienn::testutil;

TEST_CASE("parse_sdf: methane expands undirected bonds into directed pairs") {
    MolecularGraph g = parse_sdf(methane_mol_block());
    CHECK(g.num_atoms() == 5);
    CHECK(g.num_bonds() == 8);
    CHECK(g.name == "methane");
    CHECK(g.atoms[0].element == "C");
    CHECK(g.atoms[1].coords[0] == doctest::Approx(0.6294));
}

TEST_CASE("parse_sdf: single atom, no bonds") {
    const char* block =
        "atom\n\n\n  1  0  0  0  0  0  0  0  0  0999 V2000\n"
        "    1.0000    2.0000    3.0000 N   0  0\n"
        "M  END\n";
    MolecularGraph g = parse_sdf(block);
    CHECK(g.num_atoms() == 1);
    CHECK(g.num_bonds() == 0);
}

TEST_CASE("parse_sdf: bond index out of range is reported with line number") {
    const char* block =
        "bad\n\n\n  2  1  0  0  0  0  0  0  0  0999 V2000\n"
        "    0.0000    0.0000    0.0000 C   0  0\n"
        "    1.0000    0.0000    0.0000 C   0  0\n"
        "  1  9  1  0\n"
        "M  END\n";
    CHECK_THROWS_WITH_AS(parse_sdf(block), doctest::Contains("bond index out of range"),
                         std::runtime_error);
}

TEST_CASE("parse_sdf: malformed counts line") {
    CHECK_THROWS_AS(parse_sdf("x\n\n\n  ZZZ bad counts\n"), std::runtime_error);
}

TEST_CASE("parse_sdf_multi splits on $$$$") {
    std::string text = std::string(methane_mol_block()) + "$$$$\n" + methane_mol_block() + "$$$$\n";
    auto mols = parse_sdf_multi(text);
    CHECK(mols.size() == 2);
}

TEST_CASE("featurize: one-hot encodings") {
    auto c = featurize_element("C");
    CHECK(c[element_index("C")] == 1.0);
    CHECK(std::count(c.begin(), c.end(), 1.0) == 1);
    auto b2 = featurize_bond_order(2);
    CHECK(b2 == std::vector<double>{0, 1, 0, 0});
    CHECK_THROWS_WITH_AS(featurize_element("Xx", false), doctest::Contains("unknown element"),
                         std::invalid_argument);
    CHECK(featurize_element("Xx", true).back() == 1.0);  // "other" bucket
}

TEST_CASE("mirror negates x and is an involution") {
    MolecularGraph g = methane();
    MolecularGraph m = mirror(g);
    CHECK(m.atoms[1].coords[0] == -g.atoms[1].coords[0]);
    CHECK(m.atoms[1].coords[1] == g.atoms[1].coords[1]);
    MolecularGraph mm = mirror(m);
    for (int i = 0; i < g.num_atoms(); ++i)
        for (int c = 0; c < 3; ++c) CHECK(mm.atoms[i].coords[c] == g.atoms[i].coords[c]);
}

TEST_CASE("mirror fixes molecules lying in the yz plane") {
    MolecularGraph g = make_graph({{"C", {0, 1, 2}}, {"O", {0, -1, 0.5}}}, {{0, 1}});
    MolecularGraph m = mirror(g);
    for (int i = 0; i < 2; ++i)
        for (int c = 0; c < 3; ++c) CHECK(m.atoms[i].coords[c] == g.atoms[i].coords[c]);
}

TEST_CASE("apply_rigid: identity, translation, rotation") {
    MolecularGraph g = make_graph({{"C", {0, 0, 0}}, {"O", {1, 0, 0}}}, {{0, 1}});
    RigidTransform id;
    MolecularGraph gi = apply_rigid(g, id);
    CHECK(gi.atoms[1].coords[0] == 1.0);

    RigidTransform tr;
    tr.translation = {1, 0, 0};
    CHECK(apply_rigid(g, tr).atoms[0].coords[0] == 1.0);

    RigidTransform rz;
    rz.rotation = Mat3::rotation_z(std::numbers::pi / 2);
    Vec3 rotated = apply_rigid(g, rz).atoms[1].coords;
    CHECK(rotated[0] == doctest::Approx(0).epsilon(1e-12));
    CHECK(rotated[1] == doctest::Approx(1).epsilon(1e-12));
}

TEST_CASE("apply_rigid rejects non-orthonormal rotations") {
    RigidTransform bad;
    bad.rotation(0, 0) = 2.0;
    CHECK_THROWS_AS(apply_rigid(methane(), bad), std::invalid_argument);
}

TEST_CASE("apply_rigid preserves pairwise distances") {
    MolecularGraph g = methane();
    for (std::uint64_t s = 0; s < 50; ++s) {
        auto rng = make_rng(s, "rigid-test");
        RigidTransform t;
        t.rotation = Mat3::rotation_z(uniform(rng, 0, 6.28)) *
                     Mat3::rotation_x(uniform(rng, 0, 6.28));
        t.translation = {uniform(rng, -3, 3), uniform(rng, -3, 3), uniform(rng, -3, 3)};
        MolecularGraph h = apply_rigid(g, t);
        for (int i = 0; i < g.num_atoms(); ++i)
            for (int j = i + 1; j < g.num_atoms(); ++j) {
                double d0 = norm(g.atoms[i].coords - g.atoms[j].coords);
                double d1 = norm(h.atoms[i].coords - h.atoms[j].coords);
                CHECK(std::abs(d1 - d0) / d0 < 1e-9);
            }
    }
}

TEST_CASE("bond pairing invariant holds for parsed graphs") {
    MolecularGraph g = parse_sdf(methane_mol_block());
    CHECK_NOTHROW(validate_graph(g));
}

TEST_CASE("json round trip preserves structure") {
    MolecularGraph g = methane();
    MolecularGraph h = graph_from_json(to_json(g));
    CHECK(h.num_atoms() == g.num_atoms());
    CHECK(h.num_bonds() == g.num_bonds());
    CHECK(h.atoms[2].element == g.atoms[2].element);
    CHECK(h.atoms[2].coords[1] == doctest::Approx(g.atoms[2].coords[1]));
}
