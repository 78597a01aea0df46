#pragma once

#include <string>
#include <vector>

#include "chienn/molgraph.hpp"

namespace chienn::testutil {

// Hand-built graphs used across suites.

inline MolecularGraph make_graph(const std::vector<std::pair<std::string, Vec3>>& atoms,
                                 const std::vector<std::pair<int, int>>& bonds) {
    MolecularGraph g;
    for (const auto& [el, xyz] : atoms) {
        Atom a;
        a.element = el;
        a.features = featurize_element(el);
        a.coords = xyz;
        g.atoms.push_back(a);
    }
    for (const auto& [s, d] : bonds) {
        auto feat = featurize_bond_order(1);
        g.bonds.push_back({s, d, 1, feat});
        g.bonds.push_back({d, s, 1, feat});
    }
    return g;
}

// C at origin, four H at tetrahedral directions.
inline MolecularGraph methane() {
    double r = 1.09 / std::sqrt(3.0);
    return make_graph({{"C", {0, 0, 0}},
                       {"H", {r, r, r}},
                       {"H", {r, -r, -r}},
                       {"H", {-r, r, -r}},
                       {"H", {-r, -r, r}}},
                      {{0, 1}, {0, 2}, {0, 3}, {0, 4}});
}

// linear path A-B-C
inline MolecularGraph path3() {
    return make_graph({{"C", {0, 0, 0}}, {"N", {1.5, 0.1, 0}}, {"O", {3.0, -0.2, 0.3}}},
                      {{0, 1}, {1, 2}});
}

inline const char* methane_mol_block() {
    return "methane\n"
           "  test\n"
           "\n"
           "  5  4  0  0  0  0  0  0  0  0999 V2000\n"
           "    0.0000    0.0000    0.0000 C   0  0  0  0  0  0  0  0  0  0  0  0\n"
           "    0.6294    0.6294    0.6294 H   0  0  0  0  0  0  0  0  0  0  0  0\n"
           "    0.6294   -0.6294   -0.6294 H   0  0  0  0  0  0  0  0  0  0  0  0\n"
           "   -0.6294    0.6294   -0.6294 H   0  0  0  0  0  0  0  0  0  0  0  0\n"
           "   -0.6294   -0.6294    0.6294 H   0  0  0  0  0  0  0  0  0  0  0  0\n"
           "  1  2  1  0\n"
           "  1  3  1  0\n"
           "  1  4  1  0\n"
           "  1  5  1  0\n"
           "M  END\n";
}

}  // namespace chienn::testutil
