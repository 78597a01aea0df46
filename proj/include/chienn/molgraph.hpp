#pragma once

#include <string>
#include <vector>

#include "chienn/geom.hpp"

namespace chienn {

// Fixed element vocabulary; anything else falls into the trailing "other"
// bucket when featurizing with allow_other.
inline const std::vector<std::string>& element_vocabulary() {
    static const std::vector<std::string> vocab = {"H", "C", "N",  "O",  "F", "P",
                                                   "S", "Cl", "Br", "I", "other"};
    return vocab;
}

constexpr int kNodeFeatureDim = 11;  // |element_vocabulary()|
constexpr int kBondFeatureDim = 4;   // bond orders 1,2,3,4(aromatic)

struct Atom {
    std::string element;
    std::vector<double> features;  // length kNodeFeatureDim
    Vec3 coords{0, 0, 0};          // Angstrom
};

struct Bond {
    int src = 0;
    int dst = 0;
    int order = 1;
    std::vector<double> features;  // length kBondFeatureDim
};

// Directed molecular graph: every undirected bond record is stored as the
// pair (i,j) and (j,i) with identical features.
struct MolecularGraph {
    std::vector<Atom> atoms;
    std::vector<Bond> bonds;
    std::string name;

    int num_atoms() const { return static_cast<int>(atoms.size()); }
    int num_bonds() const { return static_cast<int>(bonds.size()); }
};

// One-hot encodings. Unknown symbols throw unless allow_other is set.
std::vector<double> featurize_element(const std::string& symbol, bool allow_other = true);
std::vector<double> featurize_bond_order(int order);
int element_index(const std::string& symbol, bool allow_other = true);

// Parses a single V2000 MOL/SDF block. Errors name the offending line.
MolecularGraph parse_sdf(const std::string& text);

// Parses a multi-record SDF ($$$$-separated).
std::vector<MolecularGraph> parse_sdf_multi(const std::string& text);

// Reflection through the yz plane: (x,y,z) -> (-x,y,z).
MolecularGraph mirror(const MolecularGraph& g);

// Proper rigid motion c -> R*c + t. Throws on an invalid rotation.
MolecularGraph apply_rigid(const MolecularGraph& g, const RigidTransform& t);

// Checks the structural invariants (bond pairing, finite coords, uniform
// feature lengths); throws on violation.
void validate_graph(const MolecularGraph& g);

std::string to_json(const MolecularGraph& g);
MolecularGraph graph_from_json(const std::string& json_text);

}  // namespace chienn
