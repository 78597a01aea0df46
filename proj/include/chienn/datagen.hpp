#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "chienn/molgraph.hpp"

namespace chienn {

struct SyntheticSample {
    MolecularGraph graph;
    int class_label = -1;    // R-like = 0, S-like = 1 (classification tasks)
    double target = 0.0;     // regression tasks
    std::uint64_t seed = 0;
    bool is_mirror = false;
    long pair_id = -1;       // samples sharing a pair id are exact mirror images
};

// Independent geometric chirality oracle: sort the four substituents by
// descending priority (rank 1 first), then take the sign of
// det[v1-v4, v2-v4, v3-v4]. Positive determinant -> 0 (R-like), negative
// -> 1 (S-like). Not derived from the neighbor-ordering construction.
// Throws on coplanar geometry (|det| <= 1e-9).
int chirality_oracle(const Vec3& center,
                     const std::vector<std::pair<int, Vec3>>& ranked_substituents);

// Synthetic tetrahedral R/S dataset: a carbon center with four substituents
// of distinct elements at jittered tetrahedral directions under a random
// rigid motion. Exactly half the samples are mirrors of the other half;
// labels come from chirality_oracle with priorities by element index.
std::vector<SyntheticSample> gen_tetrahedral(std::uint64_t seed, int count);

// Enantiomer pairs with regression targets y = f_achiral + s * delta, where
// s is the oracle chirality sign. Returns 2*count samples (count pairs).
std::vector<SyntheticSample> gen_ranking_pairs(std::uint64_t seed, int count,
                                               double delta = 0.5);

// Rotates the smaller component across a bridge bond about the bond axis.
// Throws if the bond is not a bridge ("not a rotatable bond").
MolecularGraph perturb_conformer(const MolecularGraph& g, int bond_src, int bond_dst,
                                 double angle);

// Binary label read off the cyclic neighbor order at the chiral center:
// viewed along the bond from the center to the lowest-priority substituent,
// ranks (1,2,3) appearing as a cyclic rotation in ascending-angle direction
// -> 1, otherwise -> 0. Must agree with chirality_oracle.
int order_orientation_label(const MolecularGraph& g, int center_atom);

// Substituent priority used throughout: rank by ascending element vocabulary
// index (rank 1 = lowest index).
std::vector<std::pair<int, Vec3>> ranked_substituents(const MolecularGraph& g, int center_atom);

// JSON-lines dataset IO; schema_version 1.
void save_samples_jsonl(const std::vector<SyntheticSample>& samples, const std::string& path);
std::vector<SyntheticSample> load_samples_jsonl(const std::string& path);

// Random connected molecule with generic-position coordinates, for property
// suites (up to max_atoms atoms).
MolecularGraph random_molecule(std::uint64_t seed, int max_atoms = 12);

// Random rotation + translation drawn from the given seed.
RigidTransform random_rigid(std::uint64_t seed);

}  // namespace chienn
