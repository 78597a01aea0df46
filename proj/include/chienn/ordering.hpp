#pragma once

#include <string>
#include <vector>

#include "chienn/edgegraph.hpp"
#include "chienn/geom.hpp"

namespace chienn {

// Cyclic order of incoming neighbors for one edge-graph node. Any shift of
// `sequence` denotes the same order.
struct NeighborOrder {
    int node = -1;
    std::vector<int> sequence;   // neighbor node indices, sorted by ascending angle
    std::vector<double> angles;  // radians in [0, 2pi), same length as sequence
};

// Rigid motion taking c_j to the origin and c_k onto the +x axis: translate
// by -c_j, rotate about x to zero the y component of the bond's yz
// projection, then rotate about y to zero the z component.
RigidTransform canonical_transform(const Vec3& c_j, const Vec3& c_k);

// Full-circle angle of (p_y, p_z) measured from +y, increasing toward +z.
// Throws if p is parallel to the x axis (|(p_y,p_z)| <= 1e-9).
double projection_angle(const Vec3& p);

// Neighbor order at node (j,k): transform every incoming neighbor's source
// atom into the canonical frame of the bond and sort by projection angle.
// Ties within 1e-9 break by ascending source-atom index. In permissive mode,
// neighbors parallel to the reference bond are appended at the end (sorted by
// atom index) instead of raising.
NeighborOrder neighbor_order(const EdgeGraph& eg, int node, bool permissive = false);

// Orders for every node of the graph, indexed by node.
std::vector<NeighborOrder> all_orders(const EdgeGraph& eg, bool permissive = false);

// True iff b.sequence is a cyclic shift of a.sequence. Throws if the two
// orders are not over the same key set.
bool cyclic_equivalent(const NeighborOrder& a, const NeighborOrder& b);

// Generic helper used by tests as well: is `b` a cyclic shift of `a`?
bool is_cyclic_shift(const std::vector<int>& a, const std::vector<int>& b);

// Deterministic text dump, 6 decimal places: "j->k: [i1->j, ...] angles=[...]".
std::string orders_to_text(const EdgeGraph& eg, const std::vector<NeighborOrder>& orders);

}  // namespace chienn
