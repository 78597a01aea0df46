#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "chienn/molgraph.hpp"

namespace chienn {

// Node of the edge (dual) graph: one per directed bond (i,j) of the source
// molecule. coord6 = c_i | c_j.
struct EdgeNode {
    int src = 0;  // i
    int dst = 0;  // j
    std::vector<double> feature;      // copied bond feature, length M
    std::array<double, 6> coord6{};
};

// Edge of the dual graph: connects (i,j) -> (j,k) through the shared middle
// atom j. feature = e_ij | x_j | e_jk, length 2M+N.
struct EdgeEdge {
    int from = 0;  // node index of (i,j)
    int to = 0;    // node index of (j,k)
    std::vector<double> feature;
};

// Edge (dual) graph. Structure is immutable after construction; `states` is
// the per-node hidden vector owned by a single forward pass at a time.
struct EdgeGraph {
    std::vector<EdgeNode> nodes;
    std::vector<EdgeEdge> edges;
    std::vector<int> parallel;                 // parallel[n] = index of node (j,i) for node (i,j)
    std::vector<std::vector<int>> incoming_all;  // per node, incoming node indices (parallel included)
    std::vector<std::vector<double>> states;   // per node, length H (filled by forward passes)

    std::map<std::pair<int, int>, int> index;  // (i,j) -> node index

    int num_nodes() const { return static_cast<int>(nodes.size()); }

    int node_index(int i, int j) const {
        auto it = index.find({i, j});
        if (it == index.end())
            throw std::invalid_argument("unknown edge-graph node (" + std::to_string(i) + "," +
                                        std::to_string(j) + ")");
        return it->second;
    }
};

// Structural dual of the molecular graph. The parallel pair ((i,j),(j,i)) is
// materialized as an edge; its exclusion happens at neighbor-query time.
EdgeGraph to_edge_graph(const MolecularGraph& g);

// Incoming neighbors of node (j,k): all (i,j) with a bond, excluding the
// parallel node (k,j).
std::vector<int> incoming_neighbors(const EdgeGraph& eg, int node);

// Deterministic debugging dump: node keys as "i->j", adjacency sorted
// lexicographically.
std::string edge_graph_to_json(const EdgeGraph& eg);

}  // namespace chienn
