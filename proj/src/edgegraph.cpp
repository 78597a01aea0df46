#include "chienn/edgegraph.hpp"

#include <algorithm>

#include "json.hpp"

namespace chienn {

EdgeGraph to_edge_graph(const MolecularGraph& g) {
    validate_graph(g);
    EdgeGraph eg;

    for (const auto& b : g.bonds) {
        EdgeNode n;
        n.src = b.src;
        n.dst = b.dst;
        n.feature = b.features;
        const Vec3& ci = g.atoms[b.src].coords;
        const Vec3& cj = g.atoms[b.dst].coords;
        n.coord6 = {ci[0], ci[1], ci[2], cj[0], cj[1], cj[2]};
        eg.index[{b.src, b.dst}] = eg.num_nodes();
        eg.nodes.push_back(std::move(n));
    }

    eg.parallel.resize(eg.num_nodes());
    eg.incoming_all.assign(eg.num_nodes(), {});
    for (int n = 0; n < eg.num_nodes(); ++n)
        eg.parallel[n] = eg.node_index(eg.nodes[n].dst, eg.nodes[n].src);

    // bonds grouped by middle atom: edge ((i,j),(j,k)) for every pair sharing j
    std::vector<std::vector<int>> by_src(g.num_atoms()), by_dst(g.num_atoms());
    for (int n = 0; n < eg.num_nodes(); ++n) {
        by_src[eg.nodes[n].src].push_back(n);
        by_dst[eg.nodes[n].dst].push_back(n);
    }
    for (int j = 0; j < g.num_atoms(); ++j) {
        for (int in_node : by_dst[j]) {       // (i,j)
            for (int out_node : by_src[j]) {  // (j,k)
                EdgeEdge e;
                e.from = in_node;
                e.to = out_node;
                const auto& eij = eg.nodes[in_node].feature;
                const auto& xj = g.atoms[j].features;
                const auto& ejk = eg.nodes[out_node].feature;
                e.feature.reserve(eij.size() + xj.size() + ejk.size());
                e.feature.insert(e.feature.end(), eij.begin(), eij.end());
                e.feature.insert(e.feature.end(), xj.begin(), xj.end());
                e.feature.insert(e.feature.end(), ejk.begin(), ejk.end());
                eg.incoming_all[out_node].push_back(in_node);
                eg.edges.push_back(std::move(e));
            }
        }
    }
    for (auto& inc : eg.incoming_all) std::sort(inc.begin(), inc.end());
    return eg;
}

std::vector<int> incoming_neighbors(const EdgeGraph& eg, int node) {
    if (node < 0 || node >= eg.num_nodes())
        throw std::invalid_argument("unknown edge-graph node index " + std::to_string(node));
    std::vector<int> out;
    out.reserve(eg.incoming_all[node].size());
    for (int n : eg.incoming_all[node])
        if (n != eg.parallel[node]) out.push_back(n);
    return out;
}

std::string edge_graph_to_json(const EdgeGraph& eg) {
    auto key = [&](int n) {
        return std::to_string(eg.nodes[n].src) + "->" + std::to_string(eg.nodes[n].dst);
    };
    nlohmann::json j;
    j["num_nodes"] = eg.num_nodes();
    nlohmann::json nodes = nlohmann::json::object();
    std::vector<int> order(eg.num_nodes());
    for (int n = 0; n < eg.num_nodes(); ++n) order[n] = n;
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return key(a) < key(b); });
    for (int n : order) {
        std::vector<std::string> adj;
        for (int m : eg.incoming_all[n]) adj.push_back(key(m));
        std::sort(adj.begin(), adj.end());
        nodes[key(n)] = {{"coord", eg.nodes[n].coord6},
                         {"incoming", adj},
                         {"parallel", key(eg.parallel[n])}};
    }
    j["nodes"] = nodes;
    return j.dump(2);
}

}  // namespace chienn
