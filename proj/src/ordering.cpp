#include "chienn/ordering.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace chienn {

RigidTransform canonical_transform(const Vec3& c_j, const Vec3& c_k) {
    Vec3 v = c_k - c_j;
    double len = norm(v);
    if (len <= 1e-9) throw std::invalid_argument("zero-length bond");

    // Rotation about x zeroing the y component of (v_y, v_z): with
    // alpha = atan2(v_y, v_z) the yz projection lands on (0, rho), rho >= 0.
    double rho = std::hypot(v[1], v[2]);
    Mat3 rx = rho > 0 ? Mat3::rotation_x(std::atan2(v[1], v[2])) : Mat3::identity();
    Vec3 v1 = rx.apply(v);  // (v_x, 0, rho)

    // Rotation about y zeroing the z component and making x positive.
    Mat3 ry = Mat3::rotation_y(std::atan2(v1[2], v1[0]));

    RigidTransform t;
    t.rotation = ry * rx;
    t.translation = t.rotation.apply({-c_j[0], -c_j[1], -c_j[2]});
    return t;
}

double projection_angle(const Vec3& p) {
    if (std::hypot(p[1], p[2]) <= 1e-9)
        throw std::invalid_argument("neighbor parallel to reference bond");
    double a = std::atan2(p[2], p[1]);  // from +y toward +z
    if (a < 0) a += 2 * std::numbers::pi;
    return a;
}

NeighborOrder neighbor_order(const EdgeGraph& eg, int node, bool permissive) {
    const EdgeNode& jk = eg.nodes[node];
    Vec3 c_j = {jk.coord6[0], jk.coord6[1], jk.coord6[2]};
    Vec3 c_k = {jk.coord6[3], jk.coord6[4], jk.coord6[5]};
    RigidTransform frame = canonical_transform(c_j, c_k);

    struct Entry {
        int neighbor;
        int src_atom;
        double angle;
        bool parallel;
    };
    std::vector<Entry> entries;
    for (int nb : incoming_neighbors(eg, node)) {
        Vec3 c_i = {eg.nodes[nb].coord6[0], eg.nodes[nb].coord6[1], eg.nodes[nb].coord6[2]};
        Vec3 p = frame.apply(c_i);
        Entry e{nb, eg.nodes[nb].src, 0.0, false};
        try {
            e.angle = projection_angle(p);
        } catch (const std::invalid_argument&) {
            if (!permissive)
                throw std::runtime_error("neighbor parallel to reference bond at node " +
                                         std::to_string(jk.src) + "->" + std::to_string(jk.dst));
            e.parallel = true;
        }
        entries.push_back(e);
    }

    std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        if (a.parallel != b.parallel) return b.parallel;  // parallel entries go last
        if (a.parallel) return a.src_atom < b.src_atom;
        if (std::abs(a.angle - b.angle) > 1e-9) return a.angle < b.angle;
        return a.src_atom < b.src_atom;
    });

    NeighborOrder o;
    o.node = node;
    for (const auto& e : entries) {
        o.sequence.push_back(e.neighbor);
        o.angles.push_back(e.angle);
    }
    return o;
}

std::vector<NeighborOrder> all_orders(const EdgeGraph& eg, bool permissive) {
    std::vector<NeighborOrder> out(eg.num_nodes());
    for (int n = 0; n < eg.num_nodes(); ++n) out[n] = neighbor_order(eg, n, permissive);
    return out;
}

bool is_cyclic_shift(const std::vector<int>& a, const std::vector<int>& b) {
    if (a.size() != b.size()) return false;
    size_t d = a.size();
    if (d == 0) return true;
    for (size_t s = 0; s < d; ++s) {
        bool match = true;
        for (size_t i = 0; i < d && match; ++i) match = a[i] == b[(i + s) % d];
        if (match) return true;
    }
    return false;
}

bool cyclic_equivalent(const NeighborOrder& a, const NeighborOrder& b) {
    std::vector<int> ka = a.sequence, kb = b.sequence;
    std::sort(ka.begin(), ka.end());
    std::sort(kb.begin(), kb.end());
    if (ka != kb)
        throw std::invalid_argument("cyclic_equivalent: orders cover different key sets");
    return is_cyclic_shift(a.sequence, b.sequence);
}

std::string orders_to_text(const EdgeGraph& eg, const std::vector<NeighborOrder>& orders) {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(6);
    for (const auto& o : orders) {
        const EdgeNode& n = eg.nodes[o.node];
        os << n.src << "->" << n.dst << ": [";
        for (size_t i = 0; i < o.sequence.size(); ++i) {
            const EdgeNode& m = eg.nodes[o.sequence[i]];
            if (i) os << ", ";
            os << m.src << "->" << m.dst;
        }
        os << "] angles=[";
        for (size_t i = 0; i < o.angles.size(); ++i) {
            if (i) os << ", ";
            os << o.angles[i];
        }
        os << "]\n";
    }
    return os.str();
}

}  // namespace chienn
