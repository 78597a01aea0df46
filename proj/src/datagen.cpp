#include "chienn/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "chienn/edgegraph.hpp"
#include "chienn/ordering.hpp"
#include "chienn/rng.hpp"

namespace chienn {

int chirality_oracle(const Vec3& center,
                     const std::vector<std::pair<int, Vec3>>& ranked_substituents) {
    if (ranked_substituents.size() != 4)
        throw std::invalid_argument("chirality_oracle: exactly 4 substituents required");
    auto subs = ranked_substituents;
    std::sort(subs.begin(), subs.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (int i = 0; i < 3; ++i)
        if (subs[i].first == subs[i + 1].first)
            throw std::invalid_argument("chirality_oracle: priority ranks must be distinct");
    (void)center;
    Vec3 a = subs[0].second - subs[3].second;
    Vec3 b = subs[1].second - subs[3].second;
    Vec3 c = subs[2].second - subs[3].second;
    double det = dot(a, cross(b, c));
    if (std::abs(det) <= 1e-9)
        throw std::invalid_argument("chirality_oracle: coplanar substituent geometry");
    return det > 0 ? 0 : 1;
}

std::vector<std::pair<int, Vec3>> ranked_substituents(const MolecularGraph& g, int center_atom) {
    std::vector<std::pair<int, int>> neigh;  // (element index, atom index)
    for (const auto& b : g.bonds)
        if (b.src == center_atom) neigh.push_back({element_index(g.atoms[b.dst].element), b.dst});
    std::sort(neigh.begin(), neigh.end());
    std::vector<std::pair<int, Vec3>> out;
    for (std::size_t i = 0; i < neigh.size(); ++i)
        out.push_back({static_cast<int>(i) + 1, g.atoms[neigh[i].second].coords});
    return out;
}

namespace {

// unit tetrahedral directions
const std::array<Vec3, 4> kTetra = {
    Vec3{1, 1, 1}, Vec3{1, -1, -1}, Vec3{-1, 1, -1}, Vec3{-1, -1, 1}};

Vec3 normalized(const Vec3& v) { return (1.0 / norm(v)) * v; }

// random direction within `max_angle` of `axis`
Vec3 jittered_direction(const Vec3& axis, double max_angle, std::mt19937_64& rng) {
    Vec3 a = normalized(axis);
    // orthonormal frame around a
    Vec3 ref = std::abs(a[0]) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
    Vec3 u = normalized(cross(a, ref));
    Vec3 v = cross(a, u);
    double theta = uniform(rng, 0.0, max_angle);
    double phi = uniform(rng, 0.0, 2 * std::numbers::pi);
    return std::cos(theta) * a + std::sin(theta) * (std::cos(phi) * u + std::sin(phi) * v);
}

MolecularGraph build_tetrahedral(const std::array<std::string, 4>& elems,
                                 const std::array<Vec3, 4>& directions,
                                 const std::array<double, 4>& lengths) {
    MolecularGraph g;
    Atom center;
    center.element = "C";
    center.features = featurize_element("C");
    center.coords = {0, 0, 0};
    g.atoms.push_back(center);
    for (int i = 0; i < 4; ++i) {
        Atom a;
        a.element = elems[i];
        a.features = featurize_element(elems[i]);
        a.coords = lengths[i] * directions[i];
        g.atoms.push_back(a);
        auto feat = featurize_bond_order(1);
        g.bonds.push_back({0, i + 1, 1, feat});
        g.bonds.push_back({i + 1, 0, 1, feat});
    }
    return g;
}

int oracle_label(const MolecularGraph& g) {
    return chirality_oracle(g.atoms[0].coords, ranked_substituents(g, 0));
}

}  // namespace

std::vector<SyntheticSample> gen_tetrahedral(std::uint64_t seed, int count) {
    if (count < 1) throw std::invalid_argument("gen_tetrahedral: count must be >= 1");
    if (count == 1)
        std::cerr << "gen_tetrahedral: count=1 yields a single unpaired sample\n";
    const std::vector<std::array<std::string, 4>> palettes = {
        {"N", "O", "F", "Cl"}, {"N", "O", "P", "S"}, {"O", "F", "S", "Cl"},
        {"H", "N", "O", "F"},  {"H", "O", "S", "Cl"}};
    std::vector<SyntheticSample> out;
    int pairs = (count + 1) / 2;
    for (int p = 0; p < pairs; ++p) {
        std::uint64_t ps = substream_seed(seed, "tetra-" + std::to_string(p));
        auto rng = make_rng(ps, "geom");
        const auto& elems = palettes[p % palettes.size()];
        std::array<Vec3, 4> dirs;
        std::array<double, 4> lens;
        double max_jitter = 15.0 * std::numbers::pi / 180.0;
        for (int i = 0; i < 4; ++i) {
            dirs[i] = jittered_direction(kTetra[i], max_jitter, rng);
            lens[i] = uniform(rng, 1.3, 1.8);
        }
        MolecularGraph base = build_tetrahedral(elems, dirs, lens);
        base = apply_rigid(base, random_rigid(substream_seed(ps, "rigid")));
        // exact mirror image, so the pair invariant holds coordinate-for-coordinate
        MolecularGraph mirrored = mirror(base);

        SyntheticSample a;
        a.graph = base;
        a.class_label = oracle_label(base);
        a.seed = ps;
        a.is_mirror = false;
        a.pair_id = p;
        out.push_back(std::move(a));
        if (static_cast<int>(out.size()) == count) break;

        SyntheticSample b;
        b.graph = mirrored;
        b.class_label = oracle_label(mirrored);
        b.seed = ps;
        b.is_mirror = true;
        b.pair_id = p;
        out.push_back(std::move(b));
        if (static_cast<int>(out.size()) == count) break;
    }
    return out;
}

std::vector<SyntheticSample> gen_ranking_pairs(std::uint64_t seed, int count, double delta) {
    if (count < 1) throw std::invalid_argument("gen_ranking_pairs: count must be >= 1");
    std::vector<SyntheticSample> samples = gen_tetrahedral(seed, 2 * count);
    // smooth achiral component: depends only on composition and bond lengths,
    // identical within an enantiomer pair
    const std::vector<double> elem_weight = {0.3, 0.1, -0.4, 0.5, -0.2, 0.7,
                                             -0.6, 0.2, -0.3, 0.4, 0.0};
    for (auto& s : samples) {
        double comp = 0;
        for (const auto& a : s.graph.atoms) comp += elem_weight[element_index(a.element)];
        double mean_len = 0;
        int n = 0;
        for (const auto& b : s.graph.bonds)
            if (b.src < b.dst) {
                mean_len += norm(s.graph.atoms[b.src].coords - s.graph.atoms[b.dst].coords);
                ++n;
            }
        mean_len /= n;
        double f_achiral = std::tanh(comp / 2.0) + 0.05 * (mean_len - 1.55);
        double sign = s.class_label == 0 ? 1.0 : -1.0;
        s.target = f_achiral + sign * delta;
    }
    return samples;
}

MolecularGraph perturb_conformer(const MolecularGraph& g, int bond_src, int bond_dst,
                                 double angle) {
    validate_graph(g);
    bool found = false;
    for (const auto& b : g.bonds)
        if (b.src == bond_src && b.dst == bond_dst) found = true;
    if (!found) throw std::invalid_argument("perturb_conformer: no such bond");

    // component of bond_dst with the bond removed
    std::vector<char> visited(g.num_atoms(), 0);
    std::vector<int> stack{bond_dst};
    visited[bond_dst] = 1;
    while (!stack.empty()) {
        int a = stack.back();
        stack.pop_back();
        for (const auto& b : g.bonds) {
            if (b.src != a) continue;
            if ((b.src == bond_src && b.dst == bond_dst) ||
                (b.src == bond_dst && b.dst == bond_src))
                continue;
            if (!visited[b.dst]) {
                visited[b.dst] = 1;
                stack.push_back(b.dst);
            }
        }
    }
    if (visited[bond_src]) throw std::invalid_argument("not a rotatable bond (bond is in a ring)");

    std::vector<int> side_dst, side_src;
    for (int a = 0; a < g.num_atoms(); ++a) (visited[a] ? side_dst : side_src).push_back(a);
    const std::vector<int>& rotate_side =
        side_dst.size() <= side_src.size() ? side_dst : side_src;

    // Rodrigues rotation about the bond axis through bond_src
    Vec3 axis = normalized(g.atoms[bond_dst].coords - g.atoms[bond_src].coords);
    Vec3 origin = g.atoms[bond_src].coords;
    double c = std::cos(angle), s = std::sin(angle);
    MolecularGraph out = g;
    for (int a : rotate_side) {
        Vec3 v = g.atoms[a].coords - origin;
        Vec3 rotated = c * v + s * cross(axis, v) + ((1 - c) * dot(axis, v)) * axis;
        out.atoms[a].coords = rotated + origin;
    }
    return out;
}

int order_orientation_label(const MolecularGraph& g, int center_atom) {
    auto subs = ranked_substituents(g, center_atom);
    if (subs.size() != 4)
        throw std::invalid_argument("order_orientation_label: center must have 4 substituents");
    // atom index of the rank-4 (lowest-priority) substituent
    std::vector<std::pair<int, int>> neigh;
    for (const auto& b : g.bonds)
        if (b.src == center_atom) neigh.push_back({element_index(g.atoms[b.dst].element), b.dst});
    std::sort(neigh.begin(), neigh.end());
    int lowest = neigh[3].second;

    EdgeGraph eg = to_edge_graph(g);
    NeighborOrder o = neighbor_order(eg, eg.node_index(center_atom, lowest));
    if (o.sequence.size() != 3)
        throw std::runtime_error("order_orientation_label: expected 3 ordered neighbors");

    // ranks of the three remaining substituents in angle order
    std::vector<int> ranks;
    for (int nb : o.sequence) {
        int atom = eg.nodes[nb].src;
        for (int r = 0; r < 3; ++r)
            if (neigh[r].second == atom) ranks.push_back(r + 1);
    }
    if (ranks.size() != 3)
        throw std::runtime_error("order_orientation_label: order does not cover substituents");
    return is_cyclic_shift(ranks, {1, 2, 3}) ? 1 : 0;
}

void save_samples_jsonl(const std::vector<SyntheticSample>& samples, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open dataset file for writing: " + path);
    for (const auto& s : samples) {
        nlohmann::json j;
        j["schema_version"] = 1;
        j["graph"] = nlohmann::json::parse(to_json(s.graph));
        j["class_label"] = s.class_label;
        j["target"] = s.target;
        j["meta"] = {{"seed", s.seed}, {"is_mirror", s.is_mirror}, {"pair_id", s.pair_id}};
        out << j.dump() << "\n";
    }
}

std::vector<SyntheticSample> load_samples_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open dataset file: " + path);
    std::vector<SyntheticSample> out;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json j = nlohmann::json::parse(line);
        int version = j.at("schema_version").get<int>();
        if (version != 1)
            throw std::runtime_error("dataset line " + std::to_string(line_no) +
                                     ": schema version mismatch");
        SyntheticSample s;
        s.graph = graph_from_json(j.at("graph").dump());
        s.class_label = j.at("class_label").get<int>();
        s.target = j.at("target").get<double>();
        s.seed = j.at("meta").at("seed").get<std::uint64_t>();
        s.is_mirror = j.at("meta").at("is_mirror").get<bool>();
        s.pair_id = j.at("meta").at("pair_id").get<long>();
        out.push_back(std::move(s));
    }
    return out;
}

MolecularGraph random_molecule(std::uint64_t seed, int max_atoms) {
    auto rng = make_rng(seed, "random-molecule");
    std::uniform_int_distribution<int> natoms(2, max_atoms);
    int n = natoms(rng);
    const std::vector<std::string> elems = {"C", "N", "O", "H", "F", "S"};
    MolecularGraph g;
    for (int i = 0; i < n; ++i) {
        Atom a;
        std::uniform_int_distribution<std::size_t> pick(0, elems.size() - 1);
        a.element = elems[pick(rng)];
        a.features = featurize_element(a.element);
        a.coords = {uniform(rng, -4, 4), uniform(rng, -4, 4), uniform(rng, -4, 4)};
        g.atoms.push_back(a);
    }
    // random spanning tree keeps it connected, then a few extra edges
    for (int i = 1; i < n; ++i) {
        std::uniform_int_distribution<int> parent(0, i - 1);
        int p = parent(rng);
        auto feat = featurize_bond_order(1);
        g.bonds.push_back({p, i, 1, feat});
        g.bonds.push_back({i, p, 1, feat});
    }
    std::uniform_int_distribution<int> extra(0, n / 3);
    int extras = extra(rng);
    for (int e = 0; e < extras; ++e) {
        std::uniform_int_distribution<int> pick(0, n - 1);
        int a = pick(rng), b = pick(rng);
        if (a == b) continue;
        bool exists = false;
        for (const auto& bd : g.bonds)
            if (bd.src == a && bd.dst == b) exists = true;
        if (exists) continue;
        auto feat = featurize_bond_order(1);
        g.bonds.push_back({a, b, 1, feat});
        g.bonds.push_back({b, a, 1, feat});
    }
    validate_graph(g);
    return g;
}

RigidTransform random_rigid(std::uint64_t seed) {
    auto rng = make_rng(seed, "random-rigid");
    // uniform rotation from three Euler-like draws is good enough here
    Mat3 r = Mat3::rotation_z(uniform(rng, 0, 2 * std::numbers::pi)) *
             Mat3::rotation_y(std::acos(uniform(rng, -1, 1))) *
             Mat3::rotation_x(uniform(rng, 0, 2 * std::numbers::pi));
    RigidTransform t;
    t.rotation = r;
    t.translation = {uniform(rng, -5, 5), uniform(rng, -5, 5), uniform(rng, -5, 5)};
    return t;
}

}  // namespace chienn
