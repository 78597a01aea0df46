#include "chienn/molgraph.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace chienn {

int element_index(const std::string& symbol, bool allow_other) {
    const auto& vocab = element_vocabulary();
    for (int i = 0; i < static_cast<int>(vocab.size()); ++i)
        if (vocab[i] == symbol) return i;
    if (allow_other) return static_cast<int>(vocab.size()) - 1;
    throw std::invalid_argument("unknown element symbol: " + symbol);
}

std::vector<double> featurize_element(const std::string& symbol, bool allow_other) {
    std::vector<double> f(kNodeFeatureDim, 0.0);
    f[element_index(symbol, allow_other)] = 1.0;
    return f;
}

std::vector<double> featurize_bond_order(int order) {
    if (order < 1 || order > 4)
        throw std::invalid_argument("bond order out of range: " + std::to_string(order));
    std::vector<double> f(kBondFeatureDim, 0.0);
    f[order - 1] = 1.0;
    return f;
}

namespace {

int parse_int_field(const std::string& line, size_t pos, size_t len, int line_no,
                    const char* what) {
    if (pos >= line.size()) throw std::runtime_error("line " + std::to_string(line_no) +
                                                     ": missing " + std::string(what));
    std::string field = line.substr(pos, len);
    try {
        return std::stoi(field);
    } catch (const std::exception&) {
        throw std::runtime_error("line " + std::to_string(line_no) + ": bad " +
                                 std::string(what) + " '" + field + "'");
    }
}

}  // namespace

MolecularGraph parse_sdf(const std::string& text) {
    std::istringstream in(text);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    if (lines.size() < 4) throw std::runtime_error("mol block too short (header missing)");

    MolecularGraph g;
    g.name = lines[0];

    const std::string& counts = lines[3];
    int n_atoms = parse_int_field(counts, 0, 3, 4, "atom count");
    int n_bonds = parse_int_field(counts, 3, 3, 4, "bond count");
    if (n_atoms < 0 || n_bonds < 0)
        throw std::runtime_error("line 4: negative counts");
    if (lines.size() < static_cast<size_t>(4 + n_atoms + n_bonds))
        throw std::runtime_error("mol block truncated: counts line promises " +
                                 std::to_string(n_atoms) + " atoms and " +
                                 std::to_string(n_bonds) + " bonds");

    for (int i = 0; i < n_atoms; ++i) {
        int line_no = 5 + i;
        const std::string& al = lines[4 + i];
        std::istringstream as(al);
        double x, y, z;
        std::string sym;
        if (!(as >> x >> y >> z >> sym))
            throw std::runtime_error("line " + std::to_string(line_no) +
                                     ": malformed atom record (coordinates or symbol missing)");
        if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z))
            throw std::runtime_error("line " + std::to_string(line_no) +
                                     ": non-finite coordinate");
        Atom a;
        a.element = sym;
        a.features = featurize_element(sym);
        a.coords = {x, y, z};
        g.atoms.push_back(std::move(a));
    }

    for (int i = 0; i < n_bonds; ++i) {
        int line_no = 5 + n_atoms + i;
        const std::string& bl = lines[4 + n_atoms + i];
        int src = parse_int_field(bl, 0, 3, line_no, "bond src");
        int dst = parse_int_field(bl, 3, 3, line_no, "bond dst");
        int order = parse_int_field(bl, 6, 3, line_no, "bond order");
        if (src < 1 || src > n_atoms || dst < 1 || dst > n_atoms)
            throw std::runtime_error("line " + std::to_string(line_no) +
                                     ": bond index out of range");
        if (src == dst)
            throw std::runtime_error("line " + std::to_string(line_no) + ": self-loop bond");
        auto feat = featurize_bond_order(order);
        g.bonds.push_back({src - 1, dst - 1, order, feat});
        g.bonds.push_back({dst - 1, src - 1, order, feat});
    }

    validate_graph(g);
    return g;
}

std::vector<MolecularGraph> parse_sdf_multi(const std::string& text) {
    std::vector<MolecularGraph> out;
    std::string block;
    std::istringstream in(text);
    std::string line;
    auto flush = [&]() {
        // skip blocks that are only whitespace
        if (block.find_first_not_of(" \t\r\n") == std::string::npos) {
            block.clear();
            return;
        }
        out.push_back(parse_sdf(block));
        block.clear();
    };
    while (std::getline(in, line)) {
        if (line.rfind("$$$$", 0) == 0) {
            flush();
        } else {
            block += line;
            block += '\n';
        }
    }
    flush();
    return out;
}

MolecularGraph mirror(const MolecularGraph& g) {
    MolecularGraph out = g;
    for (auto& a : out.atoms) a.coords[0] = -a.coords[0];
    return out;
}

MolecularGraph apply_rigid(const MolecularGraph& g, const RigidTransform& t) {
    t.validate();
    MolecularGraph out = g;
    for (auto& a : out.atoms) a.coords = t.apply(a.coords);
    return out;
}

void validate_graph(const MolecularGraph& g) {
    size_t nf = g.atoms.empty() ? 0 : g.atoms[0].features.size();
    for (const auto& a : g.atoms) {
        if (a.features.size() != nf)
            throw std::runtime_error("atom feature lengths are not uniform");
        for (double c : a.coords)
            if (!std::isfinite(c)) throw std::runtime_error("non-finite atom coordinate");
    }
    size_t mf = g.bonds.empty() ? 0 : g.bonds[0].features.size();
    std::map<std::pair<int, int>, const Bond*> seen;
    for (const auto& b : g.bonds) {
        if (b.src == b.dst) throw std::runtime_error("self-loop bond");
        if (b.src < 0 || b.src >= g.num_atoms() || b.dst < 0 || b.dst >= g.num_atoms())
            throw std::runtime_error("bond index out of range");
        if (b.features.size() != mf)
            throw std::runtime_error("bond feature lengths are not uniform");
        if (!seen.emplace(std::make_pair(b.src, b.dst), &b).second)
            throw std::runtime_error("duplicate directed bond");
    }
    for (const auto& [key, b] : seen) {
        auto it = seen.find({key.second, key.first});
        if (it == seen.end())
            throw std::runtime_error("bond (" + std::to_string(key.first) + "," +
                                     std::to_string(key.second) + ") has no paired reverse bond");
        if (it->second->features != b->features)
            throw std::runtime_error("paired bonds carry different features");
    }
}

std::string to_json(const MolecularGraph& g) {
    nlohmann::json j;
    j["name"] = g.name;
    j["atoms"] = nlohmann::json::array();
    for (const auto& a : g.atoms)
        j["atoms"].push_back({{"element", a.element}, {"xyz", {a.coords[0], a.coords[1], a.coords[2]}}});
    j["bonds"] = nlohmann::json::array();
    for (const auto& b : g.bonds) {
        if (b.src < b.dst)  // emit each undirected bond once
            j["bonds"].push_back({{"src", b.src}, {"dst", b.dst}, {"order", b.order}});
    }
    return j.dump();
}

MolecularGraph graph_from_json(const std::string& json_text) {
    nlohmann::json j = nlohmann::json::parse(json_text);
    MolecularGraph g;
    g.name = j.value("name", "");
    for (const auto& ja : j.at("atoms")) {
        Atom a;
        a.element = ja.at("element").get<std::string>();
        a.features = featurize_element(a.element);
        auto xyz = ja.at("xyz");
        a.coords = {xyz.at(0).get<double>(), xyz.at(1).get<double>(), xyz.at(2).get<double>()};
        g.atoms.push_back(std::move(a));
    }
    for (const auto& jb : j.at("bonds")) {
        int src = jb.at("src").get<int>();
        int dst = jb.at("dst").get<int>();
        int order = jb.at("order").get<int>();
        auto feat = featurize_bond_order(order);
        g.bonds.push_back({src, dst, order, feat});
        g.bonds.push_back({dst, src, order, feat});
    }
    validate_graph(g);
    return g;
}

}  // namespace chienn
