// Timing comparison of the serial and OpenMP layer forward passes on random
// graphs of growing size. The two implementations must agree bitwise; the
// benchmark asserts that while measuring.
#include <chrono>
#include <cstdio>
#include <cstdlib>

#include "chienn/datagen.hpp"
#include "chienn/edgegraph.hpp"
#include "chienn/model.hpp"
#include "chienn/ordering.hpp"
#include "chienn/rng.hpp"

using namespace chienn;
using clock_type = std::chrono::steady_clock;

namespace {

double time_ms(const std::function<void()>& fn, int reps) {
    auto t0 = clock_type::now();
    for (int i = 0; i < reps; ++i) fn();
    auto t1 = clock_type::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

// random tree with exactly n atoms, so every row benchmarks a known size
MolecularGraph sized_molecule(int n, std::mt19937_64& rng) {
    MolecularGraph g;
    const std::vector<std::string> elems = {"C", "N", "O", "H", "F", "S"};
    for (int i = 0; i < n; ++i) {
        Atom a;
        std::uniform_int_distribution<std::size_t> pick(0, elems.size() - 1);
        a.element = elems[pick(rng)];
        a.features = featurize_element(a.element);
        a.coords = {uniform(rng, -8, 8), uniform(rng, -8, 8), uniform(rng, -8, 8)};
        g.atoms.push_back(a);
    }
    for (int i = 1; i < n; ++i) {
        std::uniform_int_distribution<int> parent(0, i - 1);
        int p = parent(rng);
        auto feat = featurize_bond_order(1);
        g.bonds.push_back({p, i, 1, feat});
        g.bonds.push_back({i, p, 1, feat});
    }
    return g;
}

}  // namespace

int main(int argc, char** argv) {
    std::uint64_t seed = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 42;
    int reps = argc > 2 ? std::atoi(argv[2]) : 20;

    std::printf("%8s %8s %12s %12s %8s\n", "atoms", "nodes", "serial_ms", "openmp_ms", "speedup");
    for (int atoms : {10, 20, 40, 80, 160}) {
        auto rng = make_rng(seed, "bench-" + std::to_string(atoms));
        MolecularGraph g = sized_molecule(atoms, rng);
        EdgeGraph eg = to_edge_graph(g);
        auto orders = all_orders(eg);
        StackConfig cfg;
        cfg.H = 64;
        cfg.H_mid = 64;
        cfg.k = 3;
        cfg.num_layers = 1;
        LayerStack s = make_stack(cfg, rng);
        std::vector<State> states(eg.num_nodes(), State(64));
        for (auto& st : states)
            for (double& v : st) v = normal(rng);

        std::vector<State> out_serial, out_parallel;
        double ms_s = time_ms([&] { out_serial = layer_forward_serial(s.layers[0], eg, orders, states); },
                              reps);
        double ms_p = time_ms(
            [&] { out_parallel = layer_forward_parallel(s.layers[0], eg, orders, states); }, reps);
        for (std::size_t n = 0; n < out_serial.size(); ++n)
            if (out_serial[n] != out_parallel[n]) {
                std::fprintf(stderr, "mismatch at node %zu\n", n);
                return 1;
            }
        std::printf("%8d %8d %12.3f %12.3f %8.2f\n", g.num_atoms(), eg.num_nodes(), ms_s, ms_p,
                    ms_s / ms_p);
    }
    return 0;
}
