#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "chienn/autodiff.hpp"
#include "chienn/edgegraph.hpp"
#include "chienn/ordering.hpp"

namespace chienn {

using ad::Tensor;

// Parameters of one order-sensitive layer:
//   x'_jk = W1 x_jk + W2 x_kj + sum_p psi_k(window_p)
//   psi_k(w) = W3 elu(W4 concat(w)) (+ biases)
struct ChiENNParams {
    Tensor W1, b1;  // H x H
    Tensor W2, b2;  // H x H
    Tensor W3, b3;  // H x H_mid
    Tensor W4, b4;  // H_mid x (k*H)
    Tensor ln_gain, ln_bias;  // length H, used only when layernorm is on
    int k = 3;
    int H = 64;
    int H_mid = 64;
};

struct StackConfig {
    int k = 3;
    int H = 64;
    int H_mid = 64;
    int num_layers = 3;
    int out_dim = 2;       // task classes, or 1 for regression
    int feat_dim = 0;      // embed input dim M + 2N; filled by make_stack
    bool residual = false;
    bool layernorm = false;
};

// Stack: affine embedding into H, ChiENN layers, mean-pool + 2-layer head.
struct LayerStack {
    StackConfig cfg;
    Tensor embed_W, embed_b;
    std::vector<ChiENNParams> layers;
    Tensor head_W1, head_b1;  // H_mid x H
    Tensor head_W2, head_b2;  // out_dim x H_mid
};

// uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) init from the given rng.
LayerStack make_stack(StackConfig cfg, std::mt19937_64& rng);

// Canonical flat view of all trainable tensors (order is part of the
// checkpoint/optimizer contract).
std::vector<Tensor*> stack_params(LayerStack& s);
std::vector<const Tensor*> stack_params(const LayerStack& s);

// --- plain (non-tape) forward ---

using State = std::vector<double>;

// Window index lists for a cyclic order of length d and arity k: d windows,
// each of length k; -1 marks a zero-padding slot (only when d < k).
std::vector<std::vector<int>> cyclic_windows(int d, int k);

// Pads an order's states with zero vectors up to length k (identity for d >= k).
std::vector<State> zero_pad_order(const std::vector<State>& order, int k, int H);

// Two-layer MLP on the concatenation of exactly k H-vectors.
State psi_k(const ChiENNParams& p, const std::vector<const State*>& window);

// Single-node update per the layer equation. `order_states` follows the
// node's cyclic neighbor order.
State chienn_update(const ChiENNParams& p, const State& x_jk, const State& x_kj,
                    const std::vector<const State*>& order_states);

// Jacobi-style layer application: all new states computed from the old
// snapshot. The parallel variant distributes nodes across OpenMP threads and
// is bitwise-identical to the serial reference.
std::vector<State> layer_forward_serial(const ChiENNParams& p, const EdgeGraph& eg,
                                        const std::vector<NeighborOrder>& orders,
                                        const std::vector<State>& states);
std::vector<State> layer_forward_parallel(const ChiENNParams& p, const EdgeGraph& eg,
                                          const std::vector<NeighborOrder>& orders,
                                          const std::vector<State>& states);

// Initial hidden states: affine embed of (e_ij | x_i | x_j).
std::vector<State> embed_init(const LayerStack& s, const MolecularGraph& g, const EdgeGraph& eg);

// Mean-pool over node states followed by the 2-layer head.
State readout(const LayerStack& s, const std::vector<State>& states);

// Full forward pass (embedding, layers, readout).
State model_forward(const LayerStack& s, const MolecularGraph& g, const EdgeGraph& eg,
                    const std::vector<NeighborOrder>& orders, bool parallel = false);

// --- tape forward for training ---

// Parameter leaves registered on a tape, in stack_params order.
struct TapeParams {
    std::vector<ad::Tape::Var> vars;
};

TapeParams register_params(ad::Tape& tape, const LayerStack& s);

// Builds the forward computation on the tape and returns the output Var.
ad::Tape::Var model_forward_tape(ad::Tape& tape, const LayerStack& s, const TapeParams& tp,
                                 const MolecularGraph& g, const EdgeGraph& eg,
                                 const std::vector<NeighborOrder>& orders);

// --- generic aggregation family (property-test surface) ---

using MapFn = std::function<State(const State&, const State&)>;        // phi(x; x_i)
using TupleFn = std::function<State(const std::vector<State>&)>;       // g(x_0..x_{d-1})

// rho(x; sum_i phi(x; x_i)); empty neighbor set feeds a zero vector to rho.
State vanilla_aggregate(const State& x, const std::vector<State>& neighbors, const MapFn& phi,
                        const MapFn& rho, int sum_dim);

// sum_p g(x_{0+p}, ..., x_{d-1+p}), indices mod d.
State shift_invariant_aggregate(const TupleFn& g, const std::vector<State>& order);

// --- checkpoint serialization ---

std::string stack_to_json(const LayerStack& s);
LayerStack stack_from_json(const std::string& json_text);
void save_stack(const LayerStack& s, const std::string& path);
LayerStack load_stack(const std::string& path);

}  // namespace chienn
