#include "chienn/model.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace chienn {

namespace {

Tensor init_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
    double bound = 1.0 / std::sqrt(static_cast<double>(cols));
    Tensor t = Tensor::mat(rows, cols);
    std::uniform_real_distribution<double> d(-bound, bound);
    for (double& v : t.data) v = d(rng);
    return t;
}

Tensor init_bias(std::size_t rows, std::size_t fan_in, std::mt19937_64& rng) {
    double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    Tensor t = Tensor::vec(rows);
    std::uniform_real_distribution<double> d(-bound, bound);
    for (double& v : t.data) v = d(rng);
    return t;
}

void plain_linear_into(const Tensor& W, const Tensor& b, const double* x, State& out) {
    std::size_t m = W.rows(), n = W.cols();
    out.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double* row = &W.data[i * n];
        double s = b[i];
        for (std::size_t j = 0; j < n; ++j) s += row[j] * x[j];
        out[i] = s;
    }
}

void plain_elu(State& v) {
    for (double& x : v) x = x >= 0 ? x : std::expm1(x);
}

void apply_layer_norm(const ChiENNParams& p, State& v) {
    constexpr double eps = 1e-5;
    std::size_t n = v.size();
    double mu = 0;
    for (double x : v) mu += x;
    mu /= n;
    double var = 0;
    for (double x : v) var += (x - mu) * (x - mu);
    var /= n;
    double inv = 1.0 / std::sqrt(var + eps);
    for (std::size_t i = 0; i < n; ++i) v[i] = p.ln_gain[i] * (v[i] - mu) * inv + p.ln_bias[i];
}

}  // namespace

LayerStack make_stack(StackConfig cfg, std::mt19937_64& rng) {
    if (cfg.k < 1) throw std::invalid_argument("make_stack: k must be >= 1");
    if (cfg.feat_dim <= 0) cfg.feat_dim = kBondFeatureDim + 2 * kNodeFeatureDim;
    LayerStack s;
    s.cfg = cfg;
    s.embed_W = init_matrix(cfg.H, cfg.feat_dim, rng);
    s.embed_b = init_bias(cfg.H, cfg.feat_dim, rng);
    for (int l = 0; l < cfg.num_layers; ++l) {
        ChiENNParams p;
        p.k = cfg.k;
        p.H = cfg.H;
        p.H_mid = cfg.H_mid;
        p.W1 = init_matrix(cfg.H, cfg.H, rng);
        p.b1 = init_bias(cfg.H, cfg.H, rng);
        p.W2 = init_matrix(cfg.H, cfg.H, rng);
        p.b2 = init_bias(cfg.H, cfg.H, rng);
        p.W3 = init_matrix(cfg.H, cfg.H_mid, rng);
        p.b3 = init_bias(cfg.H, cfg.H_mid, rng);
        p.W4 = init_matrix(cfg.H_mid, static_cast<std::size_t>(cfg.k) * cfg.H, rng);
        p.b4 = init_bias(cfg.H_mid, static_cast<std::size_t>(cfg.k) * cfg.H, rng);
        if (cfg.layernorm) {
            p.ln_gain = Tensor::vec(cfg.H, 1.0);
            p.ln_bias = Tensor::vec(cfg.H, 0.0);
        }
        s.layers.push_back(std::move(p));
    }
    s.head_W1 = init_matrix(cfg.H_mid, cfg.H, rng);
    s.head_b1 = init_bias(cfg.H_mid, cfg.H, rng);
    s.head_W2 = init_matrix(cfg.out_dim, cfg.H_mid, rng);
    s.head_b2 = init_bias(cfg.out_dim, cfg.H_mid, rng);
    return s;
}

std::vector<Tensor*> stack_params(LayerStack& s) {
    std::vector<Tensor*> out{&s.embed_W, &s.embed_b};
    for (auto& p : s.layers) {
        out.push_back(&p.W1);
        out.push_back(&p.b1);
        out.push_back(&p.W2);
        out.push_back(&p.b2);
        out.push_back(&p.W3);
        out.push_back(&p.b3);
        out.push_back(&p.W4);
        out.push_back(&p.b4);
        if (s.cfg.layernorm) {
            out.push_back(&p.ln_gain);
            out.push_back(&p.ln_bias);
        }
    }
    out.push_back(&s.head_W1);
    out.push_back(&s.head_b1);
    out.push_back(&s.head_W2);
    out.push_back(&s.head_b2);
    return out;
}

std::vector<const Tensor*> stack_params(const LayerStack& s) {
    auto mut = stack_params(const_cast<LayerStack&>(s));
    return {mut.begin(), mut.end()};
}

std::vector<std::vector<int>> cyclic_windows(int d, int k) {
    std::vector<std::vector<int>> windows;
    if (d == 0) return windows;
    for (int p = 0; p < d; ++p) {
        std::vector<int> w(k, -1);
        for (int i = 0; i < std::min(d, k); ++i) w[i] = (p + i) % d;
        windows.push_back(std::move(w));
    }
    return windows;
}

std::vector<State> zero_pad_order(const std::vector<State>& order, int k, int H) {
    std::vector<State> out = order;
    while (static_cast<int>(out.size()) < k) out.push_back(State(H, 0.0));
    return out;
}

State psi_k(const ChiENNParams& p, const std::vector<const State*>& window) {
    if (static_cast<int>(window.size()) != p.k)
        throw std::invalid_argument("psi_k: window length must equal k");
    std::vector<double> cat(static_cast<std::size_t>(p.k) * p.H, 0.0);
    for (int i = 0; i < p.k; ++i)
        if (window[i])
            std::copy(window[i]->begin(), window[i]->end(), cat.begin() + i * p.H);
    State mid;
    plain_linear_into(p.W4, p.b4, cat.data(), mid);
    plain_elu(mid);
    State out;
    plain_linear_into(p.W3, p.b3, mid.data(), out);
    return out;
}

State chienn_update(const ChiENNParams& p, const State& x_jk, const State& x_kj,
                    const std::vector<const State*>& order_states) {
    if (static_cast<int>(x_jk.size()) != p.H || static_cast<int>(x_kj.size()) != p.H)
        throw std::invalid_argument("chienn_update: state dimension mismatch");
    State out;
    plain_linear_into(p.W1, p.b1, x_jk.data(), out);
    State term2;
    plain_linear_into(p.W2, p.b2, x_kj.data(), term2);
    for (int i = 0; i < p.H; ++i) out[i] += term2[i];

    int d = static_cast<int>(order_states.size());
    for (const auto& w : cyclic_windows(d, p.k)) {
        std::vector<const State*> win(p.k);
        for (int i = 0; i < p.k; ++i) win[i] = w[i] >= 0 ? order_states[w[i]] : nullptr;
        State msg = psi_k(p, win);
        for (int i = 0; i < p.H; ++i) out[i] += msg[i];
    }
    return out;
}

namespace {

State update_node(const ChiENNParams& p, const EdgeGraph& eg,
                  const std::vector<NeighborOrder>& orders, const std::vector<State>& states,
                  int n, bool residual) {
    std::vector<const State*> order_states;
    order_states.reserve(orders[n].sequence.size());
    for (int nb : orders[n].sequence) order_states.push_back(&states[nb]);
    State out = chienn_update(p, states[n], states[eg.parallel[n]], order_states);
    if (!p.ln_gain.data.empty()) apply_layer_norm(p, out);
    if (residual)
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += states[n][i];
    return out;
}

}  // namespace

std::vector<State> layer_forward_serial(const ChiENNParams& p, const EdgeGraph& eg,
                                        const std::vector<NeighborOrder>& orders,
                                        const std::vector<State>& states) {
    if (orders.size() != states.size() || static_cast<int>(states.size()) != eg.num_nodes())
        throw std::invalid_argument("layer_forward: missing order or state for a node");
    std::vector<State> out(states.size());
    for (int n = 0; n < eg.num_nodes(); ++n) out[n] = update_node(p, eg, orders, states, n, false);
    return out;
}

std::vector<State> layer_forward_parallel(const ChiENNParams& p, const EdgeGraph& eg,
                                          const std::vector<NeighborOrder>& orders,
                                          const std::vector<State>& states) {
    if (orders.size() != states.size() || static_cast<int>(states.size()) != eg.num_nodes())
        throw std::invalid_argument("layer_forward: missing order or state for a node");
    std::vector<State> out(states.size());
#pragma omp parallel for schedule(static)
    for (int n = 0; n < eg.num_nodes(); ++n) out[n] = update_node(p, eg, orders, states, n, false);
    return out;
}

std::vector<State> embed_init(const LayerStack& s, const MolecularGraph& g, const EdgeGraph& eg) {
    std::vector<State> states(eg.num_nodes());
    std::vector<double> in(s.cfg.feat_dim);
    for (int n = 0; n < eg.num_nodes(); ++n) {
        const EdgeNode& node = eg.nodes[n];
        const auto& e = node.feature;
        const auto& xi = g.atoms[node.src].features;
        const auto& xj = g.atoms[node.dst].features;
        if (e.size() + xi.size() + xj.size() != static_cast<std::size_t>(s.cfg.feat_dim))
            throw std::invalid_argument("embed_init: feature dimension mismatch");
        std::size_t off = 0;
        std::copy(e.begin(), e.end(), in.begin() + off);
        off += e.size();
        std::copy(xi.begin(), xi.end(), in.begin() + off);
        off += xi.size();
        std::copy(xj.begin(), xj.end(), in.begin() + off);
        plain_linear_into(s.embed_W, s.embed_b, in.data(), states[n]);
    }
    return states;
}

State readout(const LayerStack& s, const std::vector<State>& states) {
    if (states.empty()) throw std::invalid_argument("readout: empty graph");
    State pooled(s.cfg.H, 0.0);
    for (const auto& st : states)
        for (int i = 0; i < s.cfg.H; ++i) pooled[i] += st[i];
    for (double& v : pooled) v /= static_cast<double>(states.size());
    State mid;
    plain_linear_into(s.head_W1, s.head_b1, pooled.data(), mid);
    plain_elu(mid);
    State out;
    plain_linear_into(s.head_W2, s.head_b2, mid.data(), out);
    return out;
}

State model_forward(const LayerStack& s, const MolecularGraph& g, const EdgeGraph& eg,
                    const std::vector<NeighborOrder>& orders, bool parallel) {
    std::vector<State> states = embed_init(s, g, eg);
    for (const auto& layer : s.layers) {
        std::vector<State> next = parallel ? layer_forward_parallel(layer, eg, orders, states)
                                           : layer_forward_serial(layer, eg, orders, states);
        if (s.cfg.residual)
            for (std::size_t n = 0; n < next.size(); ++n)
                for (int i = 0; i < s.cfg.H; ++i) next[n][i] += states[n][i];
        states = std::move(next);
    }
    return readout(s, states);
}

TapeParams register_params(ad::Tape& tape, const LayerStack& s) {
    TapeParams tp;
    for (const Tensor* t : stack_params(s)) tp.vars.push_back(tape.leaf(*t));
    return tp;
}

ad::Tape::Var model_forward_tape(ad::Tape& tape, const LayerStack& s, const TapeParams& tp,
                                 const MolecularGraph& g, const EdgeGraph& eg,
                                 const std::vector<NeighborOrder>& orders) {
    using Var = ad::Tape::Var;
    std::size_t idx = 0;
    auto next = [&]() { return tp.vars.at(idx++); };
    Var embed_W = next(), embed_b = next();
    struct LVars {
        Var W1, b1, W2, b2, W3, b3, W4, b4, ln_gain = -1, ln_bias = -1;
    };
    std::vector<LVars> lvars;
    for (std::size_t l = 0; l < s.layers.size(); ++l) {
        LVars v;
        v.W1 = next();
        v.b1 = next();
        v.W2 = next();
        v.b2 = next();
        v.W3 = next();
        v.b3 = next();
        v.W4 = next();
        v.b4 = next();
        if (s.cfg.layernorm) {
            v.ln_gain = next();
            v.ln_bias = next();
        }
        lvars.push_back(v);
    }
    Var head_W1 = next(), head_b1 = next(), head_W2 = next(), head_b2 = next();

    Var zero_state = tape.leaf(Tensor::vec(s.cfg.H));

    // embedding
    std::vector<Var> states(eg.num_nodes());
    for (int n = 0; n < eg.num_nodes(); ++n) {
        const EdgeNode& node = eg.nodes[n];
        std::vector<double> in;
        in.reserve(s.cfg.feat_dim);
        in.insert(in.end(), node.feature.begin(), node.feature.end());
        const auto& xi = g.atoms[node.src].features;
        const auto& xj = g.atoms[node.dst].features;
        in.insert(in.end(), xi.begin(), xi.end());
        in.insert(in.end(), xj.begin(), xj.end());
        Var input = tape.leaf(Tensor({in.size()}, in));
        states[n] = tape.linear(embed_W, embed_b, input);
    }

    for (std::size_t l = 0; l < s.layers.size(); ++l) {
        const LVars& v = lvars[l];
        std::vector<Var> next_states(eg.num_nodes());
        for (int n = 0; n < eg.num_nodes(); ++n) {
            std::vector<Var> terms;
            terms.push_back(tape.linear(v.W1, v.b1, states[n]));
            terms.push_back(tape.linear(v.W2, v.b2, states[eg.parallel[n]]));
            int d = static_cast<int>(orders[n].sequence.size());
            for (const auto& w : cyclic_windows(d, s.cfg.k)) {
                std::vector<Var> win(s.cfg.k);
                for (int i = 0; i < s.cfg.k; ++i)
                    win[i] = w[i] >= 0 ? states[orders[n].sequence[w[i]]] : zero_state;
                Var cat = tape.concat(win);
                Var msg = tape.linear(v.W3, v.b3, tape.elu(tape.linear(v.W4, v.b4, cat)));
                terms.push_back(msg);
            }
            Var out = tape.sum(terms);
            if (s.cfg.layernorm) out = tape.layer_norm(out, v.ln_gain, v.ln_bias);
            if (s.cfg.residual) out = tape.add(out, states[n]);
            next_states[n] = out;
        }
        states = std::move(next_states);
    }

    Var pooled = tape.mean(states);
    Var mid = tape.elu(tape.linear(head_W1, head_b1, pooled));
    return tape.linear(head_W2, head_b2, mid);
}

State vanilla_aggregate(const State& x, const std::vector<State>& neighbors, const MapFn& phi,
                        const MapFn& rho, int sum_dim) {
    State acc(sum_dim, 0.0);
    for (const auto& nb : neighbors) {
        State m = phi(x, nb);
        if (static_cast<int>(m.size()) != sum_dim)
            throw std::invalid_argument("vanilla_aggregate: phi output dimension mismatch");
        for (int i = 0; i < sum_dim; ++i) acc[i] += m[i];
    }
    return rho(x, acc);
}

State shift_invariant_aggregate(const TupleFn& g, const std::vector<State>& order) {
    if (order.empty()) throw std::invalid_argument("shift_invariant_aggregate: empty order");
    std::size_t d = order.size();
    State acc;
    for (std::size_t p = 0; p < d; ++p) {
        std::vector<State> shifted(d);
        for (std::size_t i = 0; i < d; ++i) shifted[i] = order[(i + p) % d];
        State term = g(shifted);
        if (acc.empty()) acc.assign(term.size(), 0.0);
        if (term.size() != acc.size())
            throw std::invalid_argument("shift_invariant_aggregate: g output dimension varies");
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += term[i];
    }
    return acc;
}

namespace {

nlohmann::json tensor_to_json(const Tensor& t) {
    return {{"shape", t.shape}, {"data", t.data}};
}

Tensor tensor_from_json(const nlohmann::json& j) {
    return Tensor(j.at("shape").get<std::vector<std::size_t>>(),
                  j.at("data").get<std::vector<double>>());
}

}  // namespace

std::string stack_to_json(const LayerStack& s) {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["k"] = s.cfg.k;
    j["H"] = s.cfg.H;
    j["H_mid"] = s.cfg.H_mid;
    j["out_dim"] = s.cfg.out_dim;
    j["feat_dim"] = s.cfg.feat_dim;
    j["residual"] = s.cfg.residual;
    j["layernorm"] = s.cfg.layernorm;
    j["embed"] = {{"W", tensor_to_json(s.embed_W)}, {"b", tensor_to_json(s.embed_b)}};
    j["layers"] = nlohmann::json::array();
    for (const auto& p : s.layers) {
        nlohmann::json jl = {{"W1", tensor_to_json(p.W1)}, {"b1", tensor_to_json(p.b1)},
                             {"W2", tensor_to_json(p.W2)}, {"b2", tensor_to_json(p.b2)},
                             {"W3", tensor_to_json(p.W3)}, {"b3", tensor_to_json(p.b3)},
                             {"W4", tensor_to_json(p.W4)}, {"b4", tensor_to_json(p.b4)}};
        if (s.cfg.layernorm) {
            jl["ln_gain"] = tensor_to_json(p.ln_gain);
            jl["ln_bias"] = tensor_to_json(p.ln_bias);
        }
        j["layers"].push_back(jl);
    }
    j["head"] = {{"W1", tensor_to_json(s.head_W1)},
                 {"b1", tensor_to_json(s.head_b1)},
                 {"W2", tensor_to_json(s.head_W2)},
                 {"b2", tensor_to_json(s.head_b2)}};
    return j.dump();
}

LayerStack stack_from_json(const std::string& json_text) {
    nlohmann::json j = nlohmann::json::parse(json_text);
    int version = j.at("schema_version").get<int>();
    if (version != 1)
        throw std::runtime_error("checkpoint schema version mismatch: expected 1, got " +
                                 std::to_string(version));
    LayerStack s;
    s.cfg.k = j.at("k").get<int>();
    s.cfg.H = j.at("H").get<int>();
    s.cfg.H_mid = j.at("H_mid").get<int>();
    s.cfg.out_dim = j.at("out_dim").get<int>();
    s.cfg.feat_dim = j.at("feat_dim").get<int>();
    s.cfg.residual = j.at("residual").get<bool>();
    s.cfg.layernorm = j.at("layernorm").get<bool>();
    s.cfg.num_layers = static_cast<int>(j.at("layers").size());
    s.embed_W = tensor_from_json(j.at("embed").at("W"));
    s.embed_b = tensor_from_json(j.at("embed").at("b"));
    for (const auto& jl : j.at("layers")) {
        ChiENNParams p;
        p.k = s.cfg.k;
        p.H = s.cfg.H;
        p.H_mid = s.cfg.H_mid;
        p.W1 = tensor_from_json(jl.at("W1"));
        p.b1 = tensor_from_json(jl.at("b1"));
        p.W2 = tensor_from_json(jl.at("W2"));
        p.b2 = tensor_from_json(jl.at("b2"));
        p.W3 = tensor_from_json(jl.at("W3"));
        p.b3 = tensor_from_json(jl.at("b3"));
        p.W4 = tensor_from_json(jl.at("W4"));
        p.b4 = tensor_from_json(jl.at("b4"));
        if (s.cfg.layernorm) {
            p.ln_gain = tensor_from_json(jl.at("ln_gain"));
            p.ln_bias = tensor_from_json(jl.at("ln_bias"));
        }
        s.layers.push_back(std::move(p));
    }
    s.head_W1 = tensor_from_json(j.at("head").at("W1"));
    s.head_b1 = tensor_from_json(j.at("head").at("b1"));
    s.head_W2 = tensor_from_json(j.at("head").at("W2"));
    s.head_b2 = tensor_from_json(j.at("head").at("b2"));
    return s;
}

void save_stack(const LayerStack& s, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open checkpoint file for writing: " + path);
    out << stack_to_json(s);
}

LayerStack load_stack(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open checkpoint file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return stack_from_json(ss.str());
}

}  // namespace chienn
