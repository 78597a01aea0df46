#include "chienn/train.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <unordered_map>

#include "json.hpp"

#include "chienn/rng.hpp"

namespace chienn {

void TrainConfig::validate() const {
    if (warmup_epochs >= epochs)
        throw std::invalid_argument("TrainConfig: warmup_epochs must be < epochs");
    if (base_lr < 0) throw std::invalid_argument("TrainConfig: base_lr must be >= 0");
    if (clip_norm <= 0) throw std::invalid_argument("TrainConfig: clip_norm must be > 0");
    if (batch_size < 1) throw std::invalid_argument("TrainConfig: batch_size must be >= 1");
}

double cosine_warmup_lr(int epoch, const TrainConfig& cfg) {
    cfg.validate();
    if (epoch < 0 || epoch >= cfg.epochs)
        throw std::invalid_argument("cosine_warmup_lr: epoch out of range");
    if (epoch < cfg.warmup_epochs)
        return cfg.base_lr * static_cast<double>(epoch) / cfg.warmup_epochs;
    double t = static_cast<double>(epoch - cfg.warmup_epochs) /
               static_cast<double>(cfg.epochs - cfg.warmup_epochs);
    return cfg.base_lr * 0.5 * (1.0 + std::cos(std::numbers::pi * t));
}

AdamState AdamState::init(const std::vector<Tensor*>& params) {
    AdamState s;
    for (const Tensor* p : params) {
        s.m.push_back(Tensor(p->shape, std::vector<double>(p->size(), 0.0)));
        s.v.push_back(Tensor(p->shape, std::vector<double>(p->size(), 0.0)));
    }
    return s;
}

void adam_step(std::vector<Tensor*>& params, const std::vector<Tensor>& grads, AdamState& state,
               double lr) {
    if (params.size() != grads.size() || params.size() != state.m.size())
        throw std::invalid_argument("adam_step: parameter/gradient/state count mismatch");
    ++state.step;
    double bc1 = 1.0 - std::pow(state.beta1, state.step);
    double bc2 = 1.0 - std::pow(state.beta2, state.step);
    for (std::size_t p = 0; p < params.size(); ++p) {
        if (params[p]->size() != grads[p].size())
            throw std::invalid_argument("adam_step: gradient shape mismatch");
        for (std::size_t i = 0; i < grads[p].size(); ++i) {
            double g = grads[p][i];
            if (!std::isfinite(g)) throw std::runtime_error("adam_step: non-finite gradient");
            double& m = state.m[p][i];
            double& v = state.v[p][i];
            m = state.beta1 * m + (1 - state.beta1) * g;
            v = state.beta2 * v + (1 - state.beta2) * g * g;
            double mhat = m / bc1;
            double vhat = v / bc2;
            params[p]->data[i] -= lr * mhat / (std::sqrt(vhat) + state.eps);
        }
    }
}

void clip_grad_norm(std::vector<Tensor>& grads, double max_norm) {
    if (max_norm <= 0) throw std::invalid_argument("clip_grad_norm: max_norm must be > 0");
    double sq = 0;
    for (const auto& g : grads)
        for (double x : g.data) sq += x * x;
    double n = std::sqrt(sq);
    if (n <= max_norm) return;
    double s = max_norm / n;
    for (auto& g : grads)
        for (double& x : g.data) x *= s;
}

double cross_entropy(const std::vector<double>& logits, int label) {
    if (label < 0 || label >= static_cast<int>(logits.size()))
        throw std::invalid_argument("cross_entropy: label out of range");
    double zmax = *std::max_element(logits.begin(), logits.end());
    double lse = 0;
    for (double z : logits) lse += std::exp(z - zmax);
    return zmax + std::log(lse) - logits[label];
}

double l1_loss(const std::vector<double>& pred, const std::vector<double>& target) {
    if (pred.size() != target.size()) throw std::invalid_argument("l1_loss: size mismatch");
    double s = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) s += std::abs(pred[i] - target[i]);
    return s / pred.size();
}

double ranking_accuracy(const std::vector<RankingPair>& pairs, double threshold) {
    if (pairs.empty()) throw std::invalid_argument("ranking_accuracy: empty pair list");
    if (threshold < 0) throw std::invalid_argument("ranking_accuracy: threshold must be >= 0");
    int correct = 0;
    for (const auto& p : pairs) {
        double diff = p.pred_a - p.pred_b;
        if (std::abs(diff) <= threshold) continue;  // indistinguishable -> incorrect
        int predicted_smaller = diff < 0 ? 0 : 1;
        if (predicted_smaller == p.label_smaller) ++correct;
    }
    return static_cast<double>(correct) / pairs.size();
}

DatasetSplit split_dataset(const Dataset& d) {
    DatasetSplit s;
    std::size_t n = d.samples.size();
    std::size_t n_train = n * 7 / 10;
    std::size_t n_valid = n / 10;
    for (std::size_t i = 0; i < n; ++i) {
        if (i < n_train)
            s.train.samples.push_back(d.samples[i]);
        else if (i < n_train + n_valid)
            s.valid.samples.push_back(d.samples[i]);
        else
            s.test.samples.push_back(d.samples[i]);
    }
    return s;
}

namespace {

struct PreparedSample {
    const SyntheticSample* sample;
    EdgeGraph eg;
    std::vector<NeighborOrder> orders;
};

std::vector<PreparedSample> prepare(const Dataset& d) {
    std::vector<PreparedSample> out;
    out.reserve(d.samples.size());
    for (const auto& s : d.samples) {
        PreparedSample p;
        p.sample = &s;
        p.eg = to_edge_graph(s.graph);
        p.orders = all_orders(p.eg);
        out.push_back(std::move(p));
    }
    return out;
}

double eval_prepared(const LayerStack& stack, const std::vector<PreparedSample>& data, Task task,
                     double* loss_out) {
    double loss = 0;
    double metric = 0;
    for (const auto& p : data) {
        State out = model_forward(stack, p.sample->graph, p.eg, p.orders);
        if (task == Task::classification) {
            loss += cross_entropy(out, p.sample->class_label);
            auto top = std::max_element(out.begin(), out.end());
            int pred = static_cast<int>(top - out.begin());
            double second = -1e300;
            for (std::size_t c = 0; c < out.size(); ++c)
                if (static_cast<int>(c) != pred) second = std::max(second, out[c]);
            // A margin at rounding-noise scale is a coin toss, not a decision;
            // score it as chance so degenerate models sit at 0.5 instead of
            // whichever way the noise happens to lean.
            if (*top - second <= 1e-9)
                metric += 1.0 / out.size();
            else
                metric += pred == p.sample->class_label ? 1.0 : 0.0;
        } else {
            loss += l1_loss(out, {p.sample->target});
            metric += std::abs(out[0] - p.sample->target);
        }
    }
    loss /= data.size();
    metric /= data.size();
    if (loss_out) *loss_out = loss;
    return metric;
}

}  // namespace

TrainResult train_model(LayerStack stack, const DatasetSplit& data, const TrainConfig& cfg,
                        std::ostream* metrics_jsonl) {
    cfg.validate();
    if (data.train.samples.empty()) throw std::invalid_argument("train_model: empty train split");

    auto train = prepare(data.train);
    auto valid = prepare(data.valid);
    auto test = prepare(data.test);
    Task inner_task = cfg.task == Task::ranking ? Task::regression : cfg.task;

    std::vector<Tensor*> params = stack_params(stack);
    AdamState adam = AdamState::init(params);
    auto shuffle_rng = make_rng(cfg.seed, "shuffle");

    TrainResult result;
    result.best = stack;
    // best = highest accuracy for classification, lowest MAE otherwise
    double best_valid = inner_task == Task::classification ? -1.0 : 1e300;

    // Mirror mates must share a mini-batch: within a pair the achiral gradient
    // components cancel, leaving the order signal exposed instead of buried in
    // batch-sampling noise. So shuffling happens at pair granularity.
    std::vector<std::vector<std::size_t>> groups;
    {
        std::unordered_map<long, std::size_t> group_of;
        for (std::size_t i = 0; i < train.size(); ++i) {
            long pid = train[i].sample->pair_id;
            if (pid >= 0) {
                auto it = group_of.find(pid);
                if (it != group_of.end()) {
                    groups[it->second].push_back(i);
                    continue;
                }
                group_of[pid] = groups.size();
            }
            groups.push_back({i});
        }
    }
    std::vector<std::size_t> perm;
    perm.reserve(train.size());

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        double lr = cosine_warmup_lr(epoch, cfg);
        std::shuffle(groups.begin(), groups.end(), shuffle_rng);
        perm.clear();
        for (const auto& g : groups) perm.insert(perm.end(), g.begin(), g.end());
        double epoch_loss = 0;
        std::size_t batches = 0;

        for (std::size_t start = 0; start < perm.size(); start += cfg.batch_size) {
            std::size_t end = std::min(perm.size(), start + cfg.batch_size);
            std::vector<Tensor> batch_grads;
            for (Tensor* p : params)
                batch_grads.push_back(Tensor(p->shape, std::vector<double>(p->size(), 0.0)));
            double batch_loss = 0;
            for (std::size_t bi = start; bi < end; ++bi) {
                const PreparedSample& ps = train[perm[bi]];
                ad::Tape tape;
                TapeParams tp = register_params(tape, stack);
                ad::Tape::Var out =
                    model_forward_tape(tape, stack, tp, ps.sample->graph, ps.eg, ps.orders);
                ad::Tape::Var loss =
                    inner_task == Task::classification
                        ? tape.softmax_cross_entropy(out, ps.sample->class_label)
                        : tape.l1_loss(out, {ps.sample->target});
                tape.backward(loss);
                batch_loss += tape.value(loss)[0];
                for (std::size_t p = 0; p < params.size(); ++p) {
                    const auto& g = tape.grad(tp.vars[p]).data;
                    for (std::size_t i = 0; i < g.size(); ++i) batch_grads[p][i] += g[i];
                }
            }
            double inv = 1.0 / static_cast<double>(end - start);
            for (auto& g : batch_grads)
                for (double& x : g.data) x *= inv;
            batch_loss *= inv;
            if (!std::isfinite(batch_loss))
                throw std::runtime_error("train_model: loss diverged (non-finite) at epoch " +
                                         std::to_string(epoch));
            clip_grad_norm(batch_grads, cfg.clip_norm);
            adam_step(params, batch_grads, adam, lr);
            epoch_loss += batch_loss;
            ++batches;
        }
        epoch_loss /= batches;

        double valid_metric = valid.empty() ? 0.0
                                            : eval_prepared(stack, valid, inner_task, nullptr);
        bool improved = valid.empty() ||
                        (inner_task == Task::classification ? valid_metric > best_valid
                                                            : valid_metric < best_valid);
        if (improved) {
            best_valid = valid_metric;
            result.best = stack;
        }

        EpochRecord rec{epoch, lr, epoch_loss, valid_metric};
        result.trace.push_back(rec);
        if (metrics_jsonl) {
            nlohmann::json j = {{"epoch", epoch},
                                {"lr", lr},
                                {"train_loss", epoch_loss},
                                {"valid_metric", valid_metric}};
            (*metrics_jsonl) << j.dump() << "\n";
        }
    }

    if (!test.empty())
        result.test_metric = eval_prepared(result.best, test, inner_task, &result.test_loss);
    return result;
}

EvalResult evaluate(const LayerStack& stack, const Dataset& data, Task task) {
    auto prepared = prepare(data);
    if (prepared.empty()) throw std::invalid_argument("evaluate: empty dataset");
    Task inner = task == Task::ranking ? Task::regression : task;
    EvalResult r;
    r.metric = eval_prepared(stack, prepared, inner, &r.loss);
    return r;
}

double eval_ranking(const LayerStack& stack, const Dataset& data, double threshold) {
    std::map<long, std::vector<std::pair<const SyntheticSample*, double>>> by_pair;
    for (const auto& s : data.samples) {
        EdgeGraph eg = to_edge_graph(s.graph);
        auto orders = all_orders(eg);
        State out = model_forward(stack, s.graph, eg, orders);
        by_pair[s.pair_id].push_back({&s, out[0]});
    }
    std::vector<RankingPair> pairs;
    for (const auto& [id, members] : by_pair) {
        if (members.size() != 2) continue;  // unpaired sample at a split boundary
        RankingPair p;
        p.pred_a = members[0].second;
        p.pred_b = members[1].second;
        p.label_smaller = members[0].first->target < members[1].first->target ? 0 : 1;
        pairs.push_back(p);
    }
    return ranking_accuracy(pairs, threshold);
}

}  // namespace chienn
