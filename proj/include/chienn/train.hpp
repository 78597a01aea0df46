#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "chienn/datagen.hpp"
#include "chienn/model.hpp"

namespace chienn {

enum class Task { classification, regression, ranking };

struct TrainConfig {
    int epochs = 100;
    int warmup_epochs = 10;
    double base_lr = 1e-3;
    double clip_norm = 5.0;
    int batch_size = 32;
    std::uint64_t seed = 0;
    Task task = Task::classification;

    void validate() const;
};

// Linear ramp 0 -> base_lr over warmup_epochs, then cosine decay to 0.
double cosine_warmup_lr(int epoch, const TrainConfig& cfg);

struct AdamState {
    std::vector<Tensor> m, v;
    long step = 0;
    double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;

    static AdamState init(const std::vector<Tensor*>& params);
};

// Standard Adam update in place. Throws on non-finite gradients.
void adam_step(std::vector<Tensor*>& params, const std::vector<Tensor>& grads, AdamState& state,
               double lr);

// Scales all gradients so the global L2 norm does not exceed max_norm.
void clip_grad_norm(std::vector<Tensor>& grads, double max_norm);

// log-sum-exp stabilized softmax cross-entropy.
double cross_entropy(const std::vector<double>& logits, int label);
double l1_loss(const std::vector<double>& pred, const std::vector<double>& target);

struct RankingPair {
    double pred_a = 0, pred_b = 0;
    int label_smaller = 0;  // 0 = a, 1 = b
};

// A pair is correct iff |pred_a - pred_b| > threshold and the ordering
// matches the label. Ties and sub-threshold differences count as incorrect.
double ranking_accuracy(const std::vector<RankingPair>& pairs, double threshold = 0.001);

struct EpochRecord {
    int epoch = 0;
    double lr = 0;
    double train_loss = 0;
    double valid_metric = 0;
};

struct TrainResult {
    LayerStack best;                  // best-validation checkpoint
    std::vector<EpochRecord> trace;
    double test_metric = 0;           // accuracy (classification) or MAE (regression)
    double test_loss = 0;
};

struct Dataset {
    std::vector<SyntheticSample> samples;
};

struct DatasetSplit {
    Dataset train, valid, test;
};

// Deterministic 7:1:2 split in sample order.
DatasetSplit split_dataset(const Dataset& d);

// Full training loop: shuffled mini-batches, per-epoch validation,
// best-checkpoint tracking, test metrics from the best checkpoint.
// Deterministic given (cfg.seed, initial stack).
TrainResult train_model(LayerStack stack, const DatasetSplit& data, const TrainConfig& cfg,
                        std::ostream* metrics_jsonl = nullptr);

struct EvalResult {
    double loss = 0;
    double metric = 0;  // accuracy or MAE
};

EvalResult evaluate(const LayerStack& stack, const Dataset& data, Task task);

// Ranking accuracy of a regression model over the enantiomer pairs of a
// dataset (samples grouped by pair id).
double eval_ranking(const LayerStack& stack, const Dataset& data, double threshold = 0.001);

}  // namespace chienn
