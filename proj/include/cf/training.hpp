#pragma once

#include <string>
#include <vector>

#include "cf/estimators.hpp"
#include "cf/evaluation.hpp"
#include "cf/losses.hpp"
#include "cf/model.hpp"
#include "cf/schema.hpp"

namespace cf {

struct TrainConfig {
    LossConfig loss;
    ModelConfig model;
    int epochs = 30;
    int batch = 64;
    bool sampling = false;        // NIL under-sampling baseline
    double sampling_ratio = 5.0;  // NIL instances kept per non-NIL instance
    bool stats_on_train = false;  // cost refresh from train instead of dev
    uint64_t seed = 1;
    int eval_threads = 1;
    bool verbose = true;  // per-epoch progress lines on stdout

    void validate() const;
};

struct EpochRow {
    int epoch = 0;  // 1-based
    double train_loss = 0.0;
    ScoreTriple dev;
    std::string cost_used;      // content hash of the costs this epoch trained with
    std::string cost_produced;  // content hash of the refresh computed at epoch end
};

struct TrainReport {
    std::vector<EpochRow> epochs;
    int best_epoch = 0;  // 1-based
    double best_f1 = 0.0;
};

struct EpochEval {
    ScoreTriple scores;
    ConfusionMatrix confusion;
};

// One dev pass serving both scoring and the cost refresh.
EpochEval evaluate_epoch(const ModelParams& params, const std::vector<Instance>& dev,
                         int n_threads = 1);

struct TrainResult {
    ModelParams best_params;
    TrainReport report;
};

// Per epoch: (re-)undersample if configured, shuffle, batch-mean gradient
// steps, then one dev pass for scores + cost refresh. Epoch 1 trains with
// zero costs; epoch e >= 2 with the refresh produced at the end of e-1.
// Selection: highest dev micro-F1, earliest epoch on ties.
TrainResult train(const std::vector<Instance>& train_set,
                  const std::vector<Instance>& dev_set, const TrainConfig& config);

}  // namespace cf
