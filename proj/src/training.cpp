#include "cf/training.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>

#include "cf/corpus.hpp"
#include "cf/errors.hpp"
#include "cf/parallel.hpp"

namespace cf {

void TrainConfig::validate() const {
    loss.validate();
    model.validate();
    if (epochs < 1) throw ConfigError("train.epochs: must be >= 1");
    if (batch < 1) throw ConfigError("train.batch: must be >= 1");
    if (sampling && sampling_ratio <= 0)
        throw ConfigError("train.sampling_ratio: must be > 0");
    if (eval_threads < 1) throw ConfigError("train.eval_threads: must be >= 1");
}

EpochEval evaluate_epoch(const ModelParams& params, const std::vector<Instance>& dev,
                         int n_threads) {
    if (dev.empty()) throw ContractError("evaluate_epoch: empty dev set");
    std::vector<int> preds = predict_labels(params, dev, n_threads);
    EpochEval ev;
    ev.confusion = ConfusionMatrix(params.cfg.num_labels);
    std::vector<int> gold(dev.size());
    for (size_t i = 0; i < dev.size(); ++i) {
        gold[i] = dev[i].gold;
        ev.confusion.add(dev[i].gold, preds[i]);
    }
    ev.scores = micro_scores(gold, preds);
    return ev;
}

TrainResult train(const std::vector<Instance>& train_set,
                  const std::vector<Instance>& dev_set, const TrainConfig& config) {
    config.validate();
    if (train_set.empty()) throw ContractError("train: empty training set");
    if (dev_set.empty()) throw ContractError("train: empty dev set");

    ModelConfig model_cfg = config.model;
    model_cfg.seed = derive_seed(config.seed, "init");
    ModelParams params = ModelParams::init(model_cfg);
    OptimizerState opt = OptimizerState::init(params);
    SeededRng sample_rng(derive_seed(config.seed, "sample"));
    SeededRng shuffle_rng(derive_seed(config.seed, "shuffle"));

    // Epoch 1 warm start: all-zero costs (pure CE). The refresh is computed
    // for every loss mode — it reuses the dev pass the scorer already needs,
    // and keeps reports mode-independent where losses coincide.
    CostMatrix costs(model_cfg.num_labels);
    const bool use_costs =
        config.loss.mode == LossMode::kCsPop && config.loss.lambda > 0;

    TrainResult result;
    result.best_params = params;
    result.report.best_epoch = 0;
    result.report.best_f1 = -1.0;

    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        const std::vector<Instance>* working = &train_set;
        std::vector<Instance> sampled;
        if (config.sampling) {
            sampled = undersample_nil(train_set, config.sampling_ratio, sample_rng);
            working = &sampled;
        }

        std::vector<size_t> order(working->size());
        std::iota(order.begin(), order.end(), size_t{0});
        shuffle_rng.shuffle(order);

        double loss_sum = 0.0;
        size_t seen = 0;
        const size_t n = order.size();
        int batch_index = 0;
        for (size_t start = 0; start < n; start += config.batch, ++batch_index) {
            const size_t stop = std::min(n, start + config.batch);
            Gradients grads = Gradients::zeros_like(params);
            for (size_t i = start; i < stop; ++i) {
                const Instance& inst = (*working)[order[i]];
                ForwardCache cache = forward(params, inst);
                Vec cost_row;
                const Vec* row_ptr = nullptr;
                if (use_costs) {
                    cost_row = costs.row(inst.gold);
                    row_ptr = &cost_row;
                }
                LossResult lr = total_loss(cache.logits, cache.probs, inst.gold,
                                           config.loss, row_ptr);
                if (!std::isfinite(lr.loss))
                    throw DivergenceError("non-finite loss at epoch " +
                                          std::to_string(epoch) + " batch " +
                                          std::to_string(batch_index));
                loss_sum += lr.loss;
                grads.add(backward(params, cache, lr.dlogits));
            }
            grads.scale(1.0 / static_cast<double>(stop - start));
            try {
                apply_update(params, grads, opt);
            } catch (const DivergenceError& e) {
                throw DivergenceError(std::string(e.what()) + " at epoch " +
                                      std::to_string(epoch) + " batch " +
                                      std::to_string(batch_index));
            }
            seen += stop - start;
        }

        EpochEval ev = evaluate_epoch(params, dev_set, config.eval_threads);
        CostMatrix next_costs = population_costs(
            config.stats_on_train
                ? evaluate_epoch(params, train_set, config.eval_threads).confusion
                : ev.confusion);

        EpochRow row;
        row.epoch = epoch;
        row.train_loss = seen > 0 ? loss_sum / static_cast<double>(seen) : 0.0;
        row.dev = ev.scores;
        row.cost_used = to_hex(costs.content_hash());
        row.cost_produced = to_hex(next_costs.content_hash());
        result.report.epochs.push_back(row);

        if (ev.scores.f1 > result.report.best_f1) {
            result.report.best_f1 = ev.scores.f1;
            result.report.best_epoch = epoch;
            result.best_params = params;
        }

        if (config.verbose)
            std::printf("epoch %d  loss %.6f  dev_f1 %.4f\n", epoch, row.train_loss,
                        ev.scores.f1);

        costs = next_costs;
    }
    return result;
}

}  // namespace cf
