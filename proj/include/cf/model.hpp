#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cf/numerics.hpp"
#include "cf/schema.hpp"

namespace cf {

struct ModelConfig {
    int vocab_size = 0;
    int num_labels = 0;
    int embed_dim = 50;
    int hidden_dim = 100;
    int window = 2;  // half-width; input is (2*window+1) embeddings
    std::string optimizer = "adam";  // "adam" | "sgd"
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_eps = 1e-8;
    double embed_init_scale = 0.01;
    uint64_t seed = 1;

    int input_dim() const { return (2 * window + 1) * embed_dim; }
    void validate() const;
};

// Window classifier parameters: embedding lookup -> concat -> tanh hidden
// layer -> linear -> softmax. Layouts are row-major: embed is V x d,
// w1 is input_dim x h, w2 is h x K.
struct ModelParams {
    ModelConfig cfg;
    Vec embed;
    Vec w1, b1;
    Vec w2, b2;

    // Hidden weights uniform(-a, a) with a = sqrt(6/(fan_in+fan_out)),
    // embeddings uniform(-scale, scale), biases zero. Draw order: embed
    // row-major, then w1, then w2. Deterministic given cfg.seed.
    static ModelParams init(const ModelConfig& cfg);

    size_t param_count() const;
    Vec flatten() const;                 // embed | w1 | b1 | w2 | b2
    void unflatten(const Vec& flat);
};

struct ForwardCache {
    std::vector<int32_t> window;
    Vec input;    // concatenated embeddings
    Vec hidden;   // tanh activations
    Logits logits;
    ProbDist probs;
};

// Pure; throws ContractError if a window id is out of vocabulary range.
ForwardCache forward(const ModelParams& params, const Instance& instance);

// Gradients of a scalar loss. The embedding part is sparse: only rows that
// appear in a window are present, keyed by row id.
struct Gradients {
    std::map<int32_t, Vec> embed_rows;
    Vec w1, b1;
    Vec w2, b2;

    static Gradients zeros_like(const ModelParams& params);
    void add(const Gradients& other);
    void scale(double factor);
};

// Exact analytic gradient w.r.t. every parameter given dLoss/dLogits.
Gradients backward(const ModelParams& params, const ForwardCache& cache,
                   const Vec& dloss_dlogits);

// Adam moments are kept for every block; embedding moments are updated only
// for rows present in the gradient, so never-touched rows stay at their
// initial values under both optimizers.
struct OptimizerState {
    int64_t step = 0;
    Vec m_embed, v_embed;
    Vec m_w1, v_w1, m_b1, v_b1;
    Vec m_w2, v_w2, m_b2, v_b2;

    static OptimizerState init(const ModelParams& params);
};

// SGD: p -= lr*g. Adam: bias-corrected first/second moment update.
// Throws DivergenceError naming the parameter block on non-finite gradients.
void apply_update(ModelParams& params, const Gradients& grads,
                  OptimizerState& state);

// Checkpoint file: JSON with the model config, schema labels, vocabulary
// hash, and all parameter blocks. Doubles round-trip exactly.
void save_checkpoint(const std::string& path, const ModelParams& params,
                     const std::vector<std::string>& labels,
                     uint64_t vocab_hash);

struct Checkpoint {
    ModelParams params;
    std::vector<std::string> labels;
    uint64_t vocab_hash = 0;
};

Checkpoint load_checkpoint(const std::string& path);

}  // namespace cf
