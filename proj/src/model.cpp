#include "cf/model.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include "json.hpp"

namespace cf {

void ModelConfig::validate() const {
    if (vocab_size < 2) throw ConfigError("model.vocab_size: must be >= 2");
    if (num_labels < 2) throw ConfigError("model.num_labels: must be >= 2");
    if (embed_dim < 1) throw ConfigError("model.embed_dim: must be >= 1");
    if (hidden_dim < 1) throw ConfigError("model.hidden_dim: must be >= 1");
    if (window < 1) throw ConfigError("model.window: must be >= 1");
    if (optimizer != "adam" && optimizer != "sgd") {
        throw ConfigError("model.optimizer: expected 'adam' or 'sgd', got '" +
                          optimizer + "'");
    }
    if (!(lr > 0.0)) throw ConfigError("model.lr: must be > 0");
}

ModelParams ModelParams::init(const ModelConfig& cfg) {
    cfg.validate();
    ModelParams p;
    p.cfg = cfg;
    const int n_in = cfg.input_dim();

    SeededRng rng(derive_seed(cfg.seed, "model-init"));
    p.embed.resize(static_cast<size_t>(cfg.vocab_size) * cfg.embed_dim);
    for (double& x : p.embed) {
        x = rng.next_uniform(-cfg.embed_init_scale, cfg.embed_init_scale);
    }
    const double a1 = std::sqrt(6.0 / (n_in + cfg.hidden_dim));
    p.w1.resize(static_cast<size_t>(n_in) * cfg.hidden_dim);
    for (double& x : p.w1) x = rng.next_uniform(-a1, a1);
    p.b1.assign(cfg.hidden_dim, 0.0);

    const double a2 = std::sqrt(6.0 / (cfg.hidden_dim + cfg.num_labels));
    p.w2.resize(static_cast<size_t>(cfg.hidden_dim) * cfg.num_labels);
    for (double& x : p.w2) x = rng.next_uniform(-a2, a2);
    p.b2.assign(cfg.num_labels, 0.0);
    return p;
}

size_t ModelParams::param_count() const {
    return embed.size() + w1.size() + b1.size() + w2.size() + b2.size();
}

Vec ModelParams::flatten() const {
    Vec flat;
    flat.reserve(param_count());
    for (const Vec* block : {&embed, &w1, &b1, &w2, &b2}) {
        flat.insert(flat.end(), block->begin(), block->end());
    }
    return flat;
}

void ModelParams::unflatten(const Vec& flat) {
    if (flat.size() != param_count()) {
        throw ContractError("unflatten: expected " + std::to_string(param_count()) +
                            " values, got " + std::to_string(flat.size()));
    }
    size_t off = 0;
    for (Vec* block : {&embed, &w1, &b1, &w2, &b2}) {
        std::copy(flat.begin() + off, flat.begin() + off + block->size(),
                  block->begin());
        off += block->size();
    }
}

ForwardCache forward(const ModelParams& params, const Instance& instance) {
    const ModelConfig& cfg = params.cfg;
    const int d = cfg.embed_dim;
    const int h = cfg.hidden_dim;
    const int K = cfg.num_labels;
    const int n_in = cfg.input_dim();
    if (instance.window.size() != static_cast<size_t>(2 * cfg.window + 1)) {
        throw ContractError("forward: window length " +
                            std::to_string(instance.window.size()) +
                            " does not match model window " +
                            std::to_string(2 * cfg.window + 1));
    }

    ForwardCache cache;
    cache.window = instance.window;
    cache.input.resize(n_in);
    for (size_t t = 0; t < instance.window.size(); ++t) {
        const int32_t id = instance.window[t];
        if (id < 0 || id >= cfg.vocab_size) {
            throw ContractError("forward: token id " + std::to_string(id) +
                                " out of vocabulary range [0, " +
                                std::to_string(cfg.vocab_size) + ")");
        }
        std::copy(params.embed.begin() + static_cast<size_t>(id) * d,
                  params.embed.begin() + static_cast<size_t>(id + 1) * d,
                  cache.input.begin() + t * d);
    }

    cache.hidden.resize(h);
    for (int j = 0; j < h; ++j) {
        double acc = params.b1[j];
        for (int i = 0; i < n_in; ++i) {
            acc += params.w1[static_cast<size_t>(i) * h + j] * cache.input[i];
        }
        cache.hidden[j] = std::tanh(acc);
    }

    cache.logits.values.resize(K);
    for (int k = 0; k < K; ++k) {
        double acc = params.b2[k];
        for (int j = 0; j < h; ++j) {
            acc += params.w2[static_cast<size_t>(j) * K + k] * cache.hidden[j];
        }
        cache.logits.values[k] = acc;
    }
    cache.probs = softmax(cache.logits);
    return cache;
}

Gradients Gradients::zeros_like(const ModelParams& params) {
    Gradients g;
    g.w1.assign(params.w1.size(), 0.0);
    g.b1.assign(params.b1.size(), 0.0);
    g.w2.assign(params.w2.size(), 0.0);
    g.b2.assign(params.b2.size(), 0.0);
    return g;
}

void Gradients::add(const Gradients& other) {
    auto axpy = [](Vec& dst, const Vec& src) {
        for (size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
    };
    axpy(w1, other.w1);
    axpy(b1, other.b1);
    axpy(w2, other.w2);
    axpy(b2, other.b2);
    for (const auto& [id, row] : other.embed_rows) {
        Vec& dst = embed_rows[id];
        if (dst.empty()) {
            dst = row;
        } else {
            axpy(dst, row);
        }
    }
}

void Gradients::scale(double factor) {
    auto mul = [factor](Vec& v) {
        for (double& x : v) x *= factor;
    };
    mul(w1);
    mul(b1);
    mul(w2);
    mul(b2);
    for (auto& [id, row] : embed_rows) mul(row);
}

Gradients backward(const ModelParams& params, const ForwardCache& cache,
                   const Vec& dloss_dlogits) {
    const ModelConfig& cfg = params.cfg;
    const int d = cfg.embed_dim;
    const int h = cfg.hidden_dim;
    const int K = cfg.num_labels;
    const int n_in = cfg.input_dim();
    if (dloss_dlogits.size() != static_cast<size_t>(K)) {
        throw ContractError("backward: dloss_dlogits has size " +
                            std::to_string(dloss_dlogits.size()) + ", expected " +
                            std::to_string(K));
    }

    Gradients g = Gradients::zeros_like(params);

    // Output layer.
    Vec dhidden(h, 0.0);
    for (int j = 0; j < h; ++j) {
        double acc = 0.0;
        for (int k = 0; k < K; ++k) {
            const double dz = dloss_dlogits[k];
            g.w2[static_cast<size_t>(j) * K + k] = cache.hidden[j] * dz;
            acc += params.w2[static_cast<size_t>(j) * K + k] * dz;
        }
        dhidden[j] = acc;
    }
    g.b2 = dloss_dlogits;

    // Through tanh.
    Vec dpre(h);
    for (int j = 0; j < h; ++j) {
        dpre[j] = dhidden[j] * (1.0 - cache.hidden[j] * cache.hidden[j]);
    }

    // Hidden layer and input.
    Vec dinput(n_in, 0.0);
    for (int i = 0; i < n_in; ++i) {
        double acc = 0.0;
        for (int j = 0; j < h; ++j) {
            g.w1[static_cast<size_t>(i) * h + j] = cache.input[i] * dpre[j];
            acc += params.w1[static_cast<size_t>(i) * h + j] * dpre[j];
        }
        dinput[i] = acc;
    }
    g.b1 = dpre;

    // Scatter into the touched embedding rows.
    for (size_t t = 0; t < cache.window.size(); ++t) {
        Vec& row = g.embed_rows[cache.window[t]];
        if (row.empty()) row.assign(d, 0.0);
        for (int c = 0; c < d; ++c) row[c] += dinput[t * d + c];
    }
    return g;
}

OptimizerState OptimizerState::init(const ModelParams& params) {
    OptimizerState s;
    if (params.cfg.optimizer == "adam") {
        s.m_embed.assign(params.embed.size(), 0.0);
        s.v_embed.assign(params.embed.size(), 0.0);
        s.m_w1.assign(params.w1.size(), 0.0);
        s.v_w1.assign(params.w1.size(), 0.0);
        s.m_b1.assign(params.b1.size(), 0.0);
        s.v_b1.assign(params.b1.size(), 0.0);
        s.m_w2.assign(params.w2.size(), 0.0);
        s.v_w2.assign(params.w2.size(), 0.0);
        s.m_b2.assign(params.b2.size(), 0.0);
        s.v_b2.assign(params.b2.size(), 0.0);
    }
    return s;
}

namespace {

void require_finite(const Vec& g, const char* block) {
    if (!all_finite(g)) {
        throw DivergenceError(std::string("apply_update: non-finite gradient in ") +
                              block);
    }
}

void sgd_block(Vec& p, const Vec& g, double lr) {
    for (size_t i = 0; i < p.size(); ++i) p[i] -= lr * g[i];
}

void adam_block(Vec& p, const Vec& g, Vec& m, Vec& v, const ModelConfig& cfg,
                double bc1, double bc2) {
    for (size_t i = 0; i < p.size(); ++i) {
        m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
        v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
        const double mhat = m[i] / bc1;
        const double vhat = v[i] / bc2;
        p[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.adam_eps);
    }
}

}  // namespace

void apply_update(ModelParams& params, const Gradients& grads,
                  OptimizerState& state) {
    const ModelConfig& cfg = params.cfg;
    require_finite(grads.w1, "w1");
    require_finite(grads.b1, "b1");
    require_finite(grads.w2, "w2");
    require_finite(grads.b2, "b2");
    for (const auto& [id, row] : grads.embed_rows) {
        if (!all_finite(row)) {
            throw DivergenceError("apply_update: non-finite gradient in embed row " +
                                  std::to_string(id));
        }
    }

    ++state.step;
    if (cfg.optimizer == "sgd") {
        sgd_block(params.w1, grads.w1, cfg.lr);
        sgd_block(params.b1, grads.b1, cfg.lr);
        sgd_block(params.w2, grads.w2, cfg.lr);
        sgd_block(params.b2, grads.b2, cfg.lr);
        const int d = cfg.embed_dim;
        for (const auto& [id, row] : grads.embed_rows) {
            double* p = params.embed.data() + static_cast<size_t>(id) * d;
            for (int c = 0; c < d; ++c) p[c] -= cfg.lr * row[c];
        }
        return;
    }

    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
    adam_block(params.w1, grads.w1, state.m_w1, state.v_w1, cfg, bc1, bc2);
    adam_block(params.b1, grads.b1, state.m_b1, state.v_b1, cfg, bc1, bc2);
    adam_block(params.w2, grads.w2, state.m_w2, state.v_w2, cfg, bc1, bc2);
    adam_block(params.b2, grads.b2, state.m_b2, state.v_b2, cfg, bc1, bc2);

    // Embedding moments advance only for touched rows.
    const int d = cfg.embed_dim;
    for (const auto& [id, row] : grads.embed_rows) {
        const size_t base = static_cast<size_t>(id) * d;
        for (int c = 0; c < d; ++c) {
            const size_t i = base + c;
            const double gi = row[c];
            state.m_embed[i] = cfg.beta1 * state.m_embed[i] + (1.0 - cfg.beta1) * gi;
            state.v_embed[i] =
                cfg.beta2 * state.v_embed[i] + (1.0 - cfg.beta2) * gi * gi;
            const double mhat = state.m_embed[i] / bc1;
            const double vhat = state.v_embed[i] / bc2;
            params.embed[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.adam_eps);
        }
    }
}

namespace {

using Json = nlohmann::ordered_json;

Json config_to_json(const ModelConfig& cfg) {
    return Json{{"vocab_size", cfg.vocab_size},
                {"num_labels", cfg.num_labels},
                {"embed_dim", cfg.embed_dim},
                {"hidden_dim", cfg.hidden_dim},
                {"window", cfg.window},
                {"optimizer", cfg.optimizer},
                {"lr", cfg.lr},
                {"beta1", cfg.beta1},
                {"beta2", cfg.beta2},
                {"adam_eps", cfg.adam_eps},
                {"embed_init_scale", cfg.embed_init_scale},
                {"seed", cfg.seed}};
}

ModelConfig config_from_json(const Json& j) {
    ModelConfig cfg;
    cfg.vocab_size = j.at("vocab_size").get<int>();
    cfg.num_labels = j.at("num_labels").get<int>();
    cfg.embed_dim = j.at("embed_dim").get<int>();
    cfg.hidden_dim = j.at("hidden_dim").get<int>();
    cfg.window = j.at("window").get<int>();
    cfg.optimizer = j.at("optimizer").get<std::string>();
    cfg.lr = j.at("lr").get<double>();
    cfg.beta1 = j.at("beta1").get<double>();
    cfg.beta2 = j.at("beta2").get<double>();
    cfg.adam_eps = j.at("adam_eps").get<double>();
    cfg.embed_init_scale = j.at("embed_init_scale").get<double>();
    cfg.seed = j.at("seed").get<uint64_t>();
    return cfg;
}

}  // namespace

void save_checkpoint(const std::string& path, const ModelParams& params,
                     const std::vector<std::string>& labels,
                     uint64_t vocab_hash) {
    Json j;
    j["format"] = "confuse-forge-checkpoint/1";
    j["model"] = config_to_json(params.cfg);
    j["labels"] = labels;
    j["vocab_hash"] = to_hex(vocab_hash);
    j["params"] = Json{{"embed", params.embed},
                       {"w1", params.w1},
                       {"b1", params.b1},
                       {"w2", params.w2},
                       {"b2", params.b2}};
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write checkpoint: " + path);
    out << j.dump(1) << '\n';
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open checkpoint: " + path);
    Json j;
    try {
        j = Json::parse(in);
    } catch (const std::exception& e) {
        throw ConfigError("checkpoint " + path + ": " + e.what());
    }
    if (j.value("format", "") != "confuse-forge-checkpoint/1") {
        throw ConfigError("checkpoint " + path + ": unknown format");
    }
    Checkpoint c;
    c.params.cfg = config_from_json(j.at("model"));
    c.labels = j.at("labels").get<std::vector<std::string>>();
    c.vocab_hash = from_hex(j.at("vocab_hash").get<std::string>());
    const Json& p = j.at("params");
    c.params.embed = p.at("embed").get<Vec>();
    c.params.w1 = p.at("w1").get<Vec>();
    c.params.b1 = p.at("b1").get<Vec>();
    c.params.w2 = p.at("w2").get<Vec>();
    c.params.b2 = p.at("b2").get<Vec>();

    const ModelConfig& cfg = c.params.cfg;
    auto expect = [&](size_t got, size_t want, const char* block) {
        if (got != want) {
            throw ConfigError("checkpoint " + path + ": block " + block +
                              " has wrong size");
        }
    };
    expect(c.params.embed.size(),
           static_cast<size_t>(cfg.vocab_size) * cfg.embed_dim, "embed");
    expect(c.params.w1.size(), static_cast<size_t>(cfg.input_dim()) * cfg.hidden_dim,
           "w1");
    expect(c.params.b1.size(), static_cast<size_t>(cfg.hidden_dim), "b1");
    expect(c.params.w2.size(), static_cast<size_t>(cfg.hidden_dim) * cfg.num_labels,
           "w2");
    expect(c.params.b2.size(), static_cast<size_t>(cfg.num_labels), "b2");
    return c;
}

}  // namespace cf
