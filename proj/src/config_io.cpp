#include "cf/config_io.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cf/errors.hpp"

namespace cf {

namespace {

// Field access with path-carrying errors: "train.loss.lambda: expected number".
[[noreturn]] void bad_field(const std::string& path, const char* expected) {
    throw ConfigError(path + ": expected " + expected);
}

const Json* find(const Json& j, const std::string& key) {
    auto it = j.find(key);
    return it == j.end() ? nullptr : &*it;
}

double get_double(const Json& j, const std::string& path, const std::string& key,
                  double dflt) {
    const Json* v = find(j, key);
    if (v == nullptr) return dflt;
    if (!v->is_number()) bad_field(path + key, "number");
    return v->get<double>();
}

int get_int(const Json& j, const std::string& path, const std::string& key, int dflt) {
    const Json* v = find(j, key);
    if (v == nullptr) return dflt;
    if (!v->is_number_integer()) bad_field(path + key, "integer");
    return v->get<int>();
}

uint64_t get_u64(const Json& j, const std::string& path, const std::string& key,
                 uint64_t dflt) {
    const Json* v = find(j, key);
    if (v == nullptr) return dflt;
    if (!v->is_number_unsigned() && !v->is_number_integer())
        bad_field(path + key, "unsigned integer");
    if (v->is_number_integer() && v->get<int64_t>() < 0)
        bad_field(path + key, "unsigned integer");
    return v->get<uint64_t>();
}

bool get_bool(const Json& j, const std::string& path, const std::string& key,
              bool dflt) {
    const Json* v = find(j, key);
    if (v == nullptr) return dflt;
    if (!v->is_boolean()) bad_field(path + key, "boolean");
    return v->get<bool>();
}

std::string get_string(const Json& j, const std::string& path, const std::string& key,
                       const std::string& dflt) {
    const Json* v = find(j, key);
    if (v == nullptr) return dflt;
    if (!v->is_string()) bad_field(path + key, "string");
    return v->get<std::string>();
}

std::vector<std::string> get_string_list(const Json& j, const std::string& path,
                                         const std::string& key) {
    const Json* v = find(j, key);
    if (v == nullptr) return {};
    if (!v->is_array()) bad_field(path + key, "array of strings");
    std::vector<std::string> out;
    for (const auto& e : *v) {
        if (!e.is_string()) bad_field(path + key, "array of strings");
        out.push_back(e.get<std::string>());
    }
    return out;
}

void require_object(const Json& j, const std::string& path) {
    if (!j.is_object()) bad_field(path.empty() ? "config" : path, "object");
}

void check_keys(const Json& j, const std::string& path,
                std::initializer_list<const char*> allowed) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* a : allowed)
            if (it.key() == a) {
                ok = true;
                break;
            }
        if (!ok) throw ConfigError(path + it.key() + ": unknown field");
    }
}

}  // namespace

Json load_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file: " + path);
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ParseError(path + ": " + e.what());
    }
}

void write_json_file(const std::string& path, const Json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write file: " + path);
    out << j.dump(1) << '\n';
    if (!out) throw ConfigError("write failed: " + path);
}

uint64_t file_checksum(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open file for checksum: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    std::string bytes = buf.str();
    return fnv1a64_bytes(bytes.data(), bytes.size());
}

std::string file_checksum_hex(const std::string& path) {
    return to_hex(file_checksum(path));
}

GenerateJob generate_job_from_json(const Json& j) {
    require_object(j, "");
    check_keys(j, "", {"labels", "lexicon_size", "signal_strength", "signal_radius",
                       "sentence_len_min", "sentence_len_max", "nil_sentence_prob",
                       "filler_vocab_size", "mix", "seed", "lemma_profiles", "splits"});
    GenerateJob job;
    GeneratorConfig& g = job.gen;
    g.labels = get_string_list(j, "", "labels");
    if (g.labels.empty()) throw ConfigError("labels: required, non-empty");
    g.lexicon_size = get_int(j, "", "lexicon_size", g.lexicon_size);
    g.signal_strength = get_double(j, "", "signal_strength", g.signal_strength);
    g.signal_radius = get_int(j, "", "signal_radius", g.signal_radius);
    g.sentence_len_min = get_int(j, "", "sentence_len_min", g.sentence_len_min);
    g.sentence_len_max = get_int(j, "", "sentence_len_max", g.sentence_len_max);
    g.nil_sentence_prob = get_double(j, "", "nil_sentence_prob", g.nil_sentence_prob);
    g.filler_vocab_size = get_int(j, "", "filler_vocab_size", g.filler_vocab_size);
    g.seed = get_u64(j, "", "seed", g.seed);
    if (const Json* mix = find(j, "mix")) {
        require_object(*mix, "mix");
        check_keys(*mix, "mix.", {"own", "sibling", "nil", "jitter"});
        g.mix_own = get_double(*mix, "mix.", "own", g.mix_own);
        g.mix_sibling = get_double(*mix, "mix.", "sibling", g.mix_sibling);
        g.mix_nil = get_double(*mix, "mix.", "nil", g.mix_nil);
        g.mix_jitter = get_double(*mix, "mix.", "jitter", g.mix_jitter);
    }
    if (const Json* profiles = find(j, "lemma_profiles")) {
        if (!profiles->is_array()) bad_field("lemma_profiles", "array");
        int i = 0;
        for (const auto& p : *profiles) {
            std::string path = "lemma_profiles[" + std::to_string(i) + "].";
            require_object(p, path);
            check_keys(p, path, {"lemma", "dist"});
            LemmaProfile lp;
            lp.lemma = get_string(p, path, "lemma", "");
            if (lp.lemma.empty()) bad_field(path + "lemma", "non-empty string");
            const Json* dist = find(p, "dist");
            if (dist == nullptr || !dist->is_array()) bad_field(path + "dist", "array of numbers");
            for (const auto& x : *dist) {
                if (!x.is_number()) bad_field(path + "dist", "array of numbers");
                lp.dist.push_back(x.get<double>());
            }
            g.lemma_profiles.push_back(std::move(lp));
            ++i;
        }
    }
    if (const Json* splits = find(j, "splits")) {
        require_object(*splits, "splits");
        check_keys(*splits, "splits.", {"train", "dev", "test"});
        job.split_train = get_int(*splits, "splits.", "train", job.split_train);
        job.split_dev = get_int(*splits, "splits.", "dev", job.split_dev);
        job.split_test = get_int(*splits, "splits.", "test", job.split_test);
    }
    if (job.split_train < 1) throw ConfigError("splits.train: must be >= 1");
    if (job.split_dev < 1) throw ConfigError("splits.dev: must be >= 1");
    if (job.split_test < 1) throw ConfigError("splits.test: must be >= 1");
    return job;
}

Json generate_job_to_json(const GenerateJob& job) {
    const GeneratorConfig& g = job.gen;
    Json j;
    j["labels"] = g.labels;
    j["lexicon_size"] = g.lexicon_size;
    j["signal_strength"] = g.signal_strength;
    j["signal_radius"] = g.signal_radius;
    j["sentence_len_min"] = g.sentence_len_min;
    j["sentence_len_max"] = g.sentence_len_max;
    j["nil_sentence_prob"] = g.nil_sentence_prob;
    j["filler_vocab_size"] = g.filler_vocab_size;
    j["mix"] = Json{{"own", g.mix_own},
                    {"sibling", g.mix_sibling},
                    {"nil", g.mix_nil},
                    {"jitter", g.mix_jitter}};
    j["seed"] = g.seed;
    Json profiles = Json::array();
    for (const auto& p : g.lemma_profiles)
        profiles.push_back(Json{{"lemma", p.lemma}, {"dist", p.dist}});
    j["lemma_profiles"] = std::move(profiles);
    j["splits"] = Json{{"train", job.split_train},
                       {"dev", job.split_dev},
                       {"test", job.split_test}};
    return j;
}

namespace {

std::string resolve_relative(const std::string& config_dir, const std::string& path) {
    if (path.empty() || std::filesystem::path(path).is_absolute()) return path;
    if (config_dir.empty()) return path;
    return (std::filesystem::path(config_dir) / path).string();
}

}  // namespace

TrainJob train_job_from_json(const Json& j, const std::string& config_dir) {
    require_object(j, "");
    check_keys(j, "", {"corpus", "model", "loss", "epochs", "batch", "sampling",
                       "sampling_ratio", "stats_on_train", "seed"});
    TrainJob job;

    const Json* corpus = find(j, "corpus");
    if (corpus == nullptr) throw ConfigError("corpus: required");
    require_object(*corpus, "corpus");
    check_keys(*corpus, "corpus.", {"train", "dev", "test", "labels", "labels_from"});
    job.train_path = resolve_relative(config_dir, get_string(*corpus, "corpus.", "train", ""));
    job.dev_path = resolve_relative(config_dir, get_string(*corpus, "corpus.", "dev", ""));
    job.test_path = resolve_relative(config_dir, get_string(*corpus, "corpus.", "test", ""));
    if (job.train_path.empty()) throw ConfigError("corpus.train: required");
    if (job.dev_path.empty()) throw ConfigError("corpus.dev: required");
    job.labels = get_string_list(*corpus, "corpus.", "labels");
    std::string labels_from =
        resolve_relative(config_dir, get_string(*corpus, "corpus.", "labels_from", ""));
    if (job.labels.empty() && !labels_from.empty()) {
        Json sidecar = load_json_file(labels_from);
        job.labels = get_string_list(sidecar, labels_from + ": ", "labels");
    }
    if (job.labels.empty())
        throw ConfigError("corpus.labels: required (inline or via corpus.labels_from)");

    TrainConfig& t = job.train;
    if (const Json* model = find(j, "model")) {
        require_object(*model, "model");
        check_keys(*model, "model.",
                   {"embed_dim", "hidden_dim", "window", "optimizer", "lr", "beta1",
                    "beta2", "adam_eps", "embed_init_scale"});
        ModelConfig& m = t.model;
        m.embed_dim = get_int(*model, "model.", "embed_dim", m.embed_dim);
        m.hidden_dim = get_int(*model, "model.", "hidden_dim", m.hidden_dim);
        m.window = get_int(*model, "model.", "window", m.window);
        m.optimizer = get_string(*model, "model.", "optimizer", m.optimizer);
        m.lr = get_double(*model, "model.", "lr", m.lr);
        m.beta1 = get_double(*model, "model.", "beta1", m.beta1);
        m.beta2 = get_double(*model, "model.", "beta2", m.beta2);
        m.adam_eps = get_double(*model, "model.", "adam_eps", m.adam_eps);
        m.embed_init_scale =
            get_double(*model, "model.", "embed_init_scale", m.embed_init_scale);
    }
    if (const Json* loss = find(j, "loss")) {
        require_object(*loss, "loss");
        check_keys(*loss, "loss.",
                   {"mode", "lambda", "gamma", "margin", "ins_cost_gradient", "eps"});
        LossConfig& l = t.loss;
        l.mode = loss_mode_from_string(get_string(*loss, "loss.", "mode", "ce"));
        l.lambda = get_double(*loss, "loss.", "lambda", l.lambda);
        l.gamma = get_double(*loss, "loss.", "gamma", l.gamma);
        l.margin = get_double(*loss, "loss.", "margin", l.margin);
        l.eps = get_double(*loss, "loss.", "eps", l.eps);
        std::string icg = get_string(*loss, "loss.", "ins_cost_gradient", "frozen");
        if (icg == "frozen")
            l.ins_cost_gradient = InsCostGradient::kFrozen;
        else if (icg == "flow")
            l.ins_cost_gradient = InsCostGradient::kFlow;
        else
            throw ConfigError("loss.ins_cost_gradient: expected frozen|flow");
    }
    t.epochs = get_int(j, "", "epochs", t.epochs);
    t.batch = get_int(j, "", "batch", t.batch);
    t.sampling = get_bool(j, "", "sampling", t.sampling);
    t.sampling_ratio = get_double(j, "", "sampling_ratio", t.sampling_ratio);
    t.stats_on_train = get_bool(j, "", "stats_on_train", t.stats_on_train);
    t.seed = get_u64(j, "", "seed", t.seed);
    return job;
}

Json train_job_to_json(const TrainJob& job) {
    const TrainConfig& t = job.train;
    Json j;
    j["corpus"] = Json{{"train", job.train_path},
                       {"dev", job.dev_path},
                       {"test", job.test_path},
                       {"labels", job.labels}};
    j["model"] = Json{{"embed_dim", t.model.embed_dim},
                      {"hidden_dim", t.model.hidden_dim},
                      {"window", t.model.window},
                      {"optimizer", t.model.optimizer},
                      {"lr", t.model.lr},
                      {"beta1", t.model.beta1},
                      {"beta2", t.model.beta2},
                      {"adam_eps", t.model.adam_eps},
                      {"embed_init_scale", t.model.embed_init_scale}};
    j["loss"] = Json{{"mode", to_string(t.loss.mode)},
                     {"lambda", t.loss.lambda},
                     {"gamma", t.loss.gamma},
                     {"margin", t.loss.margin},
                     {"ins_cost_gradient",
                      t.loss.ins_cost_gradient == InsCostGradient::kFrozen ? "frozen"
                                                                           : "flow"},
                     {"eps", t.loss.eps}};
    j["epochs"] = t.epochs;
    j["batch"] = t.batch;
    j["sampling"] = t.sampling;
    j["sampling_ratio"] = t.sampling_ratio;
    j["stats_on_train"] = t.stats_on_train;
    j["seed"] = t.seed;
    return j;
}

void ManifestBuilder::add_input(const std::string& path) {
    inputs[path] = file_checksum_hex(path);
}

void ManifestBuilder::add_output(const std::string& path) {
    outputs[path] = file_checksum_hex(path);
}

void ManifestBuilder::write(const std::string& path, double wall_clock_seconds) const {
    Json j;
    j["command"] = command;
    j["seed"] = seed;
    j["config"] = config;
    j["config_hash"] = to_hex(fnv1a64(config.dump()));
    Json in = Json::object();
    for (const auto& [p, c] : inputs) in[p] = c;
    j["inputs"] = std::move(in);
    Json out = Json::object();
    for (const auto& [p, c] : outputs) out[p] = c;
    j["outputs"] = std::move(out);
    j["wall_clock_seconds"] = wall_clock_seconds;
    auto now = std::chrono::system_clock::now();
    std::time_t tt = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&tt));
    j["timestamp"] = buf;
    write_json_file(path, j);
}

}  // namespace cf
