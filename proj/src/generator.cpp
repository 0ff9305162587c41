#include "cf/generator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace cf {

namespace {

std::string format_index(const char* prefix, int i, int width) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s%0*d", prefix, width, i);
    return buf;
}

}  // namespace

std::string cue_token(const std::string& label) {
    std::string out = "cue_" + label;
    std::replace(out.begin(), out.end(), ':', '_');
    return out;
}

void GeneratorConfig::validate() const {
    const LabelSchema s = schema();  // throws ConfigError on a bad label list
    if (lexicon_size < 1) throw ConfigError("generator.lexicon_size: must be >= 1");
    if (!(signal_strength >= 0.0 && signal_strength <= 1.0)) {
        throw ConfigError("generator.signal_strength: must be in [0,1]");
    }
    if (signal_radius < 1) throw ConfigError("generator.signal_radius: must be >= 1");
    if (sentence_len_min < 1 || sentence_len_max < sentence_len_min) {
        throw ConfigError("generator.sentence_len: need 1 <= min <= max");
    }
    if (!(nil_sentence_prob >= 0.0 && nil_sentence_prob <= 1.0)) {
        throw ConfigError("generator.nil_sentence_prob: must be in [0,1]");
    }
    if (filler_vocab_size < 1) {
        throw ConfigError("generator.filler_vocab_size: must be >= 1");
    }
    if (mix_own < 0 || mix_sibling < 0 || mix_nil < 0 ||
        mix_own + mix_sibling + mix_nil <= 0) {
        throw ConfigError("generator.label_mix: masses must be >= 0 with positive sum");
    }
    if (!(mix_jitter >= 0.0 && mix_jitter < 1.0)) {
        throw ConfigError("generator.label_mix.jitter: must be in [0,1)");
    }
    if (s.num_labels() < 2) {
        throw ConfigError("generator.labels: need at least one non-NIL label");
    }
    for (size_t i = 0; i < lemma_profiles.size(); ++i) {
        const LemmaProfile& lp = lemma_profiles[i];
        const std::string field = "generator.lemma_profiles[" + std::to_string(i) + "]";
        if (lp.lemma.empty()) throw ConfigError(field + ".lemma: empty");
        if (lp.dist.size() != static_cast<size_t>(s.num_labels())) {
            throw ConfigError(field + ".dist: expected " +
                              std::to_string(s.num_labels()) + " entries, got " +
                              std::to_string(lp.dist.size()));
        }
        double sum = 0.0;
        for (double p : lp.dist) {
            if (!(p >= 0.0)) throw ConfigError(field + ".dist: negative probability");
            sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-9) {
            char buf[64];
            std::snprintf(buf, sizeof(buf), "%.6g", sum);
            throw ConfigError(field + ".dist: sums to " + std::string(buf) +
                              ", expected 1");
        }
    }
}

GeneratorConfig expand_profiles(GeneratorConfig config) {
    if (!config.lemma_profiles.empty()) {
        config.validate();
        return config;
    }
    const LabelSchema schema = config.schema();
    const auto coarse = schema.coarse_types();
    if (coarse.empty()) {
        throw ConfigError("generator.labels: need at least one non-NIL label");
    }

    SeededRng rng(derive_seed(config.seed, "lemma-profiles"));
    const int K = schema.num_labels();
    for (int i = 0; i < config.lexicon_size; ++i) {
        const std::string& home = coarse[i % coarse.size()];
        const auto subs = schema.subtypes_of(home);
        const int primary = subs[(i / coarse.size()) % subs.size()];

        auto jitter = [&](double m) {
            return m * (1.0 + config.mix_jitter * (2.0 * rng.next_double() - 1.0));
        };

        Vec dist(K, 0.0);
        dist[LabelSchema::kNil] = jitter(config.mix_nil);
        dist[primary] = jitter(config.mix_own);
        const size_t n_sib = subs.size() - 1;
        for (int sub : subs) {
            if (sub != primary) {
                dist[sub] = jitter(config.mix_sibling / static_cast<double>(n_sib));
            }
        }
        double sum = 0.0;
        for (double p : dist) sum += p;
        for (double& p : dist) p /= sum;

        config.lemma_profiles.push_back(
            LemmaProfile{format_index("trig", i, 2), std::move(dist)});
    }
    config.validate();
    return config;
}

std::vector<Sentence> generate_sentences(const GeneratorConfig& raw_config,
                                         int n_sentences) {
    if (n_sentences < 1) {
        throw ContractError("generate_sentences: n_sentences must be >= 1");
    }
    const GeneratorConfig config = expand_profiles(raw_config);
    const LabelSchema schema = config.schema();

    std::vector<std::string> fillers(config.filler_vocab_size);
    for (int i = 0; i < config.filler_vocab_size; ++i) {
        fillers[i] = format_index("w", i, 3);
    }

    SeededRng rng(derive_seed(config.seed, "sentences"));
    const int len_span = config.sentence_len_max - config.sentence_len_min + 1;

    std::vector<Sentence> out;
    out.reserve(n_sentences);
    for (int s = 0; s < n_sentences; ++s) {
        // Draw order is fixed: length, trigger coin, fillers, then (if any)
        // lemma, position, label, cue coin, cue position.
        const int len =
            config.sentence_len_min + static_cast<int>(rng.next_below(len_span));
        const bool has_trigger = rng.next_double() >= config.nil_sentence_prob;

        Sentence sent;
        sent.tokens.resize(len);
        for (int t = 0; t < len; ++t) {
            sent.tokens[t] = Token{fillers[rng.next_below(fillers.size())], "NIL", 0};
        }

        if (has_trigger) {
            const LemmaProfile& lp =
                config.lemma_profiles[rng.next_below(config.lemma_profiles.size())];
            const int pos = static_cast<int>(rng.next_below(len));
            const int y = rng.sample_categorical(lp.dist);
            sent.tokens[pos] = Token{lp.lemma, schema.label(y), 0};

            if (rng.next_double() < config.signal_strength) {
                const int lo = std::max(0, pos - config.signal_radius);
                const int hi = std::min(len - 1, pos + config.signal_radius);
                const int n_slots = hi - lo;  // excludes pos itself
                if (n_slots > 0) {
                    int slot = lo + static_cast<int>(rng.next_below(n_slots));
                    if (slot >= pos) ++slot;
                    sent.tokens[slot] = Token{cue_token(schema.label(y)), "NIL", 0};
                }
            }
        }
        out.push_back(std::move(sent));
    }
    return out;
}

GeneratedCorpus generate_corpus(const GeneratorConfig& config, int n_sentences,
                                int window_half_width,
                                const std::optional<std::string>& emit_tsv_path) {
    GeneratedCorpus out;
    out.sentences = generate_sentences(config, n_sentences);
    out.instances = build_instances(out.sentences, config.schema(), out.vocab,
                                    VocabMode::kBuild, window_half_width, "");
    if (emit_tsv_path) write_tsv(out.sentences, *emit_tsv_path);
    return out;
}

}  // namespace cf
