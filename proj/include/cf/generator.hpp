#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cf/corpus.hpp"
#include "cf/numerics.hpp"
#include "cf/schema.hpp"

namespace cf {

// One trigger lemma's label distribution over the full label space
// (mass only on its coarse type's sub-types and NIL; sums to 1).
struct LemmaProfile {
    std::string lemma;
    Vec dist;
};

// Configuration of the confusable-corpus generator. Each sentence holds
// filler tokens, at most one trigger lemma, and -- with probability
// signal_strength -- a context-signal token uniquely indicative of the
// sampled label, placed within signal_radius of the trigger so a window
// classifier of that half-width can observe it.
struct GeneratorConfig {
    std::vector<std::string> labels;  // schema; index 0 = NIL
    int lexicon_size = 40;
    double signal_strength = 0.6;  // s in [0,1]
    int signal_radius = 2;
    int sentence_len_min = 5;
    int sentence_len_max = 9;
    // Probability that a sentence carries no trigger lemma at all.
    double nil_sentence_prob = 0.4;
    int filler_vocab_size = 300;
    // Recipe for expanding per-lemma distributions when none are given
    // explicitly: mass on the lemma's primary sub-type, split over its
    // siblings, and on NIL, each jittered multiplicatively and renormalized.
    double mix_own = 0.5;
    double mix_sibling = 0.25;
    double mix_nil = 0.25;
    double mix_jitter = 0.2;
    uint64_t seed = 1;

    // Expanded per-lemma distributions. Filled deterministically from the
    // recipe above when left empty; validated either way.
    std::vector<LemmaProfile> lemma_profiles;

    LabelSchema schema() const { return LabelSchema::from_labels(labels); }

    // Throws ConfigError naming the offending field.
    void validate() const;
};

// Deterministic profile expansion (no-op when profiles were given explicitly).
GeneratorConfig expand_profiles(GeneratorConfig config);

// Signal-token surface form for a label ("cue_NIL", "cue_Contact_Meet", ...).
std::string cue_token(const std::string& label);

// Deterministic given config.seed. Sentence i is independent of n_sentences
// for i < n_sentences: generating more sentences extends the stream.
std::vector<Sentence> generate_sentences(const GeneratorConfig& config,
                                         int n_sentences);

struct GeneratedCorpus {
    std::vector<Sentence> sentences;
    std::vector<Instance> instances;
    Vocabulary vocab;
};

// generate_sentences + build_instances (vocabulary built from the generated
// text, doc_id ""), optionally emitting the TSV.
GeneratedCorpus generate_corpus(const GeneratorConfig& config, int n_sentences,
                                int window_half_width,
                                const std::optional<std::string>& emit_tsv_path =
                                    std::nullopt);

}  // namespace cf
