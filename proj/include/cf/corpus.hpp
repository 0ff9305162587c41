#pragma once

#include <string>
#include <vector>

#include "cf/numerics.hpp"
#include "cf/schema.hpp"

namespace cf {

// One surface token with its label string. `line` is the 1-based source line
// when read from a file, 0 for generated text.
struct Token {
    std::string text;
    std::string label;
    int line = 0;
};

struct Sentence {
    std::vector<Token> tokens;
};

// Corpus TSV: one `token<TAB>label` pair per line, blank line ends a
// sentence, UTF-8. Throws ParseError with the offending line number.
std::vector<Sentence> read_tsv(const std::string& path);
void write_tsv(const std::vector<Sentence>& sentences, const std::string& path);

enum class VocabMode {
    kBuild,   // unseen tokens are added to the vocabulary
    kLookup,  // unseen tokens map to UNK
};

// Windowed instance construction shared by the file parser and the
// generator: one Instance per token, windows padded with PAD at sentence
// boundaries. Unknown label strings raise ParseError (with the line number
// when one is known).
std::vector<Instance> build_instances(const std::vector<Sentence>& sentences,
                                      const LabelSchema& schema,
                                      Vocabulary& vocab, VocabMode mode,
                                      int window_half_width,
                                      const std::string& doc_id);

// read_tsv + build_instances. doc_id defaults to the path.
std::vector<Instance> parse_corpus(const std::string& path,
                                   const LabelSchema& schema,
                                   Vocabulary& vocab, VocabMode mode,
                                   int window_half_width = 2);
std::vector<Instance> parse_corpus(const std::string& path,
                                   const LabelSchema& schema,
                                   Vocabulary& vocab, VocabMode mode,
                                   int window_half_width,
                                   const std::string& doc_id);

// Under-sampling baseline: keeps every non-NIL instance and a uniform random
// subset of min(#NIL, round(ratio * #non-NIL)) NIL instances, in original
// order. If there are no non-NIL instances the input is returned unchanged
// and *warned is set.
std::vector<Instance> undersample_nil(const std::vector<Instance>& instances,
                                      double ratio, SeededRng& rng,
                                      bool* warned = nullptr);

}  // namespace cf
