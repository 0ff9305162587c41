#include "cf/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

namespace cf {

std::vector<Sentence> read_tsv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open corpus file: " + path);

    std::vector<Sentence> sentences;
    Sentence current;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) {
            if (!current.tokens.empty()) {
                sentences.push_back(std::move(current));
                current = Sentence{};
            }
            continue;
        }
        const size_t tab = line.find('\t');
        if (tab == std::string::npos || tab == 0 || tab + 1 == line.size() ||
            line.find('\t', tab + 1) != std::string::npos) {
            throw ParseError(path + ":" + std::to_string(lineno) +
                             ": expected 'token<TAB>label', got '" + line + "'");
        }
        current.tokens.push_back(Token{line.substr(0, tab), line.substr(tab + 1), lineno});
    }
    if (!current.tokens.empty()) sentences.push_back(std::move(current));
    return sentences;
}

void write_tsv(const std::vector<Sentence>& sentences, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write corpus file: " + path);
    for (size_t s = 0; s < sentences.size(); ++s) {
        if (s > 0) out << '\n';
        for (const Token& t : sentences[s].tokens) {
            out << t.text << '\t' << t.label << '\n';
        }
    }
}

std::vector<Instance> build_instances(const std::vector<Sentence>& sentences,
                                      const LabelSchema& schema,
                                      Vocabulary& vocab, VocabMode mode,
                                      int window_half_width,
                                      const std::string& doc_id) {
    if (window_half_width < 1) {
        throw ContractError("build_instances: window half-width must be >= 1");
    }
    const int w = window_half_width;

    std::vector<Instance> out;
    for (size_t s = 0; s < sentences.size(); ++s) {
        const auto& toks = sentences[s].tokens;
        std::vector<int32_t> ids(toks.size());
        for (size_t t = 0; t < toks.size(); ++t) {
            ids[t] = mode == VocabMode::kBuild ? vocab.add_or_get(toks[t].text)
                                               : vocab.lookup(toks[t].text);
        }
        for (size_t t = 0; t < toks.size(); ++t) {
            const int gold = schema.id_of(toks[t].label);
            if (gold < 0) {
                std::string where = toks[t].line > 0
                                        ? "line " + std::to_string(toks[t].line)
                                        : "sentence " + std::to_string(s) +
                                              " token " + std::to_string(t);
                throw ParseError(doc_id + ": " + where + ": unknown label '" +
                                 toks[t].label + "'");
            }
            Instance inst;
            inst.window.resize(2 * w + 1);
            for (int off = -w; off <= w; ++off) {
                const long p = static_cast<long>(t) + off;
                inst.window[off + w] =
                    (p < 0 || p >= static_cast<long>(toks.size())) ? Vocabulary::kPad
                                                                   : ids[p];
            }
            inst.gold = gold;
            inst.doc = doc_id;
            inst.sentence = static_cast<int32_t>(s);
            inst.token = static_cast<int32_t>(t);
            out.push_back(std::move(inst));
        }
    }
    return out;
}

std::vector<Instance> parse_corpus(const std::string& path,
                                   const LabelSchema& schema,
                                   Vocabulary& vocab, VocabMode mode,
                                   int window_half_width,
                                   const std::string& doc_id) {
    return build_instances(read_tsv(path), schema, vocab, mode,
                           window_half_width, doc_id);
}

std::vector<Instance> parse_corpus(const std::string& path,
                                   const LabelSchema& schema,
                                   Vocabulary& vocab, VocabMode mode,
                                   int window_half_width) {
    return parse_corpus(path, schema, vocab, mode, window_half_width, path);
}

std::vector<Instance> undersample_nil(const std::vector<Instance>& instances,
                                      double ratio, SeededRng& rng,
                                      bool* warned) {
    if (!(ratio > 0.0)) throw ContractError("undersample_nil: ratio must be > 0");
    if (warned) *warned = false;

    std::vector<size_t> nil_idx;
    size_t n_trigger = 0;
    for (size_t i = 0; i < instances.size(); ++i) {
        if (instances[i].gold == LabelSchema::kNil) {
            nil_idx.push_back(i);
        } else {
            ++n_trigger;
        }
    }
    if (n_trigger == 0) {
        if (warned) *warned = true;
        return instances;
    }

    const size_t keep_nil = std::min(
        nil_idx.size(),
        static_cast<size_t>(std::llround(ratio * static_cast<double>(n_trigger))));

    // Partial Fisher-Yates over the NIL index list, then restore corpus order.
    for (size_t i = 0; i < keep_nil; ++i) {
        const size_t j = i + static_cast<size_t>(rng.next_below(nil_idx.size() - i));
        std::swap(nil_idx[i], nil_idx[j]);
    }
    nil_idx.resize(keep_nil);
    std::sort(nil_idx.begin(), nil_idx.end());

    std::vector<Instance> out;
    out.reserve(n_trigger + keep_nil);
    size_t next_nil = 0;
    for (size_t i = 0; i < instances.size(); ++i) {
        if (instances[i].gold != LabelSchema::kNil) {
            out.push_back(instances[i]);
        } else if (next_nil < nil_idx.size() && nil_idx[next_nil] == i) {
            out.push_back(instances[i]);
            ++next_nil;
        }
    }
    return out;
}

}  // namespace cf
