#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "cf/errors.hpp"

namespace cf {

// Label universe: index 0 is NIL, indices 1..K-1 are "Coarse:Sub" sub-type
// labels. Two labels are siblings iff both are non-NIL, share a coarse type,
// and differ.
class LabelSchema {
public:
    static constexpr int kNil = 0;

    // Validates: labels[0] == "NIL", exactly one NIL, non-NIL labels unique
    // and of the form "Coarse:Sub".
    static LabelSchema from_labels(std::vector<std::string> labels);

    int num_labels() const { return static_cast<int>(labels_.size()); }
    const std::string& label(int id) const { return labels_.at(id); }
    const std::vector<std::string>& labels() const { return labels_; }

    // -1 if unknown.
    int id_of(const std::string& label) const;

    // Empty string for NIL.
    const std::string& coarse_of(int id) const { return coarse_.at(id); }

    bool siblings(int a, int b) const {
        return a != kNil && b != kNil && a != b && coarse_[a] == coarse_[b];
    }

    // Distinct coarse-type names in first-appearance order.
    std::vector<std::string> coarse_types() const;

    // Ids of the sub-types under one coarse type, in label order.
    std::vector<int> subtypes_of(const std::string& coarse) const;

private:
    std::vector<std::string> labels_;
    std::vector<std::string> coarse_;
    std::unordered_map<std::string, int> index_;
};

// token -> id map. Id 0 is UNK, id 1 is PAD; real tokens get ids >= 2 in
// first-encounter order. Built from the training split only.
class Vocabulary {
public:
    static constexpr int32_t kUnk = 0;
    static constexpr int32_t kPad = 1;

    Vocabulary() : tokens_{"<UNK>", "<PAD>"} {}

    int32_t add_or_get(const std::string& token);
    int32_t lookup(const std::string& token) const;  // kUnk if absent
    int32_t size() const { return static_cast<int32_t>(tokens_.size()); }
    const std::string& token(int32_t id) const { return tokens_.at(id); }
    const std::vector<std::string>& tokens() const { return tokens_; }

    // FNV-1a over size and tokens in id order; checkpoints carry this so a
    // model is never evaluated against the wrong vocabulary.
    uint64_t hash() const;

private:
    std::vector<std::string> tokens_;
    std::unordered_map<std::string, int32_t> index_;
};

// One candidate token: a (2w+1)-id window centered on it, its gold label id,
// and where it came from.
struct Instance {
    std::vector<int32_t> window;
    int gold = 0;
    std::string doc;
    int32_t sentence = 0;
    int32_t token = 0;

    bool operator==(const Instance&) const = default;
};

}  // namespace cf
