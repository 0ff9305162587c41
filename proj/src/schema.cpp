#include "cf/schema.hpp"

#include <algorithm>

#include "cf/numerics.hpp"

namespace cf {

LabelSchema LabelSchema::from_labels(std::vector<std::string> labels) {
    if (labels.empty()) throw ConfigError("schema: label list is empty");
    if (labels[0] != "NIL") {
        throw ConfigError("schema: label 0 must be NIL, got '" + labels[0] + "'");
    }
    LabelSchema s;
    s.labels_ = std::move(labels);
    s.coarse_.resize(s.labels_.size());
    for (size_t i = 0; i < s.labels_.size(); ++i) {
        const std::string& lab = s.labels_[i];
        if (i > 0) {
            if (lab == "NIL") throw ConfigError("schema: more than one NIL label");
            const size_t colon = lab.find(':');
            if (colon == std::string::npos || colon == 0 || colon + 1 == lab.size()) {
                throw ConfigError("schema: label '" + lab + "' is not of the form Coarse:Sub");
            }
            s.coarse_[i] = lab.substr(0, colon);
        }
        if (!s.index_.emplace(lab, static_cast<int>(i)).second) {
            throw ConfigError("schema: duplicate label '" + lab + "'");
        }
    }
    return s;
}

int LabelSchema::id_of(const std::string& label) const {
    auto it = index_.find(label);
    return it == index_.end() ? -1 : it->second;
}

std::vector<std::string> LabelSchema::coarse_types() const {
    std::vector<std::string> out;
    for (size_t i = 1; i < labels_.size(); ++i) {
        if (std::find(out.begin(), out.end(), coarse_[i]) == out.end()) {
            out.push_back(coarse_[i]);
        }
    }
    return out;
}

std::vector<int> LabelSchema::subtypes_of(const std::string& coarse) const {
    std::vector<int> out;
    for (size_t i = 1; i < labels_.size(); ++i) {
        if (coarse_[i] == coarse) out.push_back(static_cast<int>(i));
    }
    return out;
}

int32_t Vocabulary::add_or_get(const std::string& token) {
    auto it = index_.find(token);
    if (it != index_.end()) return it->second;
    const int32_t id = static_cast<int32_t>(tokens_.size());
    tokens_.push_back(token);
    index_.emplace(token, id);
    return id;
}

int32_t Vocabulary::lookup(const std::string& token) const {
    auto it = index_.find(token);
    return it == index_.end() ? kUnk : it->second;
}

uint64_t Vocabulary::hash() const {
    uint64_t h = fnv1a64("cf-vocab");
    const uint64_t n = tokens_.size();
    h = fnv1a64_bytes(&n, sizeof(n), h);
    for (const std::string& t : tokens_) {
        h = fnv1a64(t, h);
        h = fnv1a64("\n", h);
    }
    return h;
}

}  // namespace cf
