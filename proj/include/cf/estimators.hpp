#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cf/model.hpp"
#include "cf/numerics.hpp"
#include "cf/schema.hpp"

namespace cf {

struct ConfusionMatrix {
    int k = 0;
    std::vector<int64_t> counts;  // K*K row-major, counts[gold*k + pred]

    ConfusionMatrix() = default;
    explicit ConfusionMatrix(int num_labels) : k(num_labels), counts(size_t(num_labels) * num_labels, 0) {}

    int64_t& at(int gold, int pred) { return counts[size_t(gold) * k + pred]; }
    int64_t at(int gold, int pred) const { return counts[size_t(gold) * k + pred]; }
    void add(int gold, int pred) { ++at(gold, pred); }
    int64_t row_total(int gold) const;
    int64_t total() const;

    // One line per cell: gold_label,pred_label,count.
    std::string to_csv(const LabelSchema& schema) const;
};

struct CostMatrix {
    int k = 0;
    std::vector<double> costs;  // K*K row-major, in [0,1]

    CostMatrix() = default;
    explicit CostMatrix(int num_labels) : k(num_labels), costs(size_t(num_labels) * num_labels, 0.0) {}

    double at(int gold, int pred) const { return costs[size_t(gold) * k + pred]; }
    // Row C(gold, ·) as a vector view copy for the loss layer.
    Vec row(int gold) const;

    bool is_zero() const;
    // FNV over the raw double bytes; stable identity for report rows.
    uint64_t content_hash() const;

    std::string to_csv(const LabelSchema& schema) const;
};

// Forward + argmax over every instance, counts[gold][pred] += 1.
// Throws ContractError on empty input. n_threads follows predict_labels.
ConfusionMatrix accumulate_confusion(const ModelParams& params,
                                     const std::vector<Instance>& instances,
                                     int n_threads = 1);

// Row-normalized confusion: C[i][j] = counts[i][j] / row_total(i), diagonal
// included in the denominator. Zero-total rows stay all-zero.
CostMatrix population_costs(const ConfusionMatrix& confusion);

}  // namespace cf
