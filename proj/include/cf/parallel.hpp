#pragma once

#include <vector>

#include "cf/model.hpp"
#include "cf/schema.hpp"

namespace cf {

// Thread cap for evaluation-side parallelism. Reads CONFUSE_FORGE_THREADS;
// unset, empty, or invalid → 1 (bit-reproducible default). Never exceeds
// the OpenMP limit when compiled with OpenMP.
int resolve_eval_threads();

// Argmax over logits, ties to the lowest index. Prediction is defined on
// logits, not probabilities, so serial and parallel paths can't disagree
// through exp() rounding.
int predict_one(const ModelParams& params, const Instance& inst);

// Serial reference implementation.
std::vector<int> predict_labels_serial(const ModelParams& params,
                                       const std::vector<Instance>& instances);

// OpenMP map over instances against read-only params; bit-identical to the
// serial path for any thread count. n_threads <= 1 runs serially.
std::vector<int> predict_labels(const ModelParams& params,
                                const std::vector<Instance>& instances,
                                int n_threads);

}  // namespace cf
