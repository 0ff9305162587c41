#include "cf/parallel.hpp"

#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace cf {

int resolve_eval_threads() {
    const char* env = std::getenv("CONFUSE_FORGE_THREADS");
    int n = 1;
    if (env != nullptr && *env != '\0') {
        try {
            size_t pos = 0;
            int v = std::stoi(env, &pos);
            if (pos == std::string(env).size() && v >= 1) n = v;
        } catch (const std::exception&) {
            // fall through to 1
        }
    }
#ifdef _OPENMP
    int hw = omp_get_max_threads();
    if (n > hw) n = hw;
#else
    n = 1;
#endif
    return n;
}

int predict_one(const ModelParams& params, const Instance& inst) {
    ForwardCache cache = forward(params, inst);
    int best = 0;
    for (size_t k = 1; k < cache.logits.values.size(); ++k)
        if (cache.logits.values[k] > cache.logits.values[best])
            best = static_cast<int>(k);
    return best;
}

std::vector<int> predict_labels_serial(const ModelParams& params,
                                       const std::vector<Instance>& instances) {
    std::vector<int> preds(instances.size());
    for (size_t i = 0; i < instances.size(); ++i)
        preds[i] = predict_one(params, instances[i]);
    return preds;
}

std::vector<int> predict_labels(const ModelParams& params,
                                const std::vector<Instance>& instances,
                                int n_threads) {
    if (n_threads <= 1) return predict_labels_serial(params, instances);
    std::vector<int> preds(instances.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(n_threads)
    for (size_t i = 0; i < instances.size(); ++i)
        preds[i] = predict_one(params, instances[i]);
#else
    for (size_t i = 0; i < instances.size(); ++i)
        preds[i] = predict_one(params, instances[i]);
#endif
    return preds;
}

}  // namespace cf
