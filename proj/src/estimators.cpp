#include "cf/estimators.hpp"

#include <cstring>
#include <numeric>
#include <sstream>

#include "cf/errors.hpp"
#include "cf/parallel.hpp"

namespace cf {

int64_t ConfusionMatrix::row_total(int gold) const {
    int64_t t = 0;
    for (int j = 0; j < k; ++j) t += at(gold, j);
    return t;
}

int64_t ConfusionMatrix::total() const {
    return std::accumulate(counts.begin(), counts.end(), int64_t{0});
}

std::string ConfusionMatrix::to_csv(const LabelSchema& schema) const {
    std::ostringstream out;
    out << "gold,pred,count\n";
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
            out << schema.label(i) << ',' << schema.label(j) << ',' << at(i, j) << '\n';
    return out.str();
}

Vec CostMatrix::row(int gold) const {
    return Vec(costs.begin() + size_t(gold) * k, costs.begin() + size_t(gold + 1) * k);
}

bool CostMatrix::is_zero() const {
    for (double c : costs)
        if (c != 0.0) return false;
    return true;
}

uint64_t CostMatrix::content_hash() const {
    uint64_t h = fnv1a64_bytes(&k, sizeof(k));
    if (!costs.empty())
        h = fnv1a64_bytes(costs.data(),
                    costs.size() * sizeof(double), h);
    return h;
}

std::string CostMatrix::to_csv(const LabelSchema& schema) const {
    std::ostringstream out;
    out << "gold,pred,cost\n";
    char buf[32];
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g", at(i, j));
            out << schema.label(i) << ',' << schema.label(j) << ',' << buf << '\n';
        }
    return out.str();
}

ConfusionMatrix accumulate_confusion(const ModelParams& params,
                                     const std::vector<Instance>& instances,
                                     int n_threads) {
    if (instances.empty())
        throw ContractError("accumulate_confusion: empty instance list");
    std::vector<int> preds = predict_labels(params, instances, n_threads);
    ConfusionMatrix cm(params.cfg.num_labels);
    for (size_t i = 0; i < instances.size(); ++i)
        cm.add(instances[i].gold, preds[i]);
    return cm;
}

CostMatrix population_costs(const ConfusionMatrix& confusion) {
    CostMatrix cost(confusion.k);
    for (int i = 0; i < confusion.k; ++i) {
        int64_t t = confusion.row_total(i);
        if (t == 0) continue;
        for (int j = 0; j < confusion.k; ++j)
            cost.costs[size_t(i) * confusion.k + j] =
                static_cast<double>(confusion.at(i, j)) / static_cast<double>(t);
    }
    return cost;
}

}  // namespace cf
