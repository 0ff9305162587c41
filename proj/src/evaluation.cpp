#include "cf/evaluation.hpp"

#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>

#include "cf/errors.hpp"

namespace cf {

ScoreTriple micro_scores(const std::vector<int>& gold, const std::vector<int>& pred) {
    if (gold.size() != pred.size())
        throw ContractError("micro_scores: gold/pred length mismatch");
    int64_t correct = 0, pred_pos = 0, gold_pos = 0;
    for (size_t i = 0; i < gold.size(); ++i) {
        if (gold[i] != LabelSchema::kNil) ++gold_pos;
        if (pred[i] != LabelSchema::kNil) ++pred_pos;
        if (gold[i] != LabelSchema::kNil && pred[i] == gold[i]) ++correct;
    }
    ScoreTriple s;
    s.precision = pred_pos > 0 ? static_cast<double>(correct) / pred_pos : 0.0;
    s.recall = gold_pos > 0 ? static_cast<double>(correct) / gold_pos : 0.0;
    s.f1 = (s.precision + s.recall) > 0
               ? 2.0 * s.precision * s.recall / (s.precision + s.recall)
               : 0.0;
    return s;
}

ErrorBreakdown error_breakdown(const std::vector<int>& gold, const std::vector<int>& pred,
                               const LabelSchema& schema) {
    if (gold.size() != pred.size())
        throw ContractError("error_breakdown: gold/pred length mismatch");
    int64_t triggers = 0, to_nil = 0, to_sibling = 0, to_other = 0;
    for (size_t i = 0; i < gold.size(); ++i) {
        if (gold[i] == LabelSchema::kNil) continue;
        ++triggers;
        if (pred[i] == gold[i]) continue;
        if (pred[i] == LabelSchema::kNil)
            ++to_nil;
        else if (schema.siblings(gold[i], pred[i]))
            ++to_sibling;
        else
            ++to_other;
    }
    if (triggers == 0)
        throw ContractError("error_breakdown: no gold non-NIL instances");
    ErrorBreakdown b;
    const double denom = static_cast<double>(triggers);
    b.trigger_nil = 100.0 * to_nil / denom;
    b.sibling = 100.0 * to_sibling / denom;
    b.other = 100.0 * to_other / denom;
    b.total_error = b.trigger_nil + b.sibling + b.other;
    return b;
}

namespace {

CoarseHeatmap heatmap_from_counts(const LabelSchema& schema, const std::string& coarse,
                                  const std::vector<std::vector<int64_t>>& counts,
                                  const std::vector<int>& subs) {
    // counts[r] is indexed like the label space plus one trailing CC slot is
    // derived below; here counts[r][j] is raw gold=subs[r], pred=j over all K.
    CoarseHeatmap hm;
    hm.coarse = coarse;
    for (int s : subs) hm.col_labels.push_back(schema.label(s));
    hm.col_labels.push_back("NIL");
    hm.col_labels.push_back("CC");

    for (size_t r = 0; r < subs.size(); ++r) {
        int64_t row_total = 0;
        for (int j = 0; j < schema.num_labels(); ++j) row_total += counts[r][j];
        if (row_total == 0) {
            hm.omitted.push_back(schema.label(subs[r]));
            std::cerr << "warning: heatmap row " << schema.label(subs[r])
                      << " has no gold instances; omitted\n";
            continue;
        }
        std::vector<double> row;
        int64_t accounted = 0;
        for (int s : subs) {
            row.push_back(100.0 * counts[r][s] / static_cast<double>(row_total));
            accounted += counts[r][s];
        }
        row.push_back(100.0 * counts[r][LabelSchema::kNil] / static_cast<double>(row_total));
        accounted += counts[r][LabelSchema::kNil];
        // Everything else is a cross-coarse prediction, pooled into CC.
        row.push_back(100.0 * (row_total - accounted) / static_cast<double>(row_total));
        hm.row_labels.push_back(schema.label(subs[r]));
        hm.rows.push_back(std::move(row));
    }
    return hm;
}

}  // namespace

CoarseHeatmap coarse_heatmap(const std::vector<int>& gold, const std::vector<int>& pred,
                             const LabelSchema& schema, const std::string& coarse) {
    if (gold.size() != pred.size())
        throw ContractError("coarse_heatmap: gold/pred length mismatch");
    std::vector<int> subs = schema.subtypes_of(coarse);
    if (subs.empty())
        throw ConfigError("coarse_heatmap: unknown coarse type '" + coarse + "'");
    std::vector<std::vector<int64_t>> counts(
        subs.size(), std::vector<int64_t>(schema.num_labels(), 0));
    for (size_t i = 0; i < gold.size(); ++i) {
        for (size_t r = 0; r < subs.size(); ++r)
            if (gold[i] == subs[r]) {
                ++counts[r][pred[i]];
                break;
            }
    }
    return heatmap_from_counts(schema, coarse, counts, subs);
}

CoarseHeatmap coarse_heatmap_from_confusion(const ConfusionMatrix& cm,
                                            const LabelSchema& schema,
                                            const std::string& coarse) {
    if (cm.k != schema.num_labels())
        throw ContractError("coarse_heatmap: confusion size does not match schema");
    std::vector<int> subs = schema.subtypes_of(coarse);
    if (subs.empty())
        throw ConfigError("coarse_heatmap: unknown coarse type '" + coarse + "'");
    std::vector<std::vector<int64_t>> counts(
        subs.size(), std::vector<int64_t>(schema.num_labels(), 0));
    for (size_t r = 0; r < subs.size(); ++r)
        for (int j = 0; j < cm.k; ++j) counts[r][j] = cm.at(subs[r], j);
    return heatmap_from_counts(schema, coarse, counts, subs);
}

std::string CoarseHeatmap::to_csv() const {
    std::ostringstream out;
    out << "gold";
    for (const auto& c : col_labels) out << ',' << c;
    out << '\n';
    char buf[32];
    for (size_t r = 0; r < rows.size(); ++r) {
        out << row_labels[r];
        for (double v : rows[r]) {
            std::snprintf(buf, sizeof(buf), "%.4f", v);
            out << ',' << buf;
        }
        out << '\n';
    }
    return out.str();
}

std::string scores_markdown_row(const std::string& name, const ScoreTriple& s) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "| %s | %.2f | %.2f | %.2f |", name.c_str(),
                  100.0 * s.precision, 100.0 * s.recall, 100.0 * s.f1);
    return std::string(buf);
}

std::string breakdown_markdown_table(
    const std::vector<std::pair<std::string, ErrorBreakdown>>& rows) {
    std::ostringstream out;
    out << "| run | total error | trigger/NIL | sibling | other |\n";
    out << "| --- | ---: | ---: | ---: | ---: |\n";
    char buf[160];
    for (const auto& [name, b] : rows) {
        std::snprintf(buf, sizeof(buf), "| %s | %.2f | %.2f | %.2f | %.2f |\n",
                      name.c_str(), b.total_error, b.trigger_nil, b.sibling, b.other);
        out << buf;
    }
    return out.str();
}

std::string delta_percent(double baseline, double value) {
    if (baseline == 0.0) return "n/a";
    double pct = 100.0 * (value - baseline) / baseline;
    // Round to one decimal first so "-0.04%" prints as "0.0%", not "-0.0%".
    double rounded = std::round(pct * 10.0) / 10.0;
    char buf[32];
    if (rounded == 0.0)
        std::snprintf(buf, sizeof(buf), "0.0%%");
    else
        std::snprintf(buf, sizeof(buf), "%+.1f%%", rounded);
    return std::string(buf);
}

}  // namespace cf
