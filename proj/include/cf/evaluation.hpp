#pragma once

#include <string>
#include <vector>

#include "cf/estimators.hpp"
#include "cf/schema.hpp"

namespace cf {

struct ScoreTriple {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

// Correct iff pred == gold and gold != NIL. P = correct / #(pred != NIL),
// R = correct / #(gold != NIL); a zero denominator reports that score as 0.
ScoreTriple micro_scores(const std::vector<int>& gold, const std::vector<int>& pred);

// Percentages over gold non-NIL instances; total_error is the exact sum of
// the three parts.
struct ErrorBreakdown {
    double total_error = 0.0;
    double trigger_nil = 0.0;  // predicted NIL
    double sibling = 0.0;      // predicted a same-coarse, different sub-type
    double other = 0.0;        // predicted a different coarse type
};

// Requires at least one gold non-NIL instance.
ErrorBreakdown error_breakdown(const std::vector<int>& gold, const std::vector<int>& pred,
                               const LabelSchema& schema);

// Row-normalized percentage table for one coarse type: rows are its sub-types,
// columns those sub-types + NIL + "CC" (all cross-coarse predictions pooled).
// Rows with no gold instances are dropped and recorded in `omitted`.
struct CoarseHeatmap {
    std::string coarse;
    std::vector<std::string> row_labels;
    std::vector<std::string> col_labels;            // sub-types..., "NIL", "CC"
    std::vector<std::vector<double>> rows;          // percentages, each sums to 100
    std::vector<std::string> omitted;               // sub-types with no gold instances

    std::string to_csv() const;
};

CoarseHeatmap coarse_heatmap(const std::vector<int>& gold, const std::vector<int>& pred,
                             const LabelSchema& schema, const std::string& coarse);

// Same table computed from an already-accumulated confusion matrix.
CoarseHeatmap coarse_heatmap_from_confusion(const ConfusionMatrix& cm,
                                            const LabelSchema& schema,
                                            const std::string& coarse);

// Markdown renderers used by the report/compare commands.
std::string scores_markdown_row(const std::string& name, const ScoreTriple& s);
std::string breakdown_markdown_table(
    const std::vector<std::pair<std::string, ErrorBreakdown>>& rows);

// Table-style percent-change cell: (42.97 -> 38.84) renders as "-9.6%";
// increases carry an explicit "+"; a zero baseline renders "n/a".
std::string delta_percent(double baseline, double value);

}  // namespace cf
