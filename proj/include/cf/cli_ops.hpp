#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cf/config_io.hpp"

namespace cf {

// CLI flag overrides; a set flag wins over the config file.
struct Overrides {
    std::optional<uint64_t> seed;
    std::optional<std::string> loss;
    std::optional<double> lambda;
    std::optional<double> gamma;
    std::optional<double> margin;
    std::optional<double> sampling_ratio;
};

// generate: config -> out_dir/{train,dev,test}.tsv + generator_config.json
// (fully expanded sidecar) + manifest.json.
void cmd_generate(const std::string& config_path, const std::string& out_dir,
                  const Overrides& ov);

// train: config -> out_dir/{checkpoint,vocab,report,test_eval,manifest}.json.
// test_eval.json is written only when the config names a test corpus.
void cmd_train(const std::string& config_path, const std::string& out_dir,
               const Overrides& ov);

// evaluate: run dir (checkpoint.json + vocab.json) against a TSV corpus;
// scores JSON to stdout, and to <out>/eval.json when out is non-empty.
void cmd_evaluate(const std::string& run_dir, const std::string& corpus_path,
                  const std::string& out_dir);

// compare: >= 2 completed train run dirs over the same test corpus ->
// out_dir/{compare.md,compare.csv}. The first dir is the baseline for the
// error-breakdown delta column. Refuses on mismatched test checksums.
void cmd_compare(const std::vector<std::string>& run_dirs, const std::string& out_dir);

// report: one completed train run dir -> out_dir/{report.md, epochs.csv,
// confusion.csv, heatmap_<coarse>.csv...}.
void cmd_report(const std::string& run_dir, const std::string& out_dir);

}  // namespace cf
