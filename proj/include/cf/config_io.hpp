#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "cf/generator.hpp"
#include "cf/training.hpp"

namespace cf {

using Json = nlohmann::ordered_json;

// Parses a JSON file; ParseError names the path on bad syntax.
Json load_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& j);

// FNV-1a over the raw file bytes; ConfigError if unreadable.
uint64_t file_checksum(const std::string& path);
std::string file_checksum_hex(const std::string& path);

// Generator run config: the GeneratorConfig fields plus sentence counts per
// split. JSON field errors carry the field path.
struct GenerateJob {
    GeneratorConfig gen;
    int split_train = 200;
    int split_dev = 50;
    int split_test = 50;
};

GenerateJob generate_job_from_json(const Json& j);
// Fully-expanded form (lemma profiles included) for the corpus sidecar.
Json generate_job_to_json(const GenerateJob& job);

// Train run config: corpus paths + label schema + TrainConfig. Labels come
// inline ("labels": [...]) or from a generator sidecar ("labels_from": path).
struct TrainJob {
    std::string train_path;
    std::string dev_path;
    std::string test_path;  // optional; empty = no test evaluation
    std::vector<std::string> labels;
    TrainConfig train;
};

TrainJob train_job_from_json(const Json& j, const std::string& config_dir);
Json train_job_to_json(const TrainJob& job);

// Run manifest: everything needed to reproduce the run, plus wall-clock and
// timestamp (the only fields allowed to differ between identical re-runs).
struct ManifestBuilder {
    std::string command;
    uint64_t seed = 0;
    Json config;
    std::map<std::string, std::string> inputs;   // path -> checksum hex
    std::map<std::string, std::string> outputs;  // path -> checksum hex

    void add_input(const std::string& path);
    void add_output(const std::string& path);
    void write(const std::string& path, double wall_clock_seconds) const;
};

}  // namespace cf
