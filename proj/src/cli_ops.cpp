#include "cf/cli_ops.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "cf/corpus.hpp"
#include "cf/errors.hpp"
#include "cf/evaluation.hpp"
#include "cf/generator.hpp"
#include "cf/parallel.hpp"
#include "cf/training.hpp"

namespace fs = std::filesystem;

namespace cf {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string join_path(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

void apply_loss_overrides(TrainConfig& t, const Overrides& ov) {
    if (ov.seed) t.seed = *ov.seed;
    if (ov.loss) t.loss.mode = loss_mode_from_string(*ov.loss);
    if (ov.lambda) t.loss.lambda = *ov.lambda;
    if (ov.gamma) t.loss.gamma = *ov.gamma;
    if (ov.margin) t.loss.margin = *ov.margin;
    if (ov.sampling_ratio) {
        t.sampling = true;  // the flag is the sampling baseline's knob
        t.sampling_ratio = *ov.sampling_ratio;
    }
}

Json score_json(const ScoreTriple& s) {
    return Json{{"precision", s.precision}, {"recall", s.recall}, {"f1", s.f1}};
}

ScoreTriple score_from_json(const Json& j, const std::string& path) {
    if (!j.is_object() || !j.contains("precision") || !j.contains("recall") ||
        !j.contains("f1"))
        throw ConfigError(path + ": expected {precision, recall, f1}");
    ScoreTriple s;
    s.precision = j["precision"].get<double>();
    s.recall = j["recall"].get<double>();
    s.f1 = j["f1"].get<double>();
    return s;
}

Json breakdown_json(const ErrorBreakdown& b) {
    return Json{{"total_error", b.total_error},
                {"trigger_nil", b.trigger_nil},
                {"sibling", b.sibling},
                {"other", b.other}};
}

ErrorBreakdown breakdown_from_json(const Json& j, const std::string& path) {
    if (!j.is_object() || !j.contains("total_error"))
        throw ConfigError(path + ": expected an error_breakdown object");
    ErrorBreakdown b;
    b.total_error = j["total_error"].get<double>();
    b.trigger_nil = j["trigger_nil"].get<double>();
    b.sibling = j["sibling"].get<double>();
    b.other = j["other"].get<double>();
    return b;
}

// Scores + breakdown + confusion for one instance set under fixed params.
Json eval_json(const ModelParams& params, const std::vector<Instance>& instances,
               const LabelSchema& schema, int n_threads) {
    std::vector<int> preds = predict_labels(params, instances, n_threads);
    std::vector<int> gold(instances.size());
    ConfusionMatrix cm(schema.num_labels());
    bool any_trigger = false;
    for (size_t i = 0; i < instances.size(); ++i) {
        gold[i] = instances[i].gold;
        cm.add(gold[i], preds[i]);
        if (gold[i] != LabelSchema::kNil) any_trigger = true;
    }
    Json out;
    out["instances"] = instances.size();
    out["scores"] = score_json(micro_scores(gold, preds));
    if (any_trigger)
        out["error_breakdown"] = breakdown_json(error_breakdown(gold, preds, schema));
    Json counts = Json::array();
    for (int i = 0; i < cm.k; ++i) {
        Json row = Json::array();
        for (int j = 0; j < cm.k; ++j) row.push_back(cm.at(i, j));
        counts.push_back(std::move(row));
    }
    out["confusion"] = Json{{"labels", schema.labels()}, {"counts", std::move(counts)}};
    return out;
}

Vocabulary vocab_from_json_file(const std::string& path) {
    Json j = load_json_file(path);
    if (!j.is_object() || !j.contains("tokens") || !j["tokens"].is_array())
        throw ConfigError(path + ": expected {tokens: [...]}");
    Vocabulary v;
    const auto& toks = j["tokens"];
    for (size_t i = 2; i < toks.size(); ++i)
        v.add_or_get(toks[i].get<std::string>());
    return v;
}

struct RunInfo {
    std::string dir;
    std::string name;  // directory basename
    std::string mode;
    uint64_t seed = 0;
    std::string test_path;
    std::string test_checksum;
    ScoreTriple scores;
    ErrorBreakdown breakdown;
};

RunInfo read_run(const std::string& dir) {
    RunInfo r;
    r.dir = dir;
    fs::path p(dir);
    r.name = p.filename().string();
    if (r.name.empty()) r.name = p.parent_path().filename().string();

    Json manifest = load_json_file(join_path(dir, "manifest.json"));
    const std::string mpath = join_path(dir, "manifest.json");
    if (!manifest.contains("config"))
        throw ConfigError(mpath + ": missing config");
    const Json& cfg = manifest["config"];
    if (!cfg.contains("loss") || !cfg["loss"].contains("mode"))
        throw ConfigError(mpath + ": config.loss.mode missing");
    r.mode = cfg["loss"]["mode"].get<std::string>();
    r.seed = manifest.value("seed", uint64_t{0});
    if (!cfg.contains("corpus") || !cfg["corpus"].contains("test"))
        throw ConfigError(mpath + ": config.corpus.test missing");
    r.test_path = cfg["corpus"]["test"].get<std::string>();
    if (r.test_path.empty())
        throw ConfigError(dir + ": run has no test corpus; nothing to compare");
    if (!manifest.contains("inputs") || !manifest["inputs"].contains(r.test_path))
        throw ConfigError(mpath + ": no checksum for test corpus " + r.test_path);
    r.test_checksum = manifest["inputs"][r.test_path].get<std::string>();

    Json ev = load_json_file(join_path(dir, "test_eval.json"));
    const std::string epath = join_path(dir, "test_eval.json");
    r.scores = score_from_json(ev.value("scores", Json()), epath + ": scores");
    if (!ev.contains("error_breakdown"))
        throw ConfigError(epath + ": error_breakdown missing (test corpus had no triggers?)");
    r.breakdown = breakdown_from_json(ev["error_breakdown"], epath + ": error_breakdown");
    return r;
}

std::string fmt(const char* format, double a) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), format, a);
    return buf;
}

}  // namespace

void cmd_generate(const std::string& config_path, const std::string& out_dir,
                  const Overrides& ov) {
    auto t0 = std::chrono::steady_clock::now();
    GenerateJob job = generate_job_from_json(load_json_file(config_path));
    if (ov.seed) job.gen.seed = *ov.seed;
    job.gen = expand_profiles(job.gen);
    job.gen.validate();

    const int total = job.split_train + job.split_dev + job.split_test;
    std::vector<Sentence> all = generate_sentences(job.gen, total);

    fs::create_directories(out_dir);
    auto slice = [&](int from, int to) {
        return std::vector<Sentence>(all.begin() + from, all.begin() + to);
    };
    const std::string train_path = join_path(out_dir, "train.tsv");
    const std::string dev_path = join_path(out_dir, "dev.tsv");
    const std::string test_path = join_path(out_dir, "test.tsv");
    write_tsv(slice(0, job.split_train), train_path);
    write_tsv(slice(job.split_train, job.split_train + job.split_dev), dev_path);
    write_tsv(slice(job.split_train + job.split_dev, total), test_path);
    const std::string sidecar = join_path(out_dir, "generator_config.json");
    write_json_file(sidecar, generate_job_to_json(job));

    ManifestBuilder mb;
    mb.command = "generate";
    mb.seed = job.gen.seed;
    mb.config = generate_job_to_json(job);
    mb.add_input(config_path);
    mb.add_output(train_path);
    mb.add_output(dev_path);
    mb.add_output(test_path);
    mb.add_output(sidecar);
    mb.write(join_path(out_dir, "manifest.json"), seconds_since(t0));
    std::cout << "generated " << total << " sentences into " << out_dir << "\n";
}

void cmd_train(const std::string& config_path, const std::string& out_dir,
               const Overrides& ov) {
    auto t0 = std::chrono::steady_clock::now();
    const std::string config_dir = fs::path(config_path).parent_path().string();
    TrainJob job = train_job_from_json(load_json_file(config_path), config_dir);
    apply_loss_overrides(job.train, ov);

    LabelSchema schema = LabelSchema::from_labels(job.labels);
    Vocabulary vocab;
    std::vector<Instance> train_set =
        parse_corpus(job.train_path, schema, vocab, VocabMode::kBuild,
                     job.train.model.window);
    std::vector<Instance> dev_set = parse_corpus(job.dev_path, schema, vocab,
                                                 VocabMode::kLookup,
                                                 job.train.model.window);
    std::vector<Instance> test_set;
    if (!job.test_path.empty())
        test_set = parse_corpus(job.test_path, schema, vocab, VocabMode::kLookup,
                                job.train.model.window);

    job.train.model.vocab_size = vocab.size();
    job.train.model.num_labels = schema.num_labels();
    job.train.eval_threads = resolve_eval_threads();

    TrainResult res = train(train_set, dev_set, job.train);

    fs::create_directories(out_dir);
    const std::string ckpt_path = join_path(out_dir, "checkpoint.json");
    save_checkpoint(ckpt_path, res.best_params, job.labels, vocab.hash());
    const std::string vocab_path = join_path(out_dir, "vocab.json");
    write_json_file(vocab_path, Json{{"tokens", vocab.tokens()}});

    Json report;
    Json epochs = Json::array();
    for (const EpochRow& row : res.report.epochs)
        epochs.push_back(Json{{"epoch", row.epoch},
                              {"train_loss", row.train_loss},
                              {"dev", score_json(row.dev)},
                              {"cost_used", row.cost_used},
                              {"cost_produced", row.cost_produced}});
    report["epochs"] = std::move(epochs);
    report["best_epoch"] = res.report.best_epoch;
    report["best_f1"] = res.report.best_f1;
    const std::string report_path = join_path(out_dir, "report.json");
    write_json_file(report_path, report);

    std::string test_eval_path;
    if (!test_set.empty()) {
        test_eval_path = join_path(out_dir, "test_eval.json");
        write_json_file(test_eval_path, eval_json(res.best_params, test_set, schema,
                                                  job.train.eval_threads));
    }

    ManifestBuilder mb;
    mb.command = "train";
    mb.seed = job.train.seed;
    mb.config = train_job_to_json(job);
    mb.add_input(config_path);
    mb.add_input(job.train_path);
    mb.add_input(job.dev_path);
    if (!job.test_path.empty()) mb.add_input(job.test_path);
    mb.add_output(ckpt_path);
    mb.add_output(vocab_path);
    mb.add_output(report_path);
    if (!test_eval_path.empty()) mb.add_output(test_eval_path);
    mb.write(join_path(out_dir, "manifest.json"), seconds_since(t0));
    std::printf("best epoch %d  dev_f1 %.4f\n", res.report.best_epoch,
                res.report.best_f1);
}

void cmd_evaluate(const std::string& run_dir, const std::string& corpus_path,
                  const std::string& out_dir) {
    auto t0 = std::chrono::steady_clock::now();
    Checkpoint ckpt = load_checkpoint(join_path(run_dir, "checkpoint.json"));
    Vocabulary vocab = vocab_from_json_file(join_path(run_dir, "vocab.json"));
    if (vocab.hash() != ckpt.vocab_hash)
        throw ConfigError(run_dir + ": vocab.json does not match the checkpoint "
                          "(vocabulary hash mismatch)");
    LabelSchema schema = LabelSchema::from_labels(ckpt.labels);
    std::vector<Instance> instances = parse_corpus(
        corpus_path, schema, vocab, VocabMode::kLookup, ckpt.params.cfg.window);
    if (instances.empty()) throw ContractError(corpus_path + ": empty corpus");

    Json ev = eval_json(ckpt.params, instances, schema, resolve_eval_threads());
    std::cout << ev.dump(1) << "\n";
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        const std::string eval_path = join_path(out_dir, "eval.json");
        write_json_file(eval_path, ev);
        ManifestBuilder mb;
        mb.command = "evaluate";
        mb.seed = 0;
        mb.config = Json{{"run", run_dir}, {"corpus", corpus_path}};
        mb.add_input(join_path(run_dir, "checkpoint.json"));
        mb.add_input(join_path(run_dir, "vocab.json"));
        mb.add_input(corpus_path);
        mb.add_output(eval_path);
        mb.write(join_path(out_dir, "manifest.json"), seconds_since(t0));
    }
}

void cmd_compare(const std::vector<std::string>& run_dirs, const std::string& out_dir) {
    auto t0 = std::chrono::steady_clock::now();
    if (run_dirs.size() < 2)
        throw ConfigError("compare: need at least 2 run directories");
    std::vector<RunInfo> runs;
    for (const auto& dir : run_dirs) runs.push_back(read_run(dir));

    for (const RunInfo& r : runs)
        if (r.test_checksum != runs[0].test_checksum) {
            std::ostringstream msg;
            msg << "compare: runs were evaluated on different test corpora:\n";
            for (const RunInfo& q : runs)
                msg << "  " << q.dir << ": " << q.test_path << " (" << q.test_checksum
                    << ")\n";
            throw ConfigError(msg.str());
        }

    std::ostringstream md;
    md << "# Run comparison\n\n";
    md << "Test corpus: `" << runs[0].test_path << "` (checksum `"
       << runs[0].test_checksum << "`), " << runs.size() << " runs. Baseline: `"
       << runs[0].name << "`.\n\n";

    md << "## Scores\n\n";
    md << "| run | loss | seed | P | R | F1 |\n";
    md << "| --- | --- | ---: | ---: | ---: | ---: |\n";
    for (const RunInfo& r : runs) {
        char line[256];
        std::snprintf(line, sizeof(line),
                      "| %s | %s | %llu | %.2f | %.2f | %.2f |\n", r.name.c_str(),
                      r.mode.c_str(), static_cast<unsigned long long>(r.seed),
                      100.0 * r.scores.precision, 100.0 * r.scores.recall,
                      100.0 * r.scores.f1);
        md << line;
    }

    // Per-mode aggregates in first-appearance order.
    std::vector<std::string> modes;
    for (const RunInfo& r : runs)
        if (std::find(modes.begin(), modes.end(), r.mode) == modes.end())
            modes.push_back(r.mode);
    md << "\n## F1 by loss mode\n\n";
    md << "| loss | runs | mean F1 | min F1 | max F1 |\n";
    md << "| --- | ---: | ---: | ---: | ---: |\n";
    for (const std::string& mode : modes) {
        double sum = 0, lo = 1e9, hi = -1e9;
        int n = 0;
        for (const RunInfo& r : runs)
            if (r.mode == mode) {
                sum += r.scores.f1;
                lo = std::min(lo, r.scores.f1);
                hi = std::max(hi, r.scores.f1);
                ++n;
            }
        char line[256];
        std::snprintf(line, sizeof(line), "| %s | %d | %.2f | %.2f | %.2f |\n",
                      mode.c_str(), n, 100.0 * sum / n, 100.0 * lo, 100.0 * hi);
        md << line;
    }

    md << "\n## Error breakdown on gold triggers\n\n";
    md << "Percentages of gold non-NIL test instances; deltas are relative to the "
          "baseline run.\n\n";
    md << "| run | total error | trigger/NIL | sibling | other |\n";
    md << "| --- | ---: | ---: | ---: | ---: |\n";
    const ErrorBreakdown& base = runs[0].breakdown;
    for (const RunInfo& r : runs) {
        auto cell = [&](double b, double v) {
            std::string s = fmt("%.2f", v);
            if (&r != &runs[0]) s += " (" + delta_percent(b, v) + ")";
            return s;
        };
        md << "| " << r.name << " | " << cell(base.total_error, r.breakdown.total_error)
           << " | " << cell(base.trigger_nil, r.breakdown.trigger_nil) << " | "
           << cell(base.sibling, r.breakdown.sibling) << " | "
           << cell(base.other, r.breakdown.other) << " |\n";
    }

    std::ostringstream csv;
    csv << "run,loss,seed,precision,recall,f1,total_error,trigger_nil,sibling,other\n";
    for (const RunInfo& r : runs) {
        char line[512];
        std::snprintf(line, sizeof(line), "%s,%s,%llu,%.6f,%.6f,%.6f,%.4f,%.4f,%.4f,%.4f\n",
                      r.name.c_str(), r.mode.c_str(),
                      static_cast<unsigned long long>(r.seed), r.scores.precision,
                      r.scores.recall, r.scores.f1, r.breakdown.total_error,
                      r.breakdown.trigger_nil, r.breakdown.sibling, r.breakdown.other);
        csv << line;
    }

    fs::create_directories(out_dir);
    const std::string md_path = join_path(out_dir, "compare.md");
    const std::string csv_path = join_path(out_dir, "compare.csv");
    {
        std::ofstream out(md_path, std::ios::binary);
        if (!out) throw ConfigError("cannot write file: " + md_path);
        out << md.str();
    }
    {
        std::ofstream out(csv_path, std::ios::binary);
        if (!out) throw ConfigError("cannot write file: " + csv_path);
        out << csv.str();
    }

    ManifestBuilder mb;
    mb.command = "compare";
    mb.seed = 0;
    Json dirs = Json::array();
    for (const auto& d : run_dirs) dirs.push_back(d);
    mb.config = Json{{"runs", std::move(dirs)}};
    for (const RunInfo& r : runs) {
        mb.add_input(join_path(r.dir, "manifest.json"));
        mb.add_input(join_path(r.dir, "test_eval.json"));
    }
    mb.add_output(md_path);
    mb.add_output(csv_path);
    mb.write(join_path(out_dir, "manifest.json"), seconds_since(t0));
    std::cout << "compared " << runs.size() << " runs into " << out_dir << "\n";
}

void cmd_report(const std::string& run_dir, const std::string& out_dir) {
    auto t0 = std::chrono::steady_clock::now();
    const std::string report_path = join_path(run_dir, "report.json");
    Json report = load_json_file(report_path);
    if (!report.contains("epochs") || !report["epochs"].is_array())
        throw ConfigError(report_path + ": epochs missing");

    fs::create_directories(out_dir);
    std::vector<std::string> written;

    // Epoch curve.
    {
        std::ostringstream csv;
        csv << "epoch,train_loss,dev_precision,dev_recall,dev_f1,cost_used,cost_produced\n";
        for (const Json& row : report["epochs"]) {
            char line[256];
            std::snprintf(line, sizeof(line), "%d,%.9g,%.6f,%.6f,%.6f,%s,%s\n",
                          row["epoch"].get<int>(), row["train_loss"].get<double>(),
                          row["dev"]["precision"].get<double>(),
                          row["dev"]["recall"].get<double>(),
                          row["dev"]["f1"].get<double>(),
                          row["cost_used"].get<std::string>().c_str(),
                          row["cost_produced"].get<std::string>().c_str());
            csv << line;
        }
        const std::string path = join_path(out_dir, "epochs.csv");
        std::ofstream out(path, std::ios::binary);
        if (!out) throw ConfigError("cannot write file: " + path);
        out << csv.str();
        written.push_back(path);
    }

    std::ostringstream md;
    md << "# Training report\n\n";
    md << "Run directory: `" << run_dir << "`\n\n";
    md << "Best epoch: " << report.value("best_epoch", 0) << " (dev F1 "
       << fmt("%.4f", report.value("best_f1", 0.0)) << ")\n\n";
    md << "Per-epoch curve: `epochs.csv`\n";

    const std::string test_eval_path = join_path(run_dir, "test_eval.json");
    if (fs::exists(test_eval_path)) {
        Json ev = load_json_file(test_eval_path);
        ScoreTriple scores = score_from_json(ev.value("scores", Json()),
                                             test_eval_path + ": scores");
        md << "\n## Test scores\n\n";
        md << "| split | P | R | F1 |\n| --- | ---: | ---: | ---: |\n";
        md << scores_markdown_row("test", scores) << "\n";
        if (ev.contains("error_breakdown")) {
            ErrorBreakdown b = breakdown_from_json(ev["error_breakdown"],
                                                   test_eval_path + ": error_breakdown");
            md << "\n## Error breakdown on gold triggers\n\n";
            md << breakdown_markdown_table({{"test", b}});
        }
        if (ev.contains("confusion")) {
            const Json& conf = ev["confusion"];
            std::vector<std::string> labels;
            for (const auto& l : conf["labels"]) labels.push_back(l.get<std::string>());
            LabelSchema schema = LabelSchema::from_labels(labels);
            ConfusionMatrix cm(schema.num_labels());
            const Json& counts = conf["counts"];
            for (int i = 0; i < cm.k; ++i)
                for (int j = 0; j < cm.k; ++j)
                    cm.at(i, j) = counts[i][j].get<int64_t>();

            const std::string conf_path = join_path(out_dir, "confusion.csv");
            std::ofstream out(conf_path, std::ios::binary);
            if (!out) throw ConfigError("cannot write file: " + conf_path);
            out << cm.to_csv(schema);
            written.push_back(conf_path);
            md << "\nConfusion matrix: `confusion.csv`\n";

            md << "\n## Prediction heatmaps\n\n";
            for (const std::string& coarse : schema.coarse_types()) {
                CoarseHeatmap hm = coarse_heatmap_from_confusion(cm, schema, coarse);
                const std::string hm_path =
                    join_path(out_dir, "heatmap_" + coarse + ".csv");
                std::ofstream hout(hm_path, std::ios::binary);
                if (!hout) throw ConfigError("cannot write file: " + hm_path);
                hout << hm.to_csv();
                written.push_back(hm_path);
                md << "- `" << fs::path(hm_path).filename().string() << "`";
                if (!hm.omitted.empty()) {
                    md << " (omitted rows:";
                    for (const auto& o : hm.omitted) md << ' ' << o;
                    md << ")";
                }
                md << "\n";
            }
        }
    }

    const std::string md_path = join_path(out_dir, "report.md");
    {
        std::ofstream out(md_path, std::ios::binary);
        if (!out) throw ConfigError("cannot write file: " + md_path);
        out << md.str();
    }
    written.push_back(md_path);

    ManifestBuilder mb;
    mb.command = "report";
    mb.seed = 0;
    mb.config = Json{{"run", run_dir}};
    mb.add_input(report_path);
    if (fs::exists(test_eval_path)) mb.add_input(test_eval_path);
    for (const auto& p : written) mb.add_output(p);
    mb.write(join_path(out_dir, "manifest.json"), seconds_since(t0));
    std::cout << "report written to " << out_dir << "\n";
}

}  // namespace cf
