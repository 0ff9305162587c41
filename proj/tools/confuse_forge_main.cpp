// confuse-forge: train and analyze word-window event-trigger classifiers
// with confusion-driven cost-sensitive losses.

#include <cstdio>
#include <exception>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "cf/cli_ops.hpp"
#include "cf/errors.hpp"

int main(int argc, char** argv) {
    CLI::App app{"confuse-forge: event-trigger training workbench"};
    app.require_subcommand(1);

    cf::Overrides ov;
    std::string config_path, out_dir, run_dir, corpus_path;
    std::vector<std::string> run_dirs;

    auto add_seed = [&](CLI::App* cmd) {
        cmd->add_option_function<uint64_t>(
            "--seed", [&](uint64_t v) { ov.seed = v; }, "override the config seed");
    };

    CLI::App* gen = app.add_subcommand("generate", "emit a synthetic TSV corpus");
    gen->add_option("--config", config_path, "generator config JSON")->required();
    gen->add_option("--out", out_dir, "output directory")->required();
    add_seed(gen);

    CLI::App* train = app.add_subcommand("train", "train a window classifier");
    train->add_option("--config", config_path, "train config JSON")->required();
    train->add_option("--out", out_dir, "output directory")->required();
    add_seed(train);
    train->add_option_function<std::string>(
        "--loss", [&](std::string v) { ov.loss = v; },
        "ce|cs_pop|cs_ins|focal|hinge");
    train->add_option_function<double>(
        "--lambda", [&](double v) { ov.lambda = v; }, "cost-regularizer weight");
    train->add_option_function<double>(
        "--gamma", [&](double v) { ov.gamma = v; }, "focal exponent");
    train->add_option_function<double>(
        "--margin", [&](double v) { ov.margin = v; }, "hinge margin");
    train->add_option_function<double>(
        "--sampling-ratio", [&](double v) { ov.sampling_ratio = v; },
        "NIL instances kept per trigger (enables under-sampling)");

    CLI::App* eval = app.add_subcommand("evaluate", "score a checkpoint on a corpus");
    eval->add_option("--run", run_dir, "directory of a completed train run")->required();
    eval->add_option("--corpus", corpus_path, "TSV corpus to score")->required();
    eval->add_option("--out", out_dir, "optional output directory");

    CLI::App* cmp = app.add_subcommand("compare", "compare completed train runs");
    cmp->add_option("--runs", run_dirs, "two or more train run directories")
        ->required()
        ->expected(-2);
    cmp->add_option("--out", out_dir, "output directory")->required();

    CLI::App* rep = app.add_subcommand("report", "render a run's report files");
    rep->add_option("--run", run_dir, "directory of a completed train run")->required();
    rep->add_option("--out", out_dir, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (gen->parsed()) cf::cmd_generate(config_path, out_dir, ov);
        if (train->parsed()) cf::cmd_train(config_path, out_dir, ov);
        if (eval->parsed()) cf::cmd_evaluate(run_dir, corpus_path, out_dir);
        if (cmp->parsed()) cf::cmd_compare(run_dirs, out_dir);
        if (rep->parsed()) cf::cmd_report(run_dir, out_dir);
    } catch (const cf::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const cf::ParseError& e) {
        std::fprintf(stderr, "parse error: %s\n", e.what());
        return 2;
    } catch (const cf::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
