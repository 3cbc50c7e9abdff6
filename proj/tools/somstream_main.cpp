#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "somstream/cli.hpp"

using namespace somstream;

namespace {

/// Shared flags; file config is loaded first, then flags override.
void add_run_flags(CLI::App* app, cli::RunConfig& cfg, std::string& config_file) {
    app->add_option("--config", config_file, "run config file (key value per line)");
    app->add_option("--dataset", cfg.dataset, "stream file with truth columns");
    app->add_option("-d,--grid-dim", cfg.grid_dim, "SOM grid dimension");
    app->add_option("--eta", cfg.eta, "online learning rate");
    app->add_option("--seed", cfg.seed, "RNG seed");
    app->add_option("-W,--windows", cfg.n_windows, "evaluation window count");
    app->add_option("--offline-fraction", cfg.offline_fraction, "offline split fraction");
    app->add_option("--split-mode", cfg.split_mode, "head|stratified")
        ->transform(CLI::CheckedTransformer(
            std::map<std::string, SplitMode>{{"head", SplitMode::Head},
                                             {"stratified", SplitMode::Stratified}}));
    app->add_option("--avg-output-mode", cfg.avg_mode, "cumulative|running_mean")
        ->transform(CLI::CheckedTransformer(std::map<std::string, AvgOutputMode>{
            {"cumulative", AvgOutputMode::Cumulative},
            {"running_mean", AvgOutputMode::RunningMean}}));
    app->add_option("--variant", cfg.variant, "adaptive|frozen")
        ->check(CLI::IsMember({"adaptive", "frozen"}));
    app->add_flag("--no-scale,!--scale", cfg.scale_inputs, "toggle min-max feature scaling");
    app->add_option("-o,--output-dir", cfg.output_dir, "output directory");
}

cli::RunConfig resolve_config(const std::string& config_file, CLI::App* app,
                              const cli::RunConfig& flag_values) {
    if (config_file.empty()) return flag_values;
    cli::RunConfig cfg = cli::load_run_config(config_file);
    // flags given on the command line win over file keys
    auto override_if = [&](const std::string& name, auto member) {
        if (app->count(name) > 0) cfg.*member = flag_values.*member;
    };
    override_if("--dataset", &cli::RunConfig::dataset);
    override_if("--grid-dim", &cli::RunConfig::grid_dim);
    override_if("--eta", &cli::RunConfig::eta);
    override_if("--seed", &cli::RunConfig::seed);
    override_if("--windows", &cli::RunConfig::n_windows);
    override_if("--offline-fraction", &cli::RunConfig::offline_fraction);
    override_if("--split-mode", &cli::RunConfig::split_mode);
    override_if("--avg-output-mode", &cli::RunConfig::avg_mode);
    override_if("--variant", &cli::RunConfig::variant);
    override_if("--scale", &cli::RunConfig::scale_inputs);
    override_if("--output-dir", &cli::RunConfig::output_dir);
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"SOM-based multi-label stream classifier"};
    app.require_subcommand(1);

    cli::RunConfig cfg;
    if (const char* env = std::getenv("SOMSTREAM_OUT")) cfg.output_dir = env;
    std::string config_file;

    std::string gen_config, gen_out;
    auto* generate = app.add_subcommand("generate", "generate a synthetic drifting stream");
    generate->add_option("config", gen_config, "generator config file")->required();
    generate->add_option("out", gen_out, "output stream file")->required();

    std::string train_stream;
    auto* train = app.add_subcommand("train", "offline phase: train a model");
    train->add_option("stream", train_stream, "stream file")->required();
    add_run_flags(train, cfg, config_file);

    std::string run_model, run_stream;
    auto* run = app.add_subcommand("run", "online phase over the evaluation stream");
    run->add_option("model", run_model, "model file")->required();
    run->add_option("stream", run_stream, "stream file")->required();
    add_run_flags(run, cfg, config_file);

    std::string eval_log, eval_stream;
    auto* evaluate = app.add_subcommand("evaluate", "windowed macro-F evaluation");
    evaluate->add_option("log", eval_log, "prediction log")->required();
    evaluate->add_option("stream", eval_stream, "stream file with truth")->required();
    add_run_flags(evaluate, cfg, config_file);

    auto* pipeline =
        app.add_subcommand("pipeline", "generate/train/run/evaluate, adaptive vs frozen");
    add_run_flags(pipeline, cfg, config_file);
    pipeline->add_option("--generator-config", cfg.generator_config,
                         "generate the stream from this config first");

    CLI11_PARSE(app, argc, argv);

    try {
        if (generate->parsed()) {
            auto out = cli::cmd_generate(gen_config, gen_out);
            std::cout << "wrote " << out.string() << "\n";
        } else if (train->parsed()) {
            auto resolved = resolve_config(config_file, train, cfg);
            auto model = cli::cmd_train(train_stream, resolved);
            std::cout << "wrote " << model.string() << "\n";
        } else if (run->parsed()) {
            auto resolved = resolve_config(config_file, run, cfg);
            auto log = cli::cmd_run(run_model, run_stream, resolved);
            std::cout << "wrote " << log.string() << "\n";
        } else if (evaluate->parsed()) {
            auto resolved = resolve_config(config_file, evaluate, cfg);
            cli::cmd_evaluate(eval_log, eval_stream, resolved);
            std::cout << "wrote reports to " << resolved.output_dir << "\n";
        } else if (pipeline->parsed()) {
            auto resolved = resolve_config(config_file, pipeline, cfg);
            if (pipeline->count("--generator-config") > 0)
                resolved.generator_config = cfg.generator_config;
            cli::cmd_pipeline(resolved);
            std::cout << "pipeline artifacts in " << resolved.output_dir << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
