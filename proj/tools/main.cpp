#include <iostream>

#include <CLI11.hpp>

#include "metastack/cli/commands.hpp"

using metastack::cli::Options;
using metastack::cli::Profile;

int main(int argc, char** argv) {
    CLI::App app{"Stacking meta-learners for combining base-model forecasts"};
    app.set_version_flag("--version", std::string(metastack::cli::kVersion));
    app.require_subcommand(1);

    Options options;
    std::string config;
    std::string data = options.data.string();
    std::string out = options.out.string();
    std::uint64_t seed = 0;
    std::size_t jobs = options.jobs;
    std::string profile = "desk";

    auto* synth = app.add_subcommand("synth", "Generate synthetic series and base-forecast panels");
    auto* run = app.add_subcommand("run", "Run the meta-learning experiment and write reports");
    auto* importance = app.add_subcommand("importance", "Score base models with MRMR and RReliefF");

    auto* config_opt = app.add_option("--config", config, "Config file (synth: series spec)");
    app.add_option("--data", data, "Directory with panel_<name>.csv files")->capture_default_str();
    app.add_option("--out", out, "Output directory")->capture_default_str();
    auto* seed_opt = app.add_option("--seed", seed, "Override the random seed");
    app.add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
    app.add_option("--profile", profile, "Grid preset")->check(CLI::IsMember({"desk", "full"}))->capture_default_str();
    app.add_flag("--svg", options.svg, "Also write an SVG chart (importance)");
    for (auto* sub : {synth, run, importance}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (*config_opt) options.config = config;
    if (*seed_opt) options.seed = seed;
    options.data = data;
    options.out = out;
    options.jobs = jobs;
    options.profile = profile == "full" ? Profile::Full : Profile::Desk;

    try {
        std::vector<std::filesystem::path> written;
        if (synth->parsed()) written = metastack::cli::cmd_synth(options);
        else if (run->parsed()) written = metastack::cli::cmd_run(options);
        else written = metastack::cli::cmd_importance(options);
        for (const auto& p : written) std::cout << p.string() << '\n';
        return 0;
    } catch (const metastack::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return metastack::cli::exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 4;
    }
}
