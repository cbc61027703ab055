#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "lfs/errors.hpp"
#include "lfs/evalharness.hpp"
#include "lfs/pipeline.hpp"

namespace {

// flag > config file > built-in default
lfs::PipelineConfig resolve_config(const std::string& config_path, const CLI::Option* seed_opt,
                                   uint64_t seed, const CLI::Option* out_opt,
                                   const std::string& out_dir) {
    lfs::PipelineConfig cfg = config_path.empty()
                                  ? lfs::parse_pipeline_config_text("{}")
                                  : lfs::load_pipeline_config(config_path);
    if (seed_opt->count() > 0) cfg.seed = seed;
    if (out_opt->count() > 0) cfg.out_dir = out_dir;
    return cfg;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw lfs::IoError("cannot read " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"latent feature shifting: axis baseline, pair datasets, MLP shifters, A/B eval"};
    app.require_subcommand(1);

    std::string config_path;
    uint64_t seed = 0;
    std::string out_dir;
    std::string format = "csv";
    app.add_option("--config", config_path, "JSON pipeline config file");
    const CLI::Option* seed_opt =
        app.add_option("--seed", seed, "master seed (overrides the config)");
    const CLI::Option* out_opt =
        app.add_option("--out", out_dir, "output directory (overrides the config)");
    app.add_option("--format", format, "console output format for eval: csv or json")
        ->check(CLI::IsMember({"csv", "json"}));

    CLI::App* sub_world = app.add_subcommand("world", "create and persist a synthetic world");
    CLI::App* sub_axis = app.add_subcommand("fit-axis", "sample, score and fit a feature axis");
    CLI::App* sub_pairs =
        app.add_subcommand("build-pairs", "build a shifted-pairs training dataset");
    CLI::App* sub_train = app.add_subcommand("train", "train a latent shifter model");
    CLI::App* sub_shift =
        app.add_subcommand("shift", "apply the axis, a model or a model chain to latents");
    CLI::App* sub_eval = app.add_subcommand("eval", "A/B evaluate axis shift vs trained model");
    CLI::App* sub_compare =
        app.add_subcommand("compare", "train architectures a-e on one dataset and tabulate");
    for (CLI::App* sub : {sub_world, sub_axis, sub_pairs, sub_train, sub_shift, sub_eval,
                          sub_compare})
        sub->fallthrough();

    std::string shift_in;
    std::string shift_out;
    double shift_label = 1.0;
    sub_shift->add_option("--in", shift_in, "input latents (n x d float32 NPY)")->required();
    sub_shift->add_option("--shifted-out", shift_out,
                          "output path (default <out_dir>/shifted.npy)");
    sub_shift->add_option("--label", shift_label, "label fed to model or chain shifts");

    CLI11_PARSE(app, argc, argv);

    try {
        const lfs::PipelineConfig cfg =
            resolve_config(config_path, seed_opt, seed, out_opt, out_dir);
        if (app.got_subcommand(sub_world)) {
            std::cout << lfs::cmd_world(cfg).string() << "\n";
        } else if (app.got_subcommand(sub_axis)) {
            std::cout << lfs::cmd_fit_axis(cfg).string() << "\n";
        } else if (app.got_subcommand(sub_pairs)) {
            std::cout << lfs::cmd_build_pairs(cfg).string() << "\n";
        } else if (app.got_subcommand(sub_train)) {
            std::cout << lfs::cmd_train(cfg).string() << "\n";
        } else if (app.got_subcommand(sub_shift)) {
            const std::filesystem::path out_path =
                shift_out.empty() ? cfg.out_dir / "shifted.npy"
                                  : std::filesystem::path(shift_out);
            std::cout << lfs::cmd_shift(cfg, shift_in, shift_label, out_path).string() << "\n";
        } else if (app.got_subcommand(sub_eval)) {
            const auto csv_path = lfs::cmd_eval(cfg);
            if (format == "json")
                std::cout << read_text_file(cfg.out_dir / "eval.json");
            else
                std::cout << read_text_file(csv_path);
        } else if (app.got_subcommand(sub_compare)) {
            std::cout << read_text_file(lfs::cmd_compare(cfg));
        }
    } catch (const lfs::Error& e) {
        std::fprintf(stderr, "error: %s: %s\n", e.category().c_str(), e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: internal: %s\n", e.what());
        return 1;
    }
    return 0;
}
