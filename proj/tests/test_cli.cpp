#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <sys/wait.h>

#include <json.hpp>

#include "lfs/npy.hpp"
#include "lfs/numerics.hpp"

#include "testutil.hpp"

using namespace lfs;
using nlohmann::json;
using testutil::TempDir;

namespace {

struct CliResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

CliResult run_cli(const TempDir& scratch, const std::string& args) {
    const auto out_file = scratch / "cli-stdout.txt";
    const auto err_file = scratch / "cli-stderr.txt";
    const std::string command = std::string("\"") + LFS_CLI_PATH + "\" " + args + " > \"" +
                                out_file.string() + "\" 2> \"" + err_file.string() + "\"";
    const int status = std::system(command.c_str());
    CliResult result;
    if (status >= 0 && WIFEXITED(status)) result.exit_code = WEXITSTATUS(status);
    result.out = testutil::read_text(out_file);
    result.err = testutil::read_text(err_file);
    return result;
}

std::filesystem::path write_config(const TempDir& dir, const std::filesystem::path& out_dir) {
    const auto path = dir / "config.json";
    testutil::write_text(path, std::string(R"({
        "out_dir": ")") + out_dir.generic_string() + R"(",
        "seed": 7,
        "d": 8,
        "world": {"features": [{"name": "f0", "kind": "linear", "offset": -2.0}]},
        "axis": {"n_samples": 400},
        "pairs": {"n_candidates": 500},
        "train": {"arch": "b", "learning_rate": 1e-3, "epochs": 2},
        "eval": {"n_samples": 100}
    })");
    return path;
}

std::map<std::string, std::vector<unsigned char>> snapshot_dir(
    const std::filesystem::path& root) {
    std::map<std::string, std::vector<unsigned char>> files;
    for (const auto& entry : std::filesystem::recursive_directory_iterator(root))
        if (entry.is_regular_file())
            files[entry.path().lexically_proximate(root).generic_string()] =
                testutil::read_bytes(entry.path());
    return files;
}

} // namespace

TEST_CASE("the binary drives the whole pipeline and reruns byte-identically") {
    TempDir dir;
    const auto run_dir = dir / "run";
    const std::string cfg = " --config \"" + write_config(dir, run_dir).string() + "\" ";

    const auto latents_in = dir / "input.npy";
    npy::save(latents_in, npy::from_latents(lfs::sample_gaussian_latents(12, 8, 99)));

    auto drive = [&] {
        for (const std::string& sub : {std::string("world"), std::string("fit-axis"),
                                       std::string("build-pairs"), std::string("train")}) {
            const CliResult r = run_cli(dir, sub + cfg);
            CAPTURE(sub);
            CAPTURE(r.err);
            REQUIRE(r.exit_code == 0);
        }
        const CliResult shifted =
            run_cli(dir, "shift" + cfg + "--in \"" + latents_in.string() + "\" --label 1");
        REQUIRE(shifted.exit_code == 0);
        const CliResult eval = run_cli(dir, "eval" + cfg);
        REQUIRE(eval.exit_code == 0);
        return eval;
    };

    const CliResult eval = drive();
    CHECK(eval.out.rfind("feature,original,baseline,lfs\nf0,", 0) == 0);
    CHECK(std::filesystem::exists(run_dir / "world.json"));
    CHECK(std::filesystem::exists(run_dir / "axis-f0.json"));
    CHECK(std::filesystem::exists(run_dir / "pairs-f0" / "manifest.json"));
    CHECK(std::filesystem::exists(run_dir / "model-f0" / "manifest.json"));
    CHECK(std::filesystem::exists(run_dir / "shifted.npy"));

    const CliResult eval_json = run_cli(dir, "eval" + cfg + "--format json");
    REQUIRE(eval_json.exit_code == 0);
    const json report = json::parse(eval_json.out);
    CHECK(report.at("kind") == "eval-report");
    CHECK(report.at("rows").size() == 1);

    // A second pass over the same config reproduces every artifact byte.
    const auto before = snapshot_dir(run_dir);
    drive();
    run_cli(dir, "eval" + cfg + "--format json");
    CHECK(snapshot_dir(run_dir) == before);
}

TEST_CASE("compare prints the architecture table") {
    TempDir dir;
    const auto run_dir = dir / "run";
    const std::string cfg = " --config \"" + write_config(dir, run_dir).string() + "\" ";
    REQUIRE(run_cli(dir, "world" + cfg).exit_code == 0);
    REQUIRE(run_cli(dir, "fit-axis" + cfg).exit_code == 0);
    REQUIRE(run_cli(dir, "build-pairs" + cfg).exit_code == 0);

    const CliResult r = run_cli(dir, "compare" + cfg);
    CAPTURE(r.err);
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.rfind("arch,params,test_mse,test_mae,test_r2\n", 0) == 0);
    CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 6);
    for (const char* arch : {"\na,", "\nb,", "\nc,", "\nd,", "\ne,"})
        CHECK(r.out.find(arch) != std::string::npos);
    CHECK(std::filesystem::exists(run_dir / "compare.csv"));
}

TEST_CASE("missing upstream artifacts exit 1 with a machine-readable category") {
    TempDir dir;
    const std::string cfg = " --config \"" + write_config(dir, dir / "fresh").string() + "\" ";
    const CliResult r = run_cli(dir, "fit-axis" + cfg);
    CHECK(r.exit_code == 1);
    CHECK(r.err.rfind("error: missing-artifact:", 0) == 0);
    CHECK(r.err.find("world command") != std::string::npos);
    CHECK(r.out.empty());
}

TEST_CASE("config problems are reported with their category") {
    TempDir dir;
    testutil::write_text(dir / "bad-key.json", R"({"banana": 1})");
    const CliResult unknown =
        run_cli(dir, "world --config \"" + (dir / "bad-key.json").string() + "\"");
    CHECK(unknown.exit_code == 1);
    CHECK(unknown.err.rfind("error: invalid-argument:", 0) == 0);
    CHECK(unknown.err.find("unknown config key 'banana'") != std::string::npos);

    testutil::write_text(dir / "broken.json", "{ this is not json");
    const CliResult broken =
        run_cli(dir, "world --config \"" + (dir / "broken.json").string() + "\"");
    CHECK(broken.exit_code == 1);
    CHECK(broken.err.rfind("error: format-error:", 0) == 0);

    const CliResult absent = run_cli(dir, "world --config \"" + (dir / "nope.json").string() + "\"");
    CHECK(absent.exit_code == 1);
    CHECK(absent.err.rfind("error: io-error:", 0) == 0);
}

TEST_CASE("--seed and --out override the config file") {
    TempDir dir;
    const std::string cfg = " --config \"" + write_config(dir, dir / "ignored").string() + "\" ";
    const auto other = dir / "other";
    const CliResult r =
        run_cli(dir, "world" + cfg + "--seed 123 --out \"" + other.string() + "\"");
    REQUIRE(r.exit_code == 0);
    CHECK(std::filesystem::exists(other / "world.json"));
    CHECK(!std::filesystem::exists(dir / "ignored"));
    const json manifest = json::parse(testutil::read_text(other / "run-world.json"));
    CHECK(manifest.at("master_seed") == 123);
}

TEST_CASE("bad command lines fail without touching the filesystem") {
    TempDir dir;
    CHECK(run_cli(dir, "shift").exit_code != 0);            // --in is required
    CHECK(run_cli(dir, "frobnicate").exit_code != 0);       // unknown subcommand
    CHECK(run_cli(dir, "").exit_code != 0);                 // a subcommand is required
    CHECK(run_cli(dir, "eval --format yaml").exit_code != 0);
}
