#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "lfs/axis.hpp"
#include "lfs/pairs.hpp"
#include "lfs/shifter.hpp"
#include "lfs/world.hpp"

namespace lfs {

// Resolved configuration shared by every pipeline command. Parsed from a JSON
// file with the same shape as pipeline_config_json emits; every field has a
// default, so an empty config document is runnable.
struct PipelineConfig {
    std::filesystem::path out_dir = "run";
    uint64_t seed = 42;
    size_t d = 32;

    // Score source: a synthetic world by default. A non-empty scorer_dir
    // switches to the file-exchange bridge, whose score columns are named by
    // scorer_features.
    WorldConfig world;
    std::filesystem::path scorer_dir;
    std::chrono::milliseconds scorer_timeout{10000};
    std::vector<std::string> scorer_features;

    std::string feature;                    // target for single-feature commands
    std::vector<std::string> eval_features; // non-empty switches eval to a chain

    size_t axis_samples = 10000;
    bool axis_arctanh = true;
    double axis_epsilon = kDefaultAmplifyEpsilon;

    size_t pair_candidates = 20000;
    double pair_threshold = 0.5;
    double pair_multiplier = 4.0;
    FourthPairMode fourth_pair = FourthPairMode::removal;

    SplitFractions split;
    std::string arch = "a";
    TrainConfig train; // .seed is ignored; every stage derives its own

    size_t eval_samples = 1000;
    double eval_threshold = 0.5;
    std::string eval_notes;

    std::string shift_mode = "model"; // "axis", "model" or "chain"
};

PipelineConfig parse_pipeline_config_text(const std::string& text);
PipelineConfig load_pipeline_config(const std::filesystem::path& path);

// Canonical JSON echo of a resolved config; parsing it back reproduces the
// config. Run manifests embed this form.
std::string pipeline_config_json(const PipelineConfig& cfg);

// Feature names in scorer column order, and the column index of one name.
std::vector<std::string> feature_names(const PipelineConfig& cfg);
size_t feature_index(const PipelineConfig& cfg, const std::string& name);

// The scorer commands read from. Synthetic mode loads the world persisted by
// cmd_world; bridge mode talks to scorer_dir.
std::unique_ptr<FeatureScorer> open_scorer(const PipelineConfig& cfg);

// Artifact locations inside out_dir.
std::filesystem::path world_path(const PipelineConfig& cfg);
std::filesystem::path axis_path(const PipelineConfig& cfg, const std::string& feature);
std::filesystem::path dataset_dir(const PipelineConfig& cfg, const std::string& feature);
std::filesystem::path model_dir(const PipelineConfig& cfg, const std::string& feature);
std::filesystem::path history_path(const PipelineConfig& cfg, const std::string& feature);

// Commands. Each returns its primary artifact path and writes a run manifest
// (command name, resolved config, stage seeds, FNV-1a hash of every output)
// to out_dir/run-<command>.json. Reruns with identical config and seed write
// byte-identical files. Commands that consume an artifact that is not on disk
// throw MissingArtifact naming the command that produces it.
std::filesystem::path cmd_world(const PipelineConfig& cfg);
std::filesystem::path cmd_fit_axis(const PipelineConfig& cfg);
std::filesystem::path cmd_build_pairs(const PipelineConfig& cfg);
std::filesystem::path cmd_train(const PipelineConfig& cfg);
std::filesystem::path cmd_shift(const PipelineConfig& cfg, const std::filesystem::path& latents_in,
                                double label, const std::filesystem::path& shifted_out);
std::filesystem::path cmd_eval(const PipelineConfig& cfg);
std::filesystem::path cmd_compare(const PipelineConfig& cfg);

} // namespace lfs
