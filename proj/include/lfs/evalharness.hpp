#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "lfs/axis.hpp"
#include "lfs/shifter.hpp"
#include "lfs/world.hpp"

namespace lfs {

// ============================================================================
// A/B evaluation: axis shifting vs learned shifting
// ============================================================================

struct EvalConfig {
    size_t n_samples = 1000;
    double threshold = 0.5; // a feature counts as present when score > threshold
    uint64_t seed = 0;
    std::string notes;
};

// One evaluated feature: counts of samples whose score clears the threshold
// before any shift (original), after the axis shift (baseline), and after the
// learned shift (lfs), plus the mean scores behind those counts.
struct FeatureEvalRow {
    std::string feature_name;
    size_t count_original = 0;
    size_t count_baseline = 0;
    size_t count_lfs = 0;
    double mean_original = 0.0;
    double mean_baseline = 0.0;
    double mean_lfs = 0.0;
};

struct EvalReport {
    size_t n_samples = 0;
    double threshold = 0.5;
    uint64_t seed = 0;
    std::string notes;
    std::vector<FeatureEvalRow> rows;
};

// Draws fresh latents, applies the axis shift (multiplier scales the unit
// direction) and the model (label fixed to 1) to every latent, scores all
// three populations, and tallies one row for the chosen feature. Counting is
// strictly greater-than against cfg.threshold.
EvalReport run_single_feature_eval(const FeatureScorer& scorer, const FeatureAxis& axis,
                                   size_t feature_index, double multiplier,
                                   const ShifterModel& model, const EvalConfig& cfg);

// Same protocol over several features at once: the baseline applies all axis
// shifts to the same latent, the learned side chains the models in order, and
// the report carries one row per feature scored on the jointly shifted
// populations.
EvalReport run_multi_feature_eval(const FeatureScorer& scorer,
                                  const std::vector<FeatureAxis>& axes,
                                  const std::vector<size_t>& feature_indices,
                                  const std::vector<double>& multipliers,
                                  const std::vector<ShifterModel>& models,
                                  const EvalConfig& cfg);

// CSV with the fixed header "feature,original,baseline,lfs", one row of
// counts per feature. Byte-stable for a given report.
std::string report_csv(const EvalReport& report);
void write_report_csv(const EvalReport& report, const std::filesystem::path& path);

// Full report as JSON (counts, means, config echo); reading back what was
// written reproduces the report exactly.
std::string report_json(const EvalReport& report);
void write_report_json(const EvalReport& report, const std::filesystem::path& path);
EvalReport read_report_json(const std::filesystem::path& path);

} // namespace lfs
