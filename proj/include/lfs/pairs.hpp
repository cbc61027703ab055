#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "lfs/axis.hpp"
#include "lfs/numerics.hpp"
#include "lfs/world.hpp"

namespace lfs {

// One verified latent pair: z_minus scored below the threshold, z_plus (the
// axis-shifted copy) scored above it, both at build time.
struct PairTuple {
    LatentVector z_minus;
    LatentVector z_plus;
    std::string feature_name;
};

// One supervised sample: label 1 asks the shifter to manifest the feature,
// label 0 to suppress it; target_latent is where the input should move.
struct PairSample {
    LatentVector input_latent;
    double label = 0.0; // 0 or 1
    LatentVector target_latent;
};

struct PairsDataset {
    std::string feature_name;
    size_t d = 0;
    double threshold = 0.5;
    double multiplier = 1.0;
    std::vector<PairSample> samples; // always 4 * tuple_count
    size_t tuple_count = 0;
    uint64_t seed = 0;
    std::string axis_fingerprint;
};

// Per-stage acceptance accounting for diagnostics and yield reporting.
struct PairBuildStats {
    size_t n_candidates = 0;
    size_t n_below_threshold = 0; // passed the negative filter
    size_t n_accepted = 0;        // shifted copy crossed the threshold

    double negative_rate() const {
        return n_candidates ? static_cast<double>(n_below_threshold) / n_candidates : 0.0;
    }
    double shift_success_rate() const {
        return n_below_threshold ? static_cast<double>(n_accepted) / n_below_threshold : 0.0;
    }
    double yield() const {
        return n_candidates ? static_cast<double>(n_accepted) / n_candidates : 0.0;
    }
};

struct TupleBuild {
    std::vector<PairTuple> tuples;
    PairBuildStats stats;
    size_t d = 0;
    double threshold = 0.5;
    double multiplier = 1.0;
    uint64_t seed = 0;
    std::string axis_fingerprint;
};

// Samples n_candidates Gaussian latents, keeps those scoring below the
// threshold for the chosen feature, shifts them along the axis, and keeps the
// pair when the shifted copy scores above the threshold (both comparisons
// strict). Deterministic given a zero-noise scorer, the axis, and the seed.
// Throws EmptyDataset (with stage-by-stage rates) when nothing survives.
TupleBuild build_pair_tuples(const FeatureScorer& scorer, const FeatureAxis& axis,
                             size_t feature_index, size_t n_candidates, double threshold,
                             double multiplier, uint64_t seed);

// What the fourth pair teaches: removal maps (z_plus, 0) -> z_minus so the
// model also learns to take the feature away; identity maps it to z_plus.
enum class FourthPairMode { removal, identity };

// Expands each tuple into exactly four labeled samples:
//   (z_minus, 1) -> z_plus
//   (z_plus,  1) -> z_plus
//   (z_minus, 0) -> z_minus
//   (z_plus,  0) -> z_minus   (removal mode; z_plus under identity mode)
PairsDataset expand_tuples(const TupleBuild& build,
                           FourthPairMode mode = FourthPairMode::removal);
PairsDataset expand_tuples(const std::vector<PairTuple>& tuples,
                           FourthPairMode mode = FourthPairMode::removal);

struct SplitFractions {
    double train = 0.8;
    double valid = 0.1;
    double test = 0.1;
};

struct DatasetSplits {
    PairsDataset train;
    PairsDataset valid;
    PairsDataset test;
};

// Seeded shuffle then contiguous cut: |train| = floor(f_train * n),
// |valid| = floor(f_valid * n), test takes the remainder. Exact partition.
DatasetSplits split_dataset(const PairsDataset& ds, SplitFractions fractions, uint64_t seed);

// Dataset directory: manifest.json + inputs.npy (n x d), labels.npy (n x 1),
// targets.npy (n x d), all little-endian float32. Lossless at that precision.
void save_dataset(const PairsDataset& ds, const std::filesystem::path& dir);
PairsDataset load_dataset(const std::filesystem::path& dir);

} // namespace lfs
