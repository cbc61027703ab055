#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "lfs/numerics.hpp"

namespace lfs {

// ============================================================================
// Scorer interface
// ============================================================================

// Maps latents to m per-feature probabilities in [0, 1]. Implementations must
// be safe to call from const context; the synthetic world is a pure function.
class FeatureScorer {
public:
    virtual ~FeatureScorer() = default;

    virtual size_t latent_dim() const = 0;
    virtual size_t feature_count() const = 0;

    // Row i, column j: probability of feature j for latents[i].
    virtual Matrix score_batch(const std::vector<LatentVector>& latents) const = 0;
};

// ============================================================================
// Synthetic world
// ============================================================================

enum class BoundaryKind { linear, quadratic };

struct FeatureConfig {
    std::string name;
    BoundaryKind kind = BoundaryKind::linear;
    double offset = 0.0;    // c_j
    double curvature = 0.0; // q_j, nonzero iff quadratic
    double gain = 1.0;      // s_j > 0
};

struct WorldConfig {
    size_t d = 32;
    std::vector<FeatureConfig> features;
    double noise_sigma = 0.0;
    uint64_t seed = 0;
    double latent_norm_clamp = 0.0; // 0 disables

    size_t m() const { return features.size(); }
};

// Convenience: m features named f0..f{m-1}, all with the given kind/offset.
WorldConfig default_world_config(size_t d, size_t m, BoundaryKind kind, double offset,
                                 double curvature, uint64_t seed);

// Scoring geometry with known ground truth. Feature j scores
//   sigma(gain * (a . z) + curvature * (u . z)^2 + offset [+ noise])
// with unit directions a, u drawn from the seeded PRNG. Noise, when enabled,
// is a deterministic function of (seed, feature, latent) added to the logit,
// so scoring stays pure and stays inside [0, 1].
class SyntheticWorld : public FeatureScorer {
public:
    struct Feature {
        std::string name;
        BoundaryKind kind;
        std::vector<double> linear_direction;    // a_j, unit
        double offset;                           // c_j
        std::vector<double> curvature_direction; // u_j, unit
        double curvature_coeff;                  // q_j
        double gain;                             // s_j
    };

    size_t latent_dim() const override { return d_; }
    size_t feature_count() const override { return features_.size(); }
    Matrix score_batch(const std::vector<LatentVector>& latents) const override;

    double score_one(const LatentVector& z, size_t feature) const;

    const std::vector<Feature>& features() const { return features_; }
    double noise_sigma() const { return noise_sigma_; }
    uint64_t seed() const { return seed_; }
    double latent_norm_clamp() const { return latent_norm_clamp_; }
    std::vector<std::string> feature_names() const;

private:
    friend SyntheticWorld make_world(const WorldConfig& config);
    friend SyntheticWorld load_world(const std::filesystem::path& path);

    size_t d_ = 0;
    std::vector<Feature> features_;
    double noise_sigma_ = 0.0;
    uint64_t seed_ = 0;
    double latent_norm_clamp_ = 0.0;
};

// Deterministic function of the config. Throws InvalidArgument on bad
// dimensions (d < 2, m < 1, non-positive gain, quadratic with zero curvature).
SyntheticWorld make_world(const WorldConfig& config);

// The unit direction a_j for a linear feature; the verification oracle for
// axis fitting. Throws NoGroundTruthAxis for quadratic features.
std::vector<double> ground_truth_axis(const SyntheticWorld& world, size_t feature);

// World description round-trip (JSON, full double precision).
void save_world(const SyntheticWorld& world, const std::filesystem::path& path);
SyntheticWorld load_world(const std::filesystem::path& path);

// Optional stand-in for truncation-style sampling: rescale z when its norm
// exceeds max_norm. max_norm = 0 disables.
void clamp_latent_norm(LatentVector& z, double max_norm);

// ============================================================================
// External scorer bridge
// ============================================================================

// File-based bridge to an out-of-process generator + classifier. Each
// score_batch call writes latents-<id>.npy (n x d float32) into the request
// directory, waits for scores-<id>.npy (n x m), reads it, and deletes both.
// Responders should write replies atomically (temp file + rename).
class ExternalScorer : public FeatureScorer {
public:
    ExternalScorer(std::filesystem::path request_dir, std::chrono::milliseconds timeout,
                   size_t d, size_t m);

    size_t latent_dim() const override { return d_; }
    size_t feature_count() const override { return m_; }
    Matrix score_batch(const std::vector<LatentVector>& latents) const override;

private:
    std::filesystem::path dir_;
    std::chrono::milliseconds timeout_;
    size_t d_;
    size_t m_;
    uint64_t nonce_;
    mutable uint64_t counter_ = 0;
};

std::unique_ptr<FeatureScorer> external_scorer(const std::filesystem::path& request_dir,
                                               std::chrono::milliseconds timeout, size_t d,
                                               size_t m);

} // namespace lfs
