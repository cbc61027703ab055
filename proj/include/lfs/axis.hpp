#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "lfs/numerics.hpp"

namespace lfs {

// Unit direction in latent space along which one semantic feature's score
// increases, fitted by linear regression over (latent, score) pairs. The
// direction always points toward increasing score, so a positive multiplier
// adds the feature.
struct FeatureAxis {
    std::string feature_name;
    std::vector<double> direction; // unit norm
    double intercept = 0.0;
    double fit_r2 = 0.0;
    size_t n_fit = 0;
    bool arctanh_used = false;

    size_t dim() const { return direction.size(); }
};

// Maps probabilities to unbounded regression targets:
//   arctanh(clamp(2p - 1, -1 + epsilon, 1 - epsilon))
// Odd around p = 0.5, so the 0.5 decision point maps to 0. Requires
// 0 < epsilon < 0.5.
std::vector<double> amplify_scores(std::span<const double> probabilities, double epsilon);

constexpr double kDefaultAmplifyEpsilon = 1e-6;

// Least-squares feature axis: optionally amplifies the scores, runs OLS, and
// normalizes the slope vector. Requires n > d + 1. Throws DegenerateAxis when
// the slopes vanish (e.g. constant scores).
FeatureAxis fit_feature_axis(const std::vector<LatentVector>& latents,
                             std::span<const double> scores, bool use_arctanh,
                             double epsilon = kDefaultAmplifyEpsilon,
                             const std::string& feature_name = "");

// z + multiplier * direction.
LatentVector shift(const LatentVector& z, const FeatureAxis& axis, double multiplier);

// z + sum_j multipliers[j] * directions[j]; order-independent.
LatentVector shift_multi(const LatentVector& z, const std::vector<FeatureAxis>& axes,
                         std::span<const double> multipliers);

// JSON round-trip; direction serialized at full double precision.
void save_axis(const FeatureAxis& axis, const std::filesystem::path& path);
FeatureAxis load_axis(const std::filesystem::path& path);

// Stable fingerprint of an axis (direction bits + metadata); recorded in
// dataset manifests so downstream artifacts can name their inputs.
std::string axis_fingerprint(const FeatureAxis& axis);

} // namespace lfs
