#include "lfs/axis.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "lfs/digest.hpp"
#include "lfs/errors.hpp"

namespace lfs {

using nlohmann::json;

std::vector<double> amplify_scores(std::span<const double> probabilities, double epsilon) {
    if (!(epsilon > 0.0 && epsilon < 0.5))
        throw InvalidArgument("amplify_scores: epsilon must lie in (0, 0.5)");
    std::vector<double> out(probabilities.size());
    const double lo = -1.0 + epsilon;
    const double hi = 1.0 - epsilon;
    for (size_t i = 0; i < probabilities.size(); ++i)
        out[i] = std::atanh(std::clamp(2.0 * probabilities[i] - 1.0, lo, hi));
    return out;
}

FeatureAxis fit_feature_axis(const std::vector<LatentVector>& latents,
                             std::span<const double> scores, bool use_arctanh, double epsilon,
                             const std::string& feature_name) {
    const size_t n = latents.size();
    if (scores.size() != n)
        throw InvalidArgument("fit_feature_axis: latents and scores differ in length");
    if (n == 0) throw InvalidArgument("fit_feature_axis: empty input");
    const size_t d = latents.front().size();
    if (n <= d + 1) throw InvalidArgument("fit_feature_axis: need n > d + 1 samples");

    Matrix x(n, d);
    for (size_t i = 0; i < n; ++i) {
        if (latents[i].size() != d)
            throw InvalidArgument("fit_feature_axis: inconsistent latent dimensions");
        std::copy(latents[i].begin(), latents[i].end(), x.row(i));
    }

    std::vector<double> targets;
    if (use_arctanh) {
        targets = amplify_scores(scores, epsilon);
    } else {
        targets.assign(scores.begin(), scores.end());
    }

    RegressionFit fit = ols_fit(x, targets);

    const double slope_norm = norm2(fit.slopes);
    if (slope_norm == 0.0)
        throw DegenerateAxis("fit_feature_axis: regression slopes are all zero");

    FeatureAxis axis;
    axis.feature_name = feature_name;
    axis.direction = std::move(fit.slopes);
    for (double& v : axis.direction) v /= slope_norm;
    axis.intercept = fit.intercept;
    axis.fit_r2 = fit.r_squared;
    axis.n_fit = n;
    axis.arctanh_used = use_arctanh;
    return axis;
}

LatentVector shift(const LatentVector& z, const FeatureAxis& axis, double multiplier) {
    if (z.size() != axis.direction.size())
        throw InvalidArgument("shift: latent and axis dimensions differ");
    LatentVector out = z;
    for (size_t i = 0; i < out.size(); ++i) out[i] += multiplier * axis.direction[i];
    return out;
}

LatentVector shift_multi(const LatentVector& z, const std::vector<FeatureAxis>& axes,
                         std::span<const double> multipliers) {
    if (axes.size() != multipliers.size())
        throw InvalidArgument("shift_multi: axes and multipliers differ in count");
    LatentVector out = z;
    for (size_t j = 0; j < axes.size(); ++j) {
        if (axes[j].direction.size() != z.size())
            throw InvalidArgument("shift_multi: axis dimension mismatch");
        for (size_t i = 0; i < out.size(); ++i)
            out[i] += multipliers[j] * axes[j].direction[i];
    }
    return out;
}

void save_axis(const FeatureAxis& axis, const std::filesystem::path& path) {
    json doc;
    doc["feature_name"] = axis.feature_name;
    doc["d"] = axis.direction.size();
    doc["direction"] = axis.direction;
    doc["intercept"] = axis.intercept;
    doc["fit_r2"] = axis.fit_r2;
    doc["n_fit"] = axis.n_fit;
    doc["arctanh_used"] = axis.arctanh_used;

    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("save_axis: cannot open " + path.string());
    out << doc.dump(2) << '\n';
}

FeatureAxis load_axis(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("load_axis: cannot open " + path.string());
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw FormatError("load_axis: " + std::string(e.what()));
    }

    FeatureAxis axis;
    try {
        axis.feature_name = doc.at("feature_name").get<std::string>();
        axis.direction = doc.at("direction").get<std::vector<double>>();
        axis.intercept = doc.at("intercept").get<double>();
        axis.fit_r2 = doc.at("fit_r2").get<double>();
        axis.n_fit = doc.at("n_fit").get<size_t>();
        axis.arctanh_used = doc.at("arctanh_used").get<bool>();
        if (axis.direction.size() != doc.at("d").get<size_t>())
            throw FormatError("load_axis: direction length does not match d");
    } catch (const json::exception& e) {
        throw FormatError("load_axis: " + std::string(e.what()));
    }
    if (std::abs(norm2(axis.direction) - 1.0) > 1e-9)
        throw FormatError("load_axis: direction is not unit length");
    return axis;
}

std::string axis_fingerprint(const FeatureAxis& axis) {
    uint64_t h = fnv1a64(axis.feature_name);
    for (double v : axis.direction) {
        uint64_t bits;
        std::memcpy(&bits, &v, 8);
        h = (h ^ bits) * 0x100000001b3ull;
    }
    uint64_t bits;
    std::memcpy(&bits, &axis.intercept, 8);
    h = (h ^ bits) * 0x100000001b3ull;
    return hex64(h);
}

} // namespace lfs
