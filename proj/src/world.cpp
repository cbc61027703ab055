#include "lfs/world.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <random>
#include <thread>

#include <json.hpp>

#include "lfs/digest.hpp"
#include "lfs/errors.hpp"
#include "lfs/npy.hpp"

namespace lfs {

using nlohmann::json;

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

std::vector<double> draw_unit_direction(Rng& rng, size_t d) {
    std::vector<double> v(d);
    double n = 0.0;
    do {
        for (double& x : v) x = rng.gaussian();
        n = norm2(v);
    } while (n == 0.0);
    for (double& x : v) x /= n;
    return v;
}

// Standard normal derived from (seed, feature, latent bits). Deterministic,
// so noisy scoring behaves like a fixed imperfect classifier rather than a
// draw-order-dependent stream.
double latent_hash_gaussian(uint64_t seed, size_t feature, const LatentVector& z) {
    uint64_t h = 0xcbf29ce484222325ull ^ splitmix64(seed) ^ splitmix64(feature + 1);
    for (double v : z) {
        uint64_t bits;
        std::memcpy(&bits, &v, 8);
        h = (h ^ bits) * 0x100000001b3ull;
    }
    const uint64_t h1 = splitmix64(h);
    const uint64_t h2 = splitmix64(h1);
    const double u1 = 1.0 - static_cast<double>(h1 >> 11) * 0x1.0p-53;
    const double u2 = static_cast<double>(h2 >> 11) * 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::string kind_name(BoundaryKind kind) {
    return kind == BoundaryKind::linear ? "linear" : "quadratic";
}

BoundaryKind kind_from_name(const std::string& name) {
    if (name == "linear") return BoundaryKind::linear;
    if (name == "quadratic") return BoundaryKind::quadratic;
    throw FormatError("world: unknown boundary kind '" + name + "'");
}

} // namespace

WorldConfig default_world_config(size_t d, size_t m, BoundaryKind kind, double offset,
                                 double curvature, uint64_t seed) {
    WorldConfig config;
    config.d = d;
    config.seed = seed;
    config.features.resize(m);
    for (size_t j = 0; j < m; ++j) {
        config.features[j].name = "f" + std::to_string(j);
        config.features[j].kind = kind;
        config.features[j].offset = offset;
        config.features[j].curvature = kind == BoundaryKind::quadratic ? curvature : 0.0;
    }
    return config;
}

SyntheticWorld make_world(const WorldConfig& config) {
    if (config.d < 2) throw InvalidArgument("make_world: d must be >= 2");
    if (config.features.empty()) throw InvalidArgument("make_world: m must be >= 1");
    if (config.noise_sigma < 0.0) throw InvalidArgument("make_world: noise_sigma must be >= 0");

    SyntheticWorld world;
    world.d_ = config.d;
    world.noise_sigma_ = config.noise_sigma;
    world.seed_ = config.seed;
    world.latent_norm_clamp_ = config.latent_norm_clamp;

    Rng rng(config.seed);
    for (size_t j = 0; j < config.features.size(); ++j) {
        const FeatureConfig& fc = config.features[j];
        if (!(fc.gain > 0.0)) throw InvalidArgument("make_world: gain must be > 0");
        if (fc.kind == BoundaryKind::quadratic && fc.curvature == 0.0)
            throw InvalidArgument("make_world: quadratic feature needs nonzero curvature");
        if (fc.kind == BoundaryKind::linear && fc.curvature != 0.0)
            throw InvalidArgument("make_world: linear feature must have zero curvature");

        SyntheticWorld::Feature feature;
        feature.name = fc.name.empty() ? "f" + std::to_string(j) : fc.name;
        feature.kind = fc.kind;
        feature.linear_direction = draw_unit_direction(rng, config.d);
        feature.curvature_direction = draw_unit_direction(rng, config.d);
        feature.offset = fc.offset;
        feature.curvature_coeff = fc.curvature;
        feature.gain = fc.gain;
        world.features_.push_back(std::move(feature));
    }
    return world;
}

double SyntheticWorld::score_one(const LatentVector& z, size_t feature) const {
    if (z.size() != d_) throw InvalidArgument("score_one: latent dimension mismatch");
    if (feature >= features_.size()) throw InvalidArgument("score_one: feature index out of range");
    const Feature& f = features_[feature];
    double logit = f.gain * dot(f.linear_direction, z) + f.offset;
    if (f.curvature_coeff != 0.0) {
        const double proj = dot(f.curvature_direction, z);
        logit += f.curvature_coeff * proj * proj;
    }
    if (noise_sigma_ > 0.0) logit += noise_sigma_ * latent_hash_gaussian(seed_, feature, z);
    return sigmoid(logit);
}

Matrix SyntheticWorld::score_batch(const std::vector<LatentVector>& latents) const {
    Matrix scores(latents.size(), features_.size());
    for (size_t i = 0; i < latents.size(); ++i)
        for (size_t j = 0; j < features_.size(); ++j) scores(i, j) = score_one(latents[i], j);
    return scores;
}

std::vector<std::string> SyntheticWorld::feature_names() const {
    std::vector<std::string> names;
    names.reserve(features_.size());
    for (const auto& f : features_) names.push_back(f.name);
    return names;
}

std::vector<double> ground_truth_axis(const SyntheticWorld& world, size_t feature) {
    if (feature >= world.feature_count())
        throw InvalidArgument("ground_truth_axis: feature index out of range");
    const auto& f = world.features()[feature];
    if (f.kind != BoundaryKind::linear || f.curvature_coeff != 0.0)
        throw NoGroundTruthAxis("ground_truth_axis: feature '" + f.name +
                                "' has a curved boundary");
    return f.linear_direction;
}

void save_world(const SyntheticWorld& world, const std::filesystem::path& path) {
    json doc;
    doc["d"] = world.latent_dim();
    doc["noise_sigma"] = world.noise_sigma();
    doc["seed"] = world.seed();
    doc["latent_norm_clamp"] = world.latent_norm_clamp();
    json features = json::array();
    for (const auto& f : world.features()) {
        json jf;
        jf["name"] = f.name;
        jf["kind"] = kind_name(f.kind);
        jf["linear_direction"] = f.linear_direction;
        jf["offset"] = f.offset;
        jf["curvature_direction"] = f.curvature_direction;
        jf["curvature_coeff"] = f.curvature_coeff;
        jf["gain"] = f.gain;
        features.push_back(std::move(jf));
    }
    doc["features"] = std::move(features);

    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("save_world: cannot open " + path.string());
    out << doc.dump(2) << '\n';
}

SyntheticWorld load_world(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("load_world: cannot open " + path.string());
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw FormatError("load_world: " + std::string(e.what()));
    }

    SyntheticWorld world;
    try {
        world.d_ = doc.at("d").get<size_t>();
        world.noise_sigma_ = doc.at("noise_sigma").get<double>();
        world.seed_ = doc.at("seed").get<uint64_t>();
        world.latent_norm_clamp_ = doc.value("latent_norm_clamp", 0.0);
        for (const auto& jf : doc.at("features")) {
            SyntheticWorld::Feature f;
            f.name = jf.at("name").get<std::string>();
            f.kind = kind_from_name(jf.at("kind").get<std::string>());
            f.linear_direction = jf.at("linear_direction").get<std::vector<double>>();
            f.offset = jf.at("offset").get<double>();
            f.curvature_direction = jf.at("curvature_direction").get<std::vector<double>>();
            f.curvature_coeff = jf.at("curvature_coeff").get<double>();
            f.gain = jf.at("gain").get<double>();
            if (f.linear_direction.size() != world.d_ || f.curvature_direction.size() != world.d_)
                throw FormatError("load_world: direction length does not match d");
            if (std::abs(norm2(f.linear_direction) - 1.0) > 1e-6 ||
                std::abs(norm2(f.curvature_direction) - 1.0) > 1e-6)
                throw FormatError("load_world: directions must be unit vectors");
            world.features_.push_back(std::move(f));
        }
    } catch (const json::exception& e) {
        throw FormatError("load_world: " + std::string(e.what()));
    }
    if (world.features_.empty()) throw FormatError("load_world: no features");
    return world;
}

void clamp_latent_norm(LatentVector& z, double max_norm) {
    if (max_norm <= 0.0) return;
    const double n = norm2(z);
    if (n > max_norm)
        for (double& v : z) v *= max_norm / n;
}

// ============================================================================
// External scorer
// ============================================================================

ExternalScorer::ExternalScorer(std::filesystem::path request_dir,
                               std::chrono::milliseconds timeout, size_t d, size_t m)
    : dir_(std::move(request_dir)), timeout_(timeout), d_(d), m_(m) {
    if (d_ == 0 || m_ == 0) throw InvalidArgument("ExternalScorer: d and m must be >= 1");
    std::filesystem::create_directories(dir_);
    nonce_ = std::random_device{}();
}

Matrix ExternalScorer::score_batch(const std::vector<LatentVector>& latents) const {
    for (const auto& z : latents)
        if (z.size() != d_) throw InvalidArgument("ExternalScorer: latent dimension mismatch");

    const std::string id = hex64(nonce_) + "-" + hex64(counter_++);
    const auto request = dir_ / ("latents-" + id + ".npy");
    const auto reply = dir_ / ("scores-" + id + ".npy");

    npy::save(request, npy::from_latents(latents));

    const auto deadline = std::chrono::steady_clock::now() + timeout_;
    std::string last_parse_error;
    for (;;) {
        std::error_code ec;
        if (std::filesystem::exists(reply, ec)) {
            try {
                npy::Array array = npy::load(reply);
                if (array.shape.size() != 2 || array.shape[0] != latents.size() ||
                    array.shape[1] != m_)
                    throw ProtocolError("external scorer: reply shape mismatch for " +
                                        reply.filename().string());
                std::filesystem::remove(request, ec);
                std::filesystem::remove(reply, ec);
                return npy::to_matrix(array);
            } catch (const FormatError& e) {
                // Possibly a torn read of a reply still being written; retry
                // until the deadline.
                last_parse_error = e.what();
            }
        }
        if (std::chrono::steady_clock::now() >= deadline) {
            std::filesystem::remove(request, ec);
            if (!last_parse_error.empty())
                throw ProtocolError("external scorer: reply never became valid: " +
                                    last_parse_error);
            throw ScorerTimeout("external scorer: no reply for " + reply.filename().string() +
                                " within " + std::to_string(timeout_.count()) + " ms");
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(2));
    }
}

std::unique_ptr<FeatureScorer> external_scorer(const std::filesystem::path& request_dir,
                                               std::chrono::milliseconds timeout, size_t d,
                                               size_t m) {
    return std::make_unique<ExternalScorer>(request_dir, timeout, d, m);
}

} // namespace lfs
