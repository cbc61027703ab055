#include "lfs/pairs.hpp"

#include <cmath>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "lfs/errors.hpp"
#include "lfs/npy.hpp"

namespace lfs {

using nlohmann::json;

TupleBuild build_pair_tuples(const FeatureScorer& scorer, const FeatureAxis& axis,
                             size_t feature_index, size_t n_candidates, double threshold,
                             double multiplier, uint64_t seed) {
    if (!(threshold > 0.0 && threshold < 1.0))
        throw InvalidArgument("build_pair_tuples: threshold must lie in (0, 1)");
    if (n_candidates == 0) throw InvalidArgument("build_pair_tuples: n_candidates must be >= 1");
    if (feature_index >= scorer.feature_count())
        throw InvalidArgument("build_pair_tuples: feature index out of range");
    const size_t d = scorer.latent_dim();
    if (axis.dim() != d)
        throw InvalidArgument("build_pair_tuples: axis dimension does not match scorer");

    TupleBuild build;
    build.d = d;
    build.threshold = threshold;
    build.multiplier = multiplier;
    build.seed = seed;
    build.axis_fingerprint = axis_fingerprint(axis);
    build.stats.n_candidates = n_candidates;

    std::vector<LatentVector> candidates = sample_gaussian_latents(n_candidates, d, seed);
    const Matrix candidate_scores = scorer.score_batch(candidates);

    std::vector<LatentVector> negatives;
    for (size_t i = 0; i < n_candidates; ++i)
        if (candidate_scores(i, feature_index) < threshold)
            negatives.push_back(std::move(candidates[i]));
    build.stats.n_below_threshold = negatives.size();

    if (!negatives.empty()) {
        std::vector<LatentVector> shifted;
        shifted.reserve(negatives.size());
        for (const auto& z : negatives) shifted.push_back(shift(z, axis, multiplier));
        const Matrix shifted_scores = scorer.score_batch(shifted);

        for (size_t i = 0; i < negatives.size(); ++i) {
            if (shifted_scores(i, feature_index) > threshold) {
                PairTuple tuple;
                tuple.z_minus = std::move(negatives[i]);
                tuple.z_plus = std::move(shifted[i]);
                tuple.feature_name = axis.feature_name;
                build.tuples.push_back(std::move(tuple));
            }
        }
    }
    build.stats.n_accepted = build.tuples.size();

    if (build.tuples.empty()) {
        char msg[256];
        std::snprintf(msg, sizeof(msg),
                      "build_pair_tuples: zero accepted tuples (candidates=%zu, "
                      "below-threshold=%zu [%.1f%%], shift-accepted=0 [0.0%%])",
                      build.stats.n_candidates, build.stats.n_below_threshold,
                      100.0 * build.stats.negative_rate());
        throw EmptyDataset(msg);
    }
    return build;
}

namespace {

PairsDataset expand_impl(const std::vector<PairTuple>& tuples, FourthPairMode mode) {
    if (tuples.empty()) throw InvalidArgument("expand_tuples: no tuples to expand");
    const size_t d = tuples.front().z_minus.size();

    PairsDataset ds;
    ds.feature_name = tuples.front().feature_name;
    ds.d = d;
    ds.tuple_count = tuples.size();
    ds.samples.reserve(4 * tuples.size());
    for (const PairTuple& t : tuples) {
        if (t.z_minus.size() != d || t.z_plus.size() != d)
            throw InvalidArgument("expand_tuples: inconsistent latent dimensions");
        ds.samples.push_back({t.z_minus, 1.0, t.z_plus});
        ds.samples.push_back({t.z_plus, 1.0, t.z_plus});
        ds.samples.push_back({t.z_minus, 0.0, t.z_minus});
        ds.samples.push_back(
            {t.z_plus, 0.0, mode == FourthPairMode::removal ? t.z_minus : t.z_plus});
    }
    return ds;
}

} // namespace

PairsDataset expand_tuples(const TupleBuild& build, FourthPairMode mode) {
    PairsDataset ds = expand_impl(build.tuples, mode);
    ds.threshold = build.threshold;
    ds.multiplier = build.multiplier;
    ds.seed = build.seed;
    ds.axis_fingerprint = build.axis_fingerprint;
    return ds;
}

PairsDataset expand_tuples(const std::vector<PairTuple>& tuples, FourthPairMode mode) {
    return expand_impl(tuples, mode);
}

DatasetSplits split_dataset(const PairsDataset& ds, SplitFractions fractions, uint64_t seed) {
    if (ds.samples.empty()) throw InvalidArgument("split_dataset: empty dataset");
    if (fractions.train < 0.0 || fractions.valid < 0.0 || fractions.test < 0.0 ||
        std::abs(fractions.train + fractions.valid + fractions.test - 1.0) > 1e-9)
        throw InvalidArgument("split_dataset: fractions must be nonnegative and sum to 1");

    const size_t n = ds.samples.size();
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), size_t{0});
    Rng rng(seed);
    shuffle_indices(order, rng);

    const size_t n_train = static_cast<size_t>(std::floor(fractions.train * static_cast<double>(n)));
    const size_t n_valid = static_cast<size_t>(std::floor(fractions.valid * static_cast<double>(n)));

    auto subset = [&](size_t begin, size_t end) {
        PairsDataset part = ds;
        part.samples.clear();
        part.samples.reserve(end - begin);
        for (size_t i = begin; i < end; ++i) part.samples.push_back(ds.samples[order[i]]);
        return part;
    };

    DatasetSplits splits{subset(0, n_train), subset(n_train, n_train + n_valid),
                         subset(n_train + n_valid, n)};
    return splits;
}

void save_dataset(const PairsDataset& ds, const std::filesystem::path& dir) {
    if (ds.samples.empty()) throw InvalidArgument("save_dataset: empty dataset");
    std::filesystem::create_directories(dir);

    const size_t n = ds.samples.size();
    Matrix inputs(n, ds.d), targets(n, ds.d), labels(n, 1);
    for (size_t i = 0; i < n; ++i) {
        const PairSample& s = ds.samples[i];
        if (s.input_latent.size() != ds.d || s.target_latent.size() != ds.d)
            throw InvalidArgument("save_dataset: sample dimension does not match d");
        std::copy(s.input_latent.begin(), s.input_latent.end(), inputs.row(i));
        std::copy(s.target_latent.begin(), s.target_latent.end(), targets.row(i));
        labels(i, 0) = s.label;
    }
    npy::save(dir / "inputs.npy", npy::from_matrix(inputs));
    npy::save(dir / "labels.npy", npy::from_matrix(labels));
    npy::save(dir / "targets.npy", npy::from_matrix(targets));

    json doc;
    doc["feature_name"] = ds.feature_name;
    doc["d"] = ds.d;
    doc["threshold"] = ds.threshold;
    doc["multiplier"] = ds.multiplier;
    doc["tuple_count"] = ds.tuple_count;
    doc["sample_count"] = n;
    doc["seed"] = ds.seed;
    doc["axis_fingerprint"] = ds.axis_fingerprint;
    doc["files"] = {"inputs.npy", "labels.npy", "targets.npy"};

    std::ofstream out(dir / "manifest.json", std::ios::trunc);
    if (!out) throw IoError("save_dataset: cannot open manifest in " + dir.string());
    out << doc.dump(2) << '\n';
}

PairsDataset load_dataset(const std::filesystem::path& dir) {
    const auto manifest_path = dir / "manifest.json";
    std::ifstream in(manifest_path);
    if (!in) throw IoError("load_dataset: cannot open " + manifest_path.string());
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw FormatError("load_dataset: " + std::string(e.what()));
    }

    PairsDataset ds;
    size_t sample_count = 0;
    try {
        ds.feature_name = doc.at("feature_name").get<std::string>();
        ds.d = doc.at("d").get<size_t>();
        ds.threshold = doc.at("threshold").get<double>();
        ds.multiplier = doc.at("multiplier").get<double>();
        ds.tuple_count = doc.at("tuple_count").get<size_t>();
        sample_count = doc.at("sample_count").get<size_t>();
        ds.seed = doc.at("seed").get<uint64_t>();
        ds.axis_fingerprint = doc.at("axis_fingerprint").get<std::string>();
    } catch (const json::exception& e) {
        throw FormatError("load_dataset: " + std::string(e.what()));
    }

    const npy::Array inputs = npy::load(dir / "inputs.npy");
    const npy::Array labels = npy::load(dir / "labels.npy");
    const npy::Array targets = npy::load(dir / "targets.npy");

    if (inputs.shape != std::vector<size_t>{sample_count, ds.d} ||
        targets.shape != std::vector<size_t>{sample_count, ds.d} ||
        labels.shape != std::vector<size_t>{sample_count, 1})
        throw FormatError("load_dataset: array shapes disagree with manifest");
    if (sample_count != 4 * ds.tuple_count)
        throw FormatError("load_dataset: sample count is not 4x tuple count");

    ds.samples.resize(sample_count);
    for (size_t i = 0; i < sample_count; ++i) {
        PairSample& s = ds.samples[i];
        s.input_latent.resize(ds.d);
        s.target_latent.resize(ds.d);
        for (size_t j = 0; j < ds.d; ++j) {
            s.input_latent[j] = inputs.data[i * ds.d + j];
            s.target_latent[j] = targets.data[i * ds.d + j];
        }
        s.label = labels.data[i];
        if (s.label != 0.0 && s.label != 1.0)
            throw FormatError("load_dataset: labels must be 0 or 1");
    }
    return ds;
}

} // namespace lfs
