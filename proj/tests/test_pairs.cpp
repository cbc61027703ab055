#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "lfs/errors.hpp"
#include "lfs/pairs.hpp"

#include "testutil.hpp"

using namespace lfs;
using testutil::TempDir;

namespace {

// Scores each feature j as sigma(z[j] + offset), so tests can predict the
// exact acceptance set from the candidate latents alone.
class CoordinateScorer : public FeatureScorer {
public:
    CoordinateScorer(size_t d, size_t m, double offset = 0.0) : d_(d), m_(m), offset_(offset) {}

    size_t latent_dim() const override { return d_; }
    size_t feature_count() const override { return m_; }

    Matrix score_batch(const std::vector<LatentVector>& latents) const override {
        Matrix scores(latents.size(), m_);
        for (size_t i = 0; i < latents.size(); ++i)
            for (size_t j = 0; j < m_; ++j)
                scores(i, j) = 1.0 / (1.0 + std::exp(-(latents[i][j] + offset_)));
        return scores;
    }

private:
    size_t d_;
    size_t m_;
    double offset_;
};

class ConstantScorer : public FeatureScorer {
public:
    ConstantScorer(size_t d, double value) : d_(d), value_(value) {}

    size_t latent_dim() const override { return d_; }
    size_t feature_count() const override { return 1; }

    Matrix score_batch(const std::vector<LatentVector>& latents) const override {
        Matrix scores(latents.size(), 1);
        for (size_t i = 0; i < latents.size(); ++i) scores(i, 0) = value_;
        return scores;
    }

private:
    size_t d_;
    double value_;
};

FeatureAxis coordinate_axis(size_t d, size_t coordinate, const std::string& name) {
    FeatureAxis axis;
    axis.feature_name = name;
    axis.direction.assign(d, 0.0);
    axis.direction[coordinate] = 1.0;
    return axis;
}

std::vector<PairTuple> toy_tuples() {
    PairTuple first;
    first.z_minus = {0.0, 1.0};
    first.z_plus = {2.0, 1.0};
    first.feature_name = "toy";
    PairTuple second;
    second.z_minus = {-1.0, 0.5};
    second.z_plus = {1.5, 0.5};
    second.feature_name = "toy";
    return {first, second};
}

using SampleKey = std::tuple<std::vector<double>, double, std::vector<double>>;

std::map<SampleKey, int> sample_histogram(const PairsDataset& ds) {
    std::map<SampleKey, int> hist;
    for (const auto& s : ds.samples) ++hist[{s.input_latent, s.label, s.target_latent}];
    return hist;
}

} // namespace

TEST_CASE("build_pair_tuples keeps exactly the candidates that cross the threshold") {
    const size_t d = 3;
    const size_t n = 200;
    const uint64_t seed = 77;
    const double multiplier = 2.5;
    CoordinateScorer scorer(d, 1);
    const FeatureAxis axis = coordinate_axis(d, 0, "f0");

    const TupleBuild build = build_pair_tuples(scorer, axis, 0, n, 0.5, multiplier, seed);

    // Replay the selection by hand: sigma(z0) < 0.5 iff z0 < 0, and the
    // shifted copy passes iff z0 + 2.5 > 0.
    const auto candidates = sample_gaussian_latents(n, d, seed);
    std::vector<LatentVector> expected_minus;
    for (const auto& z : candidates)
        if (z[0] < 0.0 && z[0] + multiplier > 0.0) expected_minus.push_back(z);

    size_t below = 0;
    for (const auto& z : candidates)
        if (z[0] < 0.0) ++below;

    CHECK(build.stats.n_candidates == n);
    CHECK(build.stats.n_below_threshold == below);
    CHECK(build.stats.n_accepted == expected_minus.size());
    CHECK(build.stats.yield() ==
          static_cast<double>(expected_minus.size()) / static_cast<double>(n));
    REQUIRE(build.tuples.size() == expected_minus.size());
    CHECK(build.tuples.size() > 10);

    for (size_t i = 0; i < build.tuples.size(); ++i) {
        const PairTuple& t = build.tuples[i];
        CHECK(t.feature_name == "f0");
        CHECK(t.z_minus == expected_minus[i]);
        CHECK(t.z_plus == shift(expected_minus[i], axis, multiplier));
        CHECK(t.z_plus[1] == expected_minus[i][1]);
        CHECK(t.z_plus[2] == expected_minus[i][2]);
    }

    CHECK(build.d == d);
    CHECK(build.threshold == 0.5);
    CHECK(build.multiplier == multiplier);
    CHECK(build.seed == seed);
    CHECK(build.axis_fingerprint == axis_fingerprint(axis));
}

TEST_CASE("build_pair_tuples is deterministic in the seed") {
    CoordinateScorer scorer(4, 2);
    const FeatureAxis axis = coordinate_axis(4, 1, "f1");

    const TupleBuild a = build_pair_tuples(scorer, axis, 1, 300, 0.5, 3.0, 5);
    const TupleBuild b = build_pair_tuples(scorer, axis, 1, 300, 0.5, 3.0, 5);
    REQUIRE(a.tuples.size() == b.tuples.size());
    for (size_t i = 0; i < a.tuples.size(); ++i) {
        CHECK(a.tuples[i].z_minus == b.tuples[i].z_minus);
        CHECK(a.tuples[i].z_plus == b.tuples[i].z_plus);
    }

    const TupleBuild c = build_pair_tuples(scorer, axis, 1, 300, 0.5, 3.0, 6);
    CHECK(a.tuples.front().z_minus != c.tuples.front().z_minus);
}

TEST_CASE("build_pair_tuples validates its arguments") {
    CoordinateScorer scorer(3, 1);
    const FeatureAxis axis = coordinate_axis(3, 0, "f0");

    CHECK_THROWS_AS(build_pair_tuples(scorer, axis, 0, 10, 0.0, 1.0, 1), InvalidArgument);
    CHECK_THROWS_AS(build_pair_tuples(scorer, axis, 0, 10, 1.0, 1.0, 1), InvalidArgument);
    CHECK_THROWS_AS(build_pair_tuples(scorer, axis, 0, 0, 0.5, 1.0, 1), InvalidArgument);
    CHECK_THROWS_AS(build_pair_tuples(scorer, axis, 1, 10, 0.5, 1.0, 1), InvalidArgument);

    const FeatureAxis wide = coordinate_axis(4, 0, "f0");
    CHECK_THROWS_AS(build_pair_tuples(scorer, wide, 0, 10, 0.5, 1.0, 1), InvalidArgument);
}

TEST_CASE("build_pair_tuples reports stage rates when nothing survives") {
    const FeatureAxis axis = coordinate_axis(3, 0, "f0");

    // Everything scores 0.9: the negative filter empties the pool.
    ConstantScorer high(3, 0.9);
    try {
        build_pair_tuples(high, axis, 0, 50, 0.5, 1.0, 1);
        FAIL("expected EmptyDataset");
    } catch (const EmptyDataset& e) {
        const std::string msg = e.what();
        CHECK(msg.find("candidates=50") != std::string::npos);
        CHECK(msg.find("below-threshold=0") != std::string::npos);
    }

    // Everything scores 0.1: negatives survive but no shift can cross.
    ConstantScorer low(3, 0.1);
    try {
        build_pair_tuples(low, axis, 0, 50, 0.5, 1.0, 1);
        FAIL("expected EmptyDataset");
    } catch (const EmptyDataset& e) {
        const std::string msg = e.what();
        CHECK(msg.find("below-threshold=50") != std::string::npos);
        CHECK(msg.find("100.0%") != std::string::npos);
    }
}

TEST_CASE("expand_tuples writes four samples per tuple in a fixed order") {
    const auto tuples = toy_tuples();
    const PairsDataset ds = expand_tuples(tuples, FourthPairMode::removal);

    CHECK(ds.feature_name == "toy");
    CHECK(ds.d == 2);
    CHECK(ds.tuple_count == 2);
    REQUIRE(ds.samples.size() == 8);

    for (size_t t = 0; t < 2; ++t) {
        const auto& z_minus = tuples[t].z_minus;
        const auto& z_plus = tuples[t].z_plus;
        const PairSample* s = &ds.samples[4 * t];

        CHECK(s[0].input_latent == z_minus);
        CHECK(s[0].label == 1.0);
        CHECK(s[0].target_latent == z_plus);

        CHECK(s[1].input_latent == z_plus);
        CHECK(s[1].label == 1.0);
        CHECK(s[1].target_latent == z_plus);

        CHECK(s[2].input_latent == z_minus);
        CHECK(s[2].label == 0.0);
        CHECK(s[2].target_latent == z_minus);

        CHECK(s[3].input_latent == z_plus);
        CHECK(s[3].label == 0.0);
        CHECK(s[3].target_latent == z_minus);
    }

    double label_sum = 0.0;
    for (const auto& s : ds.samples) label_sum += s.label;
    CHECK(label_sum == 4.0);
}

TEST_CASE("identity mode keeps the fourth pair in place") {
    const auto tuples = toy_tuples();
    const PairsDataset ds = expand_tuples(tuples, FourthPairMode::identity);
    REQUIRE(ds.samples.size() == 8);
    for (size_t t = 0; t < 2; ++t) {
        CHECK(ds.samples[4 * t + 3].input_latent == tuples[t].z_plus);
        CHECK(ds.samples[4 * t + 3].label == 0.0);
        CHECK(ds.samples[4 * t + 3].target_latent == tuples[t].z_plus);
    }
}

TEST_CASE("expand_tuples carries build metadata and rejects bad tuples") {
    CoordinateScorer scorer(3, 1);
    const FeatureAxis axis = coordinate_axis(3, 0, "f0");
    const TupleBuild build = build_pair_tuples(scorer, axis, 0, 100, 0.5, 2.0, 9);

    const PairsDataset ds = expand_tuples(build);
    CHECK(ds.samples.size() == 4 * build.tuples.size());
    CHECK(ds.tuple_count == build.tuples.size());
    CHECK(ds.threshold == build.threshold);
    CHECK(ds.multiplier == build.multiplier);
    CHECK(ds.seed == build.seed);
    CHECK(ds.axis_fingerprint == build.axis_fingerprint);

    CHECK_THROWS_AS(expand_tuples(std::vector<PairTuple>{}), InvalidArgument);

    auto ragged = toy_tuples();
    ragged[1].z_plus.push_back(0.0);
    CHECK_THROWS_AS(expand_tuples(ragged), InvalidArgument);
}

TEST_CASE("split_dataset cuts floor/floor/remainder and loses nothing") {
    auto tuples = toy_tuples();
    const auto more = toy_tuples();
    tuples.push_back(more[0]); // 3 tuples -> 12 samples
    for (auto& t : tuples) t.z_minus[1] += 0.001 * static_cast<double>(tuples.size());
    const PairsDataset ds = expand_tuples(tuples);
    REQUIRE(ds.samples.size() == 12);

    const DatasetSplits splits = split_dataset(ds, SplitFractions{}, 123);
    CHECK(splits.train.samples.size() == 9); // floor(0.8 * 12)
    CHECK(splits.valid.samples.size() == 1); // floor(0.1 * 12)
    CHECK(splits.test.samples.size() == 2);  // remainder

    auto combined = sample_histogram(splits.train);
    for (const auto& [key, count] : sample_histogram(splits.valid)) combined[key] += count;
    for (const auto& [key, count] : sample_histogram(splits.test)) combined[key] += count;
    CHECK(combined == sample_histogram(ds));

    CHECK(splits.train.feature_name == ds.feature_name);
    CHECK(splits.train.d == ds.d);
    CHECK(splits.valid.threshold == ds.threshold);
    CHECK(splits.test.multiplier == ds.multiplier);
}

TEST_CASE("split_dataset shuffles deterministically by seed") {
    CoordinateScorer scorer(3, 1);
    const FeatureAxis axis = coordinate_axis(3, 0, "f0");
    const PairsDataset ds = expand_tuples(build_pair_tuples(scorer, axis, 0, 100, 0.5, 2.0, 9));

    const DatasetSplits a = split_dataset(ds, SplitFractions{}, 7);
    const DatasetSplits b = split_dataset(ds, SplitFractions{}, 7);
    REQUIRE(a.train.samples.size() == b.train.samples.size());
    bool all_equal = true;
    for (size_t i = 0; i < a.train.samples.size(); ++i)
        all_equal = all_equal && a.train.samples[i].input_latent == b.train.samples[i].input_latent;
    CHECK(all_equal);

    const DatasetSplits c = split_dataset(ds, SplitFractions{}, 8);
    bool same_order = true;
    for (size_t i = 0; i < a.train.samples.size(); ++i)
        same_order = same_order && a.train.samples[i].input_latent == c.train.samples[i].input_latent;
    CHECK(!same_order);
}

TEST_CASE("split_dataset validates fractions") {
    const PairsDataset ds = expand_tuples(toy_tuples());
    CHECK_THROWS_AS(split_dataset(PairsDataset{}, SplitFractions{}, 1), InvalidArgument);
    CHECK_THROWS_AS(split_dataset(ds, SplitFractions{0.5, 0.1, 0.1}, 1), InvalidArgument);
    CHECK_THROWS_AS(split_dataset(ds, SplitFractions{1.2, -0.1, -0.1}, 1), InvalidArgument);
    CHECK_NOTHROW(split_dataset(ds, SplitFractions{0.5, 0.25, 0.25}, 1));
}

TEST_CASE("save_dataset and load_dataset round-trip through float32 files") {
    CoordinateScorer scorer(3, 1);
    const FeatureAxis axis = coordinate_axis(3, 0, "f0");
    const PairsDataset ds = expand_tuples(build_pair_tuples(scorer, axis, 0, 150, 0.5, 2.0, 13));

    TempDir dir;
    const auto first = dir / "ds1";
    save_dataset(ds, first);
    const PairsDataset loaded = load_dataset(first);

    CHECK(loaded.feature_name == ds.feature_name);
    CHECK(loaded.d == ds.d);
    CHECK(loaded.threshold == ds.threshold);
    CHECK(loaded.multiplier == ds.multiplier);
    CHECK(loaded.tuple_count == ds.tuple_count);
    CHECK(loaded.seed == ds.seed);
    CHECK(loaded.axis_fingerprint == ds.axis_fingerprint);
    REQUIRE(loaded.samples.size() == ds.samples.size());

    for (size_t i = 0; i < ds.samples.size(); ++i) {
        CHECK(loaded.samples[i].label == ds.samples[i].label);
        for (size_t j = 0; j < ds.d; ++j) {
            const double narrowed =
                static_cast<double>(static_cast<float>(ds.samples[i].input_latent[j]));
            CHECK(loaded.samples[i].input_latent[j] == narrowed);
        }
    }

    // A second save of the loaded dataset reproduces every byte.
    const auto second = dir / "ds2";
    save_dataset(loaded, second);
    for (const char* name : {"manifest.json", "inputs.npy", "labels.npy", "targets.npy"})
        CHECK(testutil::read_bytes(first / name) == testutil::read_bytes(second / name));
}

TEST_CASE("load_dataset rejects missing or inconsistent artifacts") {
    TempDir dir;
    CHECK_THROWS_AS(load_dataset(dir / "absent"), IoError);

    const PairsDataset ds = expand_tuples(toy_tuples());
    const auto good = dir / "good";
    save_dataset(ds, good);

    auto corrupt = [&](const std::string& name, auto mutate) {
        const auto broken = dir / ("broken-" + name);
        std::filesystem::copy(good, broken, std::filesystem::copy_options::recursive);
        mutate(broken);
        return broken;
    };

    const auto bad_json = corrupt("json", [](const std::filesystem::path& p) {
        testutil::write_text(p / "manifest.json", "{ nope");
    });
    CHECK_THROWS_AS(load_dataset(bad_json), FormatError);

    const auto missing_field = corrupt("field", [](const std::filesystem::path& p) {
        testutil::write_text(p / "manifest.json", "{\"feature_name\": \"toy\"}");
    });
    CHECK_THROWS_AS(load_dataset(missing_field), FormatError);

    const auto missing_file = corrupt("file", [](const std::filesystem::path& p) {
        std::filesystem::remove(p / "targets.npy");
    });
    CHECK_THROWS_AS(load_dataset(missing_file), IoError);

    const auto wrong_count = corrupt("count", [](const std::filesystem::path& p) {
        auto text = testutil::read_text(p / "manifest.json");
        const auto pos = text.find("\"sample_count\": 8");
        REQUIRE(pos != std::string::npos);
        text.replace(pos, 17, "\"sample_count\": 9");
        testutil::write_text(p / "manifest.json", text);
    });
    CHECK_THROWS_AS(load_dataset(wrong_count), FormatError);

    const auto wrong_tuples = corrupt("tuples", [](const std::filesystem::path& p) {
        auto text = testutil::read_text(p / "manifest.json");
        const auto pos = text.find("\"tuple_count\": 2");
        REQUIRE(pos != std::string::npos);
        text.replace(pos, 16, "\"tuple_count\": 1");
        testutil::write_text(p / "manifest.json", text);
    });
    CHECK_THROWS_AS(load_dataset(wrong_tuples), FormatError);

    const auto bad_label = corrupt("label", [&](const std::filesystem::path& p) {
        PairsDataset tweaked = ds;
        tweaked.samples[3].label = 0.5;
        save_dataset(tweaked, p);
    });
    CHECK_THROWS_AS(load_dataset(bad_label), FormatError);
}
