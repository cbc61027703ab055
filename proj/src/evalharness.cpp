#include "lfs/evalharness.hpp"

#include <fstream>

#include <json.hpp>

#include "lfs/digest.hpp"
#include "lfs/errors.hpp"

namespace lfs {

namespace {

using nlohmann::json;

void check_config(const EvalConfig& cfg) {
    if (cfg.n_samples == 0) throw InvalidArgument("evaluation needs at least one sample");
    if (!(cfg.threshold > 0.0 && cfg.threshold < 1.0))
        throw InvalidArgument("threshold must lie strictly between 0 and 1");
}

FeatureEvalRow tally(const Matrix& original, const Matrix& baseline, const Matrix& lfs,
                     size_t col, double threshold, const std::string& name) {
    FeatureEvalRow row;
    row.feature_name = name;
    const size_t n = original.rows();
    double sum_o = 0.0, sum_b = 0.0, sum_l = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double so = original(i, col);
        const double sb = baseline(i, col);
        const double sl = lfs(i, col);
        if (so > threshold) ++row.count_original;
        if (sb > threshold) ++row.count_baseline;
        if (sl > threshold) ++row.count_lfs;
        sum_o += so;
        sum_b += sb;
        sum_l += sl;
    }
    row.mean_original = sum_o / static_cast<double>(n);
    row.mean_baseline = sum_b / static_cast<double>(n);
    row.mean_lfs = sum_l / static_cast<double>(n);
    return row;
}

void check_feature(const FeatureScorer& scorer, const FeatureAxis& axis, size_t feature_index,
                   const ShifterModel& model) {
    if (axis.dim() != scorer.latent_dim())
        throw InvalidArgument("axis dimension does not match the scorer latent dim");
    if (feature_index >= scorer.feature_count())
        throw InvalidArgument("feature index is out of range for the scorer");
    if (model.spec.d != scorer.latent_dim())
        throw InvalidArgument("model latent dim does not match the scorer");
    if (model.spec.k != 1)
        throw InvalidArgument("evaluation drives models with a scalar label, so k must be 1");
}

} // namespace

EvalReport run_single_feature_eval(const FeatureScorer& scorer, const FeatureAxis& axis,
                                   size_t feature_index, double multiplier,
                                   const ShifterModel& model, const EvalConfig& cfg) {
    check_config(cfg);
    check_feature(scorer, axis, feature_index, model);

    const auto latents = sample_gaussian_latents(cfg.n_samples, scorer.latent_dim(),
                                                 derive_seed(cfg.seed, "eval-latents"));
    std::vector<LatentVector> shifted_baseline(latents.size());
    std::vector<LatentVector> shifted_lfs(latents.size());
    const double label[] = {1.0};
    for (size_t i = 0; i < latents.size(); ++i) {
        shifted_baseline[i] = shift(latents[i], axis, multiplier);
        shifted_lfs[i] = forward(model, latents[i], label);
    }

    const Matrix scores_o = scorer.score_batch(latents);
    const Matrix scores_b = scorer.score_batch(shifted_baseline);
    const Matrix scores_l = scorer.score_batch(shifted_lfs);

    EvalReport report;
    report.n_samples = cfg.n_samples;
    report.threshold = cfg.threshold;
    report.seed = cfg.seed;
    report.notes = cfg.notes;
    const std::string name =
        axis.feature_name.empty() ? "feature" + std::to_string(feature_index) : axis.feature_name;
    report.rows.push_back(tally(scores_o, scores_b, scores_l, feature_index, cfg.threshold, name));
    return report;
}

EvalReport run_multi_feature_eval(const FeatureScorer& scorer,
                                  const std::vector<FeatureAxis>& axes,
                                  const std::vector<size_t>& feature_indices,
                                  const std::vector<double>& multipliers,
                                  const std::vector<ShifterModel>& models,
                                  const EvalConfig& cfg) {
    check_config(cfg);
    if (axes.empty()) throw InvalidArgument("multi-feature evaluation needs at least one axis");
    if (axes.size() != feature_indices.size() || axes.size() != multipliers.size() ||
        axes.size() != models.size())
        throw InvalidArgument("axes, feature indices, multipliers and models must align");
    for (size_t j = 0; j < axes.size(); ++j)
        check_feature(scorer, axes[j], feature_indices[j], models[j]);

    const auto latents = sample_gaussian_latents(cfg.n_samples, scorer.latent_dim(),
                                                 derive_seed(cfg.seed, "eval-latents"));
    const std::vector<std::vector<double>> labels(models.size(), std::vector<double>{1.0});
    std::vector<LatentVector> shifted_baseline(latents.size());
    std::vector<LatentVector> shifted_lfs(latents.size());
    for (size_t i = 0; i < latents.size(); ++i) {
        shifted_baseline[i] = shift_multi(latents[i], axes, multipliers);
        shifted_lfs[i] = chain_shift(latents[i], models, labels);
    }

    const Matrix scores_o = scorer.score_batch(latents);
    const Matrix scores_b = scorer.score_batch(shifted_baseline);
    const Matrix scores_l = scorer.score_batch(shifted_lfs);

    EvalReport report;
    report.n_samples = cfg.n_samples;
    report.threshold = cfg.threshold;
    report.seed = cfg.seed;
    report.notes = cfg.notes;
    for (size_t j = 0; j < axes.size(); ++j) {
        const std::string name = axes[j].feature_name.empty()
                                     ? "feature" + std::to_string(feature_indices[j])
                                     : axes[j].feature_name;
        report.rows.push_back(
            tally(scores_o, scores_b, scores_l, feature_indices[j], cfg.threshold, name));
    }
    return report;
}

std::string report_csv(const EvalReport& report) {
    std::string out = "feature,original,baseline,lfs\n";
    for (const FeatureEvalRow& row : report.rows) {
        if (row.feature_name.find_first_of(",\n\r") != std::string::npos)
            throw InvalidArgument("feature name '" + row.feature_name +
                                  "' cannot be written as CSV");
        out += row.feature_name;
        out += ',';
        out += std::to_string(row.count_original);
        out += ',';
        out += std::to_string(row.count_baseline);
        out += ',';
        out += std::to_string(row.count_lfs);
        out += '\n';
    }
    return out;
}

void write_report_csv(const EvalReport& report, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << report_csv(report);
    if (!out.flush()) throw IoError("cannot write " + path.string());
}

std::string report_json(const EvalReport& report) {
    json rows = json::array();
    for (const FeatureEvalRow& row : report.rows)
        rows.push_back({{"feature", row.feature_name},
                        {"count_original", row.count_original},
                        {"count_baseline", row.count_baseline},
                        {"count_lfs", row.count_lfs},
                        {"mean_original", row.mean_original},
                        {"mean_baseline", row.mean_baseline},
                        {"mean_lfs", row.mean_lfs}});
    const json j{{"kind", "eval-report"},
                 {"n_samples", report.n_samples},
                 {"threshold", report.threshold},
                 {"seed", report.seed},
                 {"notes", report.notes},
                 {"rows", rows}};
    return j.dump(2) + "\n";
}

void write_report_json(const EvalReport& report, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << report_json(report);
    if (!out.flush()) throw IoError("cannot write " + path.string());
}

EvalReport read_report_json(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MissingArtifact("evaluation report not found at " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw FormatError("evaluation report is not valid JSON: " + std::string(e.what()));
    }
    EvalReport report;
    try {
        if (j.at("kind").get<std::string>() != "eval-report")
            throw FormatError("file is not an evaluation report");
        report.n_samples = j.at("n_samples").get<size_t>();
        report.threshold = j.at("threshold").get<double>();
        report.seed = j.at("seed").get<uint64_t>();
        report.notes = j.at("notes").get<std::string>();
        for (const json& jr : j.at("rows")) {
            FeatureEvalRow row;
            row.feature_name = jr.at("feature").get<std::string>();
            row.count_original = jr.at("count_original").get<size_t>();
            row.count_baseline = jr.at("count_baseline").get<size_t>();
            row.count_lfs = jr.at("count_lfs").get<size_t>();
            row.mean_original = jr.at("mean_original").get<double>();
            row.mean_baseline = jr.at("mean_baseline").get<double>();
            row.mean_lfs = jr.at("mean_lfs").get<double>();
            report.rows.push_back(std::move(row));
        }
    } catch (const json::exception& e) {
        throw FormatError("evaluation report is missing fields: " + std::string(e.what()));
    }
    return report;
}

} // namespace lfs
