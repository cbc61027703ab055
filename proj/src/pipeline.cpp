#include "lfs/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>

#include <json.hpp>

#include "lfs/digest.hpp"
#include "lfs/errors.hpp"
#include "lfs/evalharness.hpp"
#include "lfs/npy.hpp"

namespace lfs {

namespace {

using nlohmann::json;

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const char* where) {
    if (!j.is_object()) throw InvalidArgument(std::string("config section '") + where +
                                              "' must be a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        const bool known = std::any_of(allowed.begin(), allowed.end(),
                                       [&](const char* k) { return it.key() == k; });
        if (!known)
            throw InvalidArgument("unknown config key '" + it.key() + "' in " + where);
    }
}

BoundaryKind kind_from_name(const std::string& name) {
    if (name == "linear") return BoundaryKind::linear;
    if (name == "quadratic") return BoundaryKind::quadratic;
    throw InvalidArgument("feature kind must be 'linear' or 'quadratic', got '" + name + "'");
}

const char* kind_name(BoundaryKind kind) {
    return kind == BoundaryKind::linear ? "linear" : "quadratic";
}

PipelineConfig parse_config(const json& j) {
    check_keys(j,
               {"out_dir", "seed", "d", "world", "scorer", "feature", "eval_features", "axis",
                "pairs", "split", "train", "eval", "shift_mode"},
               "the top level");
    PipelineConfig cfg;
    cfg.out_dir = j.value("out_dir", cfg.out_dir.generic_string());
    cfg.seed = j.value("seed", cfg.seed);
    cfg.d = j.value("d", cfg.d);

    if (j.contains("world")) {
        const json& jw = j.at("world");
        check_keys(jw, {"noise_sigma", "latent_norm_clamp", "features"}, "world");
        cfg.world.noise_sigma = jw.value("noise_sigma", 0.0);
        cfg.world.latent_norm_clamp = jw.value("latent_norm_clamp", 0.0);
        if (jw.contains("features")) {
            for (const json& jf : jw.at("features")) {
                check_keys(jf, {"name", "kind", "offset", "curvature", "gain"},
                           "world.features[]");
                FeatureConfig fc;
                fc.name = jf.value("name", "f" + std::to_string(cfg.world.features.size()));
                fc.kind = kind_from_name(jf.value("kind", "linear"));
                fc.offset = jf.value("offset", 0.0);
                fc.curvature = jf.value("curvature", 0.0);
                fc.gain = jf.value("gain", 1.0);
                cfg.world.features.push_back(std::move(fc));
            }
        }
    }
    if (cfg.world.features.empty())
        cfg.world.features.push_back({"f0", BoundaryKind::linear, -2.0, 0.0, 1.0});
    cfg.world.d = cfg.d;

    if (j.contains("scorer")) {
        const json& js = j.at("scorer");
        check_keys(js, {"dir", "timeout_ms", "features"}, "scorer");
        cfg.scorer_dir = js.value("dir", std::string());
        cfg.scorer_timeout = std::chrono::milliseconds(js.value("timeout_ms", int64_t{10000}));
        if (js.contains("features"))
            cfg.scorer_features = js.at("features").get<std::vector<std::string>>();
        if (!cfg.scorer_dir.empty() && cfg.scorer_features.empty())
            throw InvalidArgument("scorer.features must name the bridge's score columns");
    }

    if (j.contains("eval_features"))
        cfg.eval_features = j.at("eval_features").get<std::vector<std::string>>();

    if (j.contains("axis")) {
        const json& ja = j.at("axis");
        check_keys(ja, {"n_samples", "use_arctanh", "epsilon"}, "axis");
        cfg.axis_samples = ja.value("n_samples", cfg.axis_samples);
        cfg.axis_arctanh = ja.value("use_arctanh", cfg.axis_arctanh);
        cfg.axis_epsilon = ja.value("epsilon", cfg.axis_epsilon);
    }

    if (j.contains("pairs")) {
        const json& jp = j.at("pairs");
        check_keys(jp, {"n_candidates", "threshold", "multiplier", "fourth_pair"}, "pairs");
        cfg.pair_candidates = jp.value("n_candidates", cfg.pair_candidates);
        cfg.pair_threshold = jp.value("threshold", cfg.pair_threshold);
        cfg.pair_multiplier = jp.value("multiplier", cfg.pair_multiplier);
        const std::string mode = jp.value("fourth_pair", "removal");
        if (mode == "removal") {
            cfg.fourth_pair = FourthPairMode::removal;
        } else if (mode == "identity") {
            cfg.fourth_pair = FourthPairMode::identity;
        } else {
            throw InvalidArgument("pairs.fourth_pair must be 'removal' or 'identity'");
        }
    }

    if (j.contains("split")) {
        const json& js = j.at("split");
        check_keys(js, {"train", "valid", "test"}, "split");
        cfg.split.train = js.value("train", cfg.split.train);
        cfg.split.valid = js.value("valid", cfg.split.valid);
        cfg.split.test = js.value("test", cfg.split.test);
    }

    if (j.contains("train")) {
        const json& jt = j.at("train");
        check_keys(jt,
                   {"arch", "learning_rate", "epochs", "batch_size", "adam_beta1", "adam_beta2",
                    "adam_eps"},
                   "train");
        cfg.arch = jt.value("arch", cfg.arch);
        cfg.train.learning_rate = jt.value("learning_rate", cfg.train.learning_rate);
        cfg.train.epochs = jt.value("epochs", cfg.train.epochs);
        cfg.train.batch_size = jt.value("batch_size", cfg.train.batch_size);
        cfg.train.adam_beta1 = jt.value("adam_beta1", cfg.train.adam_beta1);
        cfg.train.adam_beta2 = jt.value("adam_beta2", cfg.train.adam_beta2);
        cfg.train.adam_eps = jt.value("adam_eps", cfg.train.adam_eps);
    }

    if (j.contains("eval")) {
        const json& je = j.at("eval");
        check_keys(je, {"n_samples", "threshold", "notes"}, "eval");
        cfg.eval_samples = je.value("n_samples", cfg.eval_samples);
        cfg.eval_threshold = je.value("threshold", cfg.eval_threshold);
        cfg.eval_notes = je.value("notes", cfg.eval_notes);
    }

    cfg.shift_mode = j.value("shift_mode", cfg.shift_mode);
    if (cfg.shift_mode != "axis" && cfg.shift_mode != "model" && cfg.shift_mode != "chain")
        throw InvalidArgument("shift_mode must be 'axis', 'model' or 'chain'");

    cfg.feature = j.value("feature", std::string());
    if (cfg.feature.empty()) cfg.feature = feature_names(cfg).front();
    return cfg;
}

uint64_t stage_seed(const PipelineConfig& cfg, const std::string& stage) {
    return derive_seed(cfg.seed, stage);
}

void ensure_out_dir(const PipelineConfig& cfg) {
    std::error_code ec;
    std::filesystem::create_directories(cfg.out_dir, ec);
    if (ec) throw IoError("cannot create output directory " + cfg.out_dir.string());
}

// Hash every output (directories contribute their directly contained regular
// files, sorted by name) and persist the run manifest.
void write_run_manifest(const PipelineConfig& cfg, const std::string& command,
                        const std::map<std::string, uint64_t>& stage_seeds,
                        const std::vector<std::filesystem::path>& outputs, const json& details) {
    json outs = json::object();
    auto add_file = [&](const std::filesystem::path& p) {
        outs[p.lexically_proximate(cfg.out_dir).generic_string()] = hex64(hash_file(p));
    };
    for (const auto& out : outputs) {
        if (std::filesystem::is_directory(out)) {
            std::vector<std::filesystem::path> files;
            for (const auto& entry : std::filesystem::directory_iterator(out))
                if (entry.is_regular_file()) files.push_back(entry.path());
            std::sort(files.begin(), files.end());
            for (const auto& f : files) add_file(f);
        } else {
            add_file(out);
        }
    }

    json seeds = json::object();
    for (const auto& [stage, seed] : stage_seeds) seeds[stage] = seed;

    const json manifest{{"command", command},
                        {"config", json::parse(pipeline_config_json(cfg))},
                        {"master_seed", cfg.seed},
                        {"stage_seeds", seeds},
                        {"outputs", outs},
                        {"details", details}};
    const auto path = cfg.out_dir / ("run-" + command + ".json");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << manifest.dump(2) << '\n';
    if (!out.flush()) throw IoError("cannot write " + path.string());
}

FeatureAxis load_axis_artifact(const PipelineConfig& cfg, const std::string& feature) {
    const auto path = axis_path(cfg, feature);
    if (!std::filesystem::exists(path))
        throw MissingArtifact("axis file not found at " + path.string() +
                              "; run the fit-axis command first");
    return load_axis(path);
}

PairsDataset load_dataset_artifact(const PipelineConfig& cfg, const std::string& feature) {
    const auto dir = dataset_dir(cfg, feature);
    if (!std::filesystem::exists(dir / "manifest.json"))
        throw MissingArtifact("pairs dataset not found at " + dir.string() +
                              "; run the build-pairs command first");
    return load_dataset(dir);
}

ShifterModel load_model_artifact(const PipelineConfig& cfg, const std::string& feature) {
    const auto dir = model_dir(cfg, feature);
    if (!std::filesystem::exists(dir / "manifest.json"))
        throw MissingArtifact("model not found at " + dir.string() +
                              "; run the train command first");
    return load_model(dir);
}

} // namespace

PipelineConfig parse_pipeline_config_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw FormatError("config is not valid JSON: " + std::string(e.what()));
    }
    try {
        return parse_config(j);
    } catch (const json::exception& e) {
        throw InvalidArgument("config has a wrongly typed field: " + std::string(e.what()));
    }
}

PipelineConfig load_pipeline_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read config file " + path.string());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_pipeline_config_text(text);
}

std::string pipeline_config_json(const PipelineConfig& cfg) {
    json features = json::array();
    for (const FeatureConfig& fc : cfg.world.features)
        features.push_back({{"name", fc.name},
                            {"kind", kind_name(fc.kind)},
                            {"offset", fc.offset},
                            {"curvature", fc.curvature},
                            {"gain", fc.gain}});
    const json j{
        {"out_dir", cfg.out_dir.generic_string()},
        {"seed", cfg.seed},
        {"d", cfg.d},
        {"world",
         {{"noise_sigma", cfg.world.noise_sigma},
          {"latent_norm_clamp", cfg.world.latent_norm_clamp},
          {"features", features}}},
        {"scorer",
         {{"dir", cfg.scorer_dir.generic_string()},
          {"timeout_ms", cfg.scorer_timeout.count()},
          {"features", cfg.scorer_features}}},
        {"feature", cfg.feature},
        {"eval_features", cfg.eval_features},
        {"axis",
         {{"n_samples", cfg.axis_samples},
          {"use_arctanh", cfg.axis_arctanh},
          {"epsilon", cfg.axis_epsilon}}},
        {"pairs",
         {{"n_candidates", cfg.pair_candidates},
          {"threshold", cfg.pair_threshold},
          {"multiplier", cfg.pair_multiplier},
          {"fourth_pair", cfg.fourth_pair == FourthPairMode::removal ? "removal" : "identity"}}},
        {"split", {{"train", cfg.split.train}, {"valid", cfg.split.valid}, {"test", cfg.split.test}}},
        {"train",
         {{"arch", cfg.arch},
          {"learning_rate", cfg.train.learning_rate},
          {"epochs", cfg.train.epochs},
          {"batch_size", cfg.train.batch_size},
          {"adam_beta1", cfg.train.adam_beta1},
          {"adam_beta2", cfg.train.adam_beta2},
          {"adam_eps", cfg.train.adam_eps}}},
        {"eval",
         {{"n_samples", cfg.eval_samples},
          {"threshold", cfg.eval_threshold},
          {"notes", cfg.eval_notes}}},
        {"shift_mode", cfg.shift_mode}};
    return j.dump(2) + "\n";
}

std::vector<std::string> feature_names(const PipelineConfig& cfg) {
    if (!cfg.scorer_dir.empty()) return cfg.scorer_features;
    std::vector<std::string> names;
    names.reserve(cfg.world.features.size());
    for (const FeatureConfig& fc : cfg.world.features) names.push_back(fc.name);
    return names;
}

size_t feature_index(const PipelineConfig& cfg, const std::string& name) {
    const auto names = feature_names(cfg);
    for (size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return i;
    std::string known;
    for (const auto& n : names) known += (known.empty() ? "" : ", ") + n;
    throw InvalidArgument("unknown feature '" + name + "' (known: " + known + ")");
}

std::unique_ptr<FeatureScorer> open_scorer(const PipelineConfig& cfg) {
    if (!cfg.scorer_dir.empty())
        return external_scorer(cfg.scorer_dir, cfg.scorer_timeout, cfg.d,
                               cfg.scorer_features.size());
    const auto path = world_path(cfg);
    if (!std::filesystem::exists(path))
        throw MissingArtifact("world description not found at " + path.string() +
                              "; run the world command first");
    return std::make_unique<SyntheticWorld>(load_world(path));
}

std::filesystem::path world_path(const PipelineConfig& cfg) { return cfg.out_dir / "world.json"; }

std::filesystem::path axis_path(const PipelineConfig& cfg, const std::string& feature) {
    return cfg.out_dir / ("axis-" + feature + ".json");
}

std::filesystem::path dataset_dir(const PipelineConfig& cfg, const std::string& feature) {
    return cfg.out_dir / ("pairs-" + feature);
}

std::filesystem::path model_dir(const PipelineConfig& cfg, const std::string& feature) {
    return cfg.out_dir / ("model-" + feature);
}

std::filesystem::path history_path(const PipelineConfig& cfg, const std::string& feature) {
    return cfg.out_dir / ("history-" + feature + ".csv");
}

std::filesystem::path cmd_world(const PipelineConfig& cfg) {
    if (!cfg.scorer_dir.empty())
        throw InvalidArgument("config uses an external scorer; there is no world to create");
    ensure_out_dir(cfg);
    WorldConfig wc = cfg.world;
    wc.d = cfg.d;
    wc.seed = stage_seed(cfg, "world");
    const SyntheticWorld world = make_world(wc);
    const auto path = world_path(cfg);
    save_world(world, path);
    write_run_manifest(cfg, "world", {{"world", wc.seed}}, {path},
                       {{"d", wc.d}, {"feature_count", wc.m()}});
    return path;
}

std::filesystem::path cmd_fit_axis(const PipelineConfig& cfg) {
    ensure_out_dir(cfg);
    const auto scorer = open_scorer(cfg);
    const size_t idx = feature_index(cfg, cfg.feature);
    const uint64_t seed = stage_seed(cfg, "axis:" + cfg.feature);

    const auto latents = sample_gaussian_latents(cfg.axis_samples, cfg.d, seed);
    const Matrix scores = scorer->score_batch(latents);
    std::vector<double> column(latents.size());
    for (size_t i = 0; i < latents.size(); ++i) column[i] = scores(i, idx);

    const FeatureAxis axis =
        fit_feature_axis(latents, column, cfg.axis_arctanh, cfg.axis_epsilon, cfg.feature);
    const auto path = axis_path(cfg, cfg.feature);
    save_axis(axis, path);

    json details{{"fit_r2", axis.fit_r2},
                 {"n_fit", axis.n_fit},
                 {"fingerprint", axis_fingerprint(axis)}};
    if (cfg.scorer_dir.empty()) {
        const auto* world = dynamic_cast<const SyntheticWorld*>(scorer.get());
        if (world && world->features()[idx].kind == BoundaryKind::linear)
            details["ground_truth_cosine"] =
                cosine(axis.direction, ground_truth_axis(*world, idx));
    }
    write_run_manifest(cfg, "fit-axis", {{"axis:" + cfg.feature, seed}}, {path}, details);
    return path;
}

std::filesystem::path cmd_build_pairs(const PipelineConfig& cfg) {
    ensure_out_dir(cfg);
    const auto scorer = open_scorer(cfg);
    const size_t idx = feature_index(cfg, cfg.feature);
    const FeatureAxis axis = load_axis_artifact(cfg, cfg.feature);
    const uint64_t seed = stage_seed(cfg, "pairs:" + cfg.feature);

    const TupleBuild build = build_pair_tuples(*scorer, axis, idx, cfg.pair_candidates,
                                               cfg.pair_threshold, cfg.pair_multiplier, seed);
    const PairsDataset ds = expand_tuples(build, cfg.fourth_pair);
    const auto dir = dataset_dir(cfg, cfg.feature);
    save_dataset(ds, dir);

    const json details{{"n_candidates", build.stats.n_candidates},
                       {"n_below_threshold", build.stats.n_below_threshold},
                       {"n_accepted", build.stats.n_accepted},
                       {"negative_rate", build.stats.negative_rate()},
                       {"shift_success_rate", build.stats.shift_success_rate()},
                       {"yield", build.stats.yield()},
                       {"tuple_count", ds.tuple_count},
                       {"sample_count", ds.samples.size()}};
    write_run_manifest(cfg, "build-pairs", {{"pairs:" + cfg.feature, seed}}, {dir}, details);
    return dir;
}

std::filesystem::path cmd_train(const PipelineConfig& cfg) {
    ensure_out_dir(cfg);
    const PairsDataset ds = load_dataset_artifact(cfg, cfg.feature);
    const uint64_t split_seed = stage_seed(cfg, "split:" + cfg.feature);
    const uint64_t train_seed = stage_seed(cfg, "train:" + cfg.feature + ":" + cfg.arch);
    const DatasetSplits splits = split_dataset(ds, cfg.split, split_seed);

    const ArchSpec spec = build_arch(cfg.arch, ds.d, 1);
    TrainConfig tc = cfg.train;
    tc.seed = train_seed;
    const TrainResult result = train(splits.train, splits.valid, spec, tc);

    const auto dir = model_dir(cfg, cfg.feature);
    save_model(result.model, dir);

    const auto hist_path = history_path(cfg, cfg.feature);
    {
        std::ofstream out(hist_path, std::ios::binary);
        if (!out) throw IoError("cannot write " + hist_path.string());
        out << "epoch,train_mse,valid_mse\n";
        for (size_t e = 0; e < result.history.train_loss.size(); ++e) {
            out << e << ',' << fmt_double(result.history.train_loss[e]) << ',';
            if (e < result.history.valid_loss.size())
                out << fmt_double(result.history.valid_loss[e]);
            out << '\n';
        }
        if (!out.flush()) throw IoError("cannot write " + hist_path.string());
    }

    json details{{"arch", cfg.arch},
                 {"param_count", param_count(spec)},
                 {"train_samples", splits.train.samples.size()},
                 {"valid_samples", splits.valid.samples.size()},
                 {"test_samples", splits.test.samples.size()}};
    if (!splits.test.samples.empty()) {
        const Metrics m = evaluate_metrics(result.model, splits.test);
        details["test_mse"] = m.mse;
        details["test_mae"] = m.mae;
        details["test_r2"] = m.r2;
    }
    write_run_manifest(cfg, "train",
                       {{"split:" + cfg.feature, split_seed},
                        {"train:" + cfg.feature + ":" + cfg.arch, train_seed}},
                       {dir, hist_path}, details);
    return dir;
}

std::filesystem::path cmd_shift(const PipelineConfig& cfg, const std::filesystem::path& latents_in,
                                double label, const std::filesystem::path& shifted_out) {
    ensure_out_dir(cfg);
    if (!std::filesystem::exists(latents_in))
        throw MissingArtifact("input latents not found at " + latents_in.string());
    const auto latents = npy::to_latents(npy::load(latents_in));
    if (!latents.empty() && latents.front().size() != cfg.d)
        throw InvalidArgument("input latents have dim " +
                              std::to_string(latents.front().size()) + ", config says " +
                              std::to_string(cfg.d));

    std::vector<LatentVector> shifted(latents.size());
    json details{{"mode", cfg.shift_mode}, {"n", latents.size()}, {"label", label}};
    if (cfg.shift_mode == "axis") {
        const FeatureAxis axis = load_axis_artifact(cfg, cfg.feature);
        for (size_t i = 0; i < latents.size(); ++i)
            shifted[i] = shift(latents[i], axis, cfg.pair_multiplier);
        details["feature"] = cfg.feature;
        details["multiplier"] = cfg.pair_multiplier;
    } else if (cfg.shift_mode == "model") {
        const ShifterModel model = load_model_artifact(cfg, cfg.feature);
        const double lab[] = {label};
        for (size_t i = 0; i < latents.size(); ++i) shifted[i] = forward(model, latents[i], lab);
        details["feature"] = cfg.feature;
    } else {
        if (cfg.eval_features.empty())
            throw InvalidArgument("chain mode needs eval_features to list the models to apply");
        std::vector<ShifterModel> models;
        for (const std::string& f : cfg.eval_features)
            models.push_back(load_model_artifact(cfg, f));
        const std::vector<std::vector<double>> labels(models.size(),
                                                      std::vector<double>{label});
        for (size_t i = 0; i < latents.size(); ++i)
            shifted[i] = chain_shift(latents[i], models, labels);
        details["features"] = cfg.eval_features;
    }

    npy::save(shifted_out, npy::from_latents(shifted));
    write_run_manifest(cfg, "shift", {}, {shifted_out}, details);
    return shifted_out;
}

std::filesystem::path cmd_eval(const PipelineConfig& cfg) {
    ensure_out_dir(cfg);
    const auto scorer = open_scorer(cfg);
    EvalConfig ec;
    ec.n_samples = cfg.eval_samples;
    ec.threshold = cfg.eval_threshold;
    ec.seed = stage_seed(cfg, "eval");
    ec.notes = cfg.eval_notes;

    EvalReport report;
    if (cfg.eval_features.empty()) {
        const FeatureAxis axis = load_axis_artifact(cfg, cfg.feature);
        const ShifterModel model = load_model_artifact(cfg, cfg.feature);
        report = run_single_feature_eval(*scorer, axis, feature_index(cfg, cfg.feature),
                                         cfg.pair_multiplier, model, ec);
    } else {
        std::vector<FeatureAxis> axes;
        std::vector<size_t> indices;
        std::vector<double> multipliers;
        std::vector<ShifterModel> models;
        for (const std::string& f : cfg.eval_features) {
            axes.push_back(load_axis_artifact(cfg, f));
            indices.push_back(feature_index(cfg, f));
            multipliers.push_back(cfg.pair_multiplier);
            models.push_back(load_model_artifact(cfg, f));
        }
        report = run_multi_feature_eval(*scorer, axes, indices, multipliers, models, ec);
    }

    const auto csv_path = cfg.out_dir / "eval.csv";
    const auto json_path = cfg.out_dir / "eval.json";
    write_report_csv(report, csv_path);
    write_report_json(report, json_path);
    write_run_manifest(cfg, "eval", {{"eval", ec.seed}}, {csv_path, json_path},
                       {{"rows", report.rows.size()}});
    return csv_path;
}

std::filesystem::path cmd_compare(const PipelineConfig& cfg) {
    ensure_out_dir(cfg);
    const PairsDataset ds = load_dataset_artifact(cfg, cfg.feature);
    const uint64_t split_seed = stage_seed(cfg, "split:" + cfg.feature);
    const DatasetSplits splits = split_dataset(ds, cfg.split, split_seed);

    std::map<std::string, uint64_t> seeds{{"split:" + cfg.feature, split_seed}};
    json details = json::array();
    std::string csv = "arch,params,test_mse,test_mae,test_r2\n";
    for (const std::string name : {"a", "b", "c", "d", "e"}) {
        const ArchSpec spec = build_arch(name, ds.d, 1);
        TrainConfig tc = cfg.train;
        tc.seed = stage_seed(cfg, "train:" + cfg.feature + ":" + name);
        seeds["train:" + cfg.feature + ":" + name] = tc.seed;
        const TrainResult result = train(splits.train, splits.valid, spec, tc);
        const Metrics m = evaluate_metrics(result.model, splits.test);
        csv += name + "," + std::to_string(param_count(spec)) + "," + fmt_double(m.mse) + "," +
               fmt_double(m.mae) + "," + fmt_double(m.r2) + "\n";
        details.push_back({{"arch", name},
                           {"params", param_count(spec)},
                           {"test_mse", m.mse},
                           {"test_mae", m.mae},
                           {"test_r2", m.r2}});
    }

    const auto path = cfg.out_dir / "compare.csv";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << csv;
    if (!out.flush()) throw IoError("cannot write " + path.string());
    write_run_manifest(cfg, "compare", seeds, {path}, {{"table", details}});
    return path;
}

} // namespace lfs
