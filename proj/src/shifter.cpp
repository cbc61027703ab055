#include "lfs/shifter.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "lfs/digest.hpp"
#include "lfs/errors.hpp"
#include "lfs/npy.hpp"

namespace lfs {

namespace {

using nlohmann::json;

std::string format_msg(const char* fmt, auto... args) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), fmt, args...);
    return buf;
}

const char* activation_name(Activation a) {
    switch (a) {
    case Activation::none: return "none";
    case Activation::relu: return "relu";
    case Activation::leaky_relu: return "leaky_relu";
    }
    throw InvalidArgument("unknown activation code");
}

Activation activation_from_name(const std::string& name) {
    if (name == "none") return Activation::none;
    if (name == "relu") return Activation::relu;
    if (name == "leaky_relu") return Activation::leaky_relu;
    throw FormatError("unknown activation '" + name + "'");
}

void apply_activation(Activation a, Matrix& m) {
    switch (a) {
    case Activation::none:
        return;
    case Activation::relu:
        for (double& x : m.data())
            if (x < 0.0) x = 0.0;
        return;
    case Activation::leaky_relu:
        for (double& x : m.data())
            if (x < 0.0) x *= kLeakyReluSlope;
        return;
    }
}

// Local slope recovered from the activated value. Both activations preserve
// sign, so the post-activation output determines which branch was taken.
double activation_slope(Activation a, double post) {
    switch (a) {
    case Activation::none: return 1.0;
    case Activation::relu: return post > 0.0 ? 1.0 : 0.0;
    case Activation::leaky_relu: return post > 0.0 ? 1.0 : kLeakyReluSlope;
    }
    return 1.0;
}

// out(b, :) = x(b, :) * W^T + bias
void affine_forward(const Matrix& x, const DenseLayer& layer, Matrix& out) {
    const size_t in = layer.weights.cols();
    const size_t width = layer.weights.rows();
    for (size_t b = 0; b < x.rows(); ++b) {
        const double* xr = x.row(b);
        double* yr = out.row(b);
        for (size_t o = 0; o < width; ++o) {
            const double* wr = layer.weights.row(o);
            double acc = layer.bias[o];
            for (size_t i = 0; i < in; ++i) acc += wr[i] * xr[i];
            yr[o] = acc;
        }
    }
}

// dx(b, :) = dz(b, :) * W
void input_grad(const Matrix& dz, const DenseLayer& layer, Matrix& dx) {
    const size_t in = layer.weights.cols();
    const size_t width = layer.weights.rows();
    std::fill(dx.data().begin(), dx.data().end(), 0.0);
    for (size_t b = 0; b < dz.rows(); ++b) {
        const double* gr = dz.row(b);
        double* dr = dx.row(b);
        for (size_t o = 0; o < width; ++o) {
            const double g = gr[o];
            if (g == 0.0) continue;
            const double* wr = layer.weights.row(o);
            for (size_t i = 0; i < in; ++i) dr[i] += g * wr[i];
        }
    }
}

// dW += dz^T * x, db += column sums of dz, written into flat slices.
void param_grad(const Matrix& dz, const Matrix& x, std::span<double> dw, std::span<double> db) {
    const size_t in = x.cols();
    const size_t width = dz.cols();
    for (size_t b = 0; b < dz.rows(); ++b) {
        const double* gr = dz.row(b);
        const double* xr = x.row(b);
        for (size_t o = 0; o < width; ++o) {
            const double g = gr[o];
            if (g == 0.0) continue;
            double* wr = dw.data() + o * in;
            for (size_t i = 0; i < in; ++i) wr[i] += g * xr[i];
            db[o] += g;
        }
    }
}

struct BatchCache {
    std::vector<Matrix> dense_in;   // input fed to each dense layer
    std::vector<Matrix> dense_post; // activated output of each dense layer
    std::vector<Matrix> drop_mask;  // inverted-dropout scale per dropout layer
};

Matrix run_forward(const ShifterModel& model, const Matrix& inputs, bool training,
                   Rng* dropout_rng, BatchCache* cache) {
    Matrix cur = inputs;
    size_t dense_idx = 0;
    for (const LayerSpec& layer : model.spec.layers) {
        if (layer.kind == LayerSpec::Kind::dense) {
            const DenseLayer& dense = model.layers[dense_idx++];
            if (cache) cache->dense_in.push_back(cur);
            Matrix next(cur.rows(), dense.weights.rows());
            affine_forward(cur, dense, next);
            apply_activation(layer.activation, next);
            if (cache) cache->dense_post.push_back(next);
            cur = std::move(next);
        } else if (training && layer.rate > 0.0) {
            const double keep = 1.0 - layer.rate;
            Matrix mask(cur.rows(), cur.cols());
            for (size_t i = 0; i < mask.data().size(); ++i) {
                mask.data()[i] = dropout_rng->uniform() < layer.rate ? 0.0 : 1.0 / keep;
                cur.data()[i] *= mask.data()[i];
            }
            if (cache) cache->drop_mask.push_back(std::move(mask));
        }
    }
    return cur;
}

// Per-layer offsets of (weights, bias) inside the flat parameter vector.
struct ParamLayout {
    struct Slice {
        size_t w_off, w_len, b_off, b_len;
    };
    std::vector<Slice> slices;
    size_t total = 0;
};

ParamLayout param_layout(const ArchSpec& spec) {
    ParamLayout layout;
    size_t off = 0;
    for (const auto& [in, out] : dense_dims(spec)) {
        layout.slices.push_back({off, in * out, off + in * out, out});
        off += in * out + out;
    }
    layout.total = off;
    return layout;
}

// Backpropagates dLdY through the cached forward pass; returns the flat
// parameter gradient in get_params order.
std::vector<double> run_backward(const ShifterModel& model, const BatchCache& cache,
                                 const Matrix& dLdY, bool training) {
    const ParamLayout layout = param_layout(model.spec);
    std::vector<double> grad(layout.total, 0.0);

    Matrix dcur = dLdY;
    size_t dense_idx = model.layers.size();
    size_t drop_idx = cache.drop_mask.size();
    for (size_t li = model.spec.layers.size(); li-- > 0;) {
        const LayerSpec& layer = model.spec.layers[li];
        if (layer.kind == LayerSpec::Kind::dense) {
            --dense_idx;
            const Matrix& post = cache.dense_post[dense_idx];
            const Matrix& in = cache.dense_in[dense_idx];
            for (size_t i = 0; i < dcur.data().size(); ++i)
                dcur.data()[i] *= activation_slope(layer.activation, post.data()[i]);
            const auto& slice = layout.slices[dense_idx];
            param_grad(dcur, in, std::span<double>(grad).subspan(slice.w_off, slice.w_len),
                       std::span<double>(grad).subspan(slice.b_off, slice.b_len));
            if (dense_idx > 0 || drop_idx > 0) {
                Matrix dprev(in.rows(), in.cols());
                input_grad(dcur, model.layers[dense_idx], dprev);
                dcur = std::move(dprev);
            }
        } else if (training && layer.rate > 0.0) {
            --drop_idx;
            const Matrix& mask = cache.drop_mask[drop_idx];
            for (size_t i = 0; i < dcur.data().size(); ++i) dcur.data()[i] *= mask.data()[i];
        }
    }
    return grad;
}

Matrix dataset_inputs(const PairsDataset& ds) {
    Matrix m(ds.samples.size(), ds.d + 1);
    for (size_t i = 0; i < ds.samples.size(); ++i) {
        double* r = m.row(i);
        std::copy(ds.samples[i].input_latent.begin(), ds.samples[i].input_latent.end(), r);
        r[ds.d] = ds.samples[i].label;
    }
    return m;
}

Matrix dataset_targets(const PairsDataset& ds) {
    Matrix m(ds.samples.size(), ds.d);
    for (size_t i = 0; i < ds.samples.size(); ++i)
        std::copy(ds.samples[i].target_latent.begin(), ds.samples[i].target_latent.end(),
                  m.row(i));
    return m;
}

double mean_squared_error(const Matrix& pred, const Matrix& target) {
    double sse = 0.0;
    for (size_t i = 0; i < pred.data().size(); ++i) {
        const double diff = pred.data()[i] - target.data()[i];
        sse += diff * diff;
    }
    return sse / static_cast<double>(pred.data().size());
}

} // namespace

std::vector<std::pair<size_t, size_t>> dense_dims(const ArchSpec& spec) {
    if (spec.d == 0) throw InvalidArgument("latent dim must be positive");
    if (spec.k == 0) throw InvalidArgument("label width must be positive");
    std::vector<std::pair<size_t, size_t>> dims;
    size_t in = spec.d + spec.k;
    for (const LayerSpec& layer : spec.layers) {
        if (layer.kind == LayerSpec::Kind::dense) {
            if (layer.width == 0) throw InvalidArgument("dense layer width must be positive");
            dims.emplace_back(in, layer.width);
            in = layer.width;
        } else {
            if (!(layer.rate >= 0.0 && layer.rate < 1.0))
                throw InvalidArgument("dropout rate must lie in [0, 1)");
        }
    }
    if (dims.empty()) throw InvalidArgument("architecture has no dense layers");
    if (spec.layers.back().kind != LayerSpec::Kind::dense)
        throw InvalidArgument("architecture must end with a dense layer");
    if (dims.back().second != spec.d)
        throw InvalidArgument(format_msg("output width %zu does not match latent dim %zu",
                                         dims.back().second, spec.d));
    return dims;
}

ArchSpec build_arch(const std::string& name, size_t d, size_t k) {
    ArchSpec spec{name, d, k, {}};
    const auto dense = LayerSpec::dense;
    if (name == "a") {
        spec.layers = {dense(1024, Activation::relu), dense(d, Activation::none)};
    } else if (name == "b") {
        spec.layers = {dense(256, Activation::relu), dense(d, Activation::none)};
    } else if (name == "c") {
        spec.layers = {dense(1024, Activation::relu), dense(2048, Activation::relu),
                       dense(1024, Activation::relu), dense(d, Activation::none)};
    } else if (name == "d") {
        spec.layers = {dense(256, Activation::leaky_relu), dense(128, Activation::leaky_relu),
                       dense(256, Activation::leaky_relu), dense(d, Activation::none)};
    } else if (name == "e") {
        spec.layers = {dense(1024, Activation::leaky_relu), LayerSpec::dropout(0.2),
                       dense(1024, Activation::leaky_relu), LayerSpec::dropout(0.2),
                       dense(1024, Activation::leaky_relu), LayerSpec::dropout(0.2),
                       dense(d, Activation::none)};
    } else {
        throw InvalidArgument("unknown architecture '" + name + "' (expected a..e)");
    }
    dense_dims(spec);
    return spec;
}

size_t param_count(const ArchSpec& spec) {
    size_t total = 0;
    for (const auto& [in, out] : dense_dims(spec)) total += in * out + out;
    return total;
}

ShifterModel init_model(const ArchSpec& spec, uint64_t seed) {
    ShifterModel model;
    model.spec = spec;
    Rng rng(seed);
    for (const auto& [in, out] : dense_dims(spec)) {
        DenseLayer layer;
        layer.weights = Matrix(out, in);
        layer.bias.assign(out, 0.0);
        const double bound = 1.0 / std::sqrt(static_cast<double>(in));
        for (double& w : layer.weights.data()) w = (2.0 * rng.uniform() - 1.0) * bound;
        for (double& b : layer.bias) b = (2.0 * rng.uniform() - 1.0) * bound;
        model.layers.push_back(std::move(layer));
    }
    return model;
}

std::vector<double> get_params(const ShifterModel& model) {
    std::vector<double> params;
    params.reserve(param_count(model.spec));
    for (const DenseLayer& layer : model.layers) {
        params.insert(params.end(), layer.weights.data().begin(), layer.weights.data().end());
        params.insert(params.end(), layer.bias.begin(), layer.bias.end());
    }
    return params;
}

void set_params(ShifterModel& model, std::span<const double> params) {
    const size_t expected = param_count(model.spec);
    if (params.size() != expected)
        throw InvalidArgument(format_msg("parameter vector has %zu entries, expected %zu",
                                         params.size(), expected));
    size_t off = 0;
    for (DenseLayer& layer : model.layers) {
        std::copy_n(params.begin() + off, layer.weights.data().size(),
                    layer.weights.data().begin());
        off += layer.weights.data().size();
        std::copy_n(params.begin() + off, layer.bias.size(), layer.bias.begin());
        off += layer.bias.size();
    }
}

LatentVector forward(const ShifterModel& model, const LatentVector& z,
                     std::span<const double> label, bool training_mode, uint64_t seed) {
    if (z.size() != model.spec.d)
        throw InvalidArgument(format_msg("latent has %zu dims, model expects %zu", z.size(),
                                         model.spec.d));
    if (label.size() != model.spec.k)
        throw InvalidArgument(format_msg("label has %zu entries, model expects %zu",
                                         label.size(), model.spec.k));
    Matrix input(1, z.size() + label.size());
    std::copy(z.begin(), z.end(), input.row(0));
    std::copy(label.begin(), label.end(), input.row(0) + z.size());
    Rng dropout_rng(seed);
    Matrix out = run_forward(model, input, training_mode, &dropout_rng, nullptr);
    return LatentVector(out.row(0), out.row(0) + out.cols());
}

Matrix forward_batch_inference(const ShifterModel& model, const Matrix& inputs) {
    if (inputs.cols() != model.spec.d + model.spec.k)
        throw InvalidArgument(format_msg("input rows have %zu columns, model expects %zu",
                                         inputs.cols(), model.spec.d + model.spec.k));
    return run_forward(model, inputs, false, nullptr, nullptr);
}

LossAndGradient mse_loss_and_gradient(const ShifterModel& model, const Matrix& inputs,
                                      const Matrix& targets, bool training_mode,
                                      Rng* dropout_rng) {
    if (inputs.rows() != targets.rows() || targets.cols() != model.spec.d)
        throw InvalidArgument("input and target batch shapes do not match the model");
    if (inputs.rows() == 0) throw InvalidArgument("loss requires a non-empty batch");
    Rng fallback(0);
    BatchCache cache;
    Matrix pred =
        run_forward(model, inputs, training_mode, dropout_rng ? dropout_rng : &fallback, &cache);

    LossAndGradient result;
    result.loss = mean_squared_error(pred, targets);
    Matrix dLdY(pred.rows(), pred.cols());
    const double scale = 2.0 / static_cast<double>(pred.data().size());
    for (size_t i = 0; i < pred.data().size(); ++i)
        dLdY.data()[i] = scale * (pred.data()[i] - targets.data()[i]);
    result.gradient = run_backward(model, cache, dLdY, training_mode);
    return result;
}

void adam_step(std::span<double> params, std::span<const double> grads, std::span<double> m,
               std::span<double> v, uint64_t t, const TrainConfig& cfg) {
    if (params.size() != grads.size() || params.size() != m.size() || params.size() != v.size())
        throw InvalidArgument("adam buffers must all have the same length");
    if (t == 0) throw InvalidArgument("adam step count starts at 1");
    const double c1 = 1.0 - std::pow(cfg.adam_beta1, static_cast<double>(t));
    const double c2 = 1.0 - std::pow(cfg.adam_beta2, static_cast<double>(t));
    for (size_t i = 0; i < params.size(); ++i) {
        m[i] = cfg.adam_beta1 * m[i] + (1.0 - cfg.adam_beta1) * grads[i];
        v[i] = cfg.adam_beta2 * v[i] + (1.0 - cfg.adam_beta2) * grads[i] * grads[i];
        const double m_hat = m[i] / c1;
        const double v_hat = v[i] / c2;
        params[i] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.adam_eps);
    }
}

TrainResult train(const PairsDataset& train_set, const PairsDataset& valid_set,
                  const ArchSpec& spec, const TrainConfig& cfg) {
    if (spec.k != 1)
        throw InvalidArgument("pair datasets carry a scalar label, so the model needs k = 1");
    if (train_set.samples.empty()) throw EmptyDataset("training split is empty");
    if (train_set.d != spec.d)
        throw InvalidArgument(format_msg("training set has latent dim %zu, model expects %zu",
                                         train_set.d, spec.d));
    if (!valid_set.samples.empty() && valid_set.d != spec.d)
        throw InvalidArgument(format_msg("validation set has latent dim %zu, model expects %zu",
                                         valid_set.d, spec.d));
    if (cfg.batch_size == 0) throw InvalidArgument("batch size must be positive");
    if (!(cfg.learning_rate > 0.0) || !std::isfinite(cfg.learning_rate))
        throw InvalidArgument("learning rate must be positive and finite");

    const Matrix train_x = dataset_inputs(train_set);
    const Matrix train_t = dataset_targets(train_set);
    const Matrix valid_x = valid_set.samples.empty() ? Matrix() : dataset_inputs(valid_set);
    const Matrix valid_t = valid_set.samples.empty() ? Matrix() : dataset_targets(valid_set);
    const size_t n = train_set.samples.size();
    const size_t d = spec.d;

    TrainResult result;
    result.model = init_model(spec, derive_seed(cfg.seed, "init"));
    const ParamLayout layout = param_layout(spec);
    AdamState state(layout.total);

    std::vector<size_t> order(n);
    uint64_t step = 0;
    for (size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        Rng shuffle_rng(derive_seed(cfg.seed, "shuffle:" + std::to_string(epoch)));
        Rng dropout_rng(derive_seed(cfg.seed, "dropout:" + std::to_string(epoch)));
        for (size_t i = 0; i < n; ++i) order[i] = i;
        shuffle_indices(order, shuffle_rng);

        double epoch_sse = 0.0;
        for (size_t start = 0; start < n; start += cfg.batch_size) {
            const size_t rows = std::min(cfg.batch_size, n - start);
            Matrix bx(rows, d + 1);
            Matrix bt(rows, d);
            for (size_t r = 0; r < rows; ++r) {
                const size_t src = order[start + r];
                std::copy_n(train_x.row(src), d + 1, bx.row(r));
                std::copy_n(train_t.row(src), d, bt.row(r));
            }

            const LossAndGradient lg =
                mse_loss_and_gradient(result.model, bx, bt, true, &dropout_rng);
            if (!std::isfinite(lg.loss))
                throw TrainingDiverged(format_msg("loss became non-finite at epoch %zu, batch %zu",
                                                  epoch, start / cfg.batch_size));
            epoch_sse += lg.loss * static_cast<double>(rows * d);

            ++step;
            for (size_t li = 0; li < result.model.layers.size(); ++li) {
                const auto& slice = layout.slices[li];
                DenseLayer& layer = result.model.layers[li];
                adam_step(layer.weights.data(),
                          std::span<const double>(lg.gradient).subspan(slice.w_off, slice.w_len),
                          std::span<double>(state.m).subspan(slice.w_off, slice.w_len),
                          std::span<double>(state.v).subspan(slice.w_off, slice.w_len), step,
                          cfg);
                adam_step(layer.bias,
                          std::span<const double>(lg.gradient).subspan(slice.b_off, slice.b_len),
                          std::span<double>(state.m).subspan(slice.b_off, slice.b_len),
                          std::span<double>(state.v).subspan(slice.b_off, slice.b_len), step,
                          cfg);
            }
        }

        result.history.train_loss.push_back(epoch_sse / static_cast<double>(n * d));
        if (!valid_set.samples.empty()) {
            const Matrix pred = run_forward(result.model, valid_x, false, nullptr, nullptr);
            result.history.valid_loss.push_back(mean_squared_error(pred, valid_t));
        }
    }

    const json echo{{"learning_rate", cfg.learning_rate},
                    {"epochs", cfg.epochs},
                    {"batch_size", cfg.batch_size},
                    {"adam_beta1", cfg.adam_beta1},
                    {"adam_beta2", cfg.adam_beta2},
                    {"adam_eps", cfg.adam_eps},
                    {"seed", cfg.seed},
                    {"train_samples", n},
                    {"valid_samples", valid_set.samples.size()}};
    result.model.training_fingerprint = echo.dump();
    return result;
}

Metrics evaluate_metrics(const ShifterModel& model, const PairsDataset& test_set) {
    if (test_set.samples.empty()) throw EmptyDataset("test split is empty");
    if (test_set.d != model.spec.d)
        throw InvalidArgument(format_msg("test set has latent dim %zu, model expects %zu",
                                         test_set.d, model.spec.d));
    const Matrix inputs = dataset_inputs(test_set);
    const Matrix targets = dataset_targets(test_set);
    const Matrix pred = forward_batch_inference(model, inputs);
    Metrics metrics;
    metrics.mse = mse(targets.data(), pred.data());
    metrics.mae = mae(targets.data(), pred.data());
    metrics.r2 = r2(targets.data(), pred.data());
    return metrics;
}

LatentVector chain_shift(const LatentVector& z, const std::vector<ShifterModel>& models,
                         const std::vector<std::vector<double>>& labels) {
    if (models.size() != labels.size())
        throw InvalidArgument("chain needs one label vector per model");
    LatentVector cur = z;
    for (size_t i = 0; i < models.size(); ++i) cur = forward(models[i], cur, labels[i]);
    return cur;
}

void save_model(const ShifterModel& model, const std::filesystem::path& dir) {
    const auto dims = dense_dims(model.spec);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create model directory " + dir.string());

    json layers = json::array();
    for (const LayerSpec& layer : model.spec.layers) {
        if (layer.kind == LayerSpec::Kind::dense)
            layers.push_back({{"kind", "dense"},
                              {"width", layer.width},
                              {"activation", activation_name(layer.activation)}});
        else
            layers.push_back({{"kind", "dropout"}, {"rate", layer.rate}});
    }

    json files = json::array();
    for (size_t li = 0; li < model.layers.size(); ++li) {
        const DenseLayer& layer = model.layers[li];
        const auto [in, out] = dims[li];
        Matrix combined(out, in + 1);
        for (size_t o = 0; o < out; ++o) {
            std::copy_n(layer.weights.row(o), in, combined.row(o));
            combined.row(o)[in] = layer.bias[o];
        }
        const std::string name = "layer" + std::to_string(li) + ".npy";
        npy::save(dir / name, npy::from_matrix(combined));
        files.push_back(name);
    }

    json manifest{{"kind", "shifter-model"},
                  {"arch", model.spec.name},
                  {"d", model.spec.d},
                  {"k", model.spec.k},
                  {"layers", layers},
                  {"param_count", param_count(model.spec)},
                  {"files", files},
                  {"training", model.training_fingerprint.empty()
                                   ? json(nullptr)
                                   : json::parse(model.training_fingerprint)}};
    std::ofstream out(dir / "manifest.json", std::ios::binary);
    if (!out) throw IoError("cannot write " + (dir / "manifest.json").string());
    out << manifest.dump(2) << '\n';
    if (!out.flush()) throw IoError("cannot write " + (dir / "manifest.json").string());
}

ShifterModel load_model(const std::filesystem::path& dir) {
    const auto manifest_path = dir / "manifest.json";
    std::ifstream in(manifest_path, std::ios::binary);
    if (!in) throw MissingArtifact("model manifest not found at " + manifest_path.string());
    json manifest;
    try {
        manifest = json::parse(in);
    } catch (const json::exception& e) {
        throw FormatError("model manifest is not valid JSON: " + std::string(e.what()));
    }

    ShifterModel model;
    try {
        model.spec.name = manifest.at("arch").get<std::string>();
        model.spec.d = manifest.at("d").get<size_t>();
        model.spec.k = manifest.at("k").get<size_t>();
        for (const json& jl : manifest.at("layers")) {
            const auto kind = jl.at("kind").get<std::string>();
            if (kind == "dense") {
                model.spec.layers.push_back(LayerSpec::dense(
                    jl.at("width").get<size_t>(),
                    activation_from_name(jl.at("activation").get<std::string>())));
            } else if (kind == "dropout") {
                model.spec.layers.push_back(LayerSpec::dropout(jl.at("rate").get<double>()));
            } else {
                throw FormatError("unknown layer kind '" + kind + "'");
            }
        }
        if (!manifest.at("training").is_null())
            model.training_fingerprint = manifest.at("training").dump();
    } catch (const json::exception& e) {
        throw FormatError("model manifest is missing fields: " + std::string(e.what()));
    }

    const auto dims = dense_dims(model.spec);
    if (manifest.at("param_count").get<size_t>() != param_count(model.spec))
        throw FormatError("model manifest param_count does not match the layer list");
    const auto& files = manifest.at("files");
    if (!files.is_array() || files.size() != dims.size())
        throw FormatError("model manifest must list one weight file per dense layer");

    for (size_t li = 0; li < dims.size(); ++li) {
        const auto [in_w, out_w] = dims[li];
        const auto path = dir / files[li].get<std::string>();
        npy::Array arr;
        try {
            arr = npy::load(path);
        } catch (const IoError&) {
            throw MissingArtifact("model weight file not found at " + path.string());
        }
        if (arr.shape.size() != 2 || arr.shape[0] != out_w || arr.shape[1] != in_w + 1)
            throw FormatError(format_msg("weight file %s has the wrong shape (expected %zu x %zu)",
                                         path.string().c_str(), out_w, in_w + 1));
        DenseLayer layer;
        layer.weights = Matrix(out_w, in_w);
        layer.bias.assign(out_w, 0.0);
        for (size_t o = 0; o < out_w; ++o) {
            const float* src = arr.data.data() + o * (in_w + 1);
            for (size_t i = 0; i < in_w; ++i) layer.weights.row(o)[i] = src[i];
            layer.bias[o] = src[in_w];
        }
        model.layers.push_back(std::move(layer));
    }
    return model;
}

} // namespace lfs
