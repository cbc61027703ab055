#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lfs/numerics.hpp"
#include "lfs/pairs.hpp"

namespace lfs {

// ============================================================================
// Architecture specs
// ============================================================================

enum class Activation { none, relu, leaky_relu };

constexpr double kLeakyReluSlope = 0.01;

struct LayerSpec {
    enum class Kind { dense, dropout };
    Kind kind = Kind::dense;
    size_t width = 0;             // dense: output width
    double rate = 0.0;            // dropout: drop probability
    Activation activation = Activation::none;

    static LayerSpec dense(size_t width, Activation activation) {
        return {Kind::dense, width, 0.0, activation};
    }
    static LayerSpec dropout(double rate) { return {Kind::dropout, 0, rate, Activation::none}; }
};

// An MLP mapping concat(latent, label) -> latent. The first dense layer
// consumes d + k inputs; the last emits d outputs with no activation.
struct ArchSpec {
    std::string name; // "a".."e" or "custom"
    size_t d = 0;
    size_t k = 1;     // label width
    std::vector<LayerSpec> layers;
};

// (in, out) per dense layer, derived from d, k and the layer list. Validates
// the spec and throws InvalidArgument when it is malformed.
std::vector<std::pair<size_t, size_t>> dense_dims(const ArchSpec& spec);

// Canonical architectures a..e. Throws InvalidArgument for unknown names.
ArchSpec build_arch(const std::string& name, size_t d, size_t k = 1);

// Sum over dense layers of in*out + out.
size_t param_count(const ArchSpec& spec);

// ============================================================================
// Model
// ============================================================================

struct DenseLayer {
    Matrix weights;              // out x in
    std::vector<double> bias;    // out
};

struct ShifterModel {
    ArchSpec spec;
    std::vector<DenseLayer> layers; // dense layers in order
    std::string training_fingerprint; // config echo, set by train()
};

// Fan-in-scaled uniform init, bounds +-1/sqrt(fan_in), seeded.
ShifterModel init_model(const ArchSpec& spec, uint64_t seed);

// Flat parameter access in layer order (weights row-major, then bias).
std::vector<double> get_params(const ShifterModel& model);
void set_params(ShifterModel& model, std::span<const double> params);

// Single-sample forward. Dropout is active only in training mode (inverted
// scaling, kept units divided by the keep probability); inference is
// deterministic and dropout-free.
LatentVector forward(const ShifterModel& model, const LatentVector& z,
                     std::span<const double> label, bool training_mode = false,
                     uint64_t seed = 0);

// Batched inference: one row per sample of concat(z, label).
Matrix forward_batch_inference(const ShifterModel& model, const Matrix& inputs);

// MSE loss (mean over batch rows and output coordinates) plus its gradient
// with respect to every parameter, flattened in get_params order. Inputs are
// rows of concat(z, label); dropout masks, when any, come from dropout_rng.
struct LossAndGradient {
    double loss = 0.0;
    std::vector<double> gradient;
};
LossAndGradient mse_loss_and_gradient(const ShifterModel& model, const Matrix& inputs,
                                      const Matrix& targets, bool training_mode = false,
                                      Rng* dropout_rng = nullptr);

// ============================================================================
// Training
// ============================================================================

struct TrainConfig {
    double learning_rate = 1e-5;
    size_t epochs = 10;
    size_t batch_size = 16;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
    uint64_t seed = 0;
};

struct TrainHistory {
    std::vector<double> train_loss; // per-epoch average training MSE
    std::vector<double> valid_loss; // per-epoch average validation MSE
};

struct AdamState {
    std::vector<double> m;
    std::vector<double> v;

    explicit AdamState(size_t n) : m(n, 0.0), v(n, 0.0) {}
};

// One Adam update with bias correction; t counts steps from 1.
void adam_step(std::span<double> params, std::span<const double> grads, std::span<double> m,
               std::span<double> v, uint64_t t, const TrainConfig& cfg);

struct TrainResult {
    ShifterModel model;
    TrainHistory history;
};

// Minimizes MSE between forward(input, label) and the target latent over
// seeded mini-batches (final short batch kept). Deterministic for identical
// (datasets, spec, cfg). Throws TrainingDiverged when the loss stops being
// finite, naming the epoch and batch.
TrainResult train(const PairsDataset& train_set, const PairsDataset& valid_set,
                  const ArchSpec& spec, const TrainConfig& cfg);

struct Metrics {
    double mse = 0.0;
    double mae = 0.0;
    double r2 = 0.0;
};

// Metrics over all (prediction, target) entries flattened; r2 against the
// total variance of the flattened targets.
Metrics evaluate_metrics(const ShifterModel& model, const PairsDataset& test_set);

// Left-to-right composition: z <- forward(model_i, z, label_i). An empty
// model list returns z unchanged.
LatentVector chain_shift(const LatentVector& z, const std::vector<ShifterModel>& models,
                         const std::vector<std::vector<double>>& labels);

// ============================================================================
// Serialization
// ============================================================================

// Model directory: manifest.json + one float32 NPY per dense layer holding
// the weight matrix with the bias appended as the last column (out x (in+1)).
void save_model(const ShifterModel& model, const std::filesystem::path& dir);
ShifterModel load_model(const std::filesystem::path& dir);

} // namespace lfs
