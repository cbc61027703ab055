#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

namespace lfs {

// A point in the d-dimensional Gaussian latent space. Components must be
// finite; length is the configured d.
using LatentVector = std::vector<double>;

// ============================================================================
// Seeded RNG
// ============================================================================

// Deterministic generator: mt19937_64 underneath, uniform doubles from the
// top 53 bits, Gaussians via Box-Muller, bounded ints by rejection. Identical
// seed gives an identical stream on every platform.
class Rng {
public:
    explicit Rng(uint64_t seed);

    // Uniform in [0, 1).
    double uniform();

    // Standard normal.
    double gaussian();

    // Uniform integer in [0, n). n must be > 0.
    uint64_t bounded(uint64_t n);

    uint64_t next_u64();

private:
    std::mt19937_64 gen_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

// In-place Fisher-Yates shuffle driven by the given Rng.
void shuffle_indices(std::vector<size_t>& indices, Rng& rng);

// ============================================================================
// Dense matrix (row-major)
// ============================================================================

class Matrix {
public:
    Matrix() = default;
    Matrix(size_t rows, size_t cols, double fill = 0.0);

    size_t rows() const { return rows_; }
    size_t cols() const { return cols_; }

    double& operator()(size_t i, size_t j) { return data_[i * cols_ + j]; }
    double operator()(size_t i, size_t j) const { return data_[i * cols_ + j]; }

    double* row(size_t i) { return data_.data() + i * cols_; }
    const double* row(size_t i) const { return data_.data() + i * cols_; }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    bool all_finite() const;

private:
    size_t rows_ = 0;
    size_t cols_ = 0;
    std::vector<double> data_;
};

// ============================================================================
// Regression
// ============================================================================

struct RegressionFit {
    std::vector<double> slopes;
    double intercept = 0.0;
    double r_squared = 0.0;
};

// n vectors of length d, components i.i.d. standard normal. Pure function of
// (n, d, seed). Throws InvalidArgument when n or d is zero.
std::vector<LatentVector> sample_gaussian_latents(size_t n, size_t d, uint64_t seed);

// Ordinary least squares with an implicit intercept column: minimizes
// sum((y - X*slopes - intercept)^2) via normal equations and Cholesky, with
// iterative refinement. Requires n > d + 1. Throws SingularSystem when the
// normal matrix is rank deficient.
RegressionFit ols_fit(const Matrix& x, std::span<const double> y);

// Standard regression metrics. Matrix-valued predictions are compared by
// flattening all entries into one vector.
double mse(std::span<const double> y, std::span<const double> yhat);
double mae(std::span<const double> y, std::span<const double> yhat);
// r2 requires non-constant y; throws DegenerateInput on zero variance.
double r2(std::span<const double> y, std::span<const double> yhat);

// Central-difference gradient: (f(x + h*e_i) - f(x - h*e_i)) / 2h. Testing
// oracle for analytic gradients. h must be > 0.
std::vector<double> finite_diff_gradient(const std::function<double(const std::vector<double>&)>& f,
                                         const std::vector<double>& x, double h);

// ============================================================================
// Small vector helpers
// ============================================================================

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
// cosine similarity; zero-norm input throws DegenerateInput
double cosine(std::span<const double> a, std::span<const double> b);

} // namespace lfs
