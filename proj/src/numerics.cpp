#include "lfs/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "lfs/errors.hpp"

namespace lfs {

// ============================================================================
// Rng
// ============================================================================

Rng::Rng(uint64_t seed) : gen_(seed) {}

uint64_t Rng::next_u64() { return gen_(); }

double Rng::uniform() {
    // top 53 bits -> [0, 1)
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
}

double Rng::gaussian() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1 = 1.0 - uniform(); // (0, 1], keeps log finite
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
}

uint64_t Rng::bounded(uint64_t n) {
    if (n == 0) throw InvalidArgument("Rng::bounded: n must be > 0");
    uint64_t threshold = (0 - n) % n;
    for (;;) {
        uint64_t x = gen_();
        if (x >= threshold) return x % n;
    }
}

void shuffle_indices(std::vector<size_t>& indices, Rng& rng) {
    for (size_t i = indices.size(); i > 1; --i) {
        size_t j = static_cast<size_t>(rng.bounded(i));
        std::swap(indices[i - 1], indices[j]);
    }
}

// ============================================================================
// Matrix
// ============================================================================

Matrix::Matrix(size_t rows, size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

bool Matrix::all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

// ============================================================================
// Sampling
// ============================================================================

std::vector<LatentVector> sample_gaussian_latents(size_t n, size_t d, uint64_t seed) {
    if (n == 0) throw InvalidArgument("sample_gaussian_latents: n must be >= 1");
    if (d == 0) throw InvalidArgument("sample_gaussian_latents: d must be >= 1");
    Rng rng(seed);
    std::vector<LatentVector> out(n);
    for (auto& z : out) {
        z.resize(d);
        for (double& v : z) v = rng.gaussian();
    }
    return out;
}

// ============================================================================
// OLS via normal equations + Cholesky
// ============================================================================

namespace {

// Cholesky factorization in place (lower triangle). Returns false when a
// pivot falls below the rank tolerance.
bool cholesky(Matrix& g) {
    const size_t p = g.rows();
    double max_diag = 0.0;
    for (size_t i = 0; i < p; ++i) max_diag = std::max(max_diag, std::abs(g(i, i)));
    const double tol = 1e-13 * std::max(max_diag, 1.0);

    for (size_t j = 0; j < p; ++j) {
        double diag = g(j, j);
        for (size_t k = 0; k < j; ++k) diag -= g(j, k) * g(j, k);
        if (!(diag > tol)) return false;
        const double root = std::sqrt(diag);
        g(j, j) = root;
        for (size_t i = j + 1; i < p; ++i) {
            double s = g(i, j);
            for (size_t k = 0; k < j; ++k) s -= g(i, k) * g(j, k);
            g(i, j) = s / root;
        }
    }
    return true;
}

std::vector<double> cholesky_solve(const Matrix& l, std::span<const double> b) {
    const size_t p = l.rows();
    std::vector<double> y(p), x(p);
    for (size_t i = 0; i < p; ++i) {
        double s = b[i];
        for (size_t k = 0; k < i; ++k) s -= l(i, k) * y[k];
        y[i] = s / l(i, i);
    }
    for (size_t i = p; i-- > 0;) {
        double s = y[i];
        for (size_t k = i + 1; k < p; ++k) s -= l(k, i) * x[k];
        x[i] = s / l(i, i);
    }
    return x;
}

} // namespace

RegressionFit ols_fit(const Matrix& x, std::span<const double> y) {
    const size_t n = x.rows();
    const size_t d = x.cols();
    if (y.size() != n) throw InvalidArgument("ols_fit: row count of X must match length of y");
    if (n <= d + 1) throw InvalidArgument("ols_fit: need n > d + 1 samples");

    // Normal matrix for [X | 1] and right-hand side.
    const size_t p = d + 1;
    Matrix g(p, p);
    std::vector<double> rhs(p, 0.0);
    for (size_t i = 0; i < n; ++i) {
        const double* xi = x.row(i);
        for (size_t a = 0; a < d; ++a) {
            for (size_t b = a; b < d; ++b) g(a, b) += xi[a] * xi[b];
            g(a, d) += xi[a];
            rhs[a] += xi[a] * y[i];
        }
        rhs[d] += y[i];
    }
    g(d, d) = static_cast<double>(n);
    for (size_t a = 0; a < p; ++a)
        for (size_t b = a + 1; b < p; ++b) g(b, a) = g(a, b);

    Matrix l = g;
    if (!cholesky(l)) throw SingularSystem("ols_fit: normal matrix is rank deficient");

    std::vector<double> coef = cholesky_solve(l, rhs);

    // Two rounds of iterative refinement keep recovery tight when the design
    // matrix is only moderately conditioned.
    for (int round = 0; round < 2; ++round) {
        std::vector<double> resid(p);
        for (size_t a = 0; a < p; ++a) {
            double s = rhs[a];
            for (size_t b = 0; b < p; ++b) s -= g(a, b) * coef[b];
            resid[a] = s;
        }
        std::vector<double> delta = cholesky_solve(l, resid);
        for (size_t a = 0; a < p; ++a) coef[a] += delta[a];
    }

    RegressionFit fit;
    fit.slopes.assign(coef.begin(), coef.begin() + static_cast<std::ptrdiff_t>(d));
    fit.intercept = coef[d];

    double mean_y = 0.0;
    for (size_t i = 0; i < n; ++i) mean_y += y[i];
    mean_y /= static_cast<double>(n);

    double ss_res = 0.0, ss_tot = 0.0;
    for (size_t i = 0; i < n; ++i) {
        double pred = fit.intercept;
        const double* xi = x.row(i);
        for (size_t a = 0; a < d; ++a) pred += xi[a] * fit.slopes[a];
        ss_res += (y[i] - pred) * (y[i] - pred);
        ss_tot += (y[i] - mean_y) * (y[i] - mean_y);
    }
    fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return fit;
}

// ============================================================================
// Metrics
// ============================================================================

namespace {

void require_same_length(std::span<const double> y, std::span<const double> yhat, const char* op) {
    if (y.size() != yhat.size())
        throw InvalidArgument(std::string(op) + ": length mismatch");
    if (y.empty()) throw InvalidArgument(std::string(op) + ": need at least one element");
}

} // namespace

double mse(std::span<const double> y, std::span<const double> yhat) {
    require_same_length(y, yhat, "mse");
    double s = 0.0;
    for (size_t i = 0; i < y.size(); ++i) {
        const double e = y[i] - yhat[i];
        s += e * e;
    }
    return s / static_cast<double>(y.size());
}

double mae(std::span<const double> y, std::span<const double> yhat) {
    require_same_length(y, yhat, "mae");
    double s = 0.0;
    for (size_t i = 0; i < y.size(); ++i) s += std::abs(y[i] - yhat[i]);
    return s / static_cast<double>(y.size());
}

double r2(std::span<const double> y, std::span<const double> yhat) {
    require_same_length(y, yhat, "r2");
    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= static_cast<double>(y.size());
    double ss_res = 0.0, ss_tot = 0.0;
    for (size_t i = 0; i < y.size(); ++i) {
        ss_res += (y[i] - yhat[i]) * (y[i] - yhat[i]);
        ss_tot += (y[i] - mean) * (y[i] - mean);
    }
    if (ss_tot == 0.0) throw DegenerateInput("r2: y has zero variance");
    return 1.0 - ss_res / ss_tot;
}

// ============================================================================
// Finite differences
// ============================================================================

std::vector<double> finite_diff_gradient(const std::function<double(const std::vector<double>&)>& f,
                                         const std::vector<double>& x, double h) {
    if (!(h > 0.0)) throw InvalidArgument("finite_diff_gradient: h must be > 0");
    std::vector<double> grad(x.size());
    std::vector<double> probe = x;
    for (size_t i = 0; i < x.size(); ++i) {
        probe[i] = x[i] + h;
        const double fp = f(probe);
        probe[i] = x[i] - h;
        const double fm = f(probe);
        probe[i] = x[i];
        grad[i] = (fp - fm) / (2.0 * h);
    }
    return grad;
}

// ============================================================================
// Vector helpers
// ============================================================================

double dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw InvalidArgument("dot: length mismatch");
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(std::span<const double> a) {
    double s = 0.0;
    for (double v : a) s += v * v;
    return std::sqrt(s);
}

double cosine(std::span<const double> a, std::span<const double> b) {
    const double na = norm2(a), nb = norm2(b);
    if (na == 0.0 || nb == 0.0) throw DegenerateInput("cosine: zero-norm input");
    return dot(a, b) / (na * nb);
}

} // namespace lfs
