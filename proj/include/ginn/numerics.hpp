#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ginn {

// =====================================================================
//  Dense storage
// =====================================================================

/// Row-major matrix of 64-bit floats.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(int rows, int cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols, fill) {
        if (rows < 0 || cols < 0) throw std::invalid_argument("DenseMatrix: negative shape");
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    size_t size() const { return data_.size(); }

    double& operator()(int r, int c) { return data_[static_cast<size_t>(r) * cols_ + c]; }
    double operator()(int r, int c) const { return data_[static_cast<size_t>(r) * cols_ + c]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    std::span<double> row(int r) { return {data_.data() + static_cast<size_t>(r) * cols_, static_cast<size_t>(cols_)}; }
    std::span<const double> row(int r) const { return {data_.data() + static_cast<size_t>(r) * cols_, static_cast<size_t>(cols_)}; }

    bool operator==(const DenseMatrix& other) const = default;

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> data_;
};

// =====================================================================
//  Sparse binary CSR
// =====================================================================

/// Sparsity pattern in compressed sparse row form. Every stored entry is 1,
/// so products reduce to gathers/scatters over the pattern.
struct SparseBinaryCsr {
    int rows = 0;
    int cols = 0;
    std::vector<int> row_ptr;  // size rows+1
    std::vector<int> col_idx;  // size nnz, ascending within each row

    size_t nnz() const { return col_idx.size(); }

    /// y = S x
    void multiply(std::span<const double> x, std::span<double> y) const;
    /// y = S^T x
    void multiply_transpose(std::span<const double> x, std::span<double> y) const;

    /// Dense 0/1 materialization (test oracle for the sparse products).
    DenseMatrix to_dense() const;
};

// =====================================================================
//  Activations
// =====================================================================

enum class ActivationKind { elu, swish, softplus, linear };

double apply_activation(ActivationKind kind, double x);
double activation_derivative(ActivationKind kind, double x);

std::string to_string(ActivationKind kind);
ActivationKind activation_from_string(const std::string& name);

// =====================================================================
//  Deterministic RNG streams
// =====================================================================

/// mt19937_64 with hand-rolled value mappings. The standard pins the engine
/// output exactly but not the distributions, so all mappings from raw 64-bit
/// draws to values live here; results are identical across platforms.
class Rng {
public:
    explicit Rng(uint64_t seed);

    /// Independent stream for (seed, stream_index). Used wherever samples
    /// must not depend on how work is batched across calls or threads.
    static Rng derive(uint64_t seed, uint64_t stream);

    uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1), 53-bit resolution.
    double uniform_unit();
    /// Uniform on (0, 1].
    double uniform_open_closed();
    /// Uniform on (-1, 1), endpoints excluded.
    double uniform_open_sym();
    /// Uniform integer in [0, bound), bound > 0. Rejection sampled.
    uint64_t uniform_below(uint64_t bound);

    /// Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            size_t j = static_cast<size_t>(uniform_below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

// =====================================================================
//  Initializers and test oracles
// =====================================================================

/// Glorot/Xavier uniform: i.i.d. Uniform(-L, L) with L = sqrt(6/(fan_in+fan_out)).
DenseMatrix glorot_uniform(int fan_in, int fan_out, int rows, int cols, uint64_t seed);

/// Same draw sequence from a caller-owned stream (layer stacks pull from one
/// stream so initialization depends only on a single seed).
void glorot_uniform_fill(int fan_in, int fan_out, std::span<double> out, Rng& rng);

double glorot_limit(int fan_in, int fan_out);

/// Central differences (f(x+h e_i) - f(x-h e_i)) / 2h per coordinate.
std::vector<double> finite_difference_gradient(
    const std::function<double(std::span<const double>)>& f,
    std::span<const double> theta, double h);

}  // namespace ginn
