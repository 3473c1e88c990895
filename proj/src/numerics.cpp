#include "ginn/numerics.hpp"

#include <cmath>

namespace ginn {

// ---------------------------------------------------------------------
//  SparseBinaryCsr
// ---------------------------------------------------------------------

void SparseBinaryCsr::multiply(std::span<const double> x, std::span<double> y) const {
    if (static_cast<int>(x.size()) != cols || static_cast<int>(y.size()) != rows)
        throw std::invalid_argument("SparseBinaryCsr::multiply: dimension mismatch");
    const int* cp = col_idx.data();
    for (int i = 0; i < rows; ++i) {
        double sum = 0.0;
        for (int p = row_ptr[i]; p < row_ptr[i + 1]; ++p) sum += x[cp[p]];
        y[i] = sum;
    }
}

void SparseBinaryCsr::multiply_transpose(std::span<const double> x, std::span<double> y) const {
    if (static_cast<int>(x.size()) != rows || static_cast<int>(y.size()) != cols)
        throw std::invalid_argument("SparseBinaryCsr::multiply_transpose: dimension mismatch");
    std::fill(y.begin(), y.end(), 0.0);
    const int* cp = col_idx.data();
    for (int i = 0; i < rows; ++i) {
        const double xi = x[i];
        for (int p = row_ptr[i]; p < row_ptr[i + 1]; ++p) y[cp[p]] += xi;
    }
}

DenseMatrix SparseBinaryCsr::to_dense() const {
    DenseMatrix d(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int p = row_ptr[i]; p < row_ptr[i + 1]; ++p) d(i, col_idx[p]) = 1.0;
    return d;
}

// ---------------------------------------------------------------------
//  Activations
// ---------------------------------------------------------------------

namespace {

double sigmoid(double x) {
    // Branch keeps exp() argument nonpositive.
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

}  // namespace

double apply_activation(ActivationKind kind, double x) {
    switch (kind) {
        case ActivationKind::elu:
            return x > 0.0 ? x : std::expm1(x);
        case ActivationKind::swish:
            return x * sigmoid(x);
        case ActivationKind::softplus:
            return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
        case ActivationKind::linear:
            return x;
    }
    throw std::logic_error("apply_activation: bad kind");
}

double activation_derivative(ActivationKind kind, double x) {
    switch (kind) {
        case ActivationKind::elu:
            return x > 0.0 ? 1.0 : std::exp(x);
        case ActivationKind::swish: {
            const double s = sigmoid(x);
            return s * (1.0 + x * (1.0 - s));
        }
        case ActivationKind::softplus:
            return sigmoid(x);
        case ActivationKind::linear:
            return 1.0;
    }
    throw std::logic_error("activation_derivative: bad kind");
}

std::string to_string(ActivationKind kind) {
    switch (kind) {
        case ActivationKind::elu: return "elu";
        case ActivationKind::swish: return "swish";
        case ActivationKind::softplus: return "softplus";
        case ActivationKind::linear: return "linear";
    }
    throw std::logic_error("to_string(ActivationKind): bad kind");
}

ActivationKind activation_from_string(const std::string& name) {
    if (name == "elu") return ActivationKind::elu;
    if (name == "swish") return ActivationKind::swish;
    if (name == "softplus") return ActivationKind::softplus;
    if (name == "linear") return ActivationKind::linear;
    throw std::invalid_argument("unknown activation: " + name);
}

// ---------------------------------------------------------------------
//  Rng
// ---------------------------------------------------------------------

Rng::Rng(uint64_t seed) {
    std::seed_seq seq{static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32)};
    engine_.seed(seq);
}

Rng Rng::derive(uint64_t seed, uint64_t stream) {
    Rng r(0);
    std::seed_seq seq{static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32),
                      static_cast<uint32_t>(stream), static_cast<uint32_t>(stream >> 32)};
    r.engine_.seed(seq);
    return r;
}

double Rng::uniform_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform_open_closed() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

double Rng::uniform_open_sym() {
    // (k + 0.5) / 2^53 lies strictly inside (0, 1); stretched to (-1, 1).
    const double u = (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    return 2.0 * u - 1.0;
}

uint64_t Rng::uniform_below(uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("uniform_below: bound must be positive");
    const uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    uint64_t x;
    do {
        x = next_u64();
    } while (x >= limit);
    return x % bound;
}

// ---------------------------------------------------------------------
//  Initializers / oracles
// ---------------------------------------------------------------------

double glorot_limit(int fan_in, int fan_out) {
    if (fan_in <= 0 || fan_out <= 0) throw std::invalid_argument("glorot: fans must be positive");
    return std::sqrt(6.0 / (static_cast<double>(fan_in) + static_cast<double>(fan_out)));
}

void glorot_uniform_fill(int fan_in, int fan_out, std::span<double> out, Rng& rng) {
    const double limit = glorot_limit(fan_in, fan_out);
    for (double& v : out) v = limit * rng.uniform_open_sym();
}

DenseMatrix glorot_uniform(int fan_in, int fan_out, int rows, int cols, uint64_t seed) {
    DenseMatrix m(rows, cols);
    Rng rng(seed);
    glorot_uniform_fill(fan_in, fan_out, {m.data(), m.size()}, rng);
    return m;
}

std::vector<double> finite_difference_gradient(
    const std::function<double(std::span<const double>)>& f,
    std::span<const double> theta, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("finite_difference_gradient: h must be positive");
    std::vector<double> point(theta.begin(), theta.end());
    std::vector<double> grad(theta.size());
    for (size_t i = 0; i < point.size(); ++i) {
        const double saved = point[i];
        point[i] = saved + h;
        const double fp = f(point);
        point[i] = saved - h;
        const double fm = f(point);
        point[i] = saved;
        grad[i] = (fp - fm) / (2.0 * h);
    }
    return grad;
}

}  // namespace ginn
