#include "ginn/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ginn {

namespace {

void check_shapes(const DenseMatrix& preds, const DenseMatrix& targets) {
    if (preds.rows() != targets.rows() || preds.cols() != targets.cols())
        throw std::invalid_argument("metrics: shape mismatch");
    if (preds.rows() == 0 || preds.cols() == 0)
        throw std::invalid_argument("metrics: empty prediction set");
}

double row_l1(std::span<const double> row) {
    double sum = 0.0;
    for (double v : row) sum += std::abs(v);
    return sum;
}

double true_phi(std::span<const double> target_row) {
    // Targets are nonnegative flows, so the L1 norm is the plain sum.
    double sum = 0.0;
    for (double v : target_row) sum += v;
    return sum;
}

}  // namespace

MetricValue mre_av(const DenseMatrix& preds, const DenseMatrix& targets, MetricOptions opts) {
    check_shapes(preds, targets);
    const int m = preds.cols();
    MetricValue out;
    double sum = 0.0;
    int used = 0;
    for (int r = 0; r < preds.rows(); ++r) {
        const double phi = true_phi(targets.row(r));
        if (phi <= 0.0) {
            if (!opts.drop_zero_flow)
                throw std::domain_error("mre_av: sample with zero max-flow (row " + std::to_string(r) + ")");
            ++out.dropped_samples;
            continue;
        }
        for (int c = 0; c < m; ++c) sum += std::abs(targets(r, c) - preds(r, c)) / phi;
        ++used;
    }
    if (used == 0) throw std::domain_error("mre_av: no usable samples");
    out.value = sum / (static_cast<double>(m) * used);
    return out;
}

MetricValue mre_phi(const DenseMatrix& preds, const DenseMatrix& targets, MetricOptions opts) {
    check_shapes(preds, targets);
    MetricValue out;
    double sum = 0.0;
    int used = 0;
    for (int r = 0; r < preds.rows(); ++r) {
        const double phi = true_phi(targets.row(r));
        if (phi <= 0.0) {
            if (!opts.drop_zero_flow)
                throw std::domain_error("mre_phi: sample with zero max-flow (row " + std::to_string(r) + ")");
            ++out.dropped_samples;
            continue;
        }
        sum += std::abs(phi - row_l1(preds.row(r))) / phi;
        ++used;
    }
    if (used == 0) throw std::domain_error("mre_phi: no usable samples");
    out.value = sum / used;
    return out;
}

double ErrorPoint::distance_from_origin() const {
    return std::hypot(mre_av, mre_phi);
}

ErrorPoint median_model(std::vector<ErrorPoint> points) {
    if (points.empty()) throw std::invalid_argument("median_model: no points");
    if (points.size() % 2 == 0)
        throw std::invalid_argument("median_model: even point count has no median rule");
    for (const ErrorPoint& p : points)
        if (p.config_id != points.front().config_id)
            throw std::invalid_argument("median_model: mixed config ids");
    std::sort(points.begin(), points.end(), [](const ErrorPoint& a, const ErrorPoint& b) {
        const double da = a.distance_from_origin(), db = b.distance_from_origin();
        if (da != db) return da < db;
        return a.seed < b.seed;
    });
    const double median_distance = points[points.size() / 2].distance_from_origin();
    // Distance ties resolve to the lowest seed among the tied points.
    for (const ErrorPoint& p : points)
        if (p.distance_from_origin() == median_distance) return p;
    return points[points.size() / 2];
}

}  // namespace ginn
