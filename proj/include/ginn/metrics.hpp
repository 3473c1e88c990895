#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ginn/numerics.hpp"

namespace ginn {

// =====================================================================
//  Error measures
// =====================================================================
//
// Both measures normalize by the per-sample true max-flow phi = ||target||_1:
//
//   mre_av  = (1/m) sum_j (1/N) sum_p |phi_j - phihat_j| / phi
//   mre_phi = (1/N) sum_p |phi - phihat| / phi,  phihat = ||pred row||_1
//
// mre_av scores the individual sink-edge flows; mre_phi only their total,
// so symmetric over/under-estimation cancels there.

struct MetricOptions {
    /// Samples with phi = 0 make the measures undefined. By default they
    /// raise; set to drop them (the dropped count is reported).
    bool drop_zero_flow = false;
};

struct MetricValue {
    double value = 0.0;
    int dropped_samples = 0;
};

MetricValue mre_av(const DenseMatrix& preds, const DenseMatrix& targets, MetricOptions opts = {});
MetricValue mre_phi(const DenseMatrix& preds, const DenseMatrix& targets, MetricOptions opts = {});

// =====================================================================
//  Error plane
// =====================================================================

struct ErrorPoint {
    double mre_av = 0.0;
    double mre_phi = 0.0;
    std::string config_id;
    uint64_t seed = 0;
    size_t n_params = 0;

    double distance_from_origin() const;
};

/// Among an odd number of points sharing a config id, the one whose
/// (mre_av, mre_phi) distance from the origin is the median; distance ties
/// resolve to the lowest seed. Permutation invariant.
ErrorPoint median_model(std::vector<ErrorPoint> points);

}  // namespace ginn
