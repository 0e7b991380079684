#pragma once

#include <cstdint>
#include <vector>

#include "nlsm/objective.hpp"
#include "nlsm/solver.hpp"

namespace nlsm {

/// Projected batch stochastic gradient ascent on phi.
struct SgdConfig {
    double step_size = 1.0;
    double batch_fraction = 0.05;
    int epochs = 200;
    std::uint64_t seed = 0;
    /// Entries are clamped to at least this value before renormalising.
    double positivity_floor = 1e-12;
    bool keep_snapshots = true;
    Backend backend = Backend::parallel;
};

void validate(const SgdConfig& cfg);

struct SgdTrace {
    /// Entry 0 is the initial point; entry e is the end of epoch e. mu_step is
    /// measured with unit block weights.
    std::vector<IterationRecord> epochs;
    std::vector<WeightPoint> snapshots;
    double positivity_floor = 0.0;
    std::size_t batch_size = 0;
    /// Gradient evaluations counted in full-data passes (sum of batch sizes / n).
    double data_passes = 0.0;
};

/// The init is projected onto the spheres before the first epoch.
SgdTrace sgd_train(const Architecture& arch, const Dataset& ds, const SgdConfig& cfg, const WeightPoint& init);

/// Step sizes 1e-2, 1e-1, ..., 1e2.
std::vector<double> default_step_grid();

}  // namespace nlsm
