#pragma once

// Per-sample accumulation kernels behind phi/grad. The serial versions are the
// reference implementation; the OpenMP versions split the rows into fixed
// chunks and combine chunk partials by a pairwise tree, so their result does
// not depend on the thread count.

#include <cstddef>
#include <span>

#include "nlsm/objective.hpp"

namespace nlsm::kernels {

inline constexpr std::size_t kChunkRows = 32;

/// Sum over rows of the per-sample objective term -L + sum_r f_r (no mean, no epsilon).
double objective_sum_serial(const Architecture& arch, const WeightPoint& wp, const Dataset& ds,
                            std::span<const std::size_t> rows);
double objective_sum_omp(const Architecture& arch, const WeightPoint& wp, const Dataset& ds,
                         std::span<const std::size_t> rows);

/// Sum over rows of the per-sample gradient contributions (no mean, no epsilon).
WeightPoint gradient_sum_serial(const Architecture& arch, const WeightPoint& wp, const Dataset& ds,
                                std::span<const std::size_t> rows);
WeightPoint gradient_sum_omp(const Architecture& arch, const WeightPoint& wp, const Dataset& ds,
                             std::span<const std::size_t> rows);

/// Adds one sample's contribution to acc; `scratch` sized by the caller.
struct SampleWorkspace {
    Vector s, h, z, g, f, c, a, e, b;
    explicit SampleWorkspace(const Architecture& arch);
};

double sample_objective(const Architecture& arch, const WeightPoint& wp, std::span<const double> x, int y,
                        SampleWorkspace& ws);
void accumulate_sample_gradient(const Architecture& arch, const WeightPoint& wp, std::span<const double> x, int y,
                                SampleWorkspace& ws, WeightPoint& acc);

}  // namespace nlsm::kernels
