#include <vector>

#include "nlsm/kernels.hpp"

namespace nlsm::kernels {

namespace {

std::span<const double> row_of(const Dataset& ds, std::size_t i)
{
    return {ds.features.data() + static_cast<std::ptrdiff_t>(i) * ds.features.cols(),
            static_cast<std::size_t>(ds.features.cols())};
}

std::size_t chunk_count(std::size_t n) { return (n + kChunkRows - 1) / kChunkRows; }

void add_into(WeightPoint& dst, const WeightPoint& src)
{
    dst.w += src.w;
    if (dst.v.size())
        dst.v += src.v;
    dst.u += src.u;
}

void add_into(double& dst, const double& src) { dst += src; }

// Pairwise tree over chunk partials: stride 1, 2, 4, ... Fixed order, so the
// sum is independent of how chunks were scheduled.
template <class T>
void tree_reduce(std::vector<T>& parts)
{
    for (std::size_t stride = 1; stride < parts.size(); stride *= 2)
        for (std::size_t i = 0; i + stride < parts.size(); i += 2 * stride)
            add_into(parts[i], parts[i + stride]);
}

}  // namespace

double objective_sum_omp(const Architecture& arch, const WeightPoint& wp, const Dataset& ds,
                         std::span<const std::size_t> rows)
{
    const std::size_t chunks = chunk_count(rows.size());
    if (chunks == 0)
        return 0.0;
    std::vector<double> parts(chunks, 0.0);
    const auto nchunks = static_cast<long>(chunks);
#pragma omp parallel if (chunks > 1)
    {
        SampleWorkspace ws(arch);
#pragma omp for schedule(static)
        for (long c = 0; c < nchunks; ++c) {
            const std::size_t begin = static_cast<std::size_t>(c) * kChunkRows;
            const std::size_t end = std::min(rows.size(), begin + kChunkRows);
            double sum = 0.0;
            for (std::size_t k = begin; k < end; ++k)
                sum += sample_objective(arch, wp, row_of(ds, rows[k]), ds.labels[rows[k]], ws);
            parts[static_cast<std::size_t>(c)] = sum;
        }
    }
    tree_reduce(parts);
    return parts.front();
}

WeightPoint gradient_sum_omp(const Architecture& arch, const WeightPoint& wp, const Dataset& ds,
                             std::span<const std::size_t> rows)
{
    const std::size_t chunks = chunk_count(rows.size());
    if (chunks == 0)
        return zeros_like(arch);
    std::vector<WeightPoint> parts(chunks, zeros_like(arch));
    const auto nchunks = static_cast<long>(chunks);
#pragma omp parallel if (chunks > 1)
    {
        SampleWorkspace ws(arch);
#pragma omp for schedule(static)
        for (long c = 0; c < nchunks; ++c) {
            const std::size_t begin = static_cast<std::size_t>(c) * kChunkRows;
            const std::size_t end = std::min(rows.size(), begin + kChunkRows);
            auto& acc = parts[static_cast<std::size_t>(c)];
            for (std::size_t k = begin; k < end; ++k)
                accumulate_sample_gradient(arch, wp, row_of(ds, rows[k]), ds.labels[rows[k]], ws, acc);
        }
    }
    tree_reduce(parts);
    return std::move(parts.front());
}

}  // namespace nlsm::kernels
