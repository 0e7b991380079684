#include "nlsm/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

namespace nlsm {

void validate(const SgdConfig& cfg)
{
    if (!(cfg.step_size > 0.0))
        throw InvalidArgument("sgd: step size must be positive");
    if (!(cfg.batch_fraction > 0.0 && cfg.batch_fraction <= 1.0))
        throw InvalidArgument("sgd: batch fraction must lie in (0, 1]");
    if (cfg.epochs < 0)
        throw InvalidArgument("sgd: epoch count must be nonnegative");
    if (!(cfg.positivity_floor > 0.0))
        throw InvalidArgument("sgd: positivity floor must be positive");
}

std::vector<double> default_step_grid() { return {1e-2, 1e-1, 1.0, 1e1, 1e2}; }

SgdTrace sgd_train(const Architecture& arch, const Dataset& ds, const SgdConfig& cfg, const WeightPoint& init)
{
    validate(cfg);
    const ObjectiveContext ctx(ds, arch, cfg.backend);
    check_shapes(arch, init);

    SgdTrace trace;
    trace.positivity_floor = cfg.positivity_floor;
    const std::size_t n = ds.size();
    trace.batch_size = std::min<std::size_t>(
        n, static_cast<std::size_t>(std::ceil(cfg.batch_fraction * static_cast<double>(n))));
    const std::vector<double> unit_gamma(static_cast<std::size_t>(arch.num_blocks()), 1.0);

    WeightPoint x = init;
    for (int b = 0; b < arch.num_blocks(); ++b)
        for (double& v : x.block(b))
            v = std::max(v, cfg.positivity_floor);
    normalize_to_spheres(arch, x);

    auto record = [&](int epoch, const WeightPoint& prev) {
        const bool first = epoch == 0;
        trace.epochs.push_back({epoch, phi(ctx, x), first ? 0.0 : thompson_mu(x, prev, unit_gamma),
                                first ? 0.0 : max_abs_difference(x, prev)});
        if (cfg.keep_snapshots)
            trace.snapshots.push_back(x);
    };
    record(0, x);

    std::mt19937_64 rng(cfg.seed);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});

    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        const WeightPoint start = x;
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t begin = 0, batch = 0; begin < n; begin += trace.batch_size, ++batch) {
            const std::size_t end = std::min(n, begin + trace.batch_size);
            const std::span<const std::size_t> rows(order.data() + begin, end - begin);
            const WeightPoint g = grad_rows(ctx, x, rows);
            trace.data_passes += static_cast<double>(rows.size()) / static_cast<double>(n);
            for (int b = 0; b < arch.num_blocks(); ++b) {
                auto xb = x.block(b);
                const auto gb = g.block(b);
                for (std::size_t i = 0; i < xb.size(); ++i)
                    xb[i] = std::max(xb[i] + cfg.step_size * gb[i], cfg.positivity_floor);
            }
            normalize_to_spheres(arch, x);
            if (!std::isfinite(x.min_entry()) || !std::isfinite(weight_sum(x)))
                throw NumericError("sgd: non-finite update at epoch " + std::to_string(epoch) + ", batch " +
                                   std::to_string(batch));
        }
        record(epoch, start);
    }
    return trace;
}

}  // namespace nlsm
