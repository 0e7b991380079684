#include "nlsm/objective.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "nlsm/kernels.hpp"

namespace nlsm {

ObjectiveContext::ObjectiveContext(const Dataset& data, Architecture arch, Backend backend)
    : data_(&data), arch_(std::move(arch)), backend_(backend), all_rows_(data.size())
{
    validate(arch_);
    if (static_cast<int>(data.dim()) != arch_.input_dim)
        throw InvalidArgument("objective: dataset has d=" + std::to_string(data.dim()) + ", architecture expects " +
                              std::to_string(arch_.input_dim));
    if (data.num_classes > arch_.num_classes)
        throw InvalidArgument("objective: dataset has more classes than the architecture");
    std::iota(all_rows_.begin(), all_rows_.end(), std::size_t{0});
}

ForwardCache forward_cache(const ObjectiveContext& ctx, const WeightPoint& wp)
{
    const auto& arch = ctx.arch();
    const auto& ds = ctx.data();
    check_shapes(arch, wp);
    const auto n = static_cast<Eigen::Index>(ds.size());
    ForwardCache cache;
    cache.hidden1 = ds.features * wp.u.transpose();
    Matrix top(n, arch.n1());
    for (Eigen::Index i = 0; i < n; ++i)
        for (int l = 0; l < arch.n1(); ++l)
            top(i, l) = pow_nonneg(cache.hidden1(i, l), arch.alpha[static_cast<std::size_t>(l)]);
    if (arch.depth == 2) {
        cache.hidden2 = top * wp.v.transpose();
        top.resize(n, arch.n2());
        for (Eigen::Index i = 0; i < n; ++i)
            for (int j = 0; j < arch.n2(); ++j)
                top(i, j) = pow_nonneg(cache.hidden2(i, j), arch.beta[static_cast<std::size_t>(j)]);
    }
    cache.logits = top * wp.w.transpose();
    return cache;
}

double cross_entropy(int y, std::span<const double> f)
{
    if (y < 1 || static_cast<std::size_t>(y) > f.size())
        throw InvalidArgument("cross_entropy: label " + std::to_string(y) + " out of range");
    double top = f[0];
    for (double v : f) {
        if (!std::isfinite(v))
            throw InvalidArgument("cross_entropy: non-finite output");
        top = std::max(top, v);
    }
    double s = 0.0;
    for (double v : f)
        s += std::exp(v - top);
    return (top - f[static_cast<std::size_t>(y - 1)]) + std::log(s);
}

double phi_rows(const ObjectiveContext& ctx, const WeightPoint& wp, std::span<const std::size_t> rows)
{
    check_shapes(ctx.arch(), wp);
    if (rows.empty())
        throw InvalidArgument("phi: empty row set");
    const double sum = ctx.backend() == Backend::parallel
                           ? kernels::objective_sum_omp(ctx.arch(), wp, ctx.data(), rows)
                           : kernels::objective_sum_serial(ctx.arch(), wp, ctx.data(), rows);
    const double value = sum / static_cast<double>(rows.size()) + ctx.arch().epsilon * weight_sum(wp);
    if (!std::isfinite(value))
        throw NumericError("phi: non-finite objective value; radii or exponents are mis-scaled");
    return value;
}

WeightPoint grad_rows(const ObjectiveContext& ctx, const WeightPoint& wp, std::span<const std::size_t> rows)
{
    check_shapes(ctx.arch(), wp);
    if (rows.empty())
        throw InvalidArgument("grad: empty row set");
    WeightPoint g = ctx.backend() == Backend::parallel
                        ? kernels::gradient_sum_omp(ctx.arch(), wp, ctx.data(), rows)
                        : kernels::gradient_sum_serial(ctx.arch(), wp, ctx.data(), rows);
    const double inv_n = 1.0 / static_cast<double>(rows.size());
    const double eps = ctx.arch().epsilon;
    auto finish = [&](Matrix& m) {
        m = (m * inv_n).array() + eps;
        if (!m.allFinite())
            throw NumericError("grad: non-finite gradient entry; radii or exponents are mis-scaled");
    };
    finish(g.w);
    if (g.v.size())
        finish(g.v);
    finish(g.u);
    return g;
}

double phi(const ObjectiveContext& ctx, const WeightPoint& wp) { return phi_rows(ctx, wp, ctx.all_rows()); }

WeightPoint grad(const ObjectiveContext& ctx, const WeightPoint& wp) { return grad_rows(ctx, wp, ctx.all_rows()); }

}  // namespace nlsm
