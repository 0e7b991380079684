#include <algorithm>
#include <cmath>

#include "nlsm/kernels.hpp"

namespace nlsm::kernels {

SampleWorkspace::SampleWorkspace(const Architecture& arch)
    : s(arch.n1()), h(arch.n1()), z(arch.n2()), g(arch.n2()), f(arch.num_classes), c(arch.num_classes),
      a(arch.top_width()), e(arch.n2()), b(arch.n1())
{
}

namespace {

std::span<const double> row_of(const Dataset& ds, std::size_t i)
{
    return {ds.features.data() + static_cast<std::ptrdiff_t>(i) * ds.features.cols(),
            static_cast<std::size_t>(ds.features.cols())};
}

// Fills s, h (and z, g for depth 2) and the outputs f.
void forward_sample(const Architecture& arch, const WeightPoint& wp, std::span<const double> x, SampleWorkspace& ws)
{
    const Eigen::Map<const Vector> xv(x.data(), static_cast<Eigen::Index>(x.size()));
    ws.s.noalias() = wp.u * xv;
    for (int l = 0; l < arch.n1(); ++l)
        ws.h[l] = pow_nonneg(ws.s[l], arch.alpha[static_cast<std::size_t>(l)]);
    if (arch.depth == 2) {
        ws.z.noalias() = wp.v * ws.h;
        for (int j = 0; j < arch.n2(); ++j)
            ws.g[j] = pow_nonneg(ws.z[j], arch.beta[static_cast<std::size_t>(j)]);
        ws.f.noalias() = wp.w * ws.g;
    } else {
        ws.f.noalias() = wp.w * ws.h;
    }
}

}  // namespace

double sample_objective(const Architecture& arch, const WeightPoint& wp, std::span<const double> x, int y,
                        SampleWorkspace& ws)
{
    forward_sample(arch, wp, x, ws);
    const double top = ws.f.maxCoeff();
    const double lse = top + std::log((ws.f.array() - top).exp().sum());
    return ws.f[y - 1] - lse + ws.f.sum();
}

void accumulate_sample_gradient(const Architecture& arch, const WeightPoint& wp, std::span<const double> x, int y,
                                SampleWorkspace& ws, WeightPoint& acc)
{
    forward_sample(arch, wp, x, ws);

    // c_r = delta_{y r} - softmax_r + 1, which lies in (0, 2).
    const double top = ws.f.maxCoeff();
    ws.c = (ws.f.array() - top).exp();
    ws.c /= -ws.c.sum();
    ws.c.array() += 1.0;
    ws.c[y - 1] += 1.0;

    const Vector& top_act = arch.depth == 2 ? ws.g : ws.h;
    acc.w.noalias() += ws.c * top_act.transpose();
    ws.a.noalias() = wp.w.transpose() * ws.c;

    if (arch.depth == 2) {
        for (int j = 0; j < arch.n2(); ++j) {
            const double bj = arch.beta[static_cast<std::size_t>(j)];
            ws.e[j] = ws.a[j] * bj * pow_nonneg(ws.z[j], bj - 1.0);
        }
        acc.v.noalias() += ws.e * ws.h.transpose();
        ws.b.noalias() = wp.v.transpose() * ws.e;
    } else {
        ws.b = ws.a;
    }

    for (int l = 0; l < arch.n1(); ++l) {
        const double al = arch.alpha[static_cast<std::size_t>(l)];
        const double coef = ws.b[l] * al * pow_nonneg(ws.s[l], al - 1.0);
        if (coef == 0.0)
            continue;
        double* urow = acc.u.data() + static_cast<std::ptrdiff_t>(l) * acc.u.cols();
        for (std::size_t m = 0; m < x.size(); ++m)
            urow[m] += coef * x[m];
    }
}

double objective_sum_serial(const Architecture& arch, const WeightPoint& wp, const Dataset& ds,
                            std::span<const std::size_t> rows)
{
    SampleWorkspace ws(arch);
    double total = 0.0;
    for (std::size_t i : rows)
        total += sample_objective(arch, wp, row_of(ds, i), ds.labels[i], ws);
    return total;
}

WeightPoint gradient_sum_serial(const Architecture& arch, const WeightPoint& wp, const Dataset& ds,
                                std::span<const std::size_t> rows)
{
    SampleWorkspace ws(arch);
    WeightPoint acc = zeros_like(arch);
    for (std::size_t i : rows)
        accumulate_sample_gradient(arch, wp, row_of(ds, i), ds.labels[i], ws, acc);
    return acc;
}

}  // namespace nlsm::kernels
