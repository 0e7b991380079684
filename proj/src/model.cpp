#include "nlsm/model.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <utility>

namespace nlsm {

double Architecture::alpha_inf() const
{
    return alpha.empty() ? 0.0 : *std::max_element(alpha.begin(), alpha.end());
}

double Architecture::beta_inf() const
{
    return beta.empty() ? 0.0 : *std::max_element(beta.begin(), beta.end());
}

namespace {

void check_exponents(const std::vector<double>& e, const char* name)
{
    if (e.empty())
        throw InvalidArgument(std::string("architecture: ") + name + " must be non-empty");
    for (double a : e)
        if (!(a >= 1.0) || !std::isfinite(a))
            throw InvalidArgument(std::string("architecture: every ") + name + " entry must be >= 1");
    auto sorted = e;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw InvalidArgument(std::string("architecture: ") + name + " entries must be pairwise distinct");
}

void check_p(double p, const char* name)
{
    if (!(p > 1.0) || !std::isfinite(p))
        throw InvalidArgument(std::string("architecture: ") + name + " must lie in (1, inf)");
}

void check_radius(double r, const char* name)
{
    if (!(r > 0.0) || !std::isfinite(r))
        throw InvalidArgument(std::string("architecture: ") + name + " must be positive");
}

}  // namespace

void validate(const Architecture& arch)
{
    if (arch.depth != 1 && arch.depth != 2)
        throw InvalidArgument("architecture: depth must be 1 or 2");
    if (arch.num_classes < 1 || arch.input_dim < 1)
        throw InvalidArgument("architecture: K and d must be >= 1");
    check_exponents(arch.alpha, "alpha");
    check_p(arch.p_w, "p_w");
    check_p(arch.p_u, "p_u");
    check_radius(arch.rho_w, "rho_w");
    check_radius(arch.rho_u, "rho_u");
    if (arch.depth == 2) {
        check_exponents(arch.beta, "beta");
        check_p(arch.p_v, "p_v");
        check_radius(arch.rho_v, "rho_v");
    }
    if (!(arch.epsilon > 0.0) || !std::isfinite(arch.epsilon))
        throw InvalidArgument("architecture: epsilon must be positive");
}

std::span<double> WeightPoint::block(int b)
{
    const auto cb = std::as_const(*this).block(b);
    return {const_cast<double*>(cb.data()), cb.size()};
}

std::span<const double> WeightPoint::block(int b) const
{
    const int k = static_cast<int>(w.rows());
    if (b < 0 || b >= num_blocks())
        throw InvalidArgument("weight point: block index out of range");
    if (b < k)
        return {w.data() + static_cast<std::ptrdiff_t>(b) * w.cols(), static_cast<std::size_t>(w.cols())};
    if (depth() == 2 && b == k)
        return entries(v);
    return entries(u);
}

double WeightPoint::min_entry() const
{
    double m = w.size() ? w.minCoeff() : INFINITY;
    if (v.size())
        m = std::min(m, v.minCoeff());
    if (u.size())
        m = std::min(m, u.minCoeff());
    return m;
}

WeightPoint zeros_like(const Architecture& arch)
{
    WeightPoint wp;
    wp.w = Matrix::Zero(arch.num_classes, arch.top_width());
    if (arch.depth == 2)
        wp.v = Matrix::Zero(arch.n2(), arch.n1());
    wp.u = Matrix::Zero(arch.n1(), arch.input_dim);
    return wp;
}

void check_shapes(const Architecture& arch, const WeightPoint& wp)
{
    const bool ok = wp.w.rows() == arch.num_classes && wp.w.cols() == arch.top_width() &&
                    wp.u.rows() == arch.n1() && wp.u.cols() == arch.input_dim &&
                    (arch.depth == 2 ? (wp.v.rows() == arch.n2() && wp.v.cols() == arch.n1()) : wp.v.size() == 0);
    if (!ok)
        throw InvalidArgument("weight point does not conform to the architecture");
}

double block_radius(const Architecture& arch, int b)
{
    if (b < arch.num_classes)
        return arch.rho_w;
    if (arch.depth == 2 && b == arch.num_classes)
        return arch.rho_v;
    return arch.rho_u;
}

double block_exponent(const Architecture& arch, int b)
{
    if (b < arch.num_classes)
        return arch.p_w;
    if (arch.depth == 2 && b == arch.num_classes)
        return arch.p_v;
    return arch.p_u;
}

void normalize_to_spheres(const Architecture& arch, WeightPoint& wp)
{
    for (int b = 0; b < arch.num_blocks(); ++b) {
        auto blk = wp.block(b);
        const double norm = pnorm(blk, block_exponent(arch, b));
        if (!(norm > 0.0))
            throw NumericError("normalize_to_spheres: zero block " + std::to_string(b));
        const double scale = block_radius(arch, b) / norm;
        for (double& x : blk)
            x *= scale;
    }
}

double sphere_residual(const Architecture& arch, const WeightPoint& wp)
{
    double r = 0.0;
    for (int b = 0; b < arch.num_blocks(); ++b) {
        const double rad = block_radius(arch, b);
        r = std::max(r, std::abs(pnorm(wp.block(b), block_exponent(arch, b)) - rad) / rad);
    }
    return r;
}

double max_abs_difference(const WeightPoint& a, const WeightPoint& b)
{
    if (a.w.rows() != b.w.rows() || a.w.cols() != b.w.cols() || a.v.size() != b.v.size() || a.u.size() != b.u.size())
        throw InvalidArgument("max_abs_difference: shape mismatch");
    double d = (a.w - b.w).cwiseAbs().maxCoeff();
    if (a.v.size())
        d = std::max(d, (a.v - b.v).cwiseAbs().maxCoeff());
    return std::max(d, (a.u - b.u).cwiseAbs().maxCoeff());
}

double weight_sum(const WeightPoint& wp)
{
    return wp.w.sum() + (wp.v.size() ? wp.v.sum() : 0.0) + wp.u.sum();
}

Activations forward_activations(const Architecture& arch, const WeightPoint& wp, std::span<const double> x)
{
    if (static_cast<int>(x.size()) != arch.input_dim || wp.u.cols() != arch.input_dim)
        throw InvalidArgument("forward: input has " + std::to_string(x.size()) + " features, expected " +
                              std::to_string(arch.input_dim));
    check_shapes(arch, wp);
    for (double xi : x)
        if (!(xi >= 0.0))
            throw InvalidArgument("forward: input must be nonnegative");

    const Eigen::Map<const Vector> xv(x.data(), static_cast<Eigen::Index>(x.size()));
    Activations act;
    act.hidden1 = wp.u * xv;
    Vector top(arch.n1());
    for (int l = 0; l < arch.n1(); ++l)
        top[l] = pow_nonneg(act.hidden1[l], arch.alpha[static_cast<std::size_t>(l)]);
    if (arch.depth == 2) {
        act.hidden2 = wp.v * top;
        top.resize(arch.n2());
        for (int j = 0; j < arch.n2(); ++j)
            top[j] = pow_nonneg(act.hidden2[j], arch.beta[static_cast<std::size_t>(j)]);
    }
    act.output = wp.w * top;
    return act;
}

Vector forward(const Architecture& arch, const WeightPoint& wp, std::span<const double> x)
{
    return forward_activations(arch, wp, x).output;
}

int predict(std::span<const double> logits)
{
    if (logits.empty())
        throw InvalidArgument("predict: empty logit vector");
    int best = 0;
    for (std::size_t r = 0; r < logits.size(); ++r) {
        if (!std::isfinite(logits[r]))
            throw InvalidArgument("predict: non-finite logit");
        if (logits[r] > logits[static_cast<std::size_t>(best)])
            best = static_cast<int>(r);
    }
    return best + 1;
}

std::vector<double> make_alpha(int n, double alpha_max, std::uint64_t seed)
{
    if (n < 1)
        throw InvalidArgument("make_alpha: width must be >= 1");
    if (!(alpha_max >= 1.0) || !std::isfinite(alpha_max))
        throw InvalidArgument("make_alpha: alpha_max must be >= 1");
    if (n > 1 && alpha_max == 1.0)
        throw InvalidArgument("make_alpha: distinct exponents in [1, 1] are impossible for n > 1");

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> jitter(-0.3, 0.3);
    const double gap = (alpha_max - 1.0) / n;
    std::vector<double> alpha(static_cast<std::size_t>(n));
    // Cell centres 1 + (i + 1/2) gap, each moved by less than 0.3 gap, so
    // neighbours stay at least 0.4 gap apart and inside [1, alpha_max].
    for (int i = 0; i < n; ++i)
        alpha[static_cast<std::size_t>(i)] = 1.0 + (i + 0.5 + jitter(rng)) * gap;
    return alpha;
}

}  // namespace nlsm
