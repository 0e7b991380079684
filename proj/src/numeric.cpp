#include "nlsm/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nlsm {

double pow_nonneg(double t, double a)
{
    if (t > 0.0)
        return std::exp(a * std::log(t));
    if (t == 0.0)
        return a == 0.0 ? 1.0 : 0.0;
    throw InvalidArgument("pow_nonneg: negative base " + std::to_string(t));
}

double pnorm(std::span<const double> x, double p)
{
    if (!(p >= 1.0))
        throw InvalidArgument("pnorm: exponent must be >= 1");
    double peak = 0.0;
    for (double v : x)
        peak = std::max(peak, std::abs(v));
    if (peak == 0.0 || std::isinf(p))
        return peak;
    if (p == 1.0) {
        double s = 0.0;
        for (double v : x)
            s += std::abs(v);
        return s;
    }
    double s = 0.0;
    for (double v : x)
        s += pow_nonneg(std::abs(v) / peak, p);
    return peak * pow_nonneg(s, 1.0 / p);
}

double holder_conjugate(double p)
{
    if (!(p > 1.0) || std::isinf(p))
        throw InvalidArgument("holder_conjugate: exponent must lie in (1, inf)");
    return p / (p - 1.0);
}

double log_distance(std::span<const double> a, std::span<const double> b)
{
    if (a.size() != b.size())
        throw InvalidArgument("log_distance: size mismatch");
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!(a[i] > 0.0) || !(b[i] > 0.0))
            throw InvalidArgument("log_distance: entries must be strictly positive");
        d = std::max(d, std::abs(std::log(a[i]) - std::log(b[i])));
    }
    return d;
}

}  // namespace nlsm
