#include "nlsm/certify.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace nlsm {

std::string_view to_string(BoundMode mode) { return mode == BoundMode::loose ? "loose" : "tight"; }

BoundMode parse_bound_mode(std::string_view text)
{
    if (text == "loose")
        return BoundMode::loose;
    if (text == "tight")
        return BoundMode::tight;
    throw InvalidArgument("mode must be 'loose' or 'tight', got '" + std::string(text) + "'");
}

double psi(std::span<const double> alpha, std::span<const double> delta, double t, double p, double q)
{
    if (alpha.empty() || alpha.size() != delta.size())
        throw InvalidArgument("psi: alpha and delta must be non-empty and of equal length");
    if (!(p > 1.0) || !(q > 1.0))
        throw InvalidArgument("psi: p and q must exceed 1");
    if (!(t > 0.0) || !std::isfinite(t))
        throw InvalidArgument("psi: t must be positive");
    for (std::size_t l = 0; l < alpha.size(); ++l)
        if (!(alpha[l] > 0.0) || !(delta[l] > 0.0))
            throw InvalidArgument("psi: alpha and delta must be strictly positive");

    std::vector<double> in_j;
    double alpha_bar = INFINITY;
    double max_jc = 0.0;
    for (std::size_t l = 0; l < alpha.size(); ++l) {
        const double term = delta[l] * pow_nonneg(t, alpha[l]);
        if (alpha[l] * p <= q) {
            in_j.push_back(term);
            alpha_bar = std::min(alpha_bar, alpha[l]);
        } else {
            max_jc = std::max(max_jc, term);
        }
    }
    // [sum_J a_l^r]^(1 - alpha_bar p / q) with r = pq / (q - alpha_bar p) equals
    // ||a_J||_r^p; r is infinite when alpha_bar p == q.
    double j_norm = 0.0;
    if (!in_j.empty()) {
        const double slack = q - alpha_bar * p;
        j_norm = slack > 0.0 ? pnorm(in_j, p * q / slack) : pnorm(in_j, INFINITY);
    }
    const double parts[2] = {j_norm, max_jc};
    return pnorm(parts, p);
}

double mode_data_radius(const Architecture& arch, const Dataset& ds, BoundMode mode)
{
    return data_radius(ds, mode == BoundMode::loose ? 1.0 : holder_conjugate(arch.p_u));
}

BoundConstants bounds(const Architecture& arch, const Dataset& ds, BoundMode mode)
{
    if (static_cast<int>(ds.dim()) != arch.input_dim)
        throw InvalidArgument("bounds: dataset dimension does not match the architecture");
    return bounds(arch, mode_data_radius(arch, ds, mode), mode);
}

BoundConstants bounds(const Architecture& arch, double rho_x, BoundMode mode)
{
    validate(arch);
    if (!(rho_x > 0.0) || !std::isfinite(rho_x))
        throw InvalidArgument("bounds: data radius must be positive (dataset has no nonzero feature)");

    BoundConstants bc;
    bc.mode = mode;
    bc.depth = arch.depth;
    bc.rho_x = rho_x;
    bc.rho_x_norm = mode == BoundMode::loose ? 1.0 : holder_conjugate(arch.p_u);
    bc.alpha_inf = arch.alpha_inf();
    bc.beta_inf = arch.depth == 2 ? arch.beta_inf() : 0.0;

    const double base = arch.rho_u * rho_x;
    const std::vector<double> ones_alpha(arch.alpha.size(), 1.0);

    if (arch.depth == 1) {
        if (mode == BoundMode::loose) {
            for (double a : arch.alpha) {
                const double term = pow_nonneg(base, a);
                bc.xi1 += term;
                bc.xi2 += a * term;
            }
            bc.xi1 *= arch.rho_w;
            bc.xi2 *= arch.rho_w;
            bc.c_w = bc.xi1;
            bc.c_u = bc.xi2;
        } else {
            const double pw_conj = holder_conjugate(arch.p_w);
            bc.c_w = arch.rho_w * psi(arch.alpha, ones_alpha, base, pw_conj, arch.p_u);
            bc.c_u = arch.rho_w * psi(arch.alpha, arch.alpha, base, pw_conj, arch.p_u);
        }
        return bc;
    }

    if (mode == BoundMode::loose) {
        double inner = 0.0;
        for (double a : arch.alpha)
            inner += pow_nonneg(base, a);
        inner *= arch.rho_v;
        for (double b : arch.beta) {
            const double term = pow_nonneg(inner, b);
            bc.zeta1 += term;
            bc.zeta2 += b * term;
        }
        bc.zeta1 *= arch.rho_w;
        bc.zeta2 *= arch.rho_w;
        bc.c_w = bc.zeta1;
        bc.c_v = bc.zeta2;
    } else {
        const std::vector<double> ones_beta(arch.beta.size(), 1.0);
        const double pw_conj = holder_conjugate(arch.p_w);
        bc.theta = arch.rho_v * psi(arch.alpha, ones_alpha, base, holder_conjugate(arch.p_v), arch.p_u);
        bc.c_w = arch.rho_w * psi(arch.beta, ones_beta, bc.theta, pw_conj, arch.p_v);
        bc.c_v = arch.rho_w * psi(arch.beta, arch.beta, bc.theta, pw_conj, arch.p_v);
    }
    bc.c_u = bc.alpha_inf * bc.c_v;
    return bc;
}

Matrix build_A(const Architecture& arch, const BoundConstants& bc)
{
    if (bc.depth != arch.depth)
        throw InvalidArgument("build_A: bound constants were computed for a different depth");
    const int k = arch.num_classes;
    const double aw = 2.0 * (holder_conjugate(arch.p_w) - 1.0);
    const double au = 2.0 * (holder_conjugate(arch.p_u) - 1.0);
    const double a_inf = bc.alpha_inf;

    if (arch.depth == 1) {
        Matrix a(k + 1, k + 1);
        a.topLeftCorner(k, k).setConstant(aw * 2.0 * bc.c_w);
        a.topRightCorner(k, 1).setConstant(aw * (2.0 * bc.c_u + a_inf));
        a.bottomLeftCorner(1, k).setConstant(au * (2.0 * bc.c_w + 1.0));
        a(k, k) = au * (2.0 * bc.c_u + a_inf - 1.0);
        return a;
    }

    const double av = 2.0 * (holder_conjugate(arch.p_v) - 1.0);
    const double b_inf = bc.beta_inf;
    const int iv = k;
    const int iu = k + 1;
    Matrix a(k + 2, k + 2);
    a.topLeftCorner(k, k).setConstant(aw * 2.0 * bc.c_w);
    a.block(0, iv, k, 1).setConstant(aw * (2.0 * bc.c_v + b_inf));
    a.block(0, iu, k, 1).setConstant(aw * (2.0 * bc.c_u + a_inf * b_inf));
    a.block(iv, 0, 1, k).setConstant(av * (2.0 * bc.c_w + 1.0));
    a(iv, iv) = av * (2.0 * bc.c_v + b_inf - 1.0);
    a(iv, iu) = av * (2.0 * bc.c_u + a_inf * b_inf);
    a.block(iu, 0, 1, k).setConstant(au * (2.0 * bc.c_w + 1.0));
    a(iu, iv) = au * (2.0 * bc.c_v + b_inf);
    a(iu, iu) = au * (2.0 * bc.c_u + a_inf * b_inf - 1.0);
    return a;
}

namespace {

constexpr int kMaxPowerIterations = 10'000;
constexpr double kBracketTolerance = 1e-12;

void check_positive_square(const Matrix& m)
{
    if (m.rows() == 0 || m.rows() != m.cols())
        throw InvalidArgument("perron: matrix must be square and non-empty");
    if (!m.allFinite() || !(m.minCoeff() > 0.0))
        throw InvalidArgument("perron: matrix must be entrywise positive and finite");
}

struct PerronPair {
    double value;
    Vector vector;
};

// Right Perron pair of m. For positive v, min_i (mv)_i/v_i <= rho <= max_i (mv)_i/v_i.
PerronPair perron_right(const Matrix& m)
{
    check_positive_square(m);
    Vector v = Vector::Ones(m.rows());
    for (int it = 0; it < kMaxPowerIterations; ++it) {
        const Vector mv = m * v;
        const Vector ratio = mv.cwiseQuotient(v);
        const double lo = ratio.minCoeff();
        const double hi = ratio.maxCoeff();
        if (hi - lo <= kBracketTolerance * hi)
            return {0.5 * (lo + hi), v};
        v = mv / mv.maxCoeff();
    }
    throw NumericError("perron: power iteration did not bracket the spectral radius within " +
                       std::to_string(kMaxPowerIterations) + " iterations");
}

}  // namespace

double spectral_radius(const Matrix& a) { return perron_right(a).value; }

Vector perron_vector(const Matrix& a) { return perron_right(a.transpose()).vector; }

std::pair<double, double> collatz_wielandt_bracket(const Matrix& a, const Vector& v)
{
    if (v.size() != a.rows() || !(v.minCoeff() > 0.0))
        throw InvalidArgument("collatz_wielandt_bracket: v must be positive with matching size");
    const Vector ratio = (a.transpose() * v).cwiseQuotient(v);
    return {ratio.minCoeff(), ratio.maxCoeff()};
}

Certificate certify(const Architecture& arch, const BoundConstants& bc)
{
    Certificate cert;
    cert.mode = bc.mode;
    cert.constants = bc;
    cert.A = build_A(arch, bc);
    cert.rho_A = spectral_radius(cert.A);
    cert.gamma = perron_vector(cert.A);
    // The Collatz-Wielandt maximum at gamma is an upper bound on rho(A) that
    // does not depend on how well the iteration converged.
    const auto [lo, hi] = collatz_wielandt_bracket(cert.A, cert.gamma);
    (void)lo;
    cert.valid = cert.rho_A < 1.0 && hi < 1.0;
    return cert;
}

Certificate certify(const Architecture& arch, const Dataset& ds, BoundMode mode)
{
    return certify(arch, bounds(arch, ds, mode));
}

PExponents min_p(const Architecture& arch, const BoundConstants& loose, double safety)
{
    if (loose.mode != BoundMode::loose)
        throw InvalidArgument("min_p: needs loose-mode bound constants");
    if (loose.depth != arch.depth)
        throw InvalidArgument("min_p: bound constants were computed for a different depth");
    if (!(safety >= 0.0))
        throw InvalidArgument("min_p: safety factor must be nonnegative");
    const double k = arch.num_classes;
    const double grow = 1.0 + safety;
    PExponents p;
    if (arch.depth == 1) {
        p.p_w = (4.0 * (k + 1.0) * loose.xi1 + 3.0) * grow;
        p.p_u = (2.0 * (k + 1.0) * (loose.alpha_inf + 2.0 * loose.xi2) - 1.0) * grow;
        return p;
    }
    const double inner = 2.0 * loose.zeta2 + loose.beta_inf;
    p.p_w = (4.0 * (k + 2.0) * loose.zeta1 + 5.0) * grow;
    p.p_v = (2.0 * (k + 2.0) * inner - 1.0) * grow;
    p.p_u = (2.0 * (k + 2.0) * loose.alpha_inf * inner - 1.0) * grow;
    return p;
}

Architecture with_min_p(Architecture arch, const Dataset& ds, double safety)
{
    const auto p = min_p(arch, bounds(arch, ds, BoundMode::loose), safety);
    arch.p_w = p.p_w;
    arch.p_u = p.p_u;
    if (arch.depth == 2)
        arch.p_v = p.p_v;
    return arch;
}

}  // namespace nlsm
