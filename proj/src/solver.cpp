#include "nlsm/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

namespace nlsm {

std::string_view to_string(StopReason reason)
{
    switch (reason) {
    case StopReason::certified_count:
        return "certified-count";
    case StopReason::early_tolerance:
        return "early-tolerance";
    case StopReason::max_iterations:
        return "max-iter";
    }
    return "unknown";
}

WeightPoint g_phi_step(const ObjectiveContext& ctx, const WeightPoint& wp)
{
    const auto& arch = ctx.arch();
    check_shapes(arch, wp);
    if (!(wp.min_entry() > 0.0))
        throw InvalidArgument("g_phi_step: weight point must be strictly positive");

    WeightPoint next = grad(ctx, wp);
    if (!(next.min_entry() >= arch.epsilon))
        throw NumericError("g_phi_step: gradient entry below epsilon");

    for (int b = 0; b < arch.num_blocks(); ++b) {
        auto blk = next.block(b);
        // g^(p'-1) in the log domain: p' - 1 = 1/(p - 1) is tiny for large p.
        const double power = holder_conjugate(block_exponent(arch, b)) - 1.0;
        for (double& g : blk)
            g = std::exp(power * std::log(g));
        const double norm = pnorm(blk, block_exponent(arch, b));
        if (!(norm > 0.0) || !std::isfinite(norm))
            throw NumericError("g_phi_step: degenerate gradient block " + std::to_string(b));
        const double scale = block_radius(arch, b) / norm;
        for (double& g : blk)
            g *= scale;
    }
    return next;
}

double thompson_mu(const WeightPoint& a, const WeightPoint& b, std::span<const double> gamma)
{
    if (a.num_blocks() != b.num_blocks() || static_cast<int>(gamma.size()) != a.num_blocks())
        throw InvalidArgument("thompson_mu: block structure and weight count must agree");
    double mu = 0.0;
    for (int k = 0; k < a.num_blocks(); ++k)
        mu += gamma[static_cast<std::size_t>(k)] * log_distance(a.block(k), b.block(k));
    return mu;
}

double metric_floor(const Architecture& arch, std::span<const double> gamma)
{
    if (static_cast<int>(gamma.size()) != arch.num_blocks())
        throw InvalidArgument("metric_floor: weight count must equal the block count");
    double floor = INFINITY;
    for (int b = 0; b < arch.num_blocks(); ++b)
        floor = std::min(floor, gamma[static_cast<std::size_t>(b)] / block_radius(arch, b));
    return floor;
}

double convergence_R(const WeightPoint& x0, const WeightPoint& x1, const Certificate& cert, const Architecture& arch)
{
    if (!cert.valid || !(cert.rho_A < 1.0))
        throw InvalidArgument("convergence_R: certificate is not valid (rho(A) >= 1)");
    const auto gamma = entries(cert.gamma);
    return thompson_mu(x1, x0, gamma) / ((1.0 - cert.rho_A) * metric_floor(arch, gamma));
}

WeightPoint init_weights(const Architecture& arch, std::uint64_t seed)
{
    validate(arch);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(0.5, 1.5);
    WeightPoint wp = zeros_like(arch);
    for (int b = 0; b < arch.num_blocks(); ++b)
        for (double& x : wp.block(b))
            x = dist(rng);
    normalize_to_spheres(arch, wp);
    return wp;
}

int certified_iteration_count(double R, double rho_A, double tau)
{
    if (!(rho_A > 0.0 && rho_A < 1.0) || !(tau > 0.0))
        throw InvalidArgument("certified_iteration_count: need 0 < rho(A) < 1 and tau > 0");
    if (!(R > tau))
        return 1;
    const double k = std::ceil(std::log(tau / R) / std::log(rho_A));
    if (!(k < static_cast<double>(std::numeric_limits<int>::max())))
        throw NumericError("certified_iteration_count: iteration count overflows");
    return std::max(1, static_cast<int>(k));
}

SolveReport solve(const Architecture& arch, const Dataset& ds, const SolveOptions& options)
{
    if (!(options.tau > 0.0))
        throw InvalidArgument("solve: tau must be positive");
    const ObjectiveContext ctx(ds, arch, options.backend);

    SolveReport report;
    report.tau = options.tau;
    report.certificate = certify(arch, ds, options.mode);
    const Certificate& cert = report.certificate;
    if (!cert.valid && !options.allow_uncertified) {
        std::ostringstream msg;
        msg << "solve: architecture is not certified in " << to_string(options.mode) << " mode (rho(A) = "
            << cert.rho_A << ")";
        throw NotCertified(msg.str());
    }

    WeightPoint x = options.init ? *options.init : init_weights(arch, options.seed);
    check_shapes(arch, x);
    if (!x.interior())
        throw InvalidArgument("solve: initial point must be strictly positive");
    normalize_to_spheres(arch, x);

    const auto gamma = entries(cert.gamma);
    const double floor = metric_floor(arch, gamma);
    auto record = [&](int k, const WeightPoint& xk, double mu_step, double inf_step) {
        if (options.record_trajectory)
            report.trajectory.push_back({k, phi(ctx, xk), mu_step, inf_step});
        if (options.keep_iterates)
            report.iterates.push_back(xk);
    };

    record(0, x, 0.0, 0.0);
    int k = 0;
    while (true) {
        WeightPoint next = g_phi_step(ctx, x);
        if (!next.interior())
            throw NumericError("solve: iterate left the interior at step " + std::to_string(k + 1));
        const double mu_step = thompson_mu(next, x, gamma);
        const double inf_step = max_abs_difference(next, x);
        if (k == 0 && cert.valid) {
            report.R = mu_step / ((1.0 - cert.rho_A) * floor);
            report.certified_count = certified_iteration_count(report.R, cert.rho_A, options.tau);
        }
        x = std::move(next);
        ++k;
        record(k, x, mu_step, inf_step);

        if (cert.valid) {
            if (k >= report.certified_count) {
                report.stop_reason = StopReason::certified_count;
                break;
            }
            // ||x^k - x*||_inf <= rho/(1 - rho) mu(x^k, x^{k-1}) / floor.
            if (options.early_stop && mu_step * cert.rho_A / ((1.0 - cert.rho_A) * floor) < options.tau) {
                report.stop_reason = StopReason::early_tolerance;
                break;
            }
        } else {
            if (inf_step < options.tau) {
                report.stop_reason = StopReason::early_tolerance;
                break;
            }
            if (k >= options.uncertified_max_iterations) {
                report.stop_reason = StopReason::max_iterations;
                break;
            }
        }
    }
    report.iterations = k;
    report.final = std::move(x);
    return report;
}

void write_trajectory(std::ostream& out, std::span<const IterationRecord> records)
{
    std::ostringstream buf;
    buf.precision(17);
    buf << "k\tphi\tmu_step\tinf_step\n";
    for (const auto& r : records)
        buf << r.k << '\t' << r.phi << '\t' << r.mu_step << '\t' << r.inf_step << '\n';
    out << buf.str();
}

}  // namespace nlsm
