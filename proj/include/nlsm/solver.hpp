#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "nlsm/certify.hpp"
#include "nlsm/objective.hpp"

namespace nlsm {

/// One application of the fixed-point map: every block h is replaced by
/// rho_h * g^(p_h' - 1) / ||g^(p_h' - 1)||_{p_h} with g = grad_h phi.
WeightPoint g_phi_step(const ObjectiveContext& ctx, const WeightPoint& wp);

/// Weighted Thompson metric: sum_b gamma_b ||ln a_b - ln b_b||_inf over blocks.
double thompson_mu(const WeightPoint& a, const WeightPoint& b, std::span<const double> gamma);

/// min over blocks of gamma_b / rho_b, the norm-equivalence constant of mu.
double metric_floor(const Architecture& arch, std::span<const double> gamma);

/// A-priori constant R with ||x^k - x*||_inf <= R rho(A)^k, from x1 = G(x0).
double convergence_R(const WeightPoint& x0, const WeightPoint& x1, const Certificate& cert, const Architecture& arch);

/// Strictly positive point: entries uniform in (0.5, 1.5), each block scaled onto its sphere.
WeightPoint init_weights(const Architecture& arch, std::uint64_t seed);

enum class StopReason { certified_count, early_tolerance, max_iterations };

std::string_view to_string(StopReason reason);

struct IterationRecord {
    int k = 0;
    double phi = 0.0;
    double mu_step = 0.0;   // mu(x^k, x^{k-1}; gamma)
    double inf_step = 0.0;  // ||x^k - x^{k-1}||_inf
};

struct SolveOptions {
    double tau = 1e-6;
    BoundMode mode = BoundMode::tight;
    std::uint64_t seed = 0;
    std::optional<WeightPoint> init;
    /// Stop as soon as the a-posteriori Banach bound drops below tau.
    bool early_stop = true;
    /// Run even if rho(A) >= 1; then stops on ||x^k - x^{k-1}||_inf < tau or the cap below.
    bool allow_uncertified = false;
    int uncertified_max_iterations = 10'000;
    bool record_trajectory = true;
    /// Keep every iterate x^0, x^1, ... (test and benchmark use).
    bool keep_iterates = false;
    Backend backend = Backend::parallel;
};

struct SolveReport {
    WeightPoint final;
    int iterations = 0;
    Certificate certificate;
    double R = 0.0;
    double tau = 0.0;
    /// ceil(ln(tau/R) / ln rho(A)), or 0 when not certified.
    int certified_count = 0;
    StopReason stop_reason = StopReason::certified_count;
    std::vector<IterationRecord> trajectory;  // record k = 0 is the starting point
    std::vector<WeightPoint> iterates;
};

/// Certified nonlinear spectral iteration x^{k+1} = G(x^k). Throws NotCertified
/// unless rho(A) < 1 in the chosen mode or allow_uncertified is set.
SolveReport solve(const Architecture& arch, const Dataset& ds, const SolveOptions& options);

/// a-priori iteration count for accuracy tau; 1 when R <= tau.
int certified_iteration_count(double R, double rho_A, double tau);

/// One line per record: k, phi, mu-step, inf-step, tab separated.
void write_trajectory(std::ostream& out, std::span<const IterationRecord> records);

}  // namespace nlsm
