#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "nlsm/baseline.hpp"
#include "nlsm/certify.hpp"
#include "nlsm/solver.hpp"

namespace nlsm {

struct CompareOptions {
    double tau = 1e-6;
    double reference_tau = 1e-12;  // accuracy of the run that defines p*
    double target_gap = 1e-6;
    BoundMode mode = BoundMode::tight;
    std::uint64_t seed = 0;
    std::vector<double> step_sizes = default_step_grid();
    int epochs = 200;
    double batch_fraction = 0.05;
    Backend backend = Backend::parallel;
};

/// One optimiser run: per-step objective, optimality gap p* - phi and test
/// error. Steps are iterations (spectral) or epochs (SGD).
struct MethodTrace {
    std::string method;  // "spectral" or "sgd"
    double step_size = 0.0;
    std::vector<int> step;
    std::vector<double> phi, gap, test_error;
    /// Per-sample gradient evaluations spent up to each step.
    std::vector<double> evaluations;
    int steps_to_target = -1;  // first step with gap <= target, -1 if never
    double evaluations_to_target = -1.0;
    double final_gap = 0.0;
};

struct ComparisonReport {
    double p_star = 0.0;
    int reference_iterations = 0;
    int certified_count = 0;
    MethodTrace spectral;
    std::vector<MethodTrace> sgd;
    bool spectral_within_count = false;
    /// Spectral reached the target within its certified count and no SGD run
    /// reached it with fewer evaluations.
    bool spectral_wins = false;
};

/// train and test must already be scaled; test may be empty (test_error is then NaN).
ComparisonReport compare_methods(const Architecture& arch, const Dataset& train, const Dataset* test,
                                 const CompareOptions& options);

/// Misclassification rate of wp on a scaled dataset.
double error_rate(const Architecture& arch, const WeightPoint& wp, const Dataset& ds);

/// Tab-separated: method, step_size, step, evaluations, phi, gap, test_error.
void write_method_traces(std::ostream& out, std::span<const MethodTrace> traces);
void write_summary(std::ostream& out, const ComparisonReport& report, double target_gap);

}  // namespace nlsm
