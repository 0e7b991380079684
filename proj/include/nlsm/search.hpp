#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nlsm/certify.hpp"
#include "nlsm/data.hpp"
#include "nlsm/model.hpp"
#include "nlsm/model_io.hpp"
#include "nlsm/solver.hpp"

namespace nlsm {

struct TrainOptions {
    SolveOptions solve;
    /// Replace the architecture's p exponents with min_p on the scaled data.
    bool derive_p = false;
    double p_safety = kDefaultPSafety;
};

struct TrainResult {
    TrainedModel model;
    SolveReport report;
    Dataset scaled;  // training data after min-max scaling
};

/// Scales the raw data, optionally derives p, runs the certified solver and
/// packages the result. Throws NotCertified like solve().
TrainResult train_model(const Dataset& raw, Architecture arch, const TrainOptions& options,
                        const std::string& label_column = "label");

/// Random-search box. Widths are sampled uniformly among integers, exponent
/// maxima uniformly in (1, alpha_max], radii uniformly in (0, rho_max].
struct SearchBox {
    int n1_min = 2, n1_max = 20;
    int n2_min = 2, n2_max = 10;
    double alpha_max = 4.0;
    double beta_max = 4.0;
    double rho_max = 1.0;

    static SearchBox for_depth(int depth);
};

void validate(const SearchBox& box, int depth);

/// Draws `budget` architectures (p fields left at 2; derive them with min_p).
std::vector<Architecture> sample_candidates(const SearchBox& box, int depth, int num_classes, int input_dim,
                                            int budget, std::uint64_t seed, double epsilon = 1e-4);

struct CvOptions {
    int depth = 1;
    int folds = 5;
    int budget = 100;
    std::uint64_t seed = 0;
    double tau = 1e-6;
    BoundMode mode = BoundMode::tight;
    double p_safety = kDefaultPSafety;
    double epsilon = 1e-4;
    SearchBox box = SearchBox::for_depth(1);
};

struct CandidateResult {
    int index = 0;
    Architecture arch;             // p fields derived on the full (scaled) data
    double rho_A = 0.0;            // in CvOptions::mode for that architecture
    std::vector<double> fold_accuracy;
    double mean_accuracy = 0.0;
    bool failed = false;
    std::string error;
};

struct CvResult {
    std::vector<CandidateResult> candidates;  // ordered by candidate index
    std::size_t best = 0;
};

/// k-fold random search. Each fold is scaled with its own training ranges and
/// gets its own min_p. Winner: highest mean validation accuracy, then smaller
/// n1, then smaller rho(A), then lower index.
CvResult cross_validate(const Dataset& raw, const CvOptions& options);

struct HoldoutResult {
    CvResult cv;
    TrainResult final;
    double test_accuracy = 0.0;
    double train_accuracy = 0.0;
    double majority_baseline = 0.0;  // test accuracy of predicting the majority training class
    std::size_t train_size = 0, test_size = 0;
};

/// Stratified holdout; cross-validation on the training part, refit of the
/// winner on all of it, evaluation on the held-out rows.
HoldoutResult evaluate_holdout(const Dataset& raw, double test_fraction, const CvOptions& options,
                               const std::string& label_column = "label");

}  // namespace nlsm
