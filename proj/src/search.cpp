#include "nlsm/search.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <random>

namespace nlsm {

TrainResult train_model(const Dataset& raw, Architecture arch, const TrainOptions& options,
                        const std::string& label_column)
{
    validate(raw);
    TrainResult out;
    out.scaled = scale_minmax(raw);
    if (options.derive_p)
        arch = with_min_p(std::move(arch), out.scaled, options.p_safety);
    out.report = solve(arch, out.scaled, options.solve);

    auto& m = out.model;
    m.arch = arch;
    m.weights = out.report.final;
    m.certificate = out.report.certificate;
    m.class_names = raw.class_names;
    m.feature_names = raw.feature_names;
    m.label_column = label_column;
    m.scaling = out.scaled.scaling;
    m.iterations = out.report.iterations;
    m.R = out.report.R;
    m.tau = out.report.tau;
    m.stop_reason = std::string(to_string(out.report.stop_reason));
    return out;
}

SearchBox SearchBox::for_depth(int depth)
{
    SearchBox box;
    if (depth == 2) {
        box.n1_min = 2;
        box.n1_max = 10;
    }
    return box;
}

void validate(const SearchBox& box, int depth)
{
    auto widths = [](int lo, int hi, const char* name) {
        if (lo < 1 || lo > hi)
            throw InvalidArgument(std::string("search box: empty or invalid range for ") + name);
    };
    widths(box.n1_min, box.n1_max, "n1");
    if (!(box.alpha_max >= 1.0) || (box.alpha_max == 1.0 && box.n1_max > 1))
        throw InvalidArgument("search box: alpha_max must exceed 1 when widths above 1 are allowed");
    if (depth == 2) {
        widths(box.n2_min, box.n2_max, "n2");
        if (!(box.beta_max >= 1.0) || (box.beta_max == 1.0 && box.n2_max > 1))
            throw InvalidArgument("search box: beta_max must exceed 1 when widths above 1 are allowed");
    }
    if (!(box.rho_max > 0.0) || !std::isfinite(box.rho_max))
        throw InvalidArgument("search box: rho_max must be positive");
}

namespace {

// Uniform on (0, hi]; the open end at 0 keeps radii and exponent gaps positive.
double upper_closed(std::mt19937_64& rng, double hi)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    return hi * (1.0 - u(rng));
}

double exponent_max(std::mt19937_64& rng, double hi, int width)
{
    if (width == 1 && hi == 1.0)
        return 1.0;
    return 1.0 + upper_closed(rng, hi - 1.0);
}

}  // namespace

std::vector<Architecture> sample_candidates(const SearchBox& box, int depth, int num_classes, int input_dim,
                                            int budget, std::uint64_t seed, double epsilon)
{
    if (depth != 1 && depth != 2)
        throw InvalidArgument("depth must be 1 or 2");
    if (budget < 1)
        throw InvalidArgument("search budget must be at least 1");
    validate(box, depth);

    std::mt19937_64 rng(seed);
    std::vector<Architecture> out;
    out.reserve(static_cast<std::size_t>(budget));
    for (int i = 0; i < budget; ++i) {
        Architecture a;
        a.depth = depth;
        a.num_classes = num_classes;
        a.input_dim = input_dim;
        a.epsilon = epsilon;
        const int n1 = std::uniform_int_distribution<int>(box.n1_min, box.n1_max)(rng);
        a.alpha = make_alpha(n1, exponent_max(rng, box.alpha_max, n1), rng());
        if (depth == 2) {
            const int n2 = std::uniform_int_distribution<int>(box.n2_min, box.n2_max)(rng);
            a.beta = make_alpha(n2, exponent_max(rng, box.beta_max, n2), rng());
            a.rho_v = upper_closed(rng, box.rho_max);
            a.p_v = 2.0;
        }
        a.rho_w = upper_closed(rng, box.rho_max);
        a.rho_u = upper_closed(rng, box.rho_max);
        a.p_w = a.p_u = 2.0;
        validate(a);
        out.push_back(std::move(a));
    }
    return out;
}

namespace {

bool better(const CandidateResult& x, const CandidateResult& y)
{
    if (x.failed != y.failed)
        return !x.failed;
    if (x.mean_accuracy != y.mean_accuracy)
        return x.mean_accuracy > y.mean_accuracy;
    if (x.arch.n1() != y.arch.n1())
        return x.arch.n1() < y.arch.n1();
    if (x.rho_A != y.rho_A)
        return x.rho_A < y.rho_A;
    return x.index < y.index;
}

}  // namespace

CvResult cross_validate(const Dataset& raw, const CvOptions& options)
{
    validate(raw);
    if (options.folds < 2)
        throw InvalidArgument("cross-validation needs at least 2 folds");
    const auto archs = sample_candidates(options.box, options.depth, raw.num_classes, static_cast<int>(raw.dim()),
                                         options.budget, options.seed, options.epsilon);
    const auto folds = kfold_split(raw, options.folds, options.seed);
    const Dataset full = scale_minmax(raw);

    // Pre-scaled fold data, shared read-only by all candidates.
    struct FoldData {
        Dataset train, validation_raw;
    };
    std::vector<FoldData> fold_data;
    for (const auto& f : folds)
        fold_data.push_back({subset(raw, f.train), subset(raw, f.validation)});

    CvResult result;
    result.candidates.resize(archs.size());
    const auto count = static_cast<long>(archs.size());

#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < count; ++i) {
        auto& c = result.candidates[static_cast<std::size_t>(i)];
        c.index = static_cast<int>(i);
        try {
            c.arch = with_min_p(archs[static_cast<std::size_t>(i)], full, options.p_safety);
            c.rho_A = certify(c.arch, full, options.mode).rho_A;
            TrainOptions train;
            train.derive_p = true;
            train.p_safety = options.p_safety;
            train.solve.tau = options.tau;
            train.solve.mode = options.mode;
            train.solve.seed = options.seed + static_cast<std::uint64_t>(i);
            train.solve.record_trajectory = false;
            train.solve.backend = Backend::serial;
            double sum = 0.0;
            for (const auto& fd : fold_data) {
                const auto trained = train_model(fd.train, archs[static_cast<std::size_t>(i)], train);
                const double acc = accuracy(trained.model, fd.validation_raw);
                c.fold_accuracy.push_back(acc);
                sum += acc;
            }
            c.mean_accuracy = sum / static_cast<double>(fold_data.size());
        } catch (const std::exception& e) {
            c.failed = true;
            c.error = e.what();
            c.mean_accuracy = 0.0;
        }
    }

    for (std::size_t i = 1; i < result.candidates.size(); ++i)
        if (better(result.candidates[i], result.candidates[result.best]))
            result.best = i;
    if (result.candidates[result.best].failed)
        throw Error("cross-validation: every candidate failed; first error: " + result.candidates.front().error);
    return result;
}

HoldoutResult evaluate_holdout(const Dataset& raw, double test_fraction, const CvOptions& options,
                               const std::string& label_column)
{
    validate(raw);
    const auto split = holdout_split(raw, test_fraction, options.seed);
    const Dataset train = subset(raw, split.train);
    const Dataset test = subset(raw, split.validation);

    HoldoutResult out;
    out.train_size = train.size();
    out.test_size = test.size();
    out.cv = cross_validate(train, options);

    TrainOptions refit;
    refit.derive_p = true;
    refit.p_safety = options.p_safety;
    refit.solve.tau = options.tau;
    refit.solve.mode = options.mode;
    refit.solve.seed = options.seed;
    refit.solve.record_trajectory = false;
    out.final = train_model(train, out.cv.candidates[out.cv.best].arch, refit, label_column);
    out.test_accuracy = accuracy(out.final.model, test);
    out.train_accuracy = accuracy(out.final.model, train);

    std::vector<std::size_t> counts(static_cast<std::size_t>(train.num_classes), 0);
    for (int y : train.labels)
        ++counts[static_cast<std::size_t>(y - 1)];
    const int majority = static_cast<int>(std::max_element(counts.begin(), counts.end()) - counts.begin()) + 1;
    std::size_t hits = 0;
    for (int y : test.labels)
        hits += (y == majority);
    out.majority_baseline = static_cast<double>(hits) / static_cast<double>(test.size());
    return out;
}

}  // namespace nlsm
