#include "nlsm/compare.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

namespace nlsm {

double error_rate(const Architecture& arch, const WeightPoint& wp, const Dataset& ds)
{
    if (ds.size() == 0)
        return std::numeric_limits<double>::quiet_NaN();
    std::size_t wrong = 0;
    for (Eigen::Index i = 0; i < ds.features.rows(); ++i) {
        const auto row = ds.features.row(i);
        const Vector f = forward(arch, wp, {row.data(), static_cast<std::size_t>(row.size())});
        wrong += (predict(entries(f)) != ds.labels[static_cast<std::size_t>(i)]);
    }
    return static_cast<double>(wrong) / static_cast<double>(ds.size());
}

namespace {

void finish(MethodTrace& t, double target)
{
    for (std::size_t i = 0; i < t.gap.size(); ++i)
        if (t.gap[i] <= target) {
            t.steps_to_target = t.step[i];
            t.evaluations_to_target = t.evaluations[i];
            break;
        }
    t.final_gap = t.gap.empty() ? std::numeric_limits<double>::quiet_NaN() : t.gap.back();
}

}  // namespace

ComparisonReport compare_methods(const Architecture& arch, const Dataset& train, const Dataset* test,
                                 const CompareOptions& options)
{
    const WeightPoint init = init_weights(arch, options.seed);
    const double n = static_cast<double>(train.size());
    auto test_error = [&](const WeightPoint& wp) {
        return test && test->size() > 0 ? error_rate(arch, wp, *test) : std::numeric_limits<double>::quiet_NaN();
    };

    ComparisonReport rep;
    {
        SolveOptions ref;
        ref.tau = options.reference_tau;
        ref.mode = options.mode;
        ref.init = init;
        ref.record_trajectory = false;
        ref.backend = options.backend;
        const auto r = solve(arch, train, ref);
        rep.p_star = phi(ObjectiveContext(train, arch, options.backend), r.final);
        rep.reference_iterations = r.iterations;
    }

    SolveOptions so;
    so.tau = options.tau;
    so.mode = options.mode;
    so.init = init;
    so.keep_iterates = true;
    so.backend = options.backend;
    const auto run = solve(arch, train, so);
    rep.certified_count = run.certified_count;

    auto& s = rep.spectral;
    s.method = "spectral";
    s.step_size = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t k = 0; k < run.trajectory.size(); ++k) {
        const auto& rec = run.trajectory[k];
        s.step.push_back(rec.k);
        s.phi.push_back(rec.phi);
        s.gap.push_back(rep.p_star - rec.phi);
        s.evaluations.push_back(n * rec.k);
        s.test_error.push_back(test_error(run.iterates[k]));
    }
    finish(s, options.target_gap);
    rep.spectral_within_count = s.steps_to_target >= 0 && s.steps_to_target <= rep.certified_count;

    rep.spectral_wins = rep.spectral_within_count;
    for (double step : options.step_sizes) {
        SgdConfig cfg;
        cfg.step_size = step;
        cfg.epochs = options.epochs;
        cfg.batch_fraction = options.batch_fraction;
        cfg.seed = options.seed;
        cfg.backend = options.backend;
        const auto tr = sgd_train(arch, train, cfg, init);

        MethodTrace t;
        t.method = "sgd";
        t.step_size = step;
        const double per_epoch = options.epochs > 0 ? tr.data_passes * n / options.epochs : 0.0;
        for (std::size_t e = 0; e < tr.epochs.size(); ++e) {
            const auto& rec = tr.epochs[e];
            t.step.push_back(rec.k);
            t.phi.push_back(rec.phi);
            t.gap.push_back(rep.p_star - rec.phi);
            t.evaluations.push_back(per_epoch * rec.k);
            t.test_error.push_back(test_error(tr.snapshots[e]));
        }
        finish(t, options.target_gap);
        if (t.steps_to_target >= 0 && t.evaluations_to_target <= s.evaluations_to_target)
            rep.spectral_wins = false;
        rep.sgd.push_back(std::move(t));
    }
    return rep;
}

void write_method_traces(std::ostream& out, std::span<const MethodTrace> traces)
{
    out << "method\tstep_size\tstep\tevaluations\tphi\tgap\ttest_error\n";
    out << std::setprecision(17);
    for (const auto& t : traces)
        for (std::size_t i = 0; i < t.step.size(); ++i)
            out << t.method << '\t' << t.step_size << '\t' << t.step[i] << '\t' << t.evaluations[i] << '\t'
                << t.phi[i] << '\t' << t.gap[i] << '\t' << t.test_error[i] << '\n';
}

void write_summary(std::ostream& out, const ComparisonReport& r, double target_gap)
{
    out << "p* = " << std::setprecision(15) << r.p_star << "  (reference run: " << r.reference_iterations
        << " iterations)\n";
    out << "target gap " << std::setprecision(3) << target_gap << ", certified count " << r.certified_count << "\n";
    out << std::left << std::setw(10) << "method" << std::setw(11) << "step" << std::setw(8) << "steps"
        << std::setw(14) << "final_gap" << std::setw(12) << "to_target" << "evals_to_target\n";
    auto row = [&](const MethodTrace& t) {
        out << std::setw(10) << t.method << std::setw(11);
        if (std::isnan(t.step_size))
            out << "-";
        else
            out << t.step_size;
        out << std::setw(8) << (t.step.empty() ? 0 : t.step.back()) << std::setw(14) << std::setprecision(4)
            << t.final_gap << std::setw(12);
        if (t.steps_to_target < 0)
            out << "never" << "-\n";
        else
            out << t.steps_to_target << t.evaluations_to_target << "\n";
    };
    row(r.spectral);
    for (const auto& t : r.sgd)
        row(t);
    out << std::right;
    out << (r.spectral_wins ? "spectral method reaches the target first\n"
                            : "spectral method does not dominate on this instance\n");
}

}  // namespace nlsm
