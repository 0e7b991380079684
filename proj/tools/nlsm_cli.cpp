// nlsm: certify, train, predict, cross-validate and benchmark nonnegative
// polynomial networks trained by the nonlinear spectral method.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nlsm/baseline.hpp"
#include "nlsm/certify.hpp"
#include "nlsm/compare.hpp"
#include "nlsm/data.hpp"
#include "nlsm/model_io.hpp"
#include "nlsm/objective.hpp"
#include "nlsm/search.hpp"
#include "nlsm/solver.hpp"

namespace {

enum Exit { kOk = 0, kUsage = 1, kNotCertified = 2, kRuntime = 3 };

struct Options {
    std::string data, label = "label", model, out, trace;
    std::uint64_t seed = 0;
    double tau = 1e-6;
    std::string mode = "tight";
    int depth = 1;
    bool force = false;

    // architecture
    int n1 = 0, n2 = 0;
    std::vector<double> alpha, beta;
    double alpha_max = 2.0, beta_max = 2.0;
    double rho_w = 1.0, rho_v = 1.0, rho_u = 1.0;
    std::optional<double> p_w, p_v, p_u;
    double p_safety = nlsm::kDefaultPSafety;
    double epsilon = 1e-4;

    // cross-validation
    int budget = 100, folds = 5;
    double test_fraction = 0.0;
    std::optional<int> n1_min, n1_max, n2_min, n2_max;
    std::optional<double> search_alpha_max, search_beta_max, search_rho_max;

    // benchmark
    std::vector<double> step_sizes = nlsm::default_step_grid();
    int epochs = 200;
    double batch_fraction = 0.05;
    double reference_tau = 1e-12;
};

void require(bool ok, const std::string& what)
{
    if (!ok)
        throw CLI::ValidationError(what);
}

nlsm::Dataset load_data(const Options& o)
{
    require(!o.data.empty(), "--data is required");
    return nlsm::load_csv_file(o.data, o.label);
}

/// Architecture from flags; p exponents missing on the command line come from
/// min_p on the scaled data.
nlsm::Architecture make_arch(const Options& o, const nlsm::Dataset& scaled, bool& derived)
{
    nlsm::Architecture a;
    a.depth = o.depth;
    a.num_classes = scaled.num_classes;
    a.input_dim = static_cast<int>(scaled.dim());
    a.epsilon = o.epsilon;
    if (!o.alpha.empty())
        a.alpha = o.alpha;
    else {
        require(o.n1 > 0, "give --n1 or --alpha");
        a.alpha = nlsm::make_alpha(o.n1, o.alpha_max, o.seed);
    }
    if (o.depth == 2) {
        if (!o.beta.empty())
            a.beta = o.beta;
        else {
            require(o.n2 > 0, "give --n2 or --beta for depth 2");
            a.beta = nlsm::make_alpha(o.n2, o.beta_max, o.seed + 1);
        }
    }
    a.rho_w = o.rho_w;
    a.rho_v = o.rho_v;
    a.rho_u = o.rho_u;
    a.p_w = a.p_v = a.p_u = 2.0;
    derived = !o.p_w || !o.p_u || (o.depth == 2 && !o.p_v);
    if (derived) {
        const auto p = nlsm::min_p(a, nlsm::bounds(a, scaled, nlsm::BoundMode::loose), o.p_safety);
        a.p_w = p.p_w;
        a.p_v = p.p_v;
        a.p_u = p.p_u;
    }
    if (o.p_w)
        a.p_w = *o.p_w;
    if (o.p_v)
        a.p_v = *o.p_v;
    if (o.p_u)
        a.p_u = *o.p_u;
    nlsm::validate(a);
    return a;
}

void print_vector(std::ostream& out, const std::vector<double>& v)
{
    out << '(';
    for (std::size_t i = 0; i < v.size(); ++i)
        out << (i ? ", " : "") << v[i];
    out << ')';
}

void print_arch(std::ostream& out, const nlsm::Architecture& a)
{
    out << "depth " << a.depth << ", K " << a.num_classes << ", d " << a.input_dim << ", n1 " << a.n1();
    if (a.depth == 2)
        out << ", n2 " << a.n2();
    out << "\nalpha ";
    print_vector(out, a.alpha);
    if (a.depth == 2) {
        out << "\nbeta ";
        print_vector(out, a.beta);
    }
    out << "\np_w " << a.p_w;
    if (a.depth == 2)
        out << "  p_v " << a.p_v;
    out << "  p_u " << a.p_u << "\nrho_w " << a.rho_w;
    if (a.depth == 2)
        out << "  rho_v " << a.rho_v;
    out << "  rho_u " << a.rho_u << "  epsilon " << a.epsilon << '\n';
}

int cmd_certify(const Options& o)
{
    const auto scaled = nlsm::scale_minmax(load_data(o));
    bool derived = false;
    const auto arch = make_arch(o, scaled, derived);
    const auto mode = nlsm::parse_bound_mode(o.mode);
    const auto cert = nlsm::certify(arch, scaled, mode);

    std::cout << std::setprecision(10);
    print_arch(std::cout, arch);
    if (derived)
        std::cout << "(p exponents from min_p, safety " << o.p_safety << ")\n";
    std::cout << "mode " << nlsm::to_string(mode) << "  rho_x " << cert.constants.rho_x << "\nA =\n"
              << cert.A << "\ngamma = " << cert.gamma.transpose() << '\n';
    if (cert.valid) {
        std::cout << "CERTIFIED rho(A)=" << cert.rho_A << '\n';
        return kOk;
    }
    std::cout << "NOT CERTIFIED rho(A)=" << cert.rho_A << '\n';
    const auto p = nlsm::min_p(arch, nlsm::bounds(arch, scaled, nlsm::BoundMode::loose), o.p_safety);
    std::cout << "suggestion (min_p): p_w " << p.p_w;
    if (arch.depth == 2)
        std::cout << "  p_v " << p.p_v;
    std::cout << "  p_u " << p.p_u << '\n';
    return kNotCertified;
}

int cmd_train(const Options& o)
{
    const auto raw = load_data(o);
    const auto scaled = nlsm::scale_minmax(raw);
    bool derived = false;
    const auto arch = make_arch(o, scaled, derived);

    nlsm::TrainOptions topt;
    topt.solve.tau = o.tau;
    topt.solve.mode = nlsm::parse_bound_mode(o.mode);
    topt.solve.seed = o.seed;
    topt.solve.allow_uncertified = o.force;
    const auto result = nlsm::train_model(raw, arch, topt, o.label);
    const auto& rep = result.report;

    if (!o.out.empty())
        nlsm::save_model_file(o.out, result.model);
    if (!o.trace.empty()) {
        std::ofstream t(o.trace);
        require(static_cast<bool>(t), "cannot write trace file " + o.trace);
        nlsm::write_trajectory(t, rep.trajectory);
    }
    const double final_phi = nlsm::phi(nlsm::ObjectiveContext(result.scaled, arch), rep.final);
    std::cout << std::setprecision(10);
    print_arch(std::cout, arch);
    std::cout << "certificate  rho(A)=" << rep.certificate.rho_A << (rep.certificate.valid ? "" : "  (NOT CERTIFIED)")
              << "\nR " << rep.R << "  tau " << rep.tau << "  certified count " << rep.certified_count
              << "\niterations " << rep.iterations << "  stop " << nlsm::to_string(rep.stop_reason)
              << "\nfinal phi " << std::setprecision(15) << final_phi << "\ntrain accuracy "
              << std::setprecision(6) << nlsm::accuracy(result.model, raw) << '\n';
    if (!o.out.empty())
        std::cout << "model written to " << o.out << '\n';
    return kOk;
}

int cmd_predict(const Options& o)
{
    require(!o.model.empty(), "--model is required");
    require(!o.data.empty(), "--data is required");
    const auto model = nlsm::load_model_file(o.model);
    std::ifstream in(o.data);
    if (!in)
        throw nlsm::ParseError("cannot open '" + o.data + "'");
    const auto table = nlsm::read_csv(in);
    const auto predicted = nlsm::predict_raw(model, nlsm::feature_matrix(model, table));

    std::ofstream file;
    if (!o.out.empty()) {
        file.open(o.out);
        require(static_cast<bool>(file), "cannot write " + o.out);
    }
    std::ostream& out = o.out.empty() ? std::cout : file;
    out << "predicted\n";
    for (int c : predicted)
        out << model.class_names.at(static_cast<std::size_t>(c - 1)) << '\n';

    const auto& header = table.header;
    if (std::find(header.begin(), header.end(), model.label_column) != header.end()) {
        const auto col = table.column(model.label_column);
        std::size_t correct = 0;
        for (std::size_t i = 0; i < predicted.size(); ++i)
            correct += table.rows[i][col] == model.class_names.at(static_cast<std::size_t>(predicted[i] - 1));
        std::cerr << "accuracy " << static_cast<double>(correct) / static_cast<double>(predicted.size()) << '\n';
    }
    return kOk;
}

nlsm::CvOptions cv_options(const Options& o)
{
    nlsm::CvOptions c;
    c.depth = o.depth;
    c.folds = o.folds;
    c.budget = o.budget;
    c.seed = o.seed;
    c.tau = o.tau;
    c.mode = nlsm::parse_bound_mode(o.mode);
    c.p_safety = o.p_safety;
    c.epsilon = o.epsilon;
    c.box = nlsm::SearchBox::for_depth(o.depth);
    if (o.n1_min) c.box.n1_min = *o.n1_min;
    if (o.n1_max) c.box.n1_max = *o.n1_max;
    if (o.n2_min) c.box.n2_min = *o.n2_min;
    if (o.n2_max) c.box.n2_max = *o.n2_max;
    if (o.search_alpha_max) c.box.alpha_max = *o.search_alpha_max;
    if (o.search_beta_max) c.box.beta_max = *o.search_beta_max;
    if (o.search_rho_max) c.box.rho_max = *o.search_rho_max;
    return c;
}

void print_candidates(std::ostream& out, const nlsm::CvResult& cv)
{
    out << "idx\tn1\tn2\talpha_max\trho_w\trho_u\trho_A\tmean_acc\tfolds\n";
    for (const auto& c : cv.candidates) {
        out << c.index << '\t' << c.arch.n1() << '\t' << c.arch.n2() << '\t'
            << (c.arch.alpha.empty() ? 0.0 : c.arch.alpha.back()) << '\t' << c.arch.rho_w << '\t' << c.arch.rho_u
            << '\t' << c.rho_A << '\t';
        if (c.failed) {
            out << "failed\t" << c.error << '\n';
            continue;
        }
        out << c.mean_accuracy << '\t';
        for (std::size_t f = 0; f < c.fold_accuracy.size(); ++f)
            out << (f ? "," : "") << c.fold_accuracy[f];
        out << '\n';
    }
}

int cmd_cv(const Options& o)
{
    const auto raw = load_data(o);
    const auto copt = cv_options(o);
    std::cout << std::setprecision(6);

    if (o.test_fraction > 0.0) {
        const auto h = nlsm::evaluate_holdout(raw, o.test_fraction, copt, o.label);
        print_candidates(std::cout, h.cv);
        const auto& best = h.cv.candidates[h.cv.best];
        std::cout << "\nbest candidate " << best.index << "  mean validation accuracy " << best.mean_accuracy
                  << "\n";
        print_arch(std::cout, h.final.model.arch);
        std::cout << "train rows " << h.train_size << "  test rows " << h.test_size << "\ntrain accuracy "
                  << h.train_accuracy << "\ntest accuracy " << h.test_accuracy << "\nmajority baseline "
                  << h.majority_baseline << '\n';
        if (!o.out.empty())
            nlsm::save_model_file(o.out, h.final.model);
        return kOk;
    }

    const auto cv = nlsm::cross_validate(raw, copt);
    print_candidates(std::cout, cv);
    const auto& best = cv.candidates[cv.best];
    std::cout << "\nbest candidate " << best.index << "  mean validation accuracy " << best.mean_accuracy << '\n';
    nlsm::TrainOptions refit;
    refit.derive_p = true;
    refit.p_safety = o.p_safety;
    refit.solve.tau = o.tau;
    refit.solve.mode = copt.mode;
    refit.solve.seed = o.seed;
    const auto final = nlsm::train_model(raw, best.arch, refit, o.label);
    print_arch(std::cout, final.model.arch);
    std::cout << "train accuracy " << nlsm::accuracy(final.model, raw) << '\n';
    if (!o.out.empty())
        nlsm::save_model_file(o.out, final.model);
    return kOk;
}

int cmd_benchmark(const Options& o)
{
    const auto raw = load_data(o);
    nlsm::Dataset train_raw = raw, test_raw;
    if (o.test_fraction > 0.0) {
        const auto split = nlsm::holdout_split(raw, o.test_fraction, o.seed);
        train_raw = nlsm::subset(raw, split.train);
        test_raw = nlsm::subset(raw, split.validation);
    }
    const auto train = nlsm::scale_minmax(train_raw);
    const auto test = nlsm::apply_scaling(test_raw, train.scaling);
    bool derived = false;
    const auto arch = make_arch(o, train, derived);

    nlsm::CompareOptions c;
    c.tau = o.tau;
    c.reference_tau = o.reference_tau;
    c.mode = nlsm::parse_bound_mode(o.mode);
    c.seed = o.seed;
    c.step_sizes = o.step_sizes;
    c.epochs = o.epochs;
    c.batch_fraction = o.batch_fraction;
    const auto rep = nlsm::compare_methods(arch, train, test.size() ? &test : nullptr, c);

    print_arch(std::cout, arch);
    nlsm::write_summary(std::cout, rep, c.target_gap);
    if (!o.trace.empty()) {
        const std::vector<nlsm::MethodTrace> spectral{rep.spectral};
        std::ofstream s(o.trace + ".spectral.tsv"), g(o.trace + ".sgd.tsv");
        require(s && g, "cannot write trace files with prefix " + o.trace);
        nlsm::write_method_traces(s, spectral);
        nlsm::write_method_traces(g, rep.sgd);
        std::cout << "traces: " << o.trace << ".spectral.tsv, " << o.trace << ".sgd.tsv\n";
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Globally optimal training of nonnegative polynomial networks"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "Flat key = value file; command-line flags take precedence");

    Options o;
    app.add_option("--data", o.data, "CSV file with a header row");
    app.add_option("--label", o.label, "Name of the label column")->capture_default_str();
    app.add_option("--seed", o.seed, "Random seed")->capture_default_str();
    app.add_option("--tau", o.tau, "Target accuracy")->capture_default_str();
    app.add_option("--mode", o.mode, "Bound mode")->check(CLI::IsMember({"loose", "tight"}))->capture_default_str();
    app.add_option("--depth", o.depth, "Hidden layers")->check(CLI::IsMember({1, 2}))->capture_default_str();
    app.add_flag("--force", o.force, "Train even without a certificate");
    app.add_option("--out", o.out, "Output file (model or predictions)");
    app.add_option("--trace", o.trace, "Trajectory output (file, or prefix for benchmark)");
    app.add_option("--model", o.model, "Model file for predict");

    auto* arch = "Architecture";
    app.add_option("--n1", o.n1, "First hidden width")->group(arch);
    app.add_option("--n2", o.n2, "Second hidden width (depth 2)")->group(arch);
    app.add_option("--alpha", o.alpha, "Explicit first-layer exponents")->group(arch)->delimiter(',');
    app.add_option("--beta", o.beta, "Explicit second-layer exponents")->group(arch)->delimiter(',');
    app.add_option("--alpha-max", o.alpha_max, "Largest generated alpha")->group(arch)->capture_default_str();
    app.add_option("--beta-max", o.beta_max, "Largest generated beta")->group(arch)->capture_default_str();
    app.add_option("--rho-w", o.rho_w, "Output sphere radius")->group(arch)->capture_default_str();
    app.add_option("--rho-v", o.rho_v, "Middle sphere radius")->group(arch)->capture_default_str();
    app.add_option("--rho-u", o.rho_u, "Input sphere radius")->group(arch)->capture_default_str();
    app.add_option("--p-w", o.p_w, "Output norm exponent (default: min_p)")->group(arch);
    app.add_option("--p-v", o.p_v, "Middle norm exponent (default: min_p)")->group(arch);
    app.add_option("--p-u", o.p_u, "Input norm exponent (default: min_p)")->group(arch);
    app.add_option("--p-safety", o.p_safety, "Relative margin above the p bounds")->group(arch)->capture_default_str();
    app.add_option("--epsilon", o.epsilon, "Regularisation offset")->group(arch)->capture_default_str();

    auto* search = "Cross-validation";
    app.add_option("--budget", o.budget, "Random-search candidates")->group(search)->capture_default_str();
    app.add_option("--folds", o.folds, "Folds")->group(search)->capture_default_str();
    app.add_option("--test-fraction", o.test_fraction, "Held-out fraction (cv, benchmark)")
        ->group(search)
        ->check(CLI::Range(0.0, 0.9))
        ->capture_default_str();
    app.add_option("--n1-min", o.n1_min)->group(search);
    app.add_option("--n1-max", o.n1_max)->group(search);
    app.add_option("--n2-min", o.n2_min)->group(search);
    app.add_option("--n2-max", o.n2_max)->group(search);
    app.add_option("--search-alpha-max", o.search_alpha_max)->group(search);
    app.add_option("--search-beta-max", o.search_beta_max)->group(search);
    app.add_option("--search-rho-max", o.search_rho_max)->group(search);

    auto* bench = "Benchmark";
    app.add_option("--step-sizes", o.step_sizes, "SGD step sizes")->group(bench)->delimiter(',');
    app.add_option("--epochs", o.epochs, "SGD epochs")->group(bench)->capture_default_str();
    app.add_option("--batch-fraction", o.batch_fraction, "SGD batch fraction")->group(bench)->capture_default_str();
    app.add_option("--reference-tau", o.reference_tau, "Accuracy of the p* run")->group(bench)->capture_default_str();

    auto* certify = app.add_subcommand("certify", "Print the certificate matrix, rho(A) and verdict");
    auto* train = app.add_subcommand("train", "Train with the certified spectral method");
    auto* predict = app.add_subcommand("predict", "Predict classes with a saved model");
    auto* cv = app.add_subcommand("cv", "Random hyperparameter search with k-fold cross-validation");
    auto* benchmark = app.add_subcommand("benchmark", "Compare the spectral method with projected batch SGD");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*certify)
            return cmd_certify(o);
        if (*train)
            return cmd_train(o);
        if (*predict)
            return cmd_predict(o);
        if (*cv)
            return cmd_cv(o);
        if (*benchmark)
            return cmd_benchmark(o);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const nlsm::NotCertified& e) {
        std::cerr << "not certified: " << e.what() << "\n(use --force to train anyway)\n";
        return kNotCertified;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kRuntime;
    }
    return kUsage;
}
