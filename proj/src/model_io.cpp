#include "nlsm/model_io.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>

#include <json.hpp>

namespace nlsm {

using nlohmann::json;

namespace {

json matrix_to_json(const Matrix& m)
{
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const json& j, const char* what)
{
    if (!j.is_array())
        throw ParseError(std::string("model: '") + what + "' must be an array of rows");
    if (j.empty())
        return Matrix();
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = static_cast<Eigen::Index>(j.front().size());
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const auto& row = j[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
            throw ParseError(std::string("model: ragged matrix '") + what + "'");
        for (Eigen::Index c = 0; c < cols; ++c)
            m(i, c) = row[static_cast<std::size_t>(c)].get<double>();
    }
    return m;
}

// JSON has no inf/nan; null stands for a non-finite value.
json real(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }
double real_from(const json& j) { return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>(); }

json arch_to_json(const Architecture& a)
{
    json j = {{"depth", a.depth},     {"num_classes", a.num_classes}, {"input_dim", a.input_dim},
              {"alpha", a.alpha},     {"p_w", a.p_w},                 {"p_u", a.p_u},
              {"rho_w", a.rho_w},     {"rho_u", a.rho_u},             {"epsilon", a.epsilon}};
    if (a.depth == 2) {
        j["beta"] = a.beta;
        j["p_v"] = a.p_v;
        j["rho_v"] = a.rho_v;
    }
    return j;
}

Architecture arch_from_json(const json& j)
{
    Architecture a;
    a.depth = j.at("depth").get<int>();
    a.num_classes = j.at("num_classes").get<int>();
    a.input_dim = j.at("input_dim").get<int>();
    a.alpha = j.at("alpha").get<std::vector<double>>();
    a.p_w = j.at("p_w").get<double>();
    a.p_u = j.at("p_u").get<double>();
    a.rho_w = j.at("rho_w").get<double>();
    a.rho_u = j.at("rho_u").get<double>();
    a.epsilon = j.at("epsilon").get<double>();
    if (a.depth == 2) {
        a.beta = j.at("beta").get<std::vector<double>>();
        a.p_v = j.at("p_v").get<double>();
        a.rho_v = j.at("rho_v").get<double>();
    }
    validate(a);
    return a;
}

json constants_to_json(const BoundConstants& bc)
{
    return {{"rho_x", bc.rho_x}, {"rho_x_norm", bc.rho_x_norm}, {"xi1", bc.xi1},     {"xi2", bc.xi2},
            {"zeta1", bc.zeta1}, {"zeta2", bc.zeta2},           {"theta", bc.theta}, {"c_w", bc.c_w},
            {"c_v", bc.c_v},     {"c_u", bc.c_u},               {"alpha_inf", bc.alpha_inf},
            {"beta_inf", bc.beta_inf}};
}

BoundConstants constants_from_json(const json& j, BoundMode mode, int depth)
{
    BoundConstants bc;
    bc.mode = mode;
    bc.depth = depth;
    bc.rho_x = j.at("rho_x").get<double>();
    bc.rho_x_norm = j.at("rho_x_norm").get<double>();
    bc.xi1 = j.at("xi1").get<double>();
    bc.xi2 = j.at("xi2").get<double>();
    bc.zeta1 = j.at("zeta1").get<double>();
    bc.zeta2 = j.at("zeta2").get<double>();
    bc.theta = j.at("theta").get<double>();
    bc.c_w = j.at("c_w").get<double>();
    bc.c_v = j.at("c_v").get<double>();
    bc.c_u = j.at("c_u").get<double>();
    bc.alpha_inf = j.at("alpha_inf").get<double>();
    bc.beta_inf = j.at("beta_inf").get<double>();
    return bc;
}

}  // namespace

void save_model(std::ostream& out, const TrainedModel& m)
{
    json scaling = json::array();
    for (const auto& [lo, hi] : m.scaling.ranges)
        scaling.push_back({lo, hi});

    json weights = {{"w", matrix_to_json(m.weights.w)}, {"u", matrix_to_json(m.weights.u)}};
    if (m.arch.depth == 2)
        weights["v"] = matrix_to_json(m.weights.v);

    const auto& c = m.certificate;
    json doc = {
        {"format", "nlsm-model"},
        {"version", m.format_version},
        {"architecture", arch_to_json(m.arch)},
        {"weights", std::move(weights)},
        {"certificate",
         {{"mode", std::string(to_string(c.mode))},
          {"A", matrix_to_json(c.A)},
          {"rho_A", real(c.rho_A)},
          {"gamma", std::vector<double>(c.gamma.data(), c.gamma.data() + c.gamma.size())},
          {"valid", c.valid},
          {"constants", constants_to_json(c.constants)}}},
        {"labels", {{"column", m.label_column}, {"classes", m.class_names}}},
        {"features", {{"names", m.feature_names}, {"scaling", std::move(scaling)}}},
        {"training",
         {{"iterations", m.iterations}, {"R", real(m.R)}, {"tau", real(m.tau)}, {"stop_reason", m.stop_reason}}},
    };
    out << doc.dump(2) << '\n';
    if (!out)
        throw Error("model: write failed");
}

TrainedModel load_model(std::istream& in)
{
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw ParseError(std::string("model: ") + e.what());
    }
    try {
        if (doc.at("format").get<std::string>() != "nlsm-model")
            throw ParseError("model: not an nlsm model file");
        TrainedModel m;
        m.format_version = doc.at("version").get<int>();
        if (m.format_version != kModelFormatVersion)
            throw ParseError("model: unsupported format version " + std::to_string(m.format_version));
        m.arch = arch_from_json(doc.at("architecture"));

        const auto& w = doc.at("weights");
        m.weights.w = matrix_from_json(w.at("w"), "w");
        m.weights.u = matrix_from_json(w.at("u"), "u");
        if (m.arch.depth == 2)
            m.weights.v = matrix_from_json(w.at("v"), "v");
        check_shapes(m.arch, m.weights);

        const auto& c = doc.at("certificate");
        m.certificate.mode = parse_bound_mode(c.at("mode").get<std::string>());
        m.certificate.A = matrix_from_json(c.at("A"), "A");
        m.certificate.rho_A = real_from(c.at("rho_A"));
        const auto gamma = c.at("gamma").get<std::vector<double>>();
        m.certificate.gamma = Eigen::Map<const Vector>(gamma.data(), static_cast<Eigen::Index>(gamma.size()));
        m.certificate.valid = c.at("valid").get<bool>();
        m.certificate.constants = constants_from_json(c.at("constants"), m.certificate.mode, m.arch.depth);

        m.label_column = doc.at("labels").at("column").get<std::string>();
        m.class_names = doc.at("labels").at("classes").get<std::vector<std::string>>();
        m.feature_names = doc.at("features").at("names").get<std::vector<std::string>>();
        for (const auto& r : doc.at("features").at("scaling"))
            m.scaling.ranges.emplace_back(r.at(0).get<double>(), r.at(1).get<double>());
        if (static_cast<int>(m.feature_names.size()) != m.arch.input_dim ||
            static_cast<int>(m.scaling.ranges.size()) != m.arch.input_dim)
            throw ParseError("model: feature metadata does not match input dimension");

        const auto& t = doc.at("training");
        m.iterations = t.at("iterations").get<int>();
        m.R = real_from(t.at("R"));
        m.tau = real_from(t.at("tau"));
        m.stop_reason = t.at("stop_reason").get<std::string>();
        return m;
    } catch (const json::exception& e) {
        throw ParseError(std::string("model: ") + e.what());
    }
}

void save_model_file(const std::filesystem::path& path, const TrainedModel& model)
{
    std::ofstream out(path);
    if (!out)
        throw Error("cannot write '" + path.string() + "'");
    save_model(out, model);
}

TrainedModel load_model_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open '" + path.string() + "'");
    return load_model(in);
}

std::vector<int> predict_raw(const TrainedModel& model, const Matrix& raw_features)
{
    Matrix x = raw_features;
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        for (Eigen::Index j = 0; j < x.cols(); ++j)
            if (!(x(i, j) >= 0.0))
                throw InvalidArgument("predict: feature at row " + std::to_string(i + 1) + ", column " +
                                      std::to_string(j + 1) + " is negative or non-finite");
    apply_scaling_inplace(x, model.scaling);
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(x.rows()));
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        const auto row = x.row(i);
        const Vector f = forward(model.arch, model.weights, {row.data(), static_cast<std::size_t>(row.size())});
        out.push_back(predict(entries(f)));
    }
    return out;
}

Matrix feature_matrix(const TrainedModel& model, const CsvTable& table)
{
    std::vector<std::size_t> cols;
    for (const auto& name : model.feature_names)
        cols.push_back(table.column(name));
    Matrix x(static_cast<Eigen::Index>(table.rows.size()), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t i = 0; i < table.rows.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j) {
            const auto& token = table.rows[i][cols[j]];
            try {
                std::size_t used = 0;
                const double v = std::stod(token, &used);
                if (used != token.size() || !std::isfinite(v))
                    throw std::invalid_argument(token);
                x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
            } catch (const std::exception&) {
                throw ParseError("csv: row " + std::to_string(i + 1) + ", column '" + model.feature_names[j] +
                                 "': '" + token + "' is not a finite real");
            }
        }
    return x;
}

double accuracy(const TrainedModel& model, const Dataset& raw)
{
    if (raw.size() == 0)
        throw InvalidArgument("accuracy: empty dataset");
    const auto predicted = predict_raw(model, raw.features);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        const auto& truth = raw.class_names.at(static_cast<std::size_t>(raw.labels[i] - 1));
        if (model.class_names.at(static_cast<std::size_t>(predicted[i] - 1)) == truth)
            ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(raw.size());
}

}  // namespace nlsm
