#include "nlsm/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

namespace nlsm {

namespace {

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

std::vector<std::string> split_line(std::string_view line)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.emplace_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
        if (comma == std::string_view::npos)
            break;
        start = comma + 1;
    }
    return out;
}

bool parse_real(std::string_view token, double& value)
{
    if (!token.empty() && token.front() == '+')
        token.remove_prefix(1);
    const auto* end = token.data() + token.size();
    const auto [ptr, ec] = std::from_chars(token.data(), end, value);
    return ec == std::errc{} && ptr == end && std::isfinite(value);
}

}  // namespace

void validate(const Dataset& ds)
{
    if (ds.size() == 0 || ds.dim() == 0)
        throw InvalidArgument("dataset must have n >= 1 rows and d >= 1 features");
    if (static_cast<std::size_t>(ds.features.rows()) != ds.size())
        throw InvalidArgument("dataset: feature rows and label count differ");
    if (ds.num_classes < 1)
        throw InvalidArgument("dataset: class count must be >= 1");
    for (int y : ds.labels)
        if (y < 1 || y > ds.num_classes)
            throw InvalidArgument("dataset: label " + std::to_string(y) + " outside 1.." +
                                  std::to_string(ds.num_classes));
    for (Eigen::Index i = 0; i < ds.features.rows(); ++i)
        for (Eigen::Index j = 0; j < ds.features.cols(); ++j)
            if (!(ds.features(i, j) >= 0.0) || !std::isfinite(ds.features(i, j)))
                throw InvalidArgument("dataset: feature at row " + std::to_string(i + 1) + ", column " +
                                      std::to_string(j + 1) + " is negative or non-finite");
}

std::size_t CsvTable::column(std::string_view name) const
{
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end())
        throw ParseError("csv: no column named '" + std::string(name) + "'");
    return static_cast<std::size_t>(it - header.begin());
}

CsvTable read_csv(std::istream& in)
{
    CsvTable table;
    std::string line;
    bool have_header = false;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty())
            continue;
        auto fields = split_line(line);
        if (!have_header) {
            std::set<std::string> seen;
            for (const auto& h : fields) {
                if (h.empty())
                    throw ParseError("csv: empty column name in header");
                if (!seen.insert(h).second)
                    throw ParseError("csv: duplicate column '" + h + "' in header");
            }
            table.header = std::move(fields);
            have_header = true;
            continue;
        }
        if (fields.size() != table.header.size())
            throw ParseError("csv: line " + std::to_string(line_no) + " has " + std::to_string(fields.size()) +
                             " fields, header has " + std::to_string(table.header.size()));
        table.rows.push_back(std::move(fields));
    }
    if (!have_header)
        throw ParseError("csv: missing header");
    return table;
}

Dataset to_dataset(const CsvTable& table, std::string_view label_column)
{
    if (table.rows.empty())
        throw ParseError("csv: table has no data rows");
    const std::size_t label_col = table.column(label_column);
    if (table.header.size() < 2)
        throw ParseError("csv: need at least one feature column besides the label");

    Dataset ds;
    for (std::size_t c = 0; c < table.header.size(); ++c)
        if (c != label_col)
            ds.feature_names.push_back(table.header[c]);

    const auto n = static_cast<Eigen::Index>(table.rows.size());
    const auto d = static_cast<Eigen::Index>(ds.feature_names.size());
    ds.features.resize(n, d);
    ds.labels.reserve(table.rows.size());
    std::map<std::string, int, std::less<>> index;

    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& row = table.rows[static_cast<std::size_t>(i)];
        Eigen::Index j = 0;
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c == label_col)
                continue;
            double value = 0.0;
            if (!parse_real(row[c], value))
                throw ParseError("csv: row " + std::to_string(i + 1) + ", column '" + table.header[c] +
                                 "': '" + row[c] + "' is not a finite real");
            if (value < 0.0)
                throw ParseError("csv: row " + std::to_string(i + 1) + ", column '" + table.header[c] +
                                 "': negative feature value " + row[c]);
            ds.features(i, j++) = value;
        }
        const auto& token = row[label_col];
        auto it = index.find(token);
        if (it == index.end()) {
            ds.class_names.push_back(token);
            it = index.emplace(token, static_cast<int>(ds.class_names.size())).first;
        }
        ds.labels.push_back(it->second);
    }
    ds.num_classes = static_cast<int>(ds.class_names.size());
    validate(ds);
    return ds;
}

Dataset load_csv(std::istream& in, std::string_view label_column)
{
    return to_dataset(read_csv(in), label_column);
}

Dataset load_csv_file(const std::filesystem::path& path, std::string_view label_column)
{
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open '" + path.string() + "'");
    return load_csv(in, label_column);
}

void write_csv(std::ostream& out, const Dataset& ds, std::string_view label_column)
{
    std::ostringstream buf;
    buf.precision(std::numeric_limits<double>::max_digits10);
    for (std::size_t j = 0; j < ds.dim(); ++j)
        buf << (j < ds.feature_names.size() ? ds.feature_names[j] : "x" + std::to_string(j + 1)) << ',';
    buf << label_column << '\n';
    for (std::size_t i = 0; i < ds.size(); ++i) {
        for (std::size_t j = 0; j < ds.dim(); ++j)
            buf << ds.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) << ',';
        const int y = ds.labels[i];
        if (static_cast<std::size_t>(y) <= ds.class_names.size())
            buf << ds.class_names[static_cast<std::size_t>(y - 1)];
        else
            buf << y;
        buf << '\n';
    }
    out << buf.str();
}

Dataset scale_minmax(const Dataset& raw)
{
    validate(raw);
    FeatureScaling scaling;
    for (Eigen::Index j = 0; j < raw.features.cols(); ++j)
        scaling.ranges.emplace_back(raw.features.col(j).minCoeff(), raw.features.col(j).maxCoeff());
    Dataset out = raw;
    apply_scaling_inplace(out.features, scaling);
    out.scaling = std::move(scaling);
    return out;
}

void apply_scaling_inplace(Matrix& features, const FeatureScaling& scaling)
{
    if (static_cast<std::size_t>(features.cols()) != scaling.ranges.size())
        throw InvalidArgument("scaling: feature count does not match stored ranges");
    for (Eigen::Index j = 0; j < features.cols(); ++j) {
        const auto [lo, hi] = scaling.ranges[static_cast<std::size_t>(j)];
        const double width = hi - lo;
        for (Eigen::Index i = 0; i < features.rows(); ++i) {
            double& x = features(i, j);
            x = width > 0.0 ? std::clamp((x - lo) / width, 0.0, 1.0) : 0.0;
        }
    }
}

Dataset apply_scaling(const Dataset& raw, const FeatureScaling& scaling)
{
    Dataset out = raw;
    apply_scaling_inplace(out.features, scaling);
    out.scaling = scaling;
    return out;
}

double data_radius(const Dataset& ds, double q)
{
    if (!(q >= 1.0))
        throw InvalidArgument("data_radius: norm exponent must be >= 1");
    double r = 0.0;
    for (Eigen::Index i = 0; i < ds.features.rows(); ++i) {
        const auto row = ds.features.row(i);
        r = std::max(r, pnorm({row.data(), static_cast<std::size_t>(row.size())}, q));
    }
    return r;
}

namespace {

// Per-class index lists, each shuffled with the seeded engine, classes in label order.
std::vector<std::vector<std::size_t>> shuffled_by_class(const Dataset& ds, std::uint64_t seed)
{
    std::vector<std::vector<std::size_t>> by_class(static_cast<std::size_t>(std::max(ds.num_classes, 1)));
    for (std::size_t i = 0; i < ds.size(); ++i)
        by_class[static_cast<std::size_t>(ds.labels[i] - 1)].push_back(i);
    std::mt19937_64 rng(seed);
    for (auto& members : by_class)
        std::shuffle(members.begin(), members.end(), rng);
    return by_class;
}

}  // namespace

std::vector<Fold> kfold_split(const Dataset& ds, int k, std::uint64_t seed)
{
    if (k < 2 || static_cast<std::size_t>(k) > ds.size())
        throw InvalidArgument("kfold_split: fold count must satisfy 2 <= k <= n");
    std::vector<std::vector<std::size_t>> fold_members(static_cast<std::size_t>(k));
    // Dealing class by class with one running counter keeps fold sizes within one of each other.
    std::size_t next = 0;
    for (const auto& members : shuffled_by_class(ds, seed))
        for (std::size_t idx : members)
            fold_members[next++ % static_cast<std::size_t>(k)].push_back(idx);

    std::vector<Fold> folds(static_cast<std::size_t>(k));
    for (std::size_t f = 0; f < folds.size(); ++f) {
        folds[f].validation = fold_members[f];
        std::sort(folds[f].validation.begin(), folds[f].validation.end());
        for (std::size_t g = 0; g < folds.size(); ++g)
            if (g != f)
                folds[f].train.insert(folds[f].train.end(), fold_members[g].begin(), fold_members[g].end());
        std::sort(folds[f].train.begin(), folds[f].train.end());
    }
    return folds;
}

Fold holdout_split(const Dataset& ds, double test_fraction, std::uint64_t seed)
{
    if (!(test_fraction > 0.0 && test_fraction < 1.0))
        throw InvalidArgument("holdout_split: test fraction must lie in (0, 1)");
    Fold split;
    for (const auto& members : shuffled_by_class(ds, seed)) {
        const auto n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(members.size())));
        split.validation.insert(split.validation.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(n_test));
        split.train.insert(split.train.end(), members.begin() + static_cast<std::ptrdiff_t>(n_test), members.end());
    }
    if (split.train.empty() || split.validation.empty())
        throw InvalidArgument("holdout_split: split leaves an empty side");
    std::sort(split.train.begin(), split.train.end());
    std::sort(split.validation.begin(), split.validation.end());
    return split;
}

Dataset subset(const Dataset& ds, const std::vector<std::size_t>& rows)
{
    Dataset out;
    out.features.resize(static_cast<Eigen::Index>(rows.size()), ds.features.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i] >= ds.size())
            throw InvalidArgument("subset: row index out of range");
        out.features.row(static_cast<Eigen::Index>(i)) = ds.features.row(static_cast<Eigen::Index>(rows[i]));
        out.labels.push_back(ds.labels[rows[i]]);
    }
    out.num_classes = ds.num_classes;
    out.feature_names = ds.feature_names;
    out.class_names = ds.class_names;
    out.scaling = ds.scaling;
    return out;
}

}  // namespace nlsm
