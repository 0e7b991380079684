#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nlsm/numeric.hpp"

namespace nlsm {

/// Per-feature (min, max) recorded when a dataset was min-max scaled.
struct FeatureScaling {
    std::vector<std::pair<double, double>> ranges;

    bool empty() const { return ranges.empty(); }
};

/// Nonnegative classification data. Labels are 1-based class indices;
/// class_names[k - 1] is the original token of class k.
struct Dataset {
    Matrix features;
    std::vector<int> labels;
    int num_classes = 0;
    std::vector<std::string> feature_names;
    std::vector<std::string> class_names;
    FeatureScaling scaling;

    std::size_t size() const { return labels.size(); }
    std::size_t dim() const { return static_cast<std::size_t>(features.cols()); }
};

/// Throws InvalidArgument if any Dataset invariant is broken.
void validate(const Dataset& ds);

/// Raw header + rows of bare tokens.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(std::string_view name) const;
};

CsvTable read_csv(std::istream& in);

/// Builds a Dataset from a table. Labels are re-indexed densely to 1..K in
/// first-appearance order. Errors name the offending row (1-based, header
/// excluded) and column.
Dataset to_dataset(const CsvTable& table, std::string_view label_column);

Dataset load_csv(std::istream& in, std::string_view label_column);
Dataset load_csv_file(const std::filesystem::path& path, std::string_view label_column);

/// Writes features with max_digits10 precision so load_csv reproduces them exactly.
void write_csv(std::ostream& out, const Dataset& ds, std::string_view label_column = "label");

/// Maps each feature column affinely onto [0, 1]; constant columns map to 0.
Dataset scale_minmax(const Dataset& raw);

/// Reuses stored training ranges and clamps to [0, 1].
Dataset apply_scaling(const Dataset& raw, const FeatureScaling& scaling);
void apply_scaling_inplace(Matrix& features, const FeatureScaling& scaling);

/// max over rows of ||x^i||_q, q >= 1 or +inf.
double data_radius(const Dataset& ds, double q);

struct Fold {
    std::vector<std::size_t> train;
    std::vector<std::size_t> validation;
};

/// Stratified k-fold partition, deterministic given seed.
std::vector<Fold> kfold_split(const Dataset& ds, int k, std::uint64_t seed);

/// Stratified single split; `test_fraction` of every class goes to validation.
Fold holdout_split(const Dataset& ds, double test_fraction, std::uint64_t seed);

Dataset subset(const Dataset& ds, const std::vector<std::size_t>& rows);

}  // namespace nlsm
