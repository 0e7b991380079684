#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "nlsm/certify.hpp"
#include "nlsm/data.hpp"
#include "nlsm/model.hpp"

namespace nlsm {

inline constexpr int kModelFormatVersion = 1;

/// Everything needed to reproduce predictions: architecture, converged
/// weights, certificate, label mapping and the training-set scaling.
struct TrainedModel {
    int format_version = kModelFormatVersion;
    Architecture arch;
    WeightPoint weights;
    Certificate certificate;
    std::vector<std::string> class_names;
    std::vector<std::string> feature_names;
    std::string label_column;
    FeatureScaling scaling;
    // training summary
    int iterations = 0;
    double R = 0.0;
    double tau = 0.0;
    std::string stop_reason;
};

/// JSON document; doubles are written in shortest round-trip form so loading
/// restores them bit-exactly. Layout documented in docs/model_format.md.
void save_model(std::ostream& out, const TrainedModel& model);
TrainedModel load_model(std::istream& in);
void save_model_file(const std::filesystem::path& path, const TrainedModel& model);
TrainedModel load_model_file(const std::filesystem::path& path);

/// Scales raw rows with the stored training ranges (clamped to [0, 1]) and
/// returns 1-based class indices into model.class_names.
std::vector<int> predict_raw(const TrainedModel& model, const Matrix& raw_features);

/// Picks the model's feature columns out of a table by name.
Matrix feature_matrix(const TrainedModel& model, const CsvTable& table);

/// Fraction of rows of a labelled raw dataset classified correctly; labels are
/// matched to the model's classes by name.
double accuracy(const TrainedModel& model, const Dataset& raw);

}  // namespace nlsm
