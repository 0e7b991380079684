#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "nlsm/data.hpp"
#include "nlsm/model.hpp"

namespace nlsm {

enum class Backend { serial, parallel };

/// Dataset + architecture the objective is evaluated on. Holds references
/// only; the dataset must outlive the context.
class ObjectiveContext {
public:
    ObjectiveContext(const Dataset& data, Architecture arch, Backend backend = Backend::parallel);

    const Dataset& data() const { return *data_; }
    const Architecture& arch() const { return arch_; }
    Backend backend() const { return backend_; }
    /// 0..n-1, the row set used for full-data evaluations.
    std::span<const std::size_t> all_rows() const { return all_rows_; }

private:
    const Dataset* data_;
    Architecture arch_;
    Backend backend_;
    std::vector<std::size_t> all_rows_;
};

/// Per-sample inner sums for one WeightPoint: hidden1(i, l) = (u x^i)_l,
/// hidden2(i, j) = (v (u x^i)^alpha)_j (depth 2 only), logits(i, r) = f_r(x^i).
struct ForwardCache {
    Matrix hidden1;
    Matrix hidden2;
    Matrix logits;
};

ForwardCache forward_cache(const ObjectiveContext& ctx, const WeightPoint& wp);

/// -f_y + log sum_j exp(f_j) with max-shift; y is 1-based.
double cross_entropy(int y, std::span<const double> f);

/// Mean over samples of [-L(y, f(x)) + sum_r f_r(x)] plus epsilon times the weight sum.
double phi(const ObjectiveContext& ctx, const WeightPoint& wp);

/// Exact gradient of phi, same shape as wp. Every entry is >= epsilon.
WeightPoint grad(const ObjectiveContext& ctx, const WeightPoint& wp);

/// Same objective restricted to a subset of rows (mean over that subset).
double phi_rows(const ObjectiveContext& ctx, const WeightPoint& wp, std::span<const std::size_t> rows);
WeightPoint grad_rows(const ObjectiveContext& ctx, const WeightPoint& wp, std::span<const std::size_t> rows);

}  // namespace nlsm
