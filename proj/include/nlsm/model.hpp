#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "nlsm/numeric.hpp"

namespace nlsm {

/// Fixed hyperparameters of a one- or two-hidden-layer generalized polynomial
/// network. For depth 1 the beta/p_v/rho_v fields are ignored.
struct Architecture {
    int depth = 1;
    int num_classes = 2;  // K
    int input_dim = 1;    // d
    std::vector<double> alpha;  // exponents of the first hidden layer (n1 entries)
    std::vector<double> beta;   // exponents of the second hidden layer (n2 entries)
    double p_w = 2.0;
    double p_v = 2.0;
    double p_u = 2.0;
    double rho_w = 1.0;
    double rho_v = 1.0;
    double rho_u = 1.0;
    double epsilon = 1e-4;

    int n1() const { return static_cast<int>(alpha.size()); }
    int n2() const { return static_cast<int>(beta.size()); }
    /// Width of the layer feeding the output units.
    int top_width() const { return depth == 2 ? n2() : n1(); }
    /// K output rows, then v (depth 2), then u.
    int num_blocks() const { return num_classes + depth; }

    double alpha_inf() const;
    double beta_inf() const;
};

/// Throws InvalidArgument on a broken invariant (exponents < 1 or repeated,
/// p <= 1, non-positive radius or epsilon, bad depth).
void validate(const Architecture& arch);

/// Point of the product of positive spheres (or balls). w is K x top_width,
/// v is n2 x n1 (empty for depth 1), u is n1 x d.
struct WeightPoint {
    Matrix w;
    Matrix v;
    Matrix u;

    int depth() const { return v.size() > 0 ? 2 : 1; }
    int num_blocks() const { return static_cast<int>(w.rows()) + depth(); }

    /// Block b: rows of w first, then v, then u. Each block is contiguous.
    std::span<double> block(int b);
    std::span<const double> block(int b) const;

    double min_entry() const;
    bool interior() const { return min_entry() > 0.0; }
};

/// Zero point with the shapes required by arch.
WeightPoint zeros_like(const Architecture& arch);

/// Throws InvalidArgument unless wp has the shapes arch requires.
void check_shapes(const Architecture& arch, const WeightPoint& wp);

/// Radius and norm exponent of block b.
double block_radius(const Architecture& arch, int b);
double block_exponent(const Architecture& arch, int b);

/// Rescales every block onto its sphere.
void normalize_to_spheres(const Architecture& arch, WeightPoint& wp);

/// Largest relative deviation of a block norm from its radius.
double sphere_residual(const Architecture& arch, const WeightPoint& wp);

/// Max-norm of the entrywise difference over all blocks.
double max_abs_difference(const WeightPoint& a, const WeightPoint& b);

/// Sum of every weight entry (the coefficient of epsilon in the objective).
double weight_sum(const WeightPoint& wp);

/// Hidden activations of one sample. hidden1 = (ux)_l, hidden2 = (v (ux)^alpha)_j.
struct Activations {
    Vector hidden1;
    Vector hidden2;
    Vector output;
};

Activations forward_activations(const Architecture& arch, const WeightPoint& wp, std::span<const double> x);

/// Network outputs f_r(x), r = 1..K (stored 0-based).
Vector forward(const Architecture& arch, const WeightPoint& wp, std::span<const double> x);

/// 1-based argmax, ties to the lowest index.
int predict(std::span<const double> logits);

/// n distinct, strictly increasing exponents in [1, alpha_max] from a
/// jittered uniform grid; deterministic given seed.
std::vector<double> make_alpha(int n, double alpha_max, std::uint64_t seed);

}  // namespace nlsm
