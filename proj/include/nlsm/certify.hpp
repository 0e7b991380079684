#pragma once

#include <span>
#include <string_view>

#include "nlsm/data.hpp"
#include "nlsm/model.hpp"

namespace nlsm {

/// loose: closed-form sums with the 1-norm data radius.
/// tight: Psi-based bounds with the data radius in the dual norm p_u'.
enum class BoundMode { loose, tight };

std::string_view to_string(BoundMode mode);
BoundMode parse_bound_mode(std::string_view text);

/// Constants entering the certificate matrix. c_w, c_v, c_u are the values
/// actually used by build_A (in loose mode they equal xi/zeta); the remaining
/// fields are filled where the mode and depth define them and are 0 otherwise.
struct BoundConstants {
    BoundMode mode = BoundMode::loose;
    int depth = 1;
    double rho_x = 0.0;
    double rho_x_norm = 1.0;  // exponent rho_x was measured under
    double xi1 = 0.0, xi2 = 0.0;      // one layer, loose
    double zeta1 = 0.0, zeta2 = 0.0;  // two layers, loose
    double theta = 0.0;               // two layers, tight
    double c_w = 0.0, c_v = 0.0, c_u = 0.0;
    double alpha_inf = 0.0, beta_inf = 0.0;
};

/// Psi^alpha_{p,q}(delta, t) with J = {l : alpha_l p <= q}.
double psi(std::span<const double> alpha, std::span<const double> delta, double t, double p, double q);

/// Data radius for a mode: 1-norm (loose) or p_u'-norm (tight).
double mode_data_radius(const Architecture& arch, const Dataset& ds, BoundMode mode);

BoundConstants bounds(const Architecture& arch, const Dataset& ds, BoundMode mode);
/// rho_x must already be measured under the norm the mode requires.
BoundConstants bounds(const Architecture& arch, double rho_x, BoundMode mode);

/// Closed-form (K+1) or (K+2) square certificate matrix.
Matrix build_A(const Architecture& arch, const BoundConstants& bc);

/// Spectral radius of an entrywise positive square matrix by power iteration
/// bracketed with Collatz-Wielandt ratios; relative bracket width <= 1e-12.
double spectral_radius(const Matrix& a);

/// Left Perron vector (eigenvector of A^T), positive, max entry 1.
Vector perron_vector(const Matrix& a);

/// [min_i (A^T v)_i / v_i, max_i (A^T v)_i / v_i] for a positive v.
std::pair<double, double> collatz_wielandt_bracket(const Matrix& a, const Vector& v);

struct Certificate {
    Matrix A;
    double rho_A = 0.0;
    Vector gamma;
    BoundMode mode = BoundMode::loose;
    bool valid = false;
    BoundConstants constants;
};

Certificate certify(const Architecture& arch, const BoundConstants& bc);
Certificate certify(const Architecture& arch, const Dataset& ds, BoundMode mode);

struct PExponents {
    double p_w = 0.0;
    double p_v = 0.0;  // depth 2 only
    double p_u = 0.0;
};

inline constexpr double kDefaultPSafety = 1e-3;

/// Explicit exponents that make the loose certificate contract. `loose` must
/// come from bounds(..., BoundMode::loose); thresholds are multiplied by
/// 1 + safety so the strict inequalities survive rounding.
PExponents min_p(const Architecture& arch, const BoundConstants& loose, double safety = kDefaultPSafety);

/// Copy of arch with p's replaced by min_p on ds.
Architecture with_min_p(Architecture arch, const Dataset& ds, double safety = kDefaultPSafety);

}  // namespace nlsm
