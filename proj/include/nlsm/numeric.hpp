#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace nlsm {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Precondition or dimension violation by the caller.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

// Non-finite intermediate or an iteration that failed to converge.
class NumericError : public Error {
public:
    using Error::Error;
};

// Malformed CSV, model or config input.
class ParseError : public Error {
public:
    using Error::Error;
};

class NotCertified : public Error {
public:
    using Error::Error;
};

/// t^a for t >= 0 evaluated as exp(a ln t), with 0^0 = 1 and 0^a = 0 for a > 0.
double pow_nonneg(double t, double a);

/// p-norm over all entries; p >= 1 or +inf. Computed relative to the max
/// magnitude so that large exponents neither overflow nor underflow.
double pnorm(std::span<const double> x, double p);

/// Hölder conjugate p/(p-1) of p in (1, inf).
double holder_conjugate(double p);

/// max_i |ln a_i - ln b_i| over strictly positive entries.
double log_distance(std::span<const double> a, std::span<const double> b);

inline std::span<const double> entries(const Matrix& m) { return {m.data(), static_cast<std::size_t>(m.size())}; }
inline std::span<double> entries(Matrix& m) { return {m.data(), static_cast<std::size_t>(m.size())}; }
inline std::span<const double> entries(const Vector& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

}  // namespace nlsm
