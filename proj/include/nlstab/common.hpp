#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace nlstab {

/// Points and matrices are stored in 3-vectors / 3x3 matrices for both n = 2
/// and n = 3. In two dimensions the third component is zero and only the
/// leading 2x2 block of a matrix is read.
using Point = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad input: violated precondition, out-of-range parameter, mismatched mesh.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Requested combination that the library does not provide (e.g. n = 2 for
/// the differentiated kernel data).
class Unsupported : public Error {
public:
    using Error::Error;
};

/// A law (gamma, G, drift, coefficient matrix) broke one of its admissibility
/// conditions at a point actually visited by a solver.
class LawViolation : public Error {
public:
    using Error::Error;
};

/// Linear algebra failure: singular factorization, non-SPD Gram matrix, ...
class SolverError : public Error {
public:
    using Error::Error;
};

class NonConvergence : public Error {
public:
    NonConvergence(const std::string& what, double last_residual)
        : Error(what + " (last residual " + std::to_string(last_residual) + ")"),
          last_residual_(last_residual)
    {
    }
    [[nodiscard]] double last_residual() const noexcept { return last_residual_; }

private:
    double last_residual_;
};

class ParseError : public Error {
public:
    using Error::Error;
};

#define NLSTAB_REQUIRE(cond, ExceptionType, msg) \
    do {                                         \
        if (!(cond)) throw ExceptionType(msg);   \
    } while (0)

} // namespace nlstab
