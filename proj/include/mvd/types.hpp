#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace mvd {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;

inline constexpr double kPi = 3.14159265358979323846;

// Bad input: wrong dimensions, malformed files, out-of-range parameters.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// The numerics could not produce a result (rank-zero input, dependent set).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Inner product aᴴb.
inline cplx inner(const CVector& a, const CVector& b) { return a.dot(b); }

// |aᴴb| / (‖a‖‖b‖); zero if either vector is zero.
double matching_score(const CVector& a, const CVector& b);

}  // namespace mvd
