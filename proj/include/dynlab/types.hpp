#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace dynlab {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using Complex = std::complex<double>;

/// Input violates a documented precondition (bad chain, wrong dimensions, ...).
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A factorisation or solve that should succeed for valid inputs did not.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Selects the OpenMP kernel driver or the serial reference driver.
/// Both produce bit-identical results for the same seed.
enum class Exec { serial, parallel };

}  // namespace dynlab
