#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace rgr {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Thrown when input data contains NaN/Inf or is otherwise unusable.
struct InvalidDataError : std::runtime_error {
    explicit InvalidDataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Thrown when an iterative kernel (Newton, PDE step, objective probe) fails.
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

// Thrown when no constraint-satisfying iterate can be produced.
struct InfeasibleError : std::runtime_error {
    explicit InfeasibleError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace rgr
