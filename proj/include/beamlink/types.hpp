#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace beamlink {

template <typename S>
using Vec3T = Eigen::Matrix<S, 3, 1>;
template <typename S>
using Mat3T = Eigen::Matrix<S, 3, 3>;
template <typename S>
using Vec6T = Eigen::Matrix<S, 6, 1>;

using Vec3 = Vec3T<double>;
using Mat3 = Mat3T<double>;
using Vec6 = Vec6T<double>;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

// Element-local vectors/matrices, capped at 4 nodes x 6 DOFs.
constexpr int kMaxElementDofs = 24;
using ElemVec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxElementDofs, 1>;
using ElemMat =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxElementDofs, kMaxElementDofs>;
using ElemMap = Eigen::Matrix<double, 6, Eigen::Dynamic, 0, 6, kMaxElementDofs>;

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Invalid model input (bad references, out-of-range parameters, ...).
struct ModelError : Error {
  using Error::Error;
};

/// Relative rotation of a coupled pair at or beyond the pi singularity.
struct SingularConfigurationError : Error {
  using Error::Error;
};

/// Closest-point projection failed or is ill-posed.
struct ProjectionError : Error {
  using Error::Error;
};

/// Newton solver did not reach the requested tolerance.
struct NonConvergenceError : Error {
  using Error::Error;
};

/// Linear solve of the assembled system failed.
struct LinearSolveError : Error {
  using Error::Error;
};

}  // namespace beamlink
