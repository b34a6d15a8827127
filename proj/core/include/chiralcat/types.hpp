#pragma once

#include <complex>
#include <string_view>

#include <Eigen/Dense>

namespace chiralcat {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RowMajorCMatrix =
    Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr cplx kI{0.0, 1.0};
inline constexpr double kPi = 3.14159265358979323846;

/// Atomic measurement outcome |+> = (|e>+|g>)/sqrt2 or |-> = (|e>-|g>)/sqrt2.
enum class Branch { Plus, Minus };

constexpr double sign_of(Branch b) { return b == Branch::Plus ? 1.0 : -1.0; }

constexpr std::string_view to_string(Branch b) {
  return b == Branch::Plus ? "plus" : "minus";
}

/// Probabilities below this are treated as a branch that was never populated.
inline constexpr double kNullBranchThreshold = 1e-14;

}  // namespace chiralcat
