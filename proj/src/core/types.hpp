#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace rhomb {

using Vec4 = Eigen::Matrix<double, 4, 1>;
using Vec8 = Eigen::Matrix<double, 8, 1>;
using Mat4 = Eigen::Matrix<double, 4, 4>;
using Mat8 = Eigen::Matrix<double, 8, 8>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Error hierarchy. The C API maps each type onto a status code.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Evaluation outside the domain of a Hamiltonian (total collapse, or a
// binary collision that the regularization does not remove).
struct DomainError : Error {
  using Error::Error;
};

struct InvalidArgument : Error {
  using Error::Error;
};

struct ConvergenceError : Error {
  using Error::Error;
};

// The integrator could not meet its tolerance above the minimum step.
struct StepUnderflow : Error {
  using Error::Error;
};

// A computed monodromy factor violates a structural identity that holds
// for any correctly converged orbit.
struct StructuralError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

// Mass of the bodies on the y-axis; the x-axis pair has unit mass.
class MassRatio {
 public:
  explicit MassRatio(double m) : m_(m) {
    if (!(m > 0.0 && m <= 1.0)) {
      throw InvalidArgument("mass ratio must satisfy 0 < m <= 1, got " +
                            std::to_string(m));
    }
  }
  double value() const noexcept { return m_; }

 private:
  double m_;
};

// Component indices of the regularized 2DF state (Q1, Q2, P1, P2).
enum Idx2 : int { kQ1 = 0, kQ2 = 1, kP1 = 2, kP2 = 3 };

}  // namespace rhomb
