#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace bdris {

using cd = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kLn2 = 0.69314718055994530942;

/// Raised when an input violates a documented precondition.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when an iterative routine produces non-finite values.
class NumericalFailure : public std::runtime_error {
 public:
  explicit NumericalFailure(const std::string& what, int iteration = -1)
      : std::runtime_error(iteration >= 0 ? what + " (iteration " + std::to_string(iteration) + ")"
                                          : what),
        iteration_(iteration) {}

  int iteration() const noexcept { return iteration_; }

 private:
  int iteration_;
};

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

/// Largest entry modulus, max_ij |X_ij|. Used for every "infinity" residual in the solver.
template <typename Derived>
double max_abs(const Eigen::MatrixBase<Derived>& x) {
  return x.size() == 0 ? 0.0 : x.cwiseAbs().maxCoeff();
}

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& x) {
  return x.allFinite();
}

}  // namespace bdris
