#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace locc {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Numerical tolerances used throughout the library. Every knob is
/// overridable from the CLI; the defaults are tuned for double precision
/// at desk scale (total dimension <= 64).
struct Tolerances {
  double herm = 1e-9;      ///< max|m - m^dag| allowed before a matrix is rejected as non-Hermitian
  double trace = 1e-9;     ///< |Tr(rho) - 1| allowed for density matrices
  double psd = 1e-9;       ///< eigenvalues in [-psd, 0] are snapped to 0; below -psd is an error
  double eig = 1e-9;       ///< reconstruction error allowed for eigendecompositions
  double prob = 1e-12;     ///< measurement branches with probability <= prob are pruned
  double major = 1e-9;     ///< slack on every prefix-sum comparison
  double complete = 1e-9;  ///< measurement completeness defect max|sum f^dag f - id|
  double degen = 1e-6;     ///< minimum eigenvalue gap for "nondegenerate"
};

/// Violated precondition or type invariant (bad shapes, non-Hermitian
/// input, incomplete measurement, ...).
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Dimension bookkeeping error: operator shape does not match the party
/// layout it is applied to.
class LayoutError : public ContractError {
 public:
  using ContractError::ContractError;
};

/// The requested transformation annihilates the state (the renormalizing
/// trace vanishes), so no post-state exists.
class TransformError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A solution-family condition fails; the message names the inequality.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace locc
