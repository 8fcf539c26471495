#pragma once

#include <vector>

#include "locc/types.hpp"

namespace locc {

/// Ordered list of per-party Hilbert-space dimensions. Party 0 is the
/// leftmost (most significant) tensor factor, so a global basis index
/// decomposes as k = sum_i k_i * prod_{j>i} d_j.
class PartyLayout {
 public:
  explicit PartyLayout(std::vector<int> dims);

  int parties() const { return static_cast<int>(dims_.size()); }
  int dim(int party) const;
  int total_dim() const { return total_; }

  /// Product of the dimensions strictly left / right of `party`.
  int dim_before(int party) const;
  int dim_after(int party) const;

  /// Layout with one party removed (for nested partial traces).
  PartyLayout without(int party) const;

  const std::vector<int>& dims() const { return dims_; }
  bool operator==(const PartyLayout& other) const { return dims_ == other.dims_; }

 private:
  std::vector<int> dims_;
  int total_ = 1;
};

/// Report-style density-matrix check: hermiticity defect, smallest
/// eigenvalue and trace defect of a candidate matrix.
struct DensityReport {
  double herm_defect = 0.0;
  double min_eigenvalue = 0.0;
  double trace_defect = 0.0;
  bool pass(double tol) const {
    return herm_defect <= tol && min_eigenvalue >= -tol && trace_defect <= tol;
  }
};

DensityReport validate_density(const ComplexMatrix& rho);

/// A global mixed state: a Hermitian, weakly positive, trace-one matrix
/// over the full tensor product described by `layout`. The constructor
/// enforces the invariants (within tolerance) and throws ContractError
/// otherwise.
class GlobalState {
 public:
  GlobalState(PartyLayout layout, ComplexMatrix rho, const Tolerances& tol = {});

  const PartyLayout& layout() const { return layout_; }
  const ComplexMatrix& rho() const { return rho_; }

  /// Local mixed state of one party (partial trace over everyone else).
  ComplexMatrix local_state(int party) const;

 private:
  PartyLayout layout_;
  ComplexMatrix rho_;
};

/// Operator acting on a single party's factor.
struct LocalOperator {
  int party = 0;
  ComplexMatrix op;
};

/// Kronecker product a (x) b.
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

/// Partial trace keeping exactly one party: traces out every factor
/// except `keep` and returns the d_keep x d_keep result.
ComplexMatrix partial_trace(const ComplexMatrix& m, const PartyLayout& layout, int keep);

/// Traces out a single party, returning the matrix over the remaining
/// layout (see PartyLayout::without).
ComplexMatrix trace_out(const ComplexMatrix& m, const PartyLayout& layout, int party);

/// Embeds a local operator into the full space: id (x) ... (x) f.op (x) ... (x) id.
ComplexMatrix lift_local(const LocalOperator& f, const PartyLayout& layout);

/// Transforms a state by an arbitrary full-space operator and renormalizes:
/// (u rho u^dag) / Tr(u rho u^dag). Throws TransformError when the trace
/// vanishes (the state cannot be transformed).
GlobalState conjugate(const GlobalState& state, const ComplexMatrix& u,
                      const Tolerances& tol = {});

struct EigResult {
  RealVector values;      ///< real eigenvalues, ascending
  ComplexMatrix vectors;  ///< orthonormal eigenvectors as columns, matching order
};

/// Eigendecomposition of a Hermitian matrix. Inputs within `tol.herm` of
/// Hermitian are symmetrized as (m + m^dag)/2 first; anything further off
/// is rejected.
EigResult hermitian_eig(const ComplexMatrix& m, const Tolerances& tol = {});

/// Hermitian PSD square root: returns alpha with alpha * alpha == m.
/// Eigenvalues in [-tol.psd, 0] are clamped to zero; below that is an error.
ComplexMatrix psd_sqrt(const ComplexMatrix& m, const Tolerances& tol = {});

/// max|m - m^dag|, the hermiticity defect used by every contract check.
double hermiticity_defect(const ComplexMatrix& m);

/// Convenience: outer product |v><v| of a (not necessarily normalized) vector.
ComplexMatrix projector(const ComplexVector& v);

}  // namespace locc
