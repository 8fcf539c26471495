#include "locc/tensor_core.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>

namespace locc {

PartyLayout::PartyLayout(std::vector<int> dims) : dims_(std::move(dims)) {
  if (dims_.empty()) throw LayoutError("layout needs at least one party");
  for (int d : dims_) {
    if (d < 1) throw LayoutError("party dimensions must be >= 1");
    total_ *= d;
  }
}

int PartyLayout::dim(int party) const {
  if (party < 0 || party >= parties()) throw LayoutError("party index out of range");
  return dims_[static_cast<std::size_t>(party)];
}

int PartyLayout::dim_before(int party) const {
  if (party < 0 || party >= parties()) throw LayoutError("party index out of range");
  int p = 1;
  for (int j = 0; j < party; ++j) p *= dims_[static_cast<std::size_t>(j)];
  return p;
}

int PartyLayout::dim_after(int party) const {
  if (party < 0 || party >= parties()) throw LayoutError("party index out of range");
  int p = 1;
  for (int j = party + 1; j < parties(); ++j) p *= dims_[static_cast<std::size_t>(j)];
  return p;
}

PartyLayout PartyLayout::without(int party) const {
  if (party < 0 || party >= parties()) throw LayoutError("party index out of range");
  if (parties() == 1) throw LayoutError("cannot remove the last party from a layout");
  std::vector<int> rest;
  rest.reserve(dims_.size() - 1);
  for (int j = 0; j < parties(); ++j) {
    if (j != party) rest.push_back(dims_[static_cast<std::size_t>(j)]);
  }
  return PartyLayout(std::move(rest));
}

double hermiticity_defect(const ComplexMatrix& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

ComplexMatrix projector(const ComplexVector& v) { return v * v.adjoint(); }

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

namespace {

void check_square_total(const ComplexMatrix& m, const PartyLayout& layout) {
  if (m.rows() != m.cols() || m.rows() != layout.total_dim()) {
    std::ostringstream msg;
    msg << "matrix is " << m.rows() << "x" << m.cols() << " but layout has total dimension "
        << layout.total_dim();
    throw LayoutError(msg.str());
  }
}

}  // namespace

ComplexMatrix partial_trace(const ComplexMatrix& m, const PartyLayout& layout, int keep) {
  check_square_total(m, layout);
  const int d = layout.dim(keep);
  const int left = layout.dim_before(keep);
  const int right = layout.dim_after(keep);
  ComplexMatrix out = ComplexMatrix::Zero(d, d);
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) {
      Complex sum = 0.0;
      for (int l = 0; l < left; ++l) {
        for (int r = 0; r < right; ++r) {
          const int row = (l * d + a) * right + r;
          const int col = (l * d + b) * right + r;
          sum += m(row, col);
        }
      }
      out(a, b) = sum;
    }
  }
  return out;
}

ComplexMatrix trace_out(const ComplexMatrix& m, const PartyLayout& layout, int party) {
  check_square_total(m, layout);
  const int d = layout.dim(party);
  const int left = layout.dim_before(party);
  const int right = layout.dim_after(party);
  const int rest = left * right;
  ComplexMatrix out = ComplexMatrix::Zero(rest, rest);
  for (int lr = 0; lr < left; ++lr) {
    for (int rr = 0; rr < right; ++rr) {
      for (int lc = 0; lc < left; ++lc) {
        for (int rc = 0; rc < right; ++rc) {
          Complex sum = 0.0;
          for (int k = 0; k < d; ++k) {
            sum += m((lr * d + k) * right + rr, (lc * d + k) * right + rc);
          }
          out(lr * right + rr, lc * right + rc) = sum;
        }
      }
    }
  }
  return out;
}

ComplexMatrix lift_local(const LocalOperator& f, const PartyLayout& layout) {
  const int d = layout.dim(f.party);
  if (f.op.rows() != d || f.op.cols() != d) {
    std::ostringstream msg;
    msg << "operator for party " << f.party << " is " << f.op.rows() << "x" << f.op.cols()
        << ", expected " << d << "x" << d;
    throw LayoutError(msg.str());
  }
  const int left = layout.dim_before(f.party);
  const int right = layout.dim_after(f.party);
  ComplexMatrix lifted = kron(ComplexMatrix::Identity(left, left), f.op);
  return kron(lifted, ComplexMatrix::Identity(right, right));
}

EigResult hermitian_eig(const ComplexMatrix& m, const Tolerances& tol) {
  if (m.rows() != m.cols()) throw ContractError("hermitian_eig requires a square matrix");
  const double defect = hermiticity_defect(m);
  if (defect > tol.herm) {
    std::ostringstream msg;
    msg << "matrix is not Hermitian: defect " << defect << " exceeds " << tol.herm;
    throw ContractError(msg.str());
  }
  // Symmetrize to suppress round-off asymmetry before handing to the solver.
  ComplexMatrix sym = 0.5 * (m + ComplexMatrix(m.adjoint()));
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym);
  if (solver.info() != Eigen::Success) throw ContractError("eigendecomposition failed");
  return EigResult{solver.eigenvalues(), solver.eigenvectors()};
}

ComplexMatrix psd_sqrt(const ComplexMatrix& m, const Tolerances& tol) {
  EigResult eig = hermitian_eig(m, tol);
  RealVector roots(eig.values.size());
  for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
    double v = eig.values[i];
    if (v < -tol.psd) {
      std::ostringstream msg;
      msg << "matrix is not PSD: eigenvalue " << v << " below -" << tol.psd;
      throw ContractError(msg.str());
    }
    roots[i] = std::sqrt(std::max(v, 0.0));
  }
  const ComplexVector croots = roots.cast<Complex>();
  return eig.vectors * croots.asDiagonal() * eig.vectors.adjoint();
}

DensityReport validate_density(const ComplexMatrix& rho) {
  DensityReport report;
  if (rho.rows() != rho.cols()) throw ContractError("density candidate must be square");
  report.herm_defect = hermiticity_defect(rho);
  report.trace_defect = std::abs(rho.trace() - Complex(1.0, 0.0));
  ComplexMatrix sym = 0.5 * (rho + ComplexMatrix(rho.adjoint()));
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym);
  report.min_eigenvalue = solver.eigenvalues().minCoeff();
  return report;
}

GlobalState::GlobalState(PartyLayout layout, ComplexMatrix rho, const Tolerances& tol)
    : layout_(std::move(layout)), rho_(std::move(rho)) {
  if (rho_.rows() != rho_.cols() || rho_.rows() != layout_.total_dim()) {
    std::ostringstream msg;
    msg << "state matrix is " << rho_.rows() << "x" << rho_.cols()
        << " but layout has total dimension " << layout_.total_dim();
    throw LayoutError(msg.str());
  }
  DensityReport report = validate_density(rho_);
  if (report.herm_defect > tol.herm) {
    std::ostringstream msg;
    msg << "state is not Hermitian: defect " << report.herm_defect;
    throw ContractError(msg.str());
  }
  if (report.min_eigenvalue < -tol.psd) {
    std::ostringstream msg;
    msg << "state is not weakly positive: min eigenvalue " << report.min_eigenvalue;
    throw ContractError(msg.str());
  }
  if (report.trace_defect > tol.trace) {
    std::ostringstream msg;
    msg << "state trace is off by " << report.trace_defect;
    throw ContractError(msg.str());
  }
}

ComplexMatrix GlobalState::local_state(int party) const {
  return partial_trace(rho_, layout_, party);
}

GlobalState conjugate(const GlobalState& state, const ComplexMatrix& u, const Tolerances& tol) {
  if (u.rows() != u.cols() || u.rows() != state.layout().total_dim()) {
    throw LayoutError("conjugating operator does not match the state's total dimension");
  }
  ComplexMatrix transformed = u * state.rho() * u.adjoint();
  const double norm = transformed.trace().real();
  if (norm <= tol.prob) {
    throw TransformError("state cannot be transformed: renormalizing trace vanishes");
  }
  return GlobalState(state.layout(), transformed / norm, tol);
}

}  // namespace locc
