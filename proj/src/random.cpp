#include "locc/random.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>

namespace locc {

ComplexMatrix random_gaussian(Rng& rng, int rows, int cols) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  ComplexMatrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = Complex(gauss(rng), gauss(rng));
  return m;
}

ComplexMatrix random_unitary(Rng& rng, int dim) {
  ComplexMatrix g = random_gaussian(rng, dim, dim);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ();
  ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Fix the column phases so the distribution does not depend on QR conventions.
  for (int j = 0; j < dim; ++j) {
    Complex d = r(j, j);
    double mod = std::abs(d);
    if (mod > 0.0) q.col(j) *= d / mod;
  }
  return q;
}

ComplexMatrix random_density(Rng& rng, int dim) {
  ComplexMatrix g = random_gaussian(rng, dim, dim);
  ComplexMatrix rho = g * g.adjoint();
  return rho / rho.trace().real();
}

ComplexMatrix random_hermitian(Rng& rng, int dim) {
  ComplexMatrix g = random_gaussian(rng, dim, dim);
  return 0.5 * (g + ComplexMatrix(g.adjoint()));
}

ComplexMatrix random_q_basis(Rng& rng, int dim, int q) {
  return random_unitary(rng, dim).leftCols(q);
}

std::vector<ComplexMatrix> random_measurement_ops(Rng& rng, int dim, int m) {
  std::vector<ComplexMatrix> ops;
  ops.reserve(static_cast<std::size_t>(m));
  ComplexMatrix total = ComplexMatrix::Zero(dim, dim);
  for (int j = 0; j < m; ++j) {
    ops.push_back(random_gaussian(rng, dim, dim));
    total += ops.back().adjoint() * ops.back();
  }
  // total is PSD and almost surely invertible; normalize to completeness.
  ComplexMatrix root = psd_sqrt(total, Tolerances{.herm = 1e-6, .psd = 1e-6});
  ComplexMatrix inv_root = root.inverse();
  for (ComplexMatrix& op : ops) op = op * inv_root;
  return ops;
}

Spectrum random_state_spectrum(Rng& rng, int len) {
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> vals(static_cast<std::size_t>(len));
  double total = 0.0;
  for (double& v : vals) {
    v = expo(rng);
    total += v;
  }
  for (double& v : vals) v /= total;
  return Spectrum(std::move(vals));
}

}  // namespace locc
