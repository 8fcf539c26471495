#include "locc/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace locc {

Spectrum::Spectrum(std::vector<double> values, double snap_tol) : values_(std::move(values)) {
  for (double& v : values_) {
    if (v < 0.0 && v >= -snap_tol) v = 0.0;
  }
  std::stable_sort(values_.begin(), values_.end(), std::greater<double>());
}

double Spectrum::sum() const { return std::accumulate(values_.begin(), values_.end(), 0.0); }

std::vector<double> Spectrum::prefix_sums(std::size_t len) const {
  std::vector<double> out(len, 0.0);
  double acc = 0.0;
  for (std::size_t k = 0; k < len; ++k) {
    if (k < values_.size()) acc += values_[k];
    out[k] = acc;
  }
  return out;
}

bool Spectrum::is_state(double tol) const {
  if (values_.empty()) return false;
  if (std::abs(sum() - 1.0) > tol) return false;
  return values_.back() >= -tol;
}

Spectrum spectrum_of(const ComplexMatrix& m, const Tolerances& tol) {
  EigResult eig = hermitian_eig(m, tol);
  std::vector<double> vals(eig.values.data(), eig.values.data() + eig.values.size());
  return Spectrum(std::move(vals), tol.psd);
}

bool majorizes(const Spectrum& a, const Spectrum& b, const Tolerances& tol) {
  const std::size_t len = std::max(a.size(), b.size());
  const std::vector<double> pa = a.prefix_sums(len);
  const std::vector<double> pb = b.prefix_sums(len);
  for (std::size_t k = 0; k < len; ++k) {
    if (pa[k] < pb[k] - tol.major) return false;
  }
  return true;
}

bool c_majorizes(const Spectrum& a, const Spectrum& b, double c, const Tolerances& tol) {
  const std::size_t len = std::max(a.size(), b.size());
  const std::vector<double> pa = a.prefix_sums(len);
  const std::vector<double> pb = b.prefix_sums(len);
  for (std::size_t k = 0; k < len; ++k) {
    if (pa[k] < pb[k] - 1.0 + c - tol.major) return false;
  }
  return true;
}

Spectrum mix_spectra(const WeightedSpectra& w, const Tolerances& tol) {
  if (w.pairs.empty()) throw ContractError("mix_spectra needs at least one spectrum");
  double total = 0.0;
  std::size_t len = 0;
  for (const auto& [p, s] : w.pairs) {
    if (p < -tol.prob) throw ContractError("mixture weights must be nonnegative");
    total += p;
    len = std::max(len, s.size());
  }
  if (std::abs(total - 1.0) > tol.trace) {
    std::ostringstream msg;
    msg << "mixture weights sum to " << total << ", expected 1";
    throw ContractError(msg.str());
  }
  std::vector<double> mixed(len, 0.0);
  for (const auto& [p, s] : w.pairs) {
    for (std::size_t k = 0; k < s.size(); ++k) mixed[k] += p * s[k];
  }
  // Componentwise mixes of descending sequences stay descending.
  return Spectrum(std::move(mixed), tol.psd);
}

Spectrum add_spectra(const Spectrum& a, const Spectrum& b) {
  const std::size_t len = std::max(a.size(), b.size());
  std::vector<double> out(len, 0.0);
  for (std::size_t k = 0; k < len; ++k) {
    out[k] = (k < a.size() ? a[k] : 0.0) + (k < b.size() ? b[k] : 0.0);
  }
  return Spectrum(std::move(out), 0.0);
}

double fan_weight(const ComplexMatrix& a, const ComplexMatrix& basis, const Tolerances& tol) {
  if (a.rows() != a.cols()) throw ContractError("fan_weight requires a square operator");
  if (hermiticity_defect(a) > tol.herm) throw ContractError("fan_weight requires a Hermitian operator");
  if (basis.rows() != a.rows() || basis.cols() < 1 || basis.cols() > basis.rows()) {
    throw ContractError("basis must be n x q with 1 <= q <= n");
  }
  ComplexMatrix gram = basis.adjoint() * basis;
  const double defect =
      (gram - ComplexMatrix::Identity(basis.cols(), basis.cols())).cwiseAbs().maxCoeff();
  if (defect > 1e-9) {
    std::ostringstream msg;
    msg << "basis vectors are not orthonormal: Gram defect " << defect;
    throw ContractError(msg.str());
  }
  return (basis.adjoint() * a * basis).trace().real();
}

bool check_subadditivity(const ComplexMatrix& a, const ComplexMatrix& b, const Tolerances& tol) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw LayoutError("subadditivity check requires operators of equal side");
  }
  Spectrum sum = add_spectra(spectrum_of(a, tol), spectrum_of(b, tol));
  return majorizes(sum, spectrum_of(a + b, tol), tol);
}

bool check_conjugate_spectra(const ComplexMatrix& f, const Tolerances& tol) {
  if (f.rows() != f.cols()) throw ContractError("check_conjugate_spectra requires a square operator");
  Spectrum left = spectrum_of(f.adjoint() * f, tol);
  Spectrum right = spectrum_of(f * f.adjoint(), tol);
  for (std::size_t k = 0; k < left.size(); ++k) {
    if (std::abs(left[k] - right[k]) > tol.eig) return false;
  }
  return true;
}

}  // namespace locc
