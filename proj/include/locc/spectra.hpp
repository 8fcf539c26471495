#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "locc/tensor_core.hpp"
#include "locc/types.hpp"

namespace locc {

/// Eigenvalue list sorted descending. Values in [-snap_tol, 0] are snapped
/// to zero on construction (round-off negatives from rank-deficient
/// states); genuinely negative eigenvalues of general Hermitian operators
/// are kept as-is. Comparisons pad the shorter spectrum with zeros; the
/// stored value is never padded.
class Spectrum {
 public:
  Spectrum() = default;
  explicit Spectrum(std::vector<double> values, double snap_tol = 1e-9);

  const std::vector<double>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t k) const { return values_[k]; }
  double sum() const;

  /// Prefix sums padded (with zeros) out to `len` entries.
  std::vector<double> prefix_sums(std::size_t len) const;

  /// True when this is a state spectrum: nonnegative values summing to 1.
  bool is_state(double tol = 1e-9) const;

  bool operator==(const Spectrum& other) const { return values_ == other.values_; }

 private:
  std::vector<double> values_;
};

/// Probability distribution over spectra.
struct WeightedSpectra {
  std::vector<std::pair<double, Spectrum>> pairs;
};

/// Spectrum of a Hermitian matrix (descending, tiny negatives snapped).
Spectrum spectrum_of(const ComplexMatrix& m, const Tolerances& tol = {});

/// a majorizes b: every prefix sum of a dominates the matching prefix sum
/// of b, up to tol.major slack.
bool majorizes(const Spectrum& a, const Spectrum& b, const Tolerances& tol = {});

/// c-majorization: prefix sums of a dominate those of b minus (1 - c).
/// c = 1 is plain majorization; c <= 0 holds vacuously for state spectra.
bool c_majorizes(const Spectrum& a, const Spectrum& b, double c, const Tolerances& tol = {});

/// Componentwise convex combination of spectra (after padding). Weights
/// must be nonnegative and sum to 1 within tol.trace.
Spectrum mix_spectra(const WeightedSpectra& w, const Tolerances& tol = {});

/// Componentwise sum after padding; used by the subadditivity check.
Spectrum add_spectra(const Spectrum& a, const Spectrum& b);

/// Ky Fan weight w_A(b) = sum_i <x_i|A|x_i> of a Hermitian operator over a
/// q-element orthonormal set (the columns of `basis`). The maximum over
/// all q-bases is the sum of the q largest eigenvalues.
double fan_weight(const ComplexMatrix& a, const ComplexMatrix& basis, const Tolerances& tol = {});

/// Sp(a) + Sp(b) majorizes Sp(a + b) for Hermitian a, b of equal side.
bool check_subadditivity(const ComplexMatrix& a, const ComplexMatrix& b,
                         const Tolerances& tol = {});

/// Sp(f^dag f) == Sp(f f^dag) elementwise within tol.eig.
bool check_conjugate_spectra(const ComplexMatrix& f, const Tolerances& tol = {});

}  // namespace locc
