#pragma once

// FFTW-backed transforms between full-lattice spectral coefficients and the
// physical grid x_m = 2*pi*m/n. Coefficients follow the unitary convention
// u(x) = (2*pi)^(-3/2) sum_xi u_hat(xi) e^{i xi.x}, so that
// ||u||_2^2 = sum_xi |u_hat(xi)|^2 over the torus.

#include <complex>
#include <memory>
#include <span>

#include "supercrit/lattice.hpp"

namespace supercrit::detail {

using Complex = std::complex<double>;

class SpectralTransform {
 public:
  explicit SpectralTransform(int n);
  ~SpectralTransform();
  SpectralTransform(const SpectralTransform&) = delete;
  SpectralTransform& operator=(const SpectralTransform&) = delete;

  /// Physical values of a Hermitian coefficient array. With derivative_axis in
  /// {0, 1, 2} the coefficients are multiplied by i*xi_axis first.
  void to_physical(std::span<const Complex> spectrum, std::span<double> grid, int derivative_axis = -1);

  /// Coefficients of a real grid function; the conjugate half is filled by symmetry.
  void to_spectral(std::span<const double> grid, std::span<Complex> spectrum);

  /// Coefficients of a real grid function at the listed in-band modes only.
  void to_spectral(std::span<const double> grid, std::span<const BandMode> modes, std::span<Complex> values);

  int n() const { return n_; }

  /// Per-thread cached instance; planning is serialized internally.
  static SpectralTransform& for_size(int n);

 private:
  struct Plans;
  int n_;
  std::unique_ptr<Plans> plans_;
};

}  // namespace supercrit::detail
