#pragma once

/// @file spectral_field.hpp
/// @brief Real 3-component vector fields on the periodic torus held as Fourier
/// coefficients, with sharp frequency masks, Leray projection, norms, and the
/// dealiased convection term.
///
/// Normalization: u(x) = (2*pi)^(-3/2) sum_xi u_hat(xi) e^{i xi.x}, so Parseval
/// reads ||u||_2^2 = sum_xi |u_hat(xi)|^2 with no volume factor.

#include <array>
#include <complex>
#include <span>
#include <vector>

#include "supercrit/lattice.hpp"
#include "supercrit/shell_profile.hpp"

namespace supercrit {

using Complex = std::complex<double>;

class SpectralField {
 public:
  explicit SpectralField(Lattice lattice);

  const Lattice& lattice() const { return lattice_; }

  std::span<Complex> component(int c) { return {data_.data() + c * lattice_.size(), lattice_.size()}; }
  std::span<const Complex> component(int c) const {
    return {data_.data() + c * lattice_.size(), lattice_.size()};
  }
  Complex& operator()(int c, std::size_t flat) { return data_[c * lattice_.size() + flat]; }
  const Complex& operator()(int c, std::size_t flat) const { return data_[c * lattice_.size() + flat]; }

  /// All 3 * n^3 coefficients, component-major.
  std::span<Complex> data() { return data_; }
  std::span<const Complex> data() const { return data_; }

  SpectralField& operator+=(const SpectralField& other);
  SpectralField& operator-=(const SpectralField& other);
  SpectralField& operator*=(double factor);

  friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
  friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
  friend SpectralField operator*(double s, SpectralField a) { return a *= s; }

  /// Bitwise coefficient equality on the same lattice.
  friend bool operator==(const SpectralField& a, const SpectralField& b) {
    return a.lattice_ == b.lattice_ && a.data_ == b.data_;
  }

 private:
  Lattice lattice_;
  std::vector<Complex> data_;
};

/// Grid values at x_m = 2*pi*m/n, row-major over (x1, x2, x3).
struct PhysicalField {
  int n = 0;
  std::array<std::vector<double>, 3> components;
};

PhysicalField to_physical(const SpectralField& u);
SpectralField from_physical(const PhysicalField& grid, const Lattice& lattice);
/// (2*pi/n)^3-weighted grid quadrature of |u|^2, square-rooted.
double physical_l2_norm(const PhysicalField& grid);

/// Zeroes every coefficient outside the mask.
SpectralField apply_mask(const SpectralField& u, const BandMask& mask);

/// sigma_j = ||apply_mask(u, dyadic(j))||_2 for every nonempty shell.
ShellProfile decompose_shells(const SpectralField& u);

/// u_hat - xi (xi . u_hat) / |xi|^2 for xi != 0.
SpectralField leray_project(const SpectralField& u);

double norm_l2(const SpectralField& u);
/// Homogeneous weight |xi|^(2s) (mean mode skipped unless s == 0) or (1 + |xi|^2)^s.
double norm_hs(const SpectralField& u, double s, bool homogeneous);
/// ||grad u||_2.
double gradient_norm_l2(const SpectralField& u);

struct SupNorms {
  double value = 0.0;     ///< max_x |u(x)|
  double gradient = 0.0;  ///< max_x |grad u(x)| (Frobenius)
};

/// Grid maxima of |u| and |grad u|; lower bounds on the true suprema.
SupNorms sup_norms(const SpectralField& u);
double sup_norm(const SpectralField& u);
double sup_gradient_norm(const SpectralField& u);

/// (u . grad) w, pseudo-spectrally with sharp truncation at the dealias radius.
/// Both inputs must be band-limited; u is expected to be divergence-free.
SpectralField convection(const SpectralField& u, const SpectralField& w);
/// div(u (x) u), equal to (u . grad) u for divergence-free u at 9 transforms
/// instead of 15.
SpectralField self_convection(const SpectralField& u);

/// Re sum_xi conj(u_hat) . w_hat.
double inner_product(const SpectralField& u, const SpectralField& w);

/// max_xi |xi . u_hat(xi)| / |xi|, relative to max_xi |u_hat(xi)|.
double divergence_indicator(const SpectralField& u);
/// max_xi |u_hat(-xi) - conj(u_hat(xi))| relative to max |u_hat|.
double hermitian_defect(const SpectralField& u);
/// Every coefficient at |xi| >= dealias radius is exactly zero.
bool is_band_limited(const SpectralField& u);

/// Copies coefficients onto another lattice, dropping modes it cannot hold.
/// Source Nyquist modes are dropped.
SpectralField resample(const SpectralField& u, const Lattice& target);

}  // namespace supercrit
