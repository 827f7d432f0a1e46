#include "fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

namespace supercrit::detail {
namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

const double kToPhysical = std::pow(2.0 * std::numbers::pi, -1.5);

}  // namespace

struct SpectralTransform::Plans {
  double* real = nullptr;
  fftw_complex* half = nullptr;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;

  ~Plans() {
    std::lock_guard lock(planner_mutex());
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
    fftw_free(real);
    fftw_free(half);
  }
};

SpectralTransform::SpectralTransform(int n) : n_(n), plans_(std::make_unique<Plans>()) {
  const std::size_t grid = static_cast<std::size_t>(n) * n * n;
  const std::size_t half = static_cast<std::size_t>(n) * n * (n / 2 + 1);
  plans_->real = fftw_alloc_real(grid);
  plans_->half = fftw_alloc_complex(half);
  // FFTW_ESTIMATE keeps the plan, and hence the rounding, identical across runs.
  std::lock_guard lock(planner_mutex());
  plans_->forward = fftw_plan_dft_r2c_3d(n, n, n, plans_->real, plans_->half, FFTW_ESTIMATE);
  plans_->backward =
      fftw_plan_dft_c2r_3d(n, n, n, plans_->half, plans_->real, FFTW_ESTIMATE | FFTW_DESTROY_INPUT);
}

SpectralTransform::~SpectralTransform() = default;

void SpectralTransform::to_physical(std::span<const Complex> spectrum, std::span<double> grid,
                                    int derivative_axis) {
  const int n = n_;
  const int h = n / 2 + 1;
  auto* half = reinterpret_cast<Complex*>(plans_->half);
  for (int i1 = 0; i1 < n; ++i1) {
    const int f1 = i1 < n / 2 ? i1 : i1 - n;
    for (int i2 = 0; i2 < n; ++i2) {
      const int f2 = i2 < n / 2 ? i2 : i2 - n;
      const Complex* src = spectrum.data() + (static_cast<std::size_t>(i1) * n + i2) * n;
      Complex* dst = half + (static_cast<std::size_t>(i1) * n + i2) * h;
      if (derivative_axis < 0) {
        for (int i3 = 0; i3 < h; ++i3) dst[i3] = kToPhysical * src[i3];
      } else {
        for (int i3 = 0; i3 < h; ++i3) {
          const int f3 = i3 < n / 2 ? i3 : i3 - n;
          const int f = derivative_axis == 0 ? f1 : derivative_axis == 1 ? f2 : f3;
          const Complex v = src[i3];
          dst[i3] = kToPhysical * f * Complex(-v.imag(), v.real());
        }
      }
    }
  }
  fftw_execute_dft_c2r(plans_->backward, plans_->half, plans_->real);
  std::copy_n(plans_->real, grid.size(), grid.data());
}

void SpectralTransform::to_spectral(std::span<const double> grid, std::span<Complex> spectrum) {
  const int n = n_;
  const int h = n / 2 + 1;
  std::copy(grid.begin(), grid.end(), plans_->real);
  fftw_execute_dft_r2c(plans_->forward, plans_->real, plans_->half);
  const double scale = std::pow(2.0 * std::numbers::pi, 1.5) / (static_cast<double>(n) * n * n);
  const auto* half = reinterpret_cast<const Complex*>(plans_->half);
  for (int i1 = 0; i1 < n; ++i1) {
    const int m1 = (n - i1) % n;
    for (int i2 = 0; i2 < n; ++i2) {
      const int m2 = (n - i2) % n;
      Complex* dst = spectrum.data() + (static_cast<std::size_t>(i1) * n + i2) * n;
      const Complex* src = half + (static_cast<std::size_t>(i1) * n + i2) * h;
      const Complex* mirror = half + (static_cast<std::size_t>(m1) * n + m2) * h;
      for (int i3 = 0; i3 < h; ++i3) dst[i3] = scale * src[i3];
      for (int i3 = h; i3 < n; ++i3) dst[i3] = scale * std::conj(mirror[n - i3]);
    }
  }
}

void SpectralTransform::to_spectral(std::span<const double> grid, std::span<const BandMode> modes,
                                    std::span<Complex> values) {
  const int n = n_;
  const int h = n / 2 + 1;
  std::copy(grid.begin(), grid.end(), plans_->real);
  fftw_execute_dft_r2c(plans_->forward, plans_->real, plans_->half);
  const double scale = std::pow(2.0 * std::numbers::pi, 1.5) / (static_cast<double>(n) * n * n);
  const auto* half = reinterpret_cast<const Complex*>(plans_->half);
  auto wrap = [n](int f) { return f < 0 ? f + n : f; };
  for (std::size_t b = 0; b < modes.size(); ++b) {
    const auto& xi = modes[b].xi;
    if (xi[2] >= 0) {
      values[b] = scale * half[(static_cast<std::size_t>(wrap(xi[0])) * n + wrap(xi[1])) * h + xi[2]];
    } else {
      values[b] = scale * std::conj(half[(static_cast<std::size_t>(wrap(-xi[0])) * n + wrap(-xi[1])) * h - xi[2]]);
    }
  }
}

SpectralTransform& SpectralTransform::for_size(int n) {
  thread_local std::map<int, std::unique_ptr<SpectralTransform>> cache;
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<SpectralTransform>(n);
  return *slot;
}

}  // namespace supercrit::detail
