#include "supercrit/spectral_field.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <numbers>

#include "fft.hpp"
#include "supercrit/error.hpp"

namespace supercrit {
namespace {

using detail::SpectralTransform;

template <typename F>
void for_each_mode(const Lattice& lattice, F&& f) {
  const int n = lattice.n();
  std::size_t flat = 0;
  for (int i1 = 0; i1 < n; ++i1) {
    const int f1 = lattice.frequency(i1);
    for (int i2 = 0; i2 < n; ++i2) {
      const int f2 = lattice.frequency(i2);
      for (int i3 = 0; i3 < n; ++i3, ++flat) f(flat, f1, f2, lattice.frequency(i3));
    }
  }
}

void require_same_lattice(const SpectralField& a, const SpectralField& b) {
  if (!(a.lattice() == b.lattice())) throw InvalidInput("fields live on different lattices");
}

inline Complex times_i(double f, Complex v) { return {-f * v.imag(), f * v.real()}; }

// Per-thread grids reused across convection calls.
struct Scratch {
  std::array<std::vector<double>, 3> velocity;
  std::vector<double> product;
  std::vector<double> derivative;
  std::vector<Complex> values;

  static Scratch& get(const Lattice& lattice) {
    thread_local Scratch scratch;
    const std::size_t size = lattice.size();
    for (auto& v : scratch.velocity) v.resize(size);
    scratch.product.resize(size);
    scratch.derivative.resize(size);
    scratch.values.resize(lattice.band_modes().size());
    return scratch;
  }
};

}  // namespace

SpectralField::SpectralField(Lattice lattice)
    : lattice_(std::move(lattice)), data_(3 * lattice_.size(), Complex(0.0, 0.0)) {}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
  require_same_lattice(*this, other);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
  require_same_lattice(*this, other);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

SpectralField& SpectralField::operator*=(double factor) {
  for (auto& v : data_) v *= factor;
  return *this;
}

PhysicalField to_physical(const SpectralField& u) {
  const int n = u.lattice().n();
  auto& fft = SpectralTransform::for_size(n);
  PhysicalField grid{n, {}};
  for (int c = 0; c < 3; ++c) {
    grid.components[c].resize(u.lattice().size());
    fft.to_physical(u.component(c), grid.components[c]);
  }
  return grid;
}

SpectralField from_physical(const PhysicalField& grid, const Lattice& lattice) {
  if (grid.n != lattice.n()) throw InvalidInput("grid size does not match the lattice");
  auto& fft = SpectralTransform::for_size(lattice.n());
  SpectralField u(lattice);
  for (int c = 0; c < 3; ++c) {
    if (grid.components[c].size() != lattice.size()) throw InvalidInput("grid component has wrong size");
    fft.to_spectral(grid.components[c], u.component(c));
  }
  return u;
}

double physical_l2_norm(const PhysicalField& grid) {
  double sum = 0.0;
  for (const auto& comp : grid.components) {
    for (double v : comp) sum += v * v;
  }
  const double cell = 2.0 * std::numbers::pi / grid.n;
  return std::sqrt(sum * cell * cell * cell);
}

SpectralField apply_mask(const SpectralField& u, const BandMask& mask) {
  SpectralField out(u.lattice());
  const auto r2 = u.lattice().radius_squared_table();
  for (int c = 0; c < 3; ++c) {
    auto src = u.component(c);
    auto dst = out.component(c);
    for (std::size_t i = 0; i < src.size(); ++i) {
      if (mask.contains(r2[i])) dst[i] = src[i];
    }
  }
  return out;
}

ShellProfile decompose_shells(const SpectralField& u) {
  std::map<int, double> energy;
  const auto r2 = u.lattice().radius_squared_table();
  for (std::size_t i = 0; i < r2.size(); ++i) {
    if (r2[i] == 0) continue;
    double e = 0.0;
    for (int c = 0; c < 3; ++c) e += std::norm(u(c, i));
    if (e == 0.0) continue;
    // 4^(j-1) <= r2 < 4^j
    const int j = (std::bit_width(static_cast<std::uint32_t>(r2[i])) - 1) / 2 + 1;
    energy[j] += e;
  }
  ShellProfile profile;
  for (const auto& [j, e] : energy) profile.set_magnitude(j, std::sqrt(e));
  return profile;
}

SpectralField leray_project(const SpectralField& u) {
  SpectralField out(u.lattice());
  for_each_mode(u.lattice(), [&](std::size_t i, int f1, int f2, int f3) {
    const Complex a = u(0, i), b = u(1, i), c = u(2, i);
    const double r2 = static_cast<double>(f1 * f1 + f2 * f2 + f3 * f3);
    if (r2 == 0.0) {
      out(0, i) = a;
      out(1, i) = b;
      out(2, i) = c;
      return;
    }
    const Complex dot = (static_cast<double>(f1) * a + static_cast<double>(f2) * b + static_cast<double>(f3) * c) / r2;
    out(0, i) = a - static_cast<double>(f1) * dot;
    out(1, i) = b - static_cast<double>(f2) * dot;
    out(2, i) = c - static_cast<double>(f3) * dot;
  });
  return out;
}

double norm_l2(const SpectralField& u) {
  double sum = 0.0;
  for (const auto& v : u.data()) sum += std::norm(v);
  return std::sqrt(sum);
}

double norm_hs(const SpectralField& u, double s, bool homogeneous) {
  const auto r2 = u.lattice().radius_squared_table();
  double sum = 0.0;
  for (std::size_t i = 0; i < r2.size(); ++i) {
    double weight;
    if (homogeneous) {
      if (r2[i] == 0) {
        if (s != 0.0) continue;
        weight = 1.0;
      } else {
        weight = std::pow(static_cast<double>(r2[i]), s);
      }
    } else {
      weight = std::pow(1.0 + static_cast<double>(r2[i]), s);
    }
    sum += weight * (std::norm(u(0, i)) + std::norm(u(1, i)) + std::norm(u(2, i)));
  }
  return std::sqrt(sum);
}

double gradient_norm_l2(const SpectralField& u) {
  const auto r2 = u.lattice().radius_squared_table();
  double sum = 0.0;
  for (std::size_t i = 0; i < r2.size(); ++i) {
    sum += static_cast<double>(r2[i]) * (std::norm(u(0, i)) + std::norm(u(1, i)) + std::norm(u(2, i)));
  }
  return std::sqrt(sum);
}

double sup_norm(const SpectralField& u) {
  auto& fft = SpectralTransform::for_size(u.lattice().n());
  std::vector<double> acc(u.lattice().size(), 0.0), tmp(u.lattice().size());
  for (int c = 0; c < 3; ++c) {
    fft.to_physical(u.component(c), tmp);
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += tmp[i] * tmp[i];
  }
  return std::sqrt(*std::max_element(acc.begin(), acc.end()));
}

double sup_gradient_norm(const SpectralField& u) {
  auto& fft = SpectralTransform::for_size(u.lattice().n());
  std::vector<double> acc(u.lattice().size(), 0.0), tmp(u.lattice().size());
  for (int c = 0; c < 3; ++c) {
    for (int axis = 0; axis < 3; ++axis) {
      fft.to_physical(u.component(c), tmp, axis);
      for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += tmp[i] * tmp[i];
    }
  }
  return std::sqrt(*std::max_element(acc.begin(), acc.end()));
}

SupNorms sup_norms(const SpectralField& u) { return {sup_norm(u), sup_gradient_norm(u)}; }

SpectralField convection(const SpectralField& u, const SpectralField& w) {
  require_same_lattice(u, w);
  if (!is_band_limited(u) || !is_band_limited(w)) {
    throw InvalidInput("convection inputs must be band-limited within the dealias radius");
  }
  const Lattice& lattice = u.lattice();
  const auto modes = lattice.band_modes();
  auto& fft = SpectralTransform::for_size(lattice.n());
  auto& scratch = Scratch::get(lattice);
  for (int c = 0; c < 3; ++c) fft.to_physical(u.component(c), scratch.velocity[c]);
  SpectralField out(lattice);
  for (int i = 0; i < 3; ++i) {
    std::fill(scratch.product.begin(), scratch.product.end(), 0.0);
    for (int j = 0; j < 3; ++j) {
      fft.to_physical(w.component(i), scratch.derivative, j);
      const auto& uj = scratch.velocity[j];
      for (std::size_t m = 0; m < scratch.product.size(); ++m) scratch.product[m] += uj[m] * scratch.derivative[m];
    }
    fft.to_spectral(scratch.product, modes, scratch.values);
    for (std::size_t b = 0; b < modes.size(); ++b) out(i, modes[b].flat) = scratch.values[b];
  }
  return out;
}

SpectralField self_convection(const SpectralField& u) {
  if (!is_band_limited(u)) throw InvalidInput("convection input must be band-limited within the dealias radius");
  const Lattice& lattice = u.lattice();
  const auto modes = lattice.band_modes();
  auto& fft = SpectralTransform::for_size(lattice.n());
  auto& scratch = Scratch::get(lattice);
  for (int c = 0; c < 3; ++c) fft.to_physical(u.component(c), scratch.velocity[c]);
  SpectralField out(lattice);
  for (int i = 0; i < 3; ++i) {
    for (int j = i; j < 3; ++j) {
      const auto& ui = scratch.velocity[i];
      const auto& uj = scratch.velocity[j];
      for (std::size_t m = 0; m < scratch.product.size(); ++m) scratch.product[m] = ui[m] * uj[m];
      fft.to_spectral(scratch.product, modes, scratch.values);
      // (div(u (x) u))_i = sum_j i xi_j (u_i u_j)^
      for (std::size_t b = 0; b < modes.size(); ++b) {
        const auto& mode = modes[b];
        out(i, mode.flat) += times_i(mode.xi[j], scratch.values[b]);
        if (i != j) out(j, mode.flat) += times_i(mode.xi[i], scratch.values[b]);
      }
    }
  }
  return out;
}

double inner_product(const SpectralField& u, const SpectralField& w) {
  require_same_lattice(u, w);
  const auto a = u.data();
  const auto b = w.data();
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
  return sum;
}

double divergence_indicator(const SpectralField& u) {
  double scale = 0.0, worst = 0.0;
  for_each_mode(u.lattice(), [&](std::size_t i, int f1, int f2, int f3) {
    const double mag = std::sqrt(std::norm(u(0, i)) + std::norm(u(1, i)) + std::norm(u(2, i)));
    scale = std::max(scale, mag);
    if (mag == 0.0) return;
    const Complex div = static_cast<double>(f1) * u(0, i) + static_cast<double>(f2) * u(1, i) +
                        static_cast<double>(f3) * u(2, i);
    const double r2 = static_cast<double>(f1) * f1 + static_cast<double>(f2) * f2 + static_cast<double>(f3) * f3;
    worst = std::max(worst, std::abs(div) / std::sqrt(r2));
  });
  return scale > 0.0 ? worst / scale : 0.0;
}

double hermitian_defect(const SpectralField& u) {
  double scale = 0.0, worst = 0.0;
  const Lattice& lattice = u.lattice();
  for (int c = 0; c < 3; ++c) {
    auto comp = u.component(c);
    for (std::size_t i = 0; i < comp.size(); ++i) {
      scale = std::max(scale, std::abs(comp[i]));
      worst = std::max(worst, std::abs(comp[lattice.mirror_index(i)] - std::conj(comp[i])));
    }
  }
  return scale > 0.0 ? worst / scale : 0.0;
}

bool is_band_limited(const SpectralField& u) {
  const Lattice& lattice = u.lattice();
  for (int c = 0; c < 3; ++c) {
    auto comp = u.component(c);
    for (std::size_t i = 0; i < comp.size(); ++i) {
      if (comp[i] != Complex(0.0, 0.0) && !lattice.in_band(i)) return false;
    }
  }
  return true;
}

SpectralField resample(const SpectralField& u, const Lattice& target) {
  SpectralField out(target);
  const int limit = std::min(u.lattice().n(), target.n()) / 2;
  auto fits = [&](int f) { return f > -limit && f < limit; };
  for_each_mode(u.lattice(), [&](std::size_t i, int f1, int f2, int f3) {
    if (!fits(f1) || !fits(f2) || !fits(f3)) return;
    const std::size_t j = target.flat_index(f1, f2, f3);
    for (int c = 0; c < 3; ++c) out(c, j) = u(c, i);
  });
  return out;
}

}  // namespace supercrit
