#include "supercrit/lattice.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "supercrit/error.hpp"

namespace supercrit {

Lattice::Lattice(int n, std::optional<double> dealias_radius) : n_(n) {
  if (n < 8 || n % 2 != 0) throw InvalidInput("lattice size must be even and >= 8");
  dealias_radius_ = dealias_radius.value_or(n / 3.0);
  if (!(dealias_radius_ > 0.0) || dealias_radius_ > n / 2.0) {
    throw InvalidInput("dealias radius must lie in (0, n/2]");
  }
  auto table = std::make_shared<std::vector<std::int32_t>>(size());
  auto band = std::make_shared<std::vector<BandMode>>();
  const double band_squared = dealias_radius_ * dealias_radius_;
  std::size_t flat = 0;
  for (int i1 = 0; i1 < n; ++i1) {
    const int f1 = frequency(i1);
    for (int i2 = 0; i2 < n; ++i2) {
      const int f2 = frequency(i2);
      for (int i3 = 0; i3 < n; ++i3, ++flat) {
        const int f3 = frequency(i3);
        const int r2 = f1 * f1 + f2 * f2 + f3 * f3;
        (*table)[flat] = r2;
        if (static_cast<double>(r2) < band_squared) {
          band->push_back({static_cast<std::uint32_t>(flat), r2,
                           {static_cast<std::int16_t>(f1), static_cast<std::int16_t>(f2), static_cast<std::int16_t>(f3)}});
        }
      }
    }
  }
  radius_squared_ = std::move(table);
  band_modes_ = std::move(band);
}

std::array<int, 3> Lattice::wavevector(std::size_t flat) const {
  const auto n = static_cast<std::size_t>(n_);
  return {frequency(static_cast<int>(flat / (n * n))), frequency(static_cast<int>((flat / n) % n)),
          frequency(static_cast<int>(flat % n))};
}

std::size_t Lattice::flat_index(int xi1, int xi2, int xi3) const {
  const int half = n_ / 2;
  for (int xi : {xi1, xi2, xi3}) {
    if (xi < -half || xi >= half) throw InvalidInput("wavevector component outside the lattice");
  }
  const auto n = static_cast<std::size_t>(n_);
  return (static_cast<std::size_t>(index_of(xi1)) * n + static_cast<std::size_t>(index_of(xi2))) * n +
         static_cast<std::size_t>(index_of(xi3));
}

std::size_t Lattice::mirror_index(std::size_t flat) const {
  const auto n = static_cast<std::size_t>(n_);
  const std::size_t i1 = flat / (n * n), i2 = (flat / n) % n, i3 = flat % n;
  return (((n - i1) % n) * n + (n - i2) % n) * n + (n - i3) % n;
}

BandMask BandMask::dyadic(int j) {
  return BandMask(Kind::Dyadic, std::ldexp(1.0, 2 * (j - 1)), std::ldexp(1.0, 2 * j), j, 0.0);
}

BandMask BandMask::ball(double k) {
  if (!(k >= 0.0) || !std::isfinite(k)) throw InvalidInput("ball radius must be finite and >= 0");
  return BandMask(Kind::Ball, 0.0, k * k, k, 0.0);
}

BandMask BandMask::high(double k) {
  if (!(k >= 0.0) || !std::isfinite(k)) throw InvalidInput("high-pass radius must be finite and >= 0");
  return BandMask(Kind::High, k * k, std::numeric_limits<double>::infinity(), k, 0.0);
}

BandMask BandMask::annulus(double h, double k) {
  if (!(h >= 0.0) || !std::isfinite(k) || !(h < k)) throw InvalidInput("annulus needs 0 <= h < k");
  return BandMask(Kind::Annulus, h * h, k * k, h, k);
}

std::string BandMask::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::Dyadic: os << "dyadic(" << a_ << ")"; break;
    case Kind::Ball: os << "ball(" << a_ << ")"; break;
    case Kind::High: os << "high(" << a_ << ")"; break;
    case Kind::Annulus: os << "annulus(" << a_ << ", " << b_ << ")"; break;
  }
  return os.str();
}

}  // namespace supercrit
