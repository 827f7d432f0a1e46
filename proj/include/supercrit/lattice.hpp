#pragma once

/// @file lattice.hpp
/// @brief Cubic integer frequency lattice of the 2*pi-periodic torus, and sharp
/// frequency cutoffs over it.

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace supercrit {

/// A lattice point strictly inside the dealias ball.
struct BandMode {
  std::uint32_t flat;
  std::int32_t radius_squared;
  std::int16_t xi[3];
};

/// n modes per axis with wavevectors in {-n/2, ..., n/2 - 1}^3, stored in FFT
/// index order (0, 1, ..., n/2 - 1, -n/2, ..., -1), row-major over (xi1, xi2, xi3).
class Lattice {
 public:
  /// n even and >= 8; dealias radius defaults to n/3 and may not exceed n/2.
  explicit Lattice(int n, std::optional<double> dealias_radius = std::nullopt);

  int n() const { return n_; }
  std::size_t size() const { return static_cast<std::size_t>(n_) * n_ * n_; }
  double dealias_radius() const { return dealias_radius_; }

  int frequency(int index) const { return index < n_ / 2 ? index : index - n_; }
  int index_of(int frequency) const { return frequency < 0 ? frequency + n_ : frequency; }

  std::array<int, 3> wavevector(std::size_t flat) const;
  std::size_t flat_index(int xi1, int xi2, int xi3) const;
  /// Flat index of -xi (wrapping the Nyquist frequency onto itself).
  std::size_t mirror_index(std::size_t flat) const;

  std::int64_t radius_squared(std::size_t flat) const { return (*radius_squared_)[flat]; }
  std::span<const std::int32_t> radius_squared_table() const { return *radius_squared_; }

  /// In-band points in flat-index order.
  std::span<const BandMode> band_modes() const { return *band_modes_; }

  /// |xi| < dealias radius.
  bool in_band(std::size_t flat) const {
    return static_cast<double>(radius_squared(flat)) < dealias_radius_ * dealias_radius_;
  }

  friend bool operator==(const Lattice& a, const Lattice& b) {
    return a.n_ == b.n_ && a.dealias_radius_ == b.dealias_radius_;
  }

 private:
  int n_;
  double dealias_radius_;
  std::shared_ptr<const std::vector<std::int32_t>> radius_squared_;
  std::shared_ptr<const std::vector<BandMode>> band_modes_;
};

/// Sharp cutoff: dyadic(j) keeps 2^(j-1) <= |xi| < 2^j, ball(k) keeps |xi| < k,
/// high(k) keeps |xi| >= k, annulus(h, k) keeps h <= |xi| < k.
class BandMask {
 public:
  enum class Kind { Dyadic, Ball, High, Annulus };

  static BandMask dyadic(int j);
  static BandMask ball(double k);
  static BandMask high(double k);
  static BandMask annulus(double h, double k);

  Kind kind() const { return kind_; }
  bool contains(std::int64_t radius_squared) const {
    const double r2 = static_cast<double>(radius_squared);
    return r2 >= lower_squared_ && r2 < upper_squared_;
  }
  std::string describe() const;

 private:
  BandMask(Kind kind, double lower_squared, double upper_squared, double a, double b)
      : kind_(kind), lower_squared_(lower_squared), upper_squared_(upper_squared), a_(a), b_(b) {}

  Kind kind_;
  double lower_squared_;
  double upper_squared_;
  double a_;  // j, k, or h depending on kind
  double b_;  // k for annulus
};

}  // namespace supercrit
