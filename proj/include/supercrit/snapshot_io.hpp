#pragma once

/// @file snapshot_io.hpp
/// @brief The SHF1 binary snapshot format (little-endian):
///   "SHF1" | uint32 n | float64 nu | float64 t | 3*n^3 x (float64 re, float64 im)
/// Coefficients are component-major, then row-major over (xi1, xi2, xi3) in FFT
/// index order per axis.

#include <iosfwd>
#include <string>

#include "supercrit/spectral_field.hpp"

namespace supercrit {

struct SnapshotRecord {
  double viscosity = 0.0;
  double time = 0.0;
  SpectralField field;
};

void write_snapshot(std::ostream& out, double viscosity, double time, const SpectralField& u);
void write_snapshot_file(const std::string& path, double viscosity, double time, const SpectralField& u);

/// Throws ParseError on a bad magic, truncated payload, or unsupported lattice size.
SnapshotRecord read_snapshot(std::istream& in);
SnapshotRecord read_snapshot_file(const std::string& path);

}  // namespace supercrit
