#include "supercrit/snapshot_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <vector>

#include "supercrit/error.hpp"

namespace supercrit {
namespace {

constexpr char kMagic[4] = {'S', 'H', 'F', '1'};

template <typename T>
T to_little_endian(T value) {
  if constexpr (std::endian::native == std::endian::little) {
    return value;
  } else {
    auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(value);
    std::reverse(bytes.begin(), bytes.end());
    return std::bit_cast<T>(bytes);
  }
}

template <typename T>
void put(std::ostream& out, T value) {
  const T le = to_little_endian(value);
  out.write(reinterpret_cast<const char*>(&le), sizeof le);
}

template <typename T>
T get(std::istream& in, const char* what) {
  T value{};
  if (!in.read(reinterpret_cast<char*>(&value), sizeof value)) {
    throw ParseError(std::string("snapshot truncated while reading ") + what);
  }
  return to_little_endian(value);
}

}  // namespace

void write_snapshot(std::ostream& out, double viscosity, double time, const SpectralField& u) {
  out.write(kMagic, sizeof kMagic);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(u.lattice().n()));
  put<double>(out, viscosity);
  put<double>(out, time);
  std::vector<double> buffer;
  buffer.reserve(2 * u.data().size());
  for (const Complex& v : u.data()) {
    buffer.push_back(to_little_endian(v.real()));
    buffer.push_back(to_little_endian(v.imag()));
  }
  out.write(reinterpret_cast<const char*>(buffer.data()),
            static_cast<std::streamsize>(buffer.size() * sizeof(double)));
  if (!out) throw ParseError("failed writing snapshot");
}

void write_snapshot_file(const std::string& path, double viscosity, double time, const SpectralField& u) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ParseError("cannot open " + path + " for writing");
  write_snapshot(out, viscosity, time, u);
}

SnapshotRecord read_snapshot(std::istream& in) {
  char magic[4];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof magic) != 0) {
    throw ParseError("not an SHF1 snapshot");
  }
  const auto n = get<std::uint32_t>(in, "lattice size");
  if (n < 8 || n % 2 != 0 || n > 1024) throw ParseError("unsupported lattice size " + std::to_string(n));
  const double viscosity = get<double>(in, "viscosity");
  const double time = get<double>(in, "time");
  SnapshotRecord record{viscosity, time, SpectralField(Lattice(static_cast<int>(n)))};
  auto data = record.field.data();
  std::vector<double> buffer(2 * data.size());
  if (!in.read(reinterpret_cast<char*>(buffer.data()), static_cast<std::streamsize>(buffer.size() * sizeof(double)))) {
    throw ParseError("snapshot truncated in coefficient block");
  }
  for (std::size_t i = 0; i < data.size(); ++i) {
    data[i] = Complex(to_little_endian(buffer[2 * i]), to_little_endian(buffer[2 * i + 1]));
  }
  if (in.peek() != std::char_traits<char>::eof()) throw ParseError("trailing bytes after snapshot payload");
  return record;
}

SnapshotRecord read_snapshot_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open snapshot " + path);
  return read_snapshot(in);
}

}  // namespace supercrit
