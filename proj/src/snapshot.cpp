#include "vch/snapshot.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>

#include "vch/errors.hpp"

namespace vch {

namespace {

constexpr char kMagic[4] = {'V', 'C', 'H', 'F'};

template <typename T>
T to_little(T v) {
  if constexpr (std::endian::native == std::endian::big) {
    auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(v);
    std::reverse(bytes.begin(), bytes.end());
    return std::bit_cast<T>(bytes);
  }
  return v;
}

template <typename T>
void put(std::ostream& os, T v) {
  v = to_little(v);
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& is, const std::filesystem::path& path) {
  T v{};
  if (!is.read(reinterpret_cast<char*>(&v), sizeof(T))) throw IoError("snapshot " + path.string() + ": truncated header");
  return to_little(v);
}

void write(const std::filesystem::path& path, const SnapshotHeader& h, const std::vector<double>& values) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  os.write(kMagic, 4);
  put(os, h.version);
  put(os, h.dim);
  put(os, h.n);
  put(os, h.m);
  put(os, h.period);
  put(os, h.xi_max);
  if constexpr (std::endian::native == std::endian::little) {
    os.write(reinterpret_cast<const char*>(values.data()), static_cast<std::streamsize>(values.size() * sizeof(double)));
  } else {
    for (double v : values) put(os, v);
  }
  if (!os) throw IoError("write failed: " + path.string());
}

SnapshotHeader read_header(std::istream& is, const std::filesystem::path& path) {
  char magic[4] = {};
  if (!is.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) {
    throw IoError("snapshot " + path.string() + ": bad magic");
  }
  SnapshotHeader h;
  h.version = get<std::uint32_t>(is, path);
  if (h.version != kSnapshotVersion) throw IoError("snapshot " + path.string() + ": unsupported version");
  h.dim = get<std::uint32_t>(is, path);
  h.n = get<std::uint32_t>(is, path);
  h.m = get<std::uint32_t>(is, path);
  h.period = get<double>(is, path);
  h.xi_max = get<double>(is, path);
  if ((h.dim != 1 && h.dim != 2) || h.n == 0 || h.n > 65536 || h.m > 65536 || h.value_count() > (std::size_t{1} << 32))
    throw IoError("snapshot " + path.string() + ": invalid header");
  return h;
}

std::ifstream open(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open snapshot " + path.string());
  return is;
}

}  // namespace

std::size_t SnapshotHeader::value_count() const noexcept {
  std::size_t cells = dim == 1 ? n : std::size_t{n} * n;
  std::size_t nodes = m == 0 ? 1 : (dim == 1 ? m : std::size_t{m} * m);
  return cells * nodes;
}

PhaseField Snapshot::phase_field() const {
  if (header.m == 0) throw IoError("snapshot holds a spatial field, not a phase-space field");
  PhaseField f(SpatialGrid(static_cast<int>(header.dim), header.n, header.period),
               VelocityGrid(static_cast<int>(header.dim), header.m, header.xi_max));
  f.values = values;
  return f;
}

GridField Snapshot::grid_field() const {
  if (header.m != 0) throw IoError("snapshot holds a phase-space field, not a spatial field");
  return GridField(SpatialGrid(static_cast<int>(header.dim), header.n, header.period), values);
}

void write_snapshot(const std::filesystem::path& path, const PhaseField& f) {
  SnapshotHeader h;
  h.dim = static_cast<std::uint32_t>(f.sgrid.dim());
  h.n = static_cast<std::uint32_t>(f.sgrid.n());
  h.m = static_cast<std::uint32_t>(f.vgrid.m());
  h.period = f.sgrid.period();
  h.xi_max = f.vgrid.xi_max();
  write(path, h, f.values);
}

void write_snapshot(const std::filesystem::path& path, const GridField& rho) {
  SnapshotHeader h;
  h.dim = static_cast<std::uint32_t>(rho.grid.dim());
  h.n = static_cast<std::uint32_t>(rho.grid.n());
  h.m = 0;
  h.period = rho.grid.period();
  write(path, h, rho.values);
}

SnapshotHeader read_snapshot_header(const std::filesystem::path& path) {
  auto is = open(path);
  return read_header(is, path);
}

Snapshot read_snapshot(const std::filesystem::path& path) {
  auto is = open(path);
  Snapshot s;
  s.header = read_header(is, path);
  s.values.resize(s.header.value_count());
  for (double& v : s.values) {
    if (!is.read(reinterpret_cast<char*>(&v), sizeof(double))) {
      throw IoError("snapshot " + path.string() + ": truncated data");
    }
    v = to_little(v);
  }
  if (is.peek() != std::char_traits<char>::eof()) throw IoError("snapshot " + path.string() + ": trailing bytes");
  return s;
}

}  // namespace vch
