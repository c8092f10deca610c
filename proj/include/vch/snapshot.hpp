#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "vch/domain.hpp"

namespace vch {

// Layout: "VCHF", u32 version, u32 dim, u32 n, u32 m, f64 period, f64 xi_max,
// then n^dim * m^dim (or n^dim when m = 0) little-endian f64 values,
// spatial index major.
inline constexpr std::uint32_t kSnapshotVersion = 1;

struct SnapshotHeader {
  std::uint32_t version = kSnapshotVersion;
  std::uint32_t dim = 1;
  std::uint32_t n = 0;
  std::uint32_t m = 0;  // 0 for spatial fields
  double period = 1.0;
  double xi_max = 0.0;

  std::size_t value_count() const noexcept;
};

struct Snapshot {
  SnapshotHeader header;
  std::vector<double> values;

  bool is_phase_field() const noexcept { return header.m != 0; }
  PhaseField phase_field() const;
  GridField grid_field() const;
};

void write_snapshot(const std::filesystem::path& path, const PhaseField& f);
void write_snapshot(const std::filesystem::path& path, const GridField& rho);

/// Throws IoError on a missing file, bad magic, unknown version or truncation.
SnapshotHeader read_snapshot_header(const std::filesystem::path& path);
Snapshot read_snapshot(const std::filesystem::path& path);

}  // namespace vch
