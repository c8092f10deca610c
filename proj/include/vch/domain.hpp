#pragma once

// Periodic spatial grids, truncated velocity grids and the spectral
// machinery (transforms, convolutions, derivatives) every other module
// computes on.

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace vch {

/// Uniform grid on the torus [0, L)^dim with n points per axis.
class SpatialGrid {
 public:
  SpatialGrid() = default;
  SpatialGrid(int dim, std::size_t n, double period);

  int dim() const noexcept { return dim_; }
  std::size_t n() const noexcept { return n_; }
  double period() const noexcept { return period_; }
  double spacing() const noexcept { return period_ / static_cast<double>(n_); }
  double cell_volume() const noexcept;
  double volume() const noexcept;
  /// Total number of grid points, n^dim.
  std::size_t size() const noexcept;

  /// Multi-index of a flat (row-major) index.
  std::array<std::size_t, 2> index(std::size_t flat) const noexcept;
  std::size_t flat(std::size_t i, std::size_t j = 0) const noexcept;
  /// Coordinate of grid point i along one axis.
  double coordinate(std::size_t i) const noexcept { return spacing() * static_cast<double>(i); }
  /// Signed minimum-image displacement of grid index i from the origin.
  /// Index n/2 maps to -L/2.
  double offset(std::size_t i) const noexcept;

  friend bool operator==(const SpatialGrid&, const SpatialGrid&) = default;

 private:
  int dim_ = 1;
  std::size_t n_ = 0;
  double period_ = 1.0;
};

/// Midpoint grid on the velocity box [-xi_max, xi_max]^dim with m points per axis.
class VelocityGrid {
 public:
  VelocityGrid() = default;
  VelocityGrid(int dim, std::size_t m, double xi_max);

  int dim() const noexcept { return dim_; }
  std::size_t m() const noexcept { return m_; }
  double xi_max() const noexcept { return xi_max_; }
  double spacing() const noexcept { return 2.0 * xi_max_ / static_cast<double>(m_); }
  /// Quadrature weight of one node, spacing^dim.
  double weight() const noexcept;
  std::size_t size() const noexcept;
  /// Velocity of node i along one axis.
  double node(std::size_t i) const noexcept {
    return -xi_max_ + (static_cast<double>(i) + 0.5) * spacing();
  }
  /// Velocity vector of a flat node index (unused components are zero).
  std::array<double, 2> velocity(std::size_t flat) const noexcept;

  friend bool operator==(const VelocityGrid&, const VelocityGrid&) = default;

 private:
  int dim_ = 1;
  std::size_t m_ = 0;
  double xi_max_ = 0.0;
};

/// Real periodic field sampled on a SpatialGrid.
struct GridField {
  SpatialGrid grid;
  std::vector<double> values;

  GridField() = default;
  explicit GridField(const SpatialGrid& g, double fill = 0.0)
      : grid(g), values(g.size(), fill) {}
  GridField(const SpatialGrid& g, std::vector<double> v);

  /// Integral over the torus.
  double integral() const;
  double max_abs() const;
  double min() const;
  /// Throws ValidationError on NaN/Inf.
  void check_finite(const char* context) const;
};

using VectorField = std::vector<GridField>;

/// Phase-space array on SpatialGrid x VelocityGrid. Spatial index is major:
/// values[cell * vgrid.size() + node].
struct PhaseField {
  SpatialGrid sgrid;
  VelocityGrid vgrid;
  std::vector<double> values;

  PhaseField() = default;
  PhaseField(const SpatialGrid& s, const VelocityGrid& v, double fill = 0.0);

  std::size_t nodes() const noexcept { return vgrid.size(); }
  std::span<double> cell(std::size_t c) { return {values.data() + c * nodes(), nodes()}; }
  std::span<const double> cell(std::size_t c) const {
    return {values.data() + c * nodes(), nodes()};
  }
  /// Integral over space and velocity.
  double integral() const;
};

// ---------------------------------------------------------------------------
// Spectral transforms

using Complex = std::complex<double>;

/// Wavenumbers of the half spectrum produced by a real-to-complex transform.
/// For dim 2 the layout is n x (n/2 + 1), last axis halved.
struct Spectrum {
  SpatialGrid grid;
  std::size_t modes = 0;
  std::vector<double> kx, ky;  // ky is all zero for dim 1
  std::vector<bool> nyquist_x, nyquist_y;
  /// Multiplicity of each half-spectrum mode in the full spectrum (1 or 2).
  std::vector<double> multiplicity;

  double k2(std::size_t mode) const noexcept { return kx[mode] * kx[mode] + ky[mode] * ky[mode]; }
};

/// Cached wavenumber table for a grid.
std::shared_ptr<const Spectrum> spectrum(const SpatialGrid& grid);

/// Unnormalized forward DFT of real samples (half spectrum).
std::vector<Complex> forward_transform(const SpatialGrid& grid, std::span<const double> values);
/// Inverse of forward_transform, including the 1/N normalization.
std::vector<double> inverse_transform(const SpatialGrid& grid, std::vector<Complex> coefficients);

/// Fourier symbol of a kernel sample field: cell_volume * DFT, real part.
/// A mass-1 kernel has symbol 1 at k = 0.
std::vector<double> kernel_symbol(const GridField& kernel);

/// Multiply the spectrum of `a` by a real half-spectrum symbol.
GridField apply_symbol(const GridField& a, std::span<const double> symbol);

/// Periodic convolution (a * b)(x) = int a(y) b(x - y) dy, computed in Fourier space.
GridField convolve(const GridField& a, const GridField& b);

/// Spectral derivatives of the trigonometric interpolant. The Nyquist mode
/// is dropped from first derivatives.
VectorField gradient(const GridField& a);
GridField divergence(const VectorField& v);
GridField laplacian(const GridField& a);

// ---------------------------------------------------------------------------
// Velocity quadrature

/// Samples of a weight function on every velocity node.
std::vector<double> velocity_weights(const VelocityGrid& vgrid,
                                     const std::function<double(const std::array<double, 2>&)>& w);

/// Midpoint quadrature of weight(xi) * g over the velocity box, per spatial cell.
GridField velocity_quadrature(const PhaseField& g, std::span<const double> weight);

}  // namespace vch
