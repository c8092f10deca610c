#pragma once

#include <array>
#include <vector>

#include "vch/domain.hpp"

namespace vch {

/// Discrete moments of a sampled kernel or distribution.
struct Moments {
  double mass = 0.0;
  std::array<double, 2> mean{};
  std::array<std::array<double, 2>, 2> second{};  // int y_i y_j w(y) dy

  friend bool operator==(const Moments&, const Moments&) = default;
};

/// Moments of a sampled spatial kernel, using minimum-image offsets. The
/// half-period point contributes symmetrically (zero to odd moments).
Moments spatial_moments(const GridField& kernel);

/// Periodized Gaussian mollifier, renormalized to discrete mass 1.
struct ShortRangeKernel {
  double sigma = 0.0;
  GridField samples;
  Moments moments;
  /// Fourier symbol on the half spectrum of samples.grid.
  std::vector<double> symbol;
};

ShortRangeKernel make_short_kernel(const SpatialGrid& grid, double sigma);

/// Smooth compactly supported bump, sampled at unit scale and normalized to
/// discrete mass 1. The scaled kernel at scale alpha is the push-forward of
/// these samples under y -> alpha y, so mass, odd moments and the
/// second-moment coefficient alpha^2 delta hold exactly at every alpha.
class LongRangeKernel {
 public:
  struct Atom {
    std::array<double, 2> offset;
    double weight;  // sample value times cell volume
  };

  LongRangeKernel() = default;
  LongRangeKernel(double support_radius, GridField samples);

  double support_radius() const noexcept { return support_radius_; }
  const GridField& samples() const noexcept { return samples_; }
  const Moments& moments() const noexcept { return moments_; }
  /// Isotropic second-moment coefficient, measured on the grid.
  double delta() const noexcept { return delta_; }
  const std::vector<Atom>& atoms() const noexcept { return atoms_; }

  /// Largest alpha for which the scaled support stays within L/8.
  double max_alpha() const noexcept;
  /// Throws ConfigError when the kernel at scale alpha would wrap the torus.
  void check_scale(double alpha) const;
  /// Symbol of the scaled kernel, w_L(alpha k), on the half spectrum.
  std::vector<double> symbol(double alpha) const;

 private:
  double support_radius_ = 0.0;
  GridField samples_;
  Moments moments_;
  double delta_ = 0.0;
  std::vector<Atom> atoms_;
};

LongRangeKernel make_long_kernel(const SpatialGrid& grid, double support_radius);

/// Sampled Maxwellian M(xi) = c exp(-|xi|^2 / 2D) with c chosen so the
/// discrete mass is exactly 1.
struct Maxwellian {
  double diffusion = 0.0;
  VelocityGrid vgrid;
  std::vector<double> samples;
  /// The constant c above (close to (2 pi D)^{-d/2}).
  double normalization = 0.0;
  Moments moments;
  /// Continuous mass outside the velocity box.
  double tail_mass = 0.0;
};

/// Mass of the continuous Maxwellian outside [-xi_max, xi_max]^dim.
double maxwellian_tail_mass(double xi_max, double diffusion, int dim);

Maxwellian make_maxwellian(const VelocityGrid& vgrid, double diffusion);

}  // namespace vch
