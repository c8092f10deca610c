#pragma once

#include <optional>
#include <vector>

#include "vch/domain.hpp"
#include "vch/kernels.hpp"

namespace vch {

struct PotentialFields {
  GridField phi_short;
  GridField phi_long;
  GridField phi_total;
  VectorField force;  // -grad phi_total
  double alpha = 0.0;
  std::optional<GridField> limit_phi;
};

/// (1/alpha^2) wS * wS * rho.
GridField short_potential(const GridField& rho, const ShortRangeKernel& ks, double alpha);

/// -(1/alpha^2) wL_alpha * wS * wS * rho.
GridField long_potential(const GridField& rho, const ShortRangeKernel& ks, const LongRangeKernel& kl,
                         double alpha);

/// -c Lap[wS * wS * rho] for a given coefficient c.
GridField limit_potential(const GridField& rho, const ShortRangeKernel& ks, double coefficient);

/// Coefficient c of the alpha -> 0 limit of the composite potential.
/// (1 - wL(alpha k)) / alpha^2 -> delta |k|^2 / 2, so c = delta / 2.
inline double limit_coefficient(const LongRangeKernel& kl) { return 0.5 * kl.delta(); }

/// Composite potential at a fixed scale, with every convolution chain fused
/// into one Fourier multiplier.
class PotentialOperator {
 public:
  PotentialOperator(const ShortRangeKernel& ks, const LongRangeKernel& kl, double alpha);

  double alpha() const noexcept { return alpha_; }
  const SpatialGrid& grid() const noexcept { return grid_; }
  /// Half-spectrum symbol of phi_total: (1 - wL(alpha k)) wS(k)^2 / alpha^2.
  const std::vector<double>& total_symbol() const noexcept { return total_; }
  const std::vector<double>& long_symbol() const noexcept { return long_; }

  GridField total(const GridField& rho) const;
  VectorField force(const GridField& rho) const;
  PotentialFields assemble(const GridField& rho, std::optional<double> limit_coefficient = {}) const;

 private:
  SpatialGrid grid_;
  double alpha_;
  std::vector<double> short_;  // wS^2 / alpha^2
  std::vector<double> long_;   // -wL wS^2 / alpha^2
  std::vector<double> total_;
  std::vector<double> ws2_;
};

}  // namespace vch
