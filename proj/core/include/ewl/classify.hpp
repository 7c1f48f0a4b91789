#pragma once

#include <optional>

#include "ewl/operator.hpp"

namespace ewl {

/// Relative threshold below which an image value counts as zero.
inline constexpr double kSupportTolerance = 1e-12;

struct EwlProfile {
  /// Largest radius needed by any charged rectangle, for T or T*.
  int radius = 0;
  /// Rectangle attaining it, and whether that happened on the adjoint side.
  Node witness{1};
  bool adjoint_side = false;
  /// Some image spills into another root cube (orthant mode only).
  bool crosses_roots = false;
};

/// Per-rectangle support scan of T(sigma h^sigma_E) and T*(omega h^omega_E).
/// Rectangles above the root level are not tested. When an image crosses
/// roots the radius is reported as levels + 1.
EwlProfile ewl_profile(const DyadicOperator& t);

/// Smallest r such that both support conditions hold with the clipped E^(r).
int ewl_radius_raw(const DyadicOperator& t);

/// ewl_radius_raw, or nullopt when only the vacuous radius works: every
/// E^(r) has clipped to the root (r >= levels - 1 - root_level, with at least
/// one nontrivial choice available) or images cross root cubes.
std::optional<int> ewl_radius(const DyadicOperator& t);

struct WlViolation {
  Node q;
  Node r;
  double pairing = 0.0;
  bool adjoint_side = false;
};

/// First pair (Q, R) at which <T(sigma 1_Q), h^omega_R>_omega fails to vanish
/// although R is ill positioned for radius `r` (or the same for T*).
std::optional<WlViolation> wl_violation(const DyadicOperator& t, int r);
bool wl_check(const DyadicOperator& t, int r);
/// Smallest r in [1, max_r] with wl_check true.
std::optional<int> wl_radius(const DyadicOperator& t, int max_r);

}  // namespace ewl
