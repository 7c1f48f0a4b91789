#pragma once

#include <cstdint>
#include <optional>

#include <Eigen/Dense>

#include "ewl/operator.hpp"

namespace ewl {

/// T_b f = sum_E b_E <f, h^sigma_E>_sigma h^omega_E.
///
/// With `root_level` > 0 the coefficients of rectangles above the root cubes
/// are ignored, so the operator acts inside each root separately.
DyadicOperator martingale_transform(const CoefficientSequence& b, const LeafMeasure& sigma,
                                    const LeafMeasure& omega, int root_level = 0);

/// P_b f = sum_E b_E <f>^sigma_E h^omega_E.
DyadicOperator paraproduct(const CoefficientSequence& b, const LeafMeasure& sigma,
                           const LeafMeasure& omega, int root_level = 0);

/// S h^sigma_I = b_I (h^omega_{I_R} - h^omega_{I_L}); one-dimensional only.
DyadicOperator haar_shift(const CoefficientSequence& b, const LeafMeasure& sigma,
                          const LeafMeasure& omega);

/// Kernel values K(x, y) over tree-ordered leaf pairs of a one-dimensional grid.
struct PerfectDyadicKernel {
  Grid grid;
  int radius = 0;
  Eigen::MatrixXd values;
};

/// Throws ValidationError naming the first interval pair that breaks the size
/// bound |K(x,y)| <= 1/|x-y| (leaf centers) or constancy on a separated block.
void validate_kernel(const PerfectDyadicKernel& k);

/// A random kernel that is constant on every separated block and obeys the
/// size bound; the diagonal is zero.
PerfectDyadicKernel random_perfect_kernel(const Grid& grid, int radius, std::uint64_t seed);

DyadicOperator perfect_dyadic_operator(const PerfectDyadicKernel& k, const LeafMeasure& sigma,
                                       const LeafMeasure& omega);

struct RandomEwlOptions {
  int radius = 0;
  std::uint64_t seed = 0;
  int root_level = 0;
};

/// Random operator with essentially-well-localized radius at most `radius`,
/// built in Haar coordinates from four kinds of term, each of which respects
/// both support conditions:
///   h^omega_G (x) h^sigma_E          for G inside E^(r) and E inside G^(r)
///   psi^omega_{E^(r)} (x) h^sigma_E  for each charged E
///   h^omega_G (x) psi^sigma_{G^(r)}  for each charged G
///   psi^omega_Q (x) psi^sigma_Q      for each root Q
/// where psi_R = 1_R / sqrt(mu(R)). Coefficients are iid uniform on [-1, 1].
DyadicOperator random_ewl(const LeafMeasure& sigma, const LeafMeasure& omega,
                          const RandomEwlOptions& opts);

/// Kernel with iid uniform entries and no structure at all.
DyadicOperator random_dense(const LeafMeasure& sigma, const LeafMeasure& omega, std::uint64_t seed);

}  // namespace ewl
