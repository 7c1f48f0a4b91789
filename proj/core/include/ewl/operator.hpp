#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "ewl/grid.hpp"
#include "ewl/measure.hpp"

namespace ewl {

/// Dense operators are N x N; refuse grids where that stops being desk scale.
inline constexpr std::size_t kDenseLeafCap = 4096;

enum class Family { martingale_transform, paraproduct, haar_shift, perfect_dyadic, random_ewl, custom };

std::string_view to_string(Family f);
Family family_from_string(std::string_view s);

/// Real coefficient per Wilson rectangle, indexed by node id in [1, N).
class CoefficientSequence {
 public:
  explicit CoefficientSequence(Grid grid);

  static CoefficientSequence constant(const Grid& grid, double c);
  static CoefficientSequence single(const Grid& grid, Node e, double value);
  /// iid uniform on [-1, 1].
  static CoefficientSequence random(const Grid& grid, std::uint64_t seed);

  const Grid& grid() const { return grid_; }
  double operator[](Node e) const { return b_[e.id]; }
  double& operator[](Node e) { return b_[e.id]; }
  const std::vector<double>& raw() const { return b_; }

 private:
  Grid grid_;
  std::vector<double> b_;
};

/// The map f -> T(sigma f) from L2(sigma) to L2(omega).
///
/// Stored as the kernel matrix K over tree-ordered leaves, so that
/// T(sigma f) = K (sigma . f) and T*(omega g) = K^T (omega . g). The adjoint is
/// the operator with kernel K^T and the two measures swapped.
class DyadicOperator {
 public:
  DyadicOperator(LeafMeasure sigma, LeafMeasure omega, Eigen::MatrixXd kernel, Family family,
                 std::optional<int> claimed_radius = std::nullopt);

  const Grid& grid() const { return sigma_.grid(); }
  const LeafMeasure& sigma() const { return sigma_; }
  const LeafMeasure& omega() const { return omega_; }
  const Eigen::MatrixXd& kernel() const { return kernel_; }
  Family family() const { return family_; }
  std::optional<int> claimed_radius() const { return claimed_radius_; }
  std::optional<std::uint64_t> seed() const { return seed_; }
  /// Tree level of the root cubes; 0 for a single root Q0, n for one root per orthant.
  int root_level() const { return root_level_; }
  const std::optional<CoefficientSequence>& coefficients() const { return coefficients_; }

  DyadicOperator& with_seed(std::uint64_t seed);
  DyadicOperator& with_root_level(int level);
  DyadicOperator& with_coefficients(CoefficientSequence b);

  /// T(sigma f).
  LeafFunction apply(const LeafFunction& f) const;
  /// T*(omega g).
  LeafFunction apply_adjoint(const LeafFunction& g) const;
  /// <T(sigma f), g>_omega.
  double pairing(const LeafFunction& f, const LeafFunction& g) const;
  DyadicOperator adjoint() const;

  /// D_omega^{1/2} K D_sigma^{1/2}; its spectral norm is the operator norm.
  Eigen::MatrixXd whitened() const;
  /// M[G, E] = <T(sigma h^sigma_E), h^omega_G>_omega, coordinate 0 being the
  /// normalized constant on either side.
  Eigen::MatrixXd haar_matrix() const;
  /// Column E holds T(sigma h^sigma_E) over the leaves (zero for uncharged E).
  Eigen::MatrixXd haar_images() const;

 private:
  LeafMeasure sigma_;
  LeafMeasure omega_;
  Eigen::MatrixXd kernel_;
  Family family_;
  std::optional<int> claimed_radius_;
  std::optional<std::uint64_t> seed_;
  int root_level_ = 0;
  std::optional<CoefficientSequence> coefficients_;
};

/// Kernel realizing a prescribed Haar-coordinate matrix (inverse of haar_matrix).
Eigen::MatrixXd kernel_from_haar(const Eigen::MatrixXd& m, const LeafMeasure& sigma,
                                 const LeafMeasure& omega);

}  // namespace ewl
