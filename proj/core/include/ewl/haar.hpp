#pragma once

#include <vector>

#include <Eigen/Dense>

#include "ewl/grid.hpp"
#include "ewl/measure.hpp"

namespace ewl {

/// Lebesgue Haar function (1_{E2} - 1_{E1}) / sqrt|E|.
LeafFunction haar0(const Grid& grid, Node e);
/// Averaging function 1_E / |E|.
LeafFunction haar_avg(const Grid& grid, Node e);
/// mu-adapted Haar function of rectangle `e`; zero when a half is massless.
LeafFunction weighted_haar(Node e, const LeafMeasure& mu);

/// Orthonormal coordinates of L2(mu) in the adapted Haar system.
///
/// Coordinate 0 is the normalized constant 1/sqrt(mu(Q0)); coordinate `id` for
/// a rectangle id in [1, N) is the coefficient against h^mu_E. Both transforms
/// run in O(N) through the node tree, and operate on tree-ordered arrays.
class HaarBasis {
 public:
  explicit HaarBasis(const LeafMeasure& mu);

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return n_; }

  /// Value of h^mu_E on its upper half (a) and minus its value on its lower half (b).
  double upper(Node e) const { return a_[e.id]; }
  double lower(Node e) const { return b_[e.id]; }
  double constant() const { return c0_; }
  bool charged(Node e) const { return a_[e.id] != 0.0; }

  /// coeffs[k] = <f, basis_k>_mu for f given by leaf values.
  void analyze(const double* values, double* coeffs) const;
  /// Inverse of analyze on charged leaves; values on massless leaves follow
  /// the same formula and carry no meaning.
  void synthesize(const double* coeffs, double* values) const;

  Eigen::VectorXd analyze(const Eigen::VectorXd& values) const;
  Eigen::VectorXd synthesize(const Eigen::VectorXd& coeffs) const;

  /// In-place transforms of every column (or row) of a tree-ordered matrix.
  void analyze_columns(Eigen::MatrixXd& m) const;
  void synthesize_columns(Eigen::MatrixXd& m) const;
  void analyze_rows(Eigen::MatrixXd& m) const;
  void synthesize_rows(Eigen::MatrixXd& m) const;

  /// Coordinates of psi_R = 1_R / sqrt(mu(R)) (zero if R is massless).
  Eigen::VectorXd normalized_indicator(Node r) const;

 private:
  Grid grid_;
  std::size_t n_;
  std::vector<double> mass_;  // node masses, by id
  std::vector<double> a_;
  std::vector<double> b_;
  double c0_ = 0.0;
};

/// f-hat_mu(E) for every rectangle plus the mu-mean over Q0.
struct HaarCoefficients {
  std::vector<double> coeffs;  // by node id in [1, N); slot 0 unused and zero
  double mean = 0.0;

  double operator[](Node e) const { return coeffs[e.id]; }
};

HaarCoefficients martingale_decompose(const LeafFunction& f, const LeafMeasure& mu);
/// sum_E f-hat(E) h^mu_E + mean * 1_{Q0}.
LeafFunction reconstruct(const HaarCoefficients& c, const LeafMeasure& mu);

}  // namespace ewl
