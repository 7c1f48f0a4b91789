#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ewl/operator.hpp"
#include "ewl/stopping.hpp"
#include "ewl/testing.hpp"

namespace ewl {

/// (2^{n(2r+1)} - 1) / (2^n - 1): bound on the rectangles of comparable size
/// meeting a fixed E^(r).
std::uint64_t count_M(int n, int r);

/// Relative slack allowed on inequality verdicts.
inline constexpr double kBoundSlack = 1e-9;
/// Relative tolerance of the exact partitions, against ||f|| ||g|| ||T||.
inline constexpr double kPartitionTolerance = 1e-10;

/// An inequality lhs <= rhs that the proof chain predicts.
struct Bound {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  bool ok = true;
};

/// An identity lhs == rhs that holds exactly up to rounding.
struct Partition {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double tolerance = 0.0;
  bool ok = true;
};

Bound make_bound(std::string name, double lhs, double rhs, double scale = 0.0);
Partition make_partition(std::string name, double lhs, double rhs, double tolerance);

struct OrthantCheck {
  double max_cross = 0.0;
  double tolerance = 0.0;
  int first_root = 0;
  int second_root = 0;
  bool ok = true;
};

/// <T(sigma f 1_{Q_i}), g 1_{Q_j}>_omega for all pairs of distinct root cubes,
/// the roots being the nodes at the operator's root level.
OrthantCheck orthant_vanishing_check(const DyadicOperator& t, const LeafFunction& f,
                                     const LeafFunction& g);

struct BoundaryTerms {
  /// Haar part of f against the mean of g, mean of f against the Haar part of
  /// g, and mean against mean.
  double term1 = 0.0;
  double term2 = 0.0;
  double term3 = 0.0;
  Bound bound1, bound2, bound3;
  bool ok() const { return bound1.ok && bound2.ok && bound3.ok; }
};

BoundaryTerms boundary_terms_check(const DyadicOperator& t, const LeafFunction& f,
                                   const LeafFunction& g, double c1, double c2);
BoundaryTerms boundary_terms_check(const DyadicOperator& t, const LeafFunction& f,
                                   const LeafFunction& g);

struct AbcTerms {
  int radius = 0;
  /// Pairing of the mean-zero parts, computed on leaves.
  double pi = 0.0;
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  /// Largest single excluded pair term, and its rectangles (sigma side, omega side).
  double worst_excluded = 0.0;
  Node excluded_e{1};
  Node excluded_g{1};
  /// Longest list of comparable rectangles with a nonzero entry, over E.
  std::uint64_t max_list = 0;
  double norm_f = 0.0;
  double norm_g = 0.0;
  Partition partition;
};

/// Splits <T(sigma f0), g0>_omega (f0, g0 the mean-zero parts) by relative
/// scale: A for levels within r, B for G strictly above E^(r), C for E
/// strictly above G^(r). Throws DecompositionError if the remaining pairs do
/// not vanish; `op_norm` scales the tolerance.
AbcTerms decompose_ABC(const DyadicOperator& t, const LeafFunction& f, const LeafFunction& g,
                       int r, double op_norm);

/// |A| <= 4 M(r,n) c3 ||f|| ||g||, with c3 taken at radius r + 1.
Bound a_term_bound(const AbcTerms& abc, int n, double c3);

struct StoppingTerm {
  Node s{1};
  double b_s = 0.0;
  double i_s = 0.0;
  double ii_s = 0.0;
  double projection_norm = 0.0;
  double average_abs = 0.0;
  double omega_s = 0.0;
  Bound bound_i, bound_ii;
};

struct BSplit {
  double b = 0.0;
  double b1 = 0.0;
  double b2 = 0.0;
  double b2_collapsed = 0.0;
  std::vector<StoppingTerm> per_stopping;
  std::vector<Partition> partitions;
  std::vector<Bound> bounds;
  PackingCheck packing;
  EmbeddingCheck embedding;
  std::vector<Node> stopping_members;
};

/// B = B1 + B2 by stopping parents of g (built from |g| and omega), with
/// B2 collapsed to sum_S <g>_S Pi(P~_S f, 1_S) and B1 = sum_S (I_S - II_S).
/// `f` and `g` must be mean-zero; `b_total` is the B sum from decompose_ABC.
BSplit split_B(const DyadicOperator& t, const LeafFunction& f, const LeafFunction& g,
               const StoppingFamily& family, int r, double c2, double b_total, double op_norm);

struct BoundConstants {
  std::uint64_t m = 1;
  double a_factor = 4.0;
  double b2_factor = 0.0;
  double i_factor = 0.0;
  double ii_factor = 1.0;
  double b1_factor = 0.0;
  double embedding = 8.0;
  double packing = 2.0;
  double total = 0.0;
};

BoundConstants bound_constants(int n, int r);

struct BilinearCertificate {
  int radius = 0;
  double norm_f = 0.0;
  double norm_g = 0.0;
  TestingReport report;
  /// Pairing of the given f and g; the mean-zero part is split into A, B, C.
  double pi_total = 0.0;
  BoundaryTerms boundary;
  AbcTerms abc;
  double a_term = 0.0;
  double b_term = 0.0;
  double c_term = 0.0;
  double b1_term = 0.0;
  double b2_term = 0.0;
  BSplit b_split;
  /// The B machinery run on (T*, g, f).
  BSplit c_split;
  BoundConstants constants;
  std::vector<Partition> partitions;
  std::vector<Bound> bounds;

  bool partitions_ok() const;
  bool bounds_ok() const;
  /// Packing and stopping inequalities of both stopping families.
  bool packing_ok() const;
};

/// Runs every check of the proof on one (T, f, g); `r` defaults to the
/// operator's claimed radius, then its raw EWL radius.
BilinearCertificate full_certificate(const DyadicOperator& t, const LeafFunction& f,
                                     const LeafFunction& g, std::optional<int> r = std::nullopt);

}  // namespace ewl
