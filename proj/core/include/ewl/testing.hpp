#pragma once

#include <optional>

#include "ewl/operator.hpp"

namespace ewl {

enum class NormMethod { automatic, dense, power };

/// Charged-leaf count up to which the automatic method uses a full SVD.
inline constexpr std::size_t kDenseNormLimit = 256;

struct NormResult {
  double value = 0.0;
  NormMethod method = NormMethod::dense;
  int iterations = 0;
};

/// ||T(sigma .)||_{L2(sigma) -> L2(omega)}: the top singular value of the
/// whitened matrix on charged leaves. Throws UndefinedNormError when either
/// measure vanishes.
NormResult operator_norm_detail(const DyadicOperator& t, NormMethod method = NormMethod::automatic);
double operator_norm(const DyadicOperator& t, NormMethod method = NormMethod::automatic);

/// A supremum and the node (or pair) attaining it.
struct Witnessed {
  double value = 0.0;
  Node first{1};
  Node second{1};
};

struct LocalTesting {
  Witnessed c1;
  Witnessed c2;
};

/// sup_E ||1_E T(sigma 1_E)||_omega / sigma(E)^{1/2} and its dual, over
/// every node of positive mass (rectangles and leaf cubes).
LocalTesting local_testing(const DyadicOperator& t);
/// Same without the 1_E restriction.
LocalTesting global_testing(const DyadicOperator& t);
/// Global constants again, accumulating T(sigma 1_E) bottom-up through the
/// tree instead of from prefix sums.
LocalTesting global_testing_incremental(const DyadicOperator& t);

/// sup |<T(sigma 1_E), 1_E'>_omega| / (sigma(E) omega(E'))^{1/2} over pairs
/// with |level(E) - level(E')| <= r and E' meeting the clipped E^(r).
Witnessed weak_boundedness(const DyadicOperator& t, int r);

struct CubeTesting {
  Witnessed c1;
  Witnessed c2;
  Witnessed c3;
};

/// The three constants with every index restricted to dyadic cubes.
CubeTesting cube_testing(const DyadicOperator& t, int r);

struct TestingReport {
  double norm = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;
  double c1_global = 0.0;
  double c2_global = 0.0;
  double c1_cube = 0.0;
  double c2_cube = 0.0;
  double c3_cube = 0.0;
  /// Weak boundedness at radius + 1, which also pairs the halves of each
  /// rectangle; the per-term bounds of the certificate are stated with it.
  double c3_wide = 0.0;
  /// norm / (c1 + c2 + c3), 0 when the sum vanishes.
  double ratio_sum = 0.0;
  /// max(c1, c2, c3) / norm, 0 when the norm vanishes.
  double ratio_max = 0.0;
  int radius = 0;
  Witnessed w1, w2, w3, w1_global, w2_global;
};

/// All constants; `r` defaults to the claimed radius, then the raw EWL radius.
TestingReport testing_report(const DyadicOperator& t, std::optional<int> r = std::nullopt);

/// Radius used when none is supplied.
int default_radius(const DyadicOperator& t);

}  // namespace ewl
