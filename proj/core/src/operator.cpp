#include "ewl/operator.hpp"

#include <array>
#include <cmath>

#include "ewl/errors.hpp"
#include "ewl/haar.hpp"
#include "ewl/rng.hpp"

namespace ewl {

namespace {

constexpr std::array<std::pair<Family, std::string_view>, 6> kFamilyNames{{
    {Family::martingale_transform, "martingale_transform"},
    {Family::paraproduct, "paraproduct"},
    {Family::haar_shift, "haar_shift"},
    {Family::perfect_dyadic, "perfect_dyadic"},
    {Family::random_ewl, "random_ewl"},
    {Family::custom, "custom"},
}};

Eigen::VectorXd masses_of(const LeafMeasure& mu) {
  const auto m = mu.masses();
  return Eigen::Map<const Eigen::VectorXd>(m.data(), static_cast<Eigen::Index>(m.size()));
}

}  // namespace

std::string_view to_string(Family f) {
  for (const auto& [fam, name] : kFamilyNames) {
    if (fam == f) return name;
  }
  return "custom";
}

Family family_from_string(std::string_view s) {
  for (const auto& [fam, name] : kFamilyNames) {
    if (name == s) return fam;
  }
  throw ConfigError("unknown operator family '" + std::string(s) + "'");
}

CoefficientSequence::CoefficientSequence(Grid grid)
    : grid_(std::move(grid)), b_(grid_.leaf_count(), 0.0) {}

CoefficientSequence CoefficientSequence::constant(const Grid& grid, double c) {
  CoefficientSequence b(grid);
  for (std::size_t id = 1; id < b.b_.size(); ++id) b.b_[id] = c;
  return b;
}

CoefficientSequence CoefficientSequence::single(const Grid& grid, Node e, double value) {
  if (!grid.is_rectangle(e)) throw ScaleError("coefficients live on rectangles, not leaves");
  CoefficientSequence b(grid);
  b.b_[e.id] = value;
  return b;
}

CoefficientSequence CoefficientSequence::random(const Grid& grid, std::uint64_t seed) {
  CoefficientSequence b(grid);
  Rng rng(seed);
  for (std::size_t id = 1; id < b.b_.size(); ++id) b.b_[id] = rng.uniform(-1.0, 1.0);
  return b;
}

DyadicOperator::DyadicOperator(LeafMeasure sigma, LeafMeasure omega, Eigen::MatrixXd kernel,
                               Family family, std::optional<int> claimed_radius)
    : sigma_(std::move(sigma)),
      omega_(std::move(omega)),
      kernel_(std::move(kernel)),
      family_(family),
      claimed_radius_(claimed_radius) {
  if (!(sigma_.grid() == omega_.grid())) throw DomainError("sigma and omega live on different grids");
  const auto n = static_cast<Eigen::Index>(sigma_.grid().leaf_count());
  if (sigma_.grid().leaf_count() > kDenseLeafCap) {
    throw SizeError("dense operators are limited to " + std::to_string(kDenseLeafCap) + " leaves");
  }
  if (kernel_.rows() != n || kernel_.cols() != n) {
    throw DomainError("kernel is " + std::to_string(kernel_.rows()) + "x" +
                      std::to_string(kernel_.cols()) + ", expected " + std::to_string(n) + "x" +
                      std::to_string(n));
  }
}

DyadicOperator& DyadicOperator::with_seed(std::uint64_t seed) {
  seed_ = seed;
  return *this;
}

DyadicOperator& DyadicOperator::with_root_level(int level) {
  if (level < 0 || level > grid().levels()) throw DomainError("root level outside the tree");
  root_level_ = level;
  return *this;
}

DyadicOperator& DyadicOperator::with_coefficients(CoefficientSequence b) {
  coefficients_ = std::move(b);
  return *this;
}

LeafFunction DyadicOperator::apply(const LeafFunction& f) const {
  if (!(f.grid() == grid())) throw DomainError("function and operator live on different grids");
  const auto n = static_cast<Eigen::Index>(f.size());
  const Eigen::VectorXd x =
      Eigen::Map<const Eigen::VectorXd>(f.values().data(), n).cwiseProduct(masses_of(sigma_));
  const Eigen::VectorXd y = kernel_ * x;
  return LeafFunction(grid(), std::vector<double>(y.data(), y.data() + n));
}

LeafFunction DyadicOperator::apply_adjoint(const LeafFunction& g) const {
  if (!(g.grid() == grid())) throw DomainError("function and operator live on different grids");
  const auto n = static_cast<Eigen::Index>(g.size());
  const Eigen::VectorXd x =
      Eigen::Map<const Eigen::VectorXd>(g.values().data(), n).cwiseProduct(masses_of(omega_));
  const Eigen::VectorXd y = kernel_.transpose() * x;
  return LeafFunction(grid(), std::vector<double>(y.data(), y.data() + n));
}

double DyadicOperator::pairing(const LeafFunction& f, const LeafFunction& g) const {
  return inner(apply(f), g, omega_);
}

DyadicOperator DyadicOperator::adjoint() const {
  DyadicOperator t(omega_, sigma_, kernel_.transpose(), family_, claimed_radius_);
  t.seed_ = seed_;
  t.root_level_ = root_level_;
  return t;
}

Eigen::MatrixXd DyadicOperator::whitened() const {
  const Eigen::VectorXd s = masses_of(sigma_).cwiseSqrt();
  const Eigen::VectorXd w = masses_of(omega_).cwiseSqrt();
  return w.asDiagonal() * kernel_ * s.asDiagonal();
}

Eigen::MatrixXd DyadicOperator::haar_matrix() const {
  Eigen::MatrixXd m = kernel_;
  HaarBasis(sigma_).analyze_rows(m);
  HaarBasis(omega_).analyze_columns(m);
  return m;
}

Eigen::MatrixXd DyadicOperator::haar_images() const {
  Eigen::MatrixXd y = kernel_;
  HaarBasis(sigma_).analyze_rows(y);
  y.col(0).setZero();
  return y;
}

Eigen::MatrixXd kernel_from_haar(const Eigen::MatrixXd& m, const LeafMeasure& sigma,
                                 const LeafMeasure& omega) {
  Eigen::MatrixXd k = m;
  HaarBasis(sigma).synthesize_rows(k);
  HaarBasis(omega).synthesize_columns(k);
  return k;
}

}  // namespace ewl
