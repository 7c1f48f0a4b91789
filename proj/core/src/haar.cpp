#include "ewl/haar.hpp"

#include <cmath>
#include <tuple>

namespace ewl {

LeafFunction haar0(const Grid& grid, Node e) {
  LeafFunction h(grid);
  const double s = 1.0 / std::sqrt(grid.volume(e));
  for (Node half : {grid.first_half(e), grid.second_half(e)}) {
    const double v = half == grid.first_half(e) ? -s : s;
    const auto [lo, hi] = grid.leaf_range(half);
    for (std::size_t p = lo; p < hi; ++p) h[p] = v;
  }
  return h;
}

LeafFunction haar_avg(const Grid& grid, Node e) {
  LeafFunction h = LeafFunction::indicator(grid, e);
  h *= 1.0 / grid.volume(e);
  return h;
}

LeafFunction weighted_haar(Node e, const LeafMeasure& mu) {
  const Grid& grid = mu.grid();
  LeafFunction h(grid);
  if (!mu.haar_charged(e)) return h;
  const double m = mu(e);
  const double m1 = mu(grid.first_half(e));
  const double m2 = mu(grid.second_half(e));
  const double a = std::sqrt(m1 / (m * m2));
  const double b = std::sqrt(m2 / (m * m1));
  auto [lo, hi] = grid.leaf_range(grid.first_half(e));
  for (std::size_t p = lo; p < hi; ++p) h[p] = -b;
  std::tie(lo, hi) = grid.leaf_range(grid.second_half(e));
  for (std::size_t p = lo; p < hi; ++p) h[p] = a;
  return h;
}

HaarBasis::HaarBasis(const LeafMeasure& mu)
    : grid_(mu.grid()), n_(mu.grid().leaf_count()), mass_(2 * n_), a_(n_, 0.0), b_(n_, 0.0) {
  for (std::uint32_t id = 1; id < 2 * n_; ++id) mass_[id] = mu(Node{id});
  for (std::uint32_t id = 1; id < n_; ++id) {
    const double m1 = mass_[2 * id];
    const double m2 = mass_[2 * id + 1];
    if (m1 > 0.0 && m2 > 0.0) {
      const double m = mass_[id];
      a_[id] = std::sqrt(m1 / (m * m2));
      b_[id] = std::sqrt(m2 / (m * m1));
    }
  }
  c0_ = mass_[1] > 0.0 ? 1.0 / std::sqrt(mass_[1]) : 0.0;
}

void HaarBasis::analyze(const double* values, double* coeffs) const {
  // s[id] = integral of f over node id
  std::vector<double> s(2 * n_);
  for (std::size_t p = 0; p < n_; ++p) s[n_ + p] = values[p] * mass_[n_ + p];
  for (std::size_t id = n_ - 1; id >= 1; --id) {
    s[id] = s[2 * id] + s[2 * id + 1];
    coeffs[id] = a_[id] * s[2 * id + 1] - b_[id] * s[2 * id];
  }
  coeffs[0] = c0_ * s[1];
}

void HaarBasis::synthesize(const double* coeffs, double* values) const {
  std::vector<double> v(2 * n_);
  v[1] = c0_ * coeffs[0];
  for (std::size_t id = 1; id < n_; ++id) {
    v[2 * id] = v[id] - b_[id] * coeffs[id];
    v[2 * id + 1] = v[id] + a_[id] * coeffs[id];
  }
  for (std::size_t p = 0; p < n_; ++p) values[p] = v[n_ + p];
}

Eigen::VectorXd HaarBasis::analyze(const Eigen::VectorXd& values) const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(n_));
  analyze(values.data(), out.data());
  return out;
}

Eigen::VectorXd HaarBasis::synthesize(const Eigen::VectorXd& coeffs) const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(n_));
  synthesize(coeffs.data(), out.data());
  return out;
}

void HaarBasis::analyze_columns(Eigen::MatrixXd& m) const {
  Eigen::VectorXd tmp(m.rows());
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    analyze(m.col(j).data(), tmp.data());
    m.col(j) = tmp;
  }
}

void HaarBasis::synthesize_columns(Eigen::MatrixXd& m) const {
  Eigen::VectorXd tmp(m.rows());
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    synthesize(m.col(j).data(), tmp.data());
    m.col(j) = tmp;
  }
}

void HaarBasis::analyze_rows(Eigen::MatrixXd& m) const {
  Eigen::MatrixXd t = m.transpose();
  analyze_columns(t);
  m = t.transpose();
}

void HaarBasis::synthesize_rows(Eigen::MatrixXd& m) const {
  Eigen::MatrixXd t = m.transpose();
  synthesize_columns(t);
  m = t.transpose();
}

Eigen::VectorXd HaarBasis::normalized_indicator(Node r) const {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_));
  const double mr = mass_[r.id];
  if (!(mr > 0.0)) return c;
  const double root = std::sqrt(mr);
  // h_G is constant on R for every strict ancestor G of R
  std::uint32_t child = r.id;
  for (std::uint32_t g = r.id / 2; g >= 1; child = g, g /= 2) {
    c[g] = root * ((child & 1u) ? a_[g] : -b_[g]);
  }
  c[0] = root * c0_;
  return c;
}

HaarCoefficients martingale_decompose(const LeafFunction& f, const LeafMeasure& mu) {
  const HaarBasis basis(mu);
  HaarCoefficients out;
  out.coeffs.assign(basis.size(), 0.0);
  basis.analyze(f.values().data(), out.coeffs.data());
  out.mean = out.coeffs[0] * basis.constant();
  out.coeffs[0] = 0.0;
  return out;
}

LeafFunction reconstruct(const HaarCoefficients& c, const LeafMeasure& mu) {
  const HaarBasis basis(mu);
  std::vector<double> coeffs = c.coeffs;
  coeffs[0] = 0.0;
  LeafFunction f(mu.grid());
  basis.synthesize(coeffs.data(), f.values().data());
  for (std::size_t p = 0; p < f.size(); ++p) f[p] += c.mean;
  return f;
}

}  // namespace ewl
