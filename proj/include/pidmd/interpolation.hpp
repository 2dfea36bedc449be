#pragma once

#include "pidmd/linalg.hpp"

#include <string_view>
#include <vector>

namespace pidmd {

enum class InterpScheme {
  /// Piecewise-linear over sorted knots; linear continuation of the end
  /// segments outside the knot range.
  PiecewiseLinear1D,
  /// Polyharmonic radial basis phi(r) = r with an affine tail. Exact at the
  /// knots and exact for affine functions of theta.
  PolyharmonicAffine,
};

std::string_view scheme_id(InterpScheme scheme);
InterpScheme scheme_from_id(std::string_view id);

/// Linear interpolation weights over a fixed set of parameter knots: the
/// interpolant of values f_l at theta is sum_l w_l(theta) f_l, so one set of
/// weights serves every quantity interpolated over the same knots.
class ParameterInterpolator {
 public:
  ParameterInterpolator() = default;
  explicit ParameterInterpolator(std::vector<RealVector> knots);

  struct Weights {
    RealVector w;
    /// theta lies outside the knot range (1-D) or bounding box (multi-D).
    bool extrapolated = false;
  };

  Weights weights(const RealVector& theta) const;

  InterpScheme scheme() const { return scheme_; }
  const std::vector<RealVector>& knots() const { return knots_; }
  Index dim() const { return knots_.empty() ? 0 : knots_.front().size(); }

  /// sum_l w_l values[l]
  template <typename Matrix>
  static Matrix combine(const RealVector& w, const std::vector<Matrix>& values) {
    Matrix out = Matrix::Zero(values.front().rows(), values.front().cols());
    for (std::size_t l = 0; l < values.size(); ++l) {
      out += w(static_cast<Index>(l)) * values[l];
    }
    return out;
  }

 private:
  Weights piecewise_linear(double t) const;
  Weights polyharmonic(const RealVector& theta) const;

  std::vector<RealVector> knots_;
  InterpScheme scheme_ = InterpScheme::PiecewiseLinear1D;
  std::vector<Index> order_;  // 1-D: knot indices sorted by value
  RealMatrix saddle_inverse_;  // multi-D: inverse of [[Phi, P], [P^T, 0]]
};

}  // namespace pidmd
