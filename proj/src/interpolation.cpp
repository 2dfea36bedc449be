#include "pidmd/interpolation.hpp"

#include "pidmd/errors.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace pidmd {

std::string_view scheme_id(InterpScheme scheme) {
  switch (scheme) {
    case InterpScheme::PiecewiseLinear1D: return "piecewise-linear-1d";
    case InterpScheme::PolyharmonicAffine: return "polyharmonic-r1-affine";
  }
  return "unknown";
}

InterpScheme scheme_from_id(std::string_view id) {
  if (id == "piecewise-linear-1d") return InterpScheme::PiecewiseLinear1D;
  if (id == "polyharmonic-r1-affine") return InterpScheme::PolyharmonicAffine;
  fail(ErrorKind::InvalidInput, "unknown interpolation scheme '" + std::string(id) + "'");
}

ParameterInterpolator::ParameterInterpolator(std::vector<RealVector> knots)
    : knots_(std::move(knots)) {
  require(!knots_.empty(), "interpolator: no knots");
  const Index p = knots_.front().size();
  require(p >= 1, "interpolator: parameters must have at least one coordinate");
  for (const auto& k : knots_) {
    require(k.size() == p, "interpolator: knots differ in dimension");
    require_finite(k, "interpolator knot");
  }
  for (std::size_t a = 0; a < knots_.size(); ++a) {
    for (std::size_t b = a + 1; b < knots_.size(); ++b) {
      require((knots_[a] - knots_[b]).norm() > 0.0, "interpolator: duplicate knots");
    }
  }

  const Index L = static_cast<Index>(knots_.size());
  if (p == 1) {
    scheme_ = InterpScheme::PiecewiseLinear1D;
    order_.resize(knots_.size());
    std::iota(order_.begin(), order_.end(), Index{0});
    std::sort(order_.begin(), order_.end(), [&](Index a, Index b) {
      return knots_[static_cast<std::size_t>(a)](0) < knots_[static_cast<std::size_t>(b)](0);
    });
    return;
  }

  scheme_ = InterpScheme::PolyharmonicAffine;
  RealMatrix saddle = RealMatrix::Zero(L + p + 1, L + p + 1);
  for (Index a = 0; a < L; ++a) {
    const auto& ka = knots_[static_cast<std::size_t>(a)];
    for (Index b = 0; b < L; ++b) {
      saddle(a, b) = (ka - knots_[static_cast<std::size_t>(b)]).norm();
    }
    saddle(a, L) = 1.0;
    saddle(L, a) = 1.0;
    saddle.block(a, L + 1, 1, p) = ka.transpose();
    saddle.block(L + 1, a, p, 1) = ka;
  }
  // Knots that do not determine an affine function leave the saddle system
  // singular; the pseudoinverse then picks the minimum-norm coefficients.
  saddle_inverse_ = pinv(saddle, 1e-12);
}

ParameterInterpolator::Weights ParameterInterpolator::weights(const RealVector& theta) const {
  require(!knots_.empty(), "interpolator: not initialized");
  require(theta.size() == dim(), "interpolator: theta has length " +
                                     std::to_string(theta.size()) + ", expected " +
                                     std::to_string(dim()));
  require_finite(theta, "interpolator theta");
  if (scheme_ == InterpScheme::PiecewiseLinear1D) return piecewise_linear(theta(0));
  return polyharmonic(theta);
}

ParameterInterpolator::Weights ParameterInterpolator::piecewise_linear(double t) const {
  const Index L = static_cast<Index>(knots_.size());
  Weights out{RealVector::Zero(L), false};
  auto value = [&](std::size_t sorted) { return knots_[static_cast<std::size_t>(order_[sorted])](0); };

  if (L == 1) {
    out.w(0) = 1.0;
    out.extrapolated = t != value(0);
    return out;
  }
  out.extrapolated = t < value(0) || t > value(order_.size() - 1);

  // Segment [s, s+1] containing t, clamped to the end segments.
  std::size_t s = 0;
  while (s + 2 < order_.size() && t > value(s + 1)) ++s;
  const double lo = value(s);
  const double hi = value(s + 1);
  const double frac = (t - lo) / (hi - lo);
  if (frac == 0.0) {
    out.w(order_[s]) = 1.0;
  } else if (frac == 1.0) {
    out.w(order_[s + 1]) = 1.0;
  } else {
    out.w(order_[s]) = 1.0 - frac;
    out.w(order_[s + 1]) = frac;
  }
  return out;
}

ParameterInterpolator::Weights ParameterInterpolator::polyharmonic(const RealVector& theta) const {
  const Index L = static_cast<Index>(knots_.size());
  const Index p = dim();
  RealVector basis(L + p + 1);
  RealVector lo = knots_.front();
  RealVector hi = knots_.front();
  for (Index l = 0; l < L; ++l) {
    const auto& k = knots_[static_cast<std::size_t>(l)];
    basis(l) = (theta - k).norm();
    lo = lo.cwiseMin(k);
    hi = hi.cwiseMax(k);
  }
  basis(L) = 1.0;
  basis.tail(p) = theta;

  Weights out;
  out.w = (saddle_inverse_.transpose() * basis).head(L);
  out.extrapolated = ((theta.array() < lo.array()) || (theta.array() > hi.array())).any();
  // Snap exact knot hits so knot reproduction does not carry solve roundoff.
  for (Index l = 0; l < L; ++l) {
    if (basis(l) == 0.0) {
      out.w.setZero();
      out.w(l) = 1.0;
      break;
    }
  }
  return out;
}

}  // namespace pidmd
