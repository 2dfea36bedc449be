#pragma once

// Known parameter functions h_1..h_m(theta).
//
// Functions are declared from a small set of primitives rather than as
// arbitrary callables, so a model can be written to disk and reloaded with
// the exact same parametrization. Raw theta is always the external
// interface; h acts on the normalized coordinates scale * theta + offset.

#include "pidmd/linalg.hpp"

#include "json.hpp"

#include <variant>
#include <vector>

namespace pidmd {

struct Normalization {
  RealVector scale;
  RealVector offset;

  static Normalization identity(Index p);
  /// Maps [lo_i, hi_i] onto [target_lo, target_hi] per coordinate. A
  /// coordinate with lo == hi keeps unit scale and is shifted to target_lo.
  static Normalization to_range(const RealVector& lo, const RealVector& hi,
                                double target_lo = 0.0, double target_hi = 0.01);
  /// to_range over the coordinate-wise extent of the samples.
  static Normalization fit(const std::vector<RealVector>& samples, double target_lo = 0.0,
                           double target_hi = 0.01);

  Index dim() const { return scale.size(); }
  RealVector apply(const RealVector& theta) const;
  RealVector invert(const RealVector& normalized) const;
  void validate() const;
};

/// h = theta_n[index]
struct CoordinateFn {
  Index index = 0;
};
/// h = slope * theta_n[index] + intercept
struct AffineFn {
  Index index = 0;
  double slope = 1.0;
  double intercept = 0.0;
};
/// h = sum_k coeffs[k] * theta_n[index]^k
struct PolynomialFn {
  Index index = 0;
  std::vector<double> coeffs;
};
/// h = amplitude * sin(frequency * theta_n[index] + phase)
struct SinusoidFn {
  Index index = 0;
  double amplitude = 1.0;
  double frequency = 1.0;
  double phase = 0.0;
};

using ParamFunction = std::variant<CoordinateFn, AffineFn, PolynomialFn, SinusoidFn>;

class ParamMap {
 public:
  ParamMap() = default;
  ParamMap(Index p, std::vector<ParamFunction> functions, Normalization normalization);
  ParamMap(Index p, std::vector<ParamFunction> functions);

  /// h_i(theta_n) = theta_n[i] for every coordinate.
  static ParamMap coordinates(Index p, Normalization normalization);
  /// No parameter functions: the lifted regression reduces to plain DMD.
  static ParamMap none(Index p);

  Index p() const { return p_; }
  Index m() const { return static_cast<Index>(functions_.size()); }
  const std::vector<ParamFunction>& functions() const { return functions_; }
  const Normalization& normalization() const { return normalization_; }

  /// h(normalize(theta)); theta must have length p.
  RealVector evaluate(const RealVector& theta) const;
  /// h applied to already-normalized coordinates.
  RealVector evaluate_normalized(const RealVector& theta_n) const;

 private:
  void validate() const;

  Index p_ = 0;
  std::vector<ParamFunction> functions_;
  Normalization normalization_;
};

nlohmann::json to_json(const ParamMap& map);
ParamMap param_map_from_json(const nlohmann::json& j);

/// Rank of the (m+1) x L matrix whose columns are [1; h(theta_l)].
/// Below m+1 the parameter-dependent operators are not identifiable.
Index excitation_rank(const ParamMap& map, const std::vector<RealVector>& thetas);

}  // namespace pidmd
