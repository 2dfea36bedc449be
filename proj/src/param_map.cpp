#include "pidmd/param_map.hpp"

#include "pidmd/errors.hpp"
#include "pidmd/json_util.hpp"

#include <cmath>

namespace pidmd {

using nlohmann::json;

Normalization Normalization::identity(Index p) {
  return {RealVector::Ones(p), RealVector::Zero(p)};
}

Normalization Normalization::to_range(const RealVector& lo, const RealVector& hi,
                                      double target_lo, double target_hi) {
  require(lo.size() == hi.size(), "normalization: bound lengths differ");
  require(target_hi > target_lo, "normalization: empty target range");
  Normalization out{RealVector(lo.size()), RealVector(lo.size())};
  for (Index i = 0; i < lo.size(); ++i) {
    const double width = hi(i) - lo(i);
    require(width >= 0.0, "normalization: lower bound above upper bound");
    out.scale(i) = width > 0.0 ? (target_hi - target_lo) / width : 1.0;
    out.offset(i) = target_lo - out.scale(i) * lo(i);
  }
  return out;
}

Normalization Normalization::fit(const std::vector<RealVector>& samples, double target_lo,
                                 double target_hi) {
  require(!samples.empty(), "normalization: no samples");
  RealVector lo = samples.front();
  RealVector hi = samples.front();
  for (const auto& s : samples) {
    require(s.size() == lo.size(), "normalization: samples differ in dimension");
    lo = lo.cwiseMin(s);
    hi = hi.cwiseMax(s);
  }
  return to_range(lo, hi, target_lo, target_hi);
}

RealVector Normalization::apply(const RealVector& theta) const {
  require(theta.size() == scale.size(), "theta has length " + std::to_string(theta.size()) +
                                            ", expected " + std::to_string(scale.size()));
  return scale.cwiseProduct(theta) + offset;
}

RealVector Normalization::invert(const RealVector& normalized) const {
  require(normalized.size() == scale.size(), "normalized theta has wrong length");
  return (normalized - offset).cwiseQuotient(scale);
}

void Normalization::validate() const {
  require(scale.size() == offset.size(), "normalization: scale/offset lengths differ");
  require(scale.allFinite() && offset.allFinite(), "normalization: non-finite entries");
  for (Index i = 0; i < scale.size(); ++i) {
    require(scale(i) != 0.0, "normalization: zero scale is not invertible");
  }
}

ParamMap::ParamMap(Index p, std::vector<ParamFunction> functions, Normalization normalization)
    : p_(p), functions_(std::move(functions)), normalization_(std::move(normalization)) {
  validate();
}

ParamMap::ParamMap(Index p, std::vector<ParamFunction> functions)
    : ParamMap(p, std::move(functions), Normalization::identity(p)) {}

ParamMap ParamMap::coordinates(Index p, Normalization normalization) {
  std::vector<ParamFunction> fns;
  for (Index i = 0; i < p; ++i) fns.emplace_back(CoordinateFn{i});
  return {p, std::move(fns), std::move(normalization)};
}

ParamMap ParamMap::none(Index p) { return {p, {}}; }

void ParamMap::validate() const {
  require(p_ >= 0, "param map: negative dimension");
  require(normalization_.dim() == p_, "param map: normalization dimension differs from p");
  normalization_.validate();
  for (const auto& fn : functions_) {
    const Index index = std::visit([](const auto& f) { return f.index; }, fn);
    require(index >= 0 && index < p_, "param map: function refers to coordinate " +
                                          std::to_string(index) + " of a " +
                                          std::to_string(p_) + "-dimensional parameter");
  }
}

RealVector ParamMap::evaluate(const RealVector& theta) const {
  require_finite(theta, "theta");
  return evaluate_normalized(normalization_.apply(theta));
}

RealVector ParamMap::evaluate_normalized(const RealVector& theta_n) const {
  require(theta_n.size() == p_, "param map: wrong parameter length");
  RealVector h(m());
  for (Index i = 0; i < m(); ++i) {
    h(i) = std::visit(
        [&](const auto& f) -> double {
          using F = std::decay_t<decltype(f)>;
          const double x = theta_n(f.index);
          if constexpr (std::is_same_v<F, CoordinateFn>) {
            return x;
          } else if constexpr (std::is_same_v<F, AffineFn>) {
            return f.slope * x + f.intercept;
          } else if constexpr (std::is_same_v<F, PolynomialFn>) {
            double acc = 0.0;
            for (auto it = f.coeffs.rbegin(); it != f.coeffs.rend(); ++it) acc = acc * x + *it;
            return acc;
          } else {
            return f.amplitude * std::sin(f.frequency * x + f.phase);
          }
        },
        functions_[static_cast<std::size_t>(i)]);
  }
  if (!h.allFinite()) fail(ErrorKind::InvalidInput, "param map: h(theta) is not finite");
  return h;
}

json to_json(const ParamMap& map) {
  json fns = json::array();
  for (const auto& fn : map.functions()) {
    fns.push_back(std::visit(
        [](const auto& f) -> json {
          using F = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<F, CoordinateFn>) {
            return {{"kind", "coordinate"}, {"index", f.index}};
          } else if constexpr (std::is_same_v<F, AffineFn>) {
            return {{"kind", "affine"}, {"index", f.index}, {"slope", f.slope},
                    {"intercept", f.intercept}};
          } else if constexpr (std::is_same_v<F, PolynomialFn>) {
            return {{"kind", "polynomial"}, {"index", f.index}, {"coeffs", f.coeffs}};
          } else {
            return {{"kind", "sinusoid"}, {"index", f.index}, {"amplitude", f.amplitude},
                    {"frequency", f.frequency}, {"phase", f.phase}};
          }
        },
        fn));
  }
  return {{"p", map.p()},
          {"functions", fns},
          {"normalization",
           {{"scale", json_util::to_json(map.normalization().scale)},
            {"offset", json_util::to_json(map.normalization().offset)}}}};
}

namespace {

ParamFunction function_from_json(const json& j) {
  using json_util::get;
  using json_util::get_or;
  constexpr std::string_view ctx = "param function";
  const auto kind = get<std::string>(j, "kind", ctx);
  if (kind == "coordinate") {
    json_util::check_keys(j, {"kind", "index"}, {"index"}, ctx);
    return CoordinateFn{get<Index>(j, "index", ctx)};
  }
  if (kind == "affine") {
    json_util::check_keys(j, {"kind", "index", "slope", "intercept"}, {"index"}, ctx);
    return AffineFn{get<Index>(j, "index", ctx), get_or(j, "slope", 1.0, ctx),
                    get_or(j, "intercept", 0.0, ctx)};
  }
  if (kind == "polynomial") {
    json_util::check_keys(j, {"kind", "index", "coeffs"}, {"index", "coeffs"}, ctx);
    return PolynomialFn{get<Index>(j, "index", ctx), get<std::vector<double>>(j, "coeffs", ctx)};
  }
  if (kind == "sinusoid") {
    json_util::check_keys(j, {"kind", "index", "amplitude", "frequency", "phase"}, {"index"}, ctx);
    return SinusoidFn{get<Index>(j, "index", ctx), get_or(j, "amplitude", 1.0, ctx),
                      get_or(j, "frequency", 1.0, ctx), get_or(j, "phase", 0.0, ctx)};
  }
  fail(ErrorKind::InvalidInput, "param function: unknown kind '" + kind + "'");
}

}  // namespace

ParamMap param_map_from_json(const json& j) {
  constexpr std::string_view ctx = "param_map";
  json_util::check_keys(j, {"p", "functions", "normalization"}, {"p", "functions"}, ctx);
  const auto p = json_util::get<Index>(j, "p", ctx);
  std::vector<ParamFunction> fns;
  for (const auto& f : j.at("functions")) fns.push_back(function_from_json(f));
  Normalization norm = Normalization::identity(p);
  if (j.contains("normalization")) {
    const auto& nj = j.at("normalization");
    json_util::check_keys(nj, {"scale", "offset"}, {"scale", "offset"}, "normalization");
    norm.scale = json_util::vector_from_json(nj.at("scale"), "normalization.scale");
    norm.offset = json_util::vector_from_json(nj.at("offset"), "normalization.offset");
  }
  return {p, std::move(fns), std::move(norm)};
}

Index excitation_rank(const ParamMap& map, const std::vector<RealVector>& thetas) {
  if (thetas.empty()) return 0;
  RealMatrix samples(map.m() + 1, static_cast<Index>(thetas.size()));
  for (std::size_t l = 0; l < thetas.size(); ++l) {
    samples(0, static_cast<Index>(l)) = 1.0;
    samples.col(static_cast<Index>(l)).tail(map.m()) = map.evaluate(thetas[l]);
  }
  Eigen::ColPivHouseholderQR<RealMatrix> qr(samples);
  qr.setThreshold(1e-10);
  return qr.rank();
}

}  // namespace pidmd
