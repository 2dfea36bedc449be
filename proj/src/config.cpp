#include "pidmd/config.hpp"

#include "pidmd/errors.hpp"
#include "pidmd/json_util.hpp"

#include <map>

namespace pidmd {

namespace fs = std::filesystem;
using json = nlohmann::json;
using json_util::get;
using json_util::get_or;

namespace {

std::vector<RealVector> theta_list(const json& j, std::string_view ctx) {
  if (!j.is_array() || j.empty()) {
    fail(ErrorKind::InvalidInput, std::string(ctx) + ": expected a non-empty array");
  }
  std::vector<RealVector> out;
  for (const auto& entry : j) out.push_back(json_util::vector_from_json(entry, ctx));
  return out;
}

json theta_list_json(const std::vector<RealVector>& thetas) {
  json out = json::array();
  for (const auto& t : thetas) out.push_back(json_util::to_json(t));
  return out;
}

Index get_count(const json& j, std::string_view key, Index fallback, Index minimum,
                std::string_view ctx) {
  const auto v = get_or<Index>(j, key, fallback, ctx);
  if (v < minimum) {
    fail(ErrorKind::InvalidInput, std::string(ctx) + ": '" + std::string(key) + "' must be >= " +
                                      std::to_string(minimum));
  }
  return v;
}

GeneratorConfig parse_generator(const json& j) {
  constexpr std::string_view ctx = "data.generator";
  const auto kind = get<std::string>(j, "kind", ctx);
  if (kind == "advdiff") {
    json_util::check_keys(j, {"kind", "n", "length", "c", "dt", "substeps", "initial_condition", "ic_param"},
                          {}, ctx);
    AdvDiffSpec s;
    s.n = get_count(j, "n", s.n, 3, ctx);
    s.length = get_or(j, "length", s.length, ctx);
    s.c = get_or(j, "c", s.c, ctx);
    s.dt = get_or(j, "dt", s.dt, ctx);
    s.substeps = get_count(j, "substeps", s.substeps, 1, ctx);
    s.initial_condition = get_or(j, "initial_condition", s.initial_condition, ctx);
    s.ic_param = get_or(j, "ic_param", s.ic_param, ctx);
    s.initial_state();  // rejects unknown initial conditions early
    return s;
  }
  if (kind == "affine") {
    json_util::check_keys(j, {"kind", "n", "spectral_radius_target", "coupling", "noise_std", "dt"}, {},
                          ctx);
    AffineGenerator g;
    g.n = get_count(j, "n", g.n, 1, ctx);
    g.spectral_radius_target = get_or(j, "spectral_radius_target", g.spectral_radius_target, ctx);
    g.coupling = get_or(j, "coupling", g.coupling, ctx);
    g.noise_std = get_or(j, "noise_std", g.noise_std, ctx);
    g.dt = get_or(j, "dt", g.dt, ctx);
    require(g.dt > 0.0 && g.noise_std >= 0.0, "data.generator: dt must be > 0 and noise_std >= 0");
    return g;
  }
  if (kind == "shear") {
    json_util::check_keys(j, {"kind", "gain", "fast", "slow", "x0", "dt"}, {}, ctx);
    ShearGenerator g;
    g.family.gain = get_or(j, "gain", g.family.gain, ctx);
    g.family.fast = get_or(j, "fast", g.family.fast, ctx);
    g.family.slow = get_or(j, "slow", g.family.slow, ctx);
    if (j.contains("x0")) g.x0 = json_util::vector_from_json(j.at("x0"), "data.generator.x0");
    g.dt = get_or(j, "dt", g.dt, ctx);
    require(g.x0.size() == 2, "data.generator: shear x0 must have two entries");
    require(g.dt > 0.0, "data.generator: dt must be > 0");
    return g;
  }
  fail(ErrorKind::InvalidInput, "data.generator: unknown kind '" + kind + "'");
}

json generator_json(const GeneratorConfig& g) {
  return std::visit(
      [](const auto& s) -> json {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, AdvDiffSpec>) {
          return {{"kind", "advdiff"}, {"n", s.n},   {"length", s.length},
                  {"c", s.c},          {"dt", s.dt}, {"substeps", s.substeps},
                  {"initial_condition", s.initial_condition}, {"ic_param", s.ic_param}};
        } else if constexpr (std::is_same_v<T, AffineGenerator>) {
          return {{"kind", "affine"},
                  {"n", s.n},
                  {"spectral_radius_target", s.spectral_radius_target},
                  {"coupling", s.coupling},
                  {"noise_std", s.noise_std},
                  {"dt", s.dt}};
        } else {
          return {{"kind", "shear"},         {"gain", s.family.gain}, {"fast", s.family.fast},
                  {"slow", s.family.slow},   {"x0", json_util::to_json(s.x0)}, {"dt", s.dt}};
        }
      },
      g);
}

ParamMap parse_param_map(const json* j, const std::vector<RealVector>& training) {
  const Index p = training.front().size();
  std::vector<ParamFunction> functions;
  Normalization norm = Normalization::fit(training);
  if (j == nullptr) return ParamMap::coordinates(p, norm);

  constexpr std::string_view ctx = "param_map";
  json_util::check_keys(*j, {"functions", "normalization"}, {}, ctx);
  if (j->contains("normalization")) {
    const auto& nj = j->at("normalization");
    if (nj.is_string()) {
      const auto mode = nj.get<std::string>();
      if (mode == "identity") {
        norm = Normalization::identity(p);
      } else if (mode != "auto") {
        fail(ErrorKind::InvalidInput, "param_map.normalization: expected 'auto', 'identity' or an object");
      }
    } else {
      json_util::check_keys(nj, {"scale", "offset"}, {"scale", "offset"}, "param_map.normalization");
      norm.scale = json_util::vector_from_json(nj.at("scale"), "param_map.normalization.scale");
      norm.offset = json_util::vector_from_json(nj.at("offset"), "param_map.normalization.offset");
    }
  }
  if (!j->contains("functions")) return ParamMap::coordinates(p, norm);
  json spec = {{"p", p}, {"functions", j->at("functions")}};
  ParamMap parsed = param_map_from_json(spec);
  return {p, parsed.functions(), norm};
}

}  // namespace

RunConfig parse_config(const json& j, const fs::path& base_dir) {
  constexpr std::string_view ctx = "config";
  json_util::check_keys(j,
                        {"data", "output_dir", "method", "methods", "training", "test", "label_prefix",
                         "ranks", "keep_pairs", "horizon", "train_snapshots", "transient_skip",
                         "param_map", "seed"},
                        {"training", "test"}, ctx);
  RunConfig c;
  auto resolve = [&](const fs::path& p) { return p.is_absolute() || base_dir.empty() ? p : base_dir / p; };

  if (j.contains("data")) {
    const auto& d = j.at("data");
    json_util::check_keys(d, {"dir", "generator"}, {}, "data");
    c.data_dir = get_or<std::string>(d, "dir", "data", "data");
    if (d.contains("generator")) c.generator = parse_generator(d.at("generator"));
  }
  c.data_dir = resolve(c.data_dir);
  c.output_dir = resolve(get_or<std::string>(j, "output_dir", "out", ctx));

  if (j.contains("method") == j.contains("methods")) {
    fail(ErrorKind::InvalidInput, "config: give exactly one of 'method' or 'methods'");
  }
  std::vector<std::string> ids;
  if (j.contains("method")) {
    ids.push_back(get<std::string>(j, "method", ctx));
  } else {
    ids = get<std::vector<std::string>>(j, "methods", ctx);
  }
  require(!ids.empty(), "config: no methods");
  for (const auto& id : ids) {
    const Method m = method_from_id(id);
    for (Method seen : c.methods) require(seen != m, "config: method '" + id + "' listed twice");
    c.methods.push_back(m);
  }

  c.training = theta_list(j.at("training"), "training");
  c.test = theta_list(j.at("test"), "test");
  const Index p = c.p();
  for (const auto& t : c.training) require(t.size() == p, "training: parameters differ in dimension");
  for (const auto& t : c.test) require(t.size() == p, "test: parameter dimension differs from training");

  const bool advdiff = c.generator && std::holds_alternative<AdvDiffSpec>(*c.generator);
  c.label_prefix = get_or<std::string>(j, "label_prefix", advdiff ? "nu" : "theta", ctx);
  require(!c.label_prefix.empty() && c.label_prefix.find('/') == std::string::npos,
          "config: label_prefix must be a non-empty file-name fragment");
  if (advdiff) require(p == 1, "config: advdiff takes a scalar viscosity parameter");
  if (c.generator && std::holds_alternative<ShearGenerator>(*c.generator)) {
    require(p == 2, "config: the shear family takes two parameters");
  }

  // Distinct parameters must map to distinct file labels.
  std::map<std::string, RealVector> labels;
  auto claim = [&](const RealVector& t, bool is_training) {
    auto [it, fresh] = labels.emplace(c.label(t), t);
    if (!fresh && it->second != t) {
      fail(ErrorKind::InvalidInput, "config: parameters collide on label '" + it->first + "'");
    }
    if (!fresh && is_training) {
      fail(ErrorKind::InvalidInput, "training: duplicate parameter '" + it->first + "'");
    }
  };
  for (const auto& t : c.training) claim(t, true);
  for (const auto& t : c.test) {
    if (labels.count(c.label(t)) == 0 || labels.at(c.label(t)) != t) claim(t, false);
  }

  if (j.contains("ranks")) {
    const auto& r = j.at("ranks");
    json_util::check_keys(r, {"r_tilde", "r_hat", "r"}, {}, "ranks");
    c.ranks.r_tilde = get_count(r, "r_tilde", c.ranks.r_tilde, 1, "ranks");
    c.ranks.r_hat = get_count(r, "r_hat", c.ranks.r_hat, 1, "ranks");
    c.ranks.r = get_count(r, "r", c.ranks.r, 1, "ranks");
  }
  c.keep_pairs = get_or(j, "keep_pairs", c.keep_pairs, ctx);
  c.horizon = get_count(j, "horizon", c.horizon, 0, ctx);
  c.train_snapshots = get_count(j, "train_snapshots", c.train_snapshots, 1, ctx);
  c.transient_skip = get_count(j, "transient_skip", c.transient_skip, 0, ctx);
  c.seed = get_or<std::uint64_t>(j, "seed", 0, ctx);
  c.param_map = parse_param_map(j.contains("param_map") ? &j.at("param_map") : nullptr, c.training);
  return c;
}

RunConfig load_config(const fs::path& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::exception& e) {
    fail(ErrorKind::InvalidInput, "config " + path.string() + ": " + e.what());
  }
  return parse_config(j, path.parent_path());
}

json canonical_json(const RunConfig& c) {
  json methods = json::array();
  for (Method m : c.methods) methods.push_back(std::string(method_id(m)));
  json out = {{"methods", methods},
              {"training", theta_list_json(c.training)},
              {"test", theta_list_json(c.test)},
              {"label_prefix", c.label_prefix},
              {"ranks", {{"r_tilde", c.ranks.r_tilde}, {"r_hat", c.ranks.r_hat}, {"r", c.ranks.r}}},
              {"keep_pairs", c.keep_pairs},
              {"horizon", c.horizon},
              {"train_snapshots", c.train_snapshots},
              {"transient_skip", c.transient_skip},
              {"param_map", to_json(c.param_map)},
              {"seed", c.seed}};
  out["generator"] = c.generator ? generator_json(*c.generator) : json(nullptr);
  return out;
}

std::string config_hash(const RunConfig& config) { return fnv1a_hex(canonical_json(config).dump()); }

}  // namespace pidmd
