#include "pidmd/pipeline.hpp"

#include "pidmd/json_util.hpp"
#include "pidmd/svg_plot.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <limits>
#include <sstream>
#include <thread>

namespace pidmd {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string theta_csv(const RealVector& theta) {
  std::string out;
  for (Index i = 0; i < theta.size(); ++i) {
    if (i > 0) out += ';';
    out += fmt(theta(i));
  }
  return out;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorKind::InvalidInput, "cannot create directory " + dir.string() + ": " + ec.message());
}

// Runs job(i) for i in [0, count) on a small pool. Each job writes only its
// own slot; the first failure (in index order) is rethrown.
template <typename Job>
void parallel_for(std::size_t count, Job&& job) {
  const std::size_t workers = std::min(worker_count(), count);
  std::vector<std::exception_ptr> errors(count);
  auto run = [&](std::size_t i) {
    try {
      job(i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) run(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) run(i);
      });
    }
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

Truncation truncation(const RunConfig& c, Index r) {
  Truncation t = Truncation::fixed(r);
  t.keep_pairs = c.keep_pairs;
  return t;
}

std::vector<RealVector> all_thetas(const RunConfig& c) {
  std::vector<RealVector> out;
  auto add = [&](const RealVector& t) {
    for (const auto& seen : out) {
      if (seen == t) return;
    }
    out.push_back(t);
  };
  for (const auto& t : c.training) add(t);
  for (const auto& t : c.test) add(t);
  return out;
}

std::vector<SnapshotSet> generate_sets(const RunConfig& c, const std::vector<RealVector>& thetas) {
  const Index T = c.stored_transitions();
  std::vector<SnapshotSet> sets;
  if (const auto* adv = std::get_if<AdvDiffSpec>(&*c.generator)) {
    std::vector<double> nus;
    for (const auto& t : thetas) nus.push_back(t(0));
    sets = gen_advdiff(*adv, nus, T, c.transient_skip);
  } else {
    if (const auto* aff = std::get_if<AffineGenerator>(&*c.generator)) {
      AffineSystemSpec spec;
      spec.n = aff->n;
      spec.seed = c.seed;
      spec.spectral_radius_target = aff->spectral_radius_target;
      spec.h = c.param_map;
      spec.coupling = aff->coupling;
      spec.noise_std = aff->noise_std;
      sets = gen_affine_trajectories(spec, thetas, T + c.transient_skip, {}, {}, aff->dt).trajectories;
    } else {
      const auto& shear = std::get<ShearGenerator>(*c.generator);
      sets = gen_shear_trajectories(shear.family, thetas, T + c.transient_skip, shear.x0, shear.dt);
    }
    for (auto& s : sets) s = s.window(c.transient_skip, T + 1);
  }
  for (std::size_t l = 0; l < sets.size(); ++l) sets[l].label = c.label(thetas[l]);
  return sets;
}

json report_json(const EvalReport& r) {
  json entries = json::array();
  for (const auto& e : r.entries) {
    entries.push_back({{"label", e.label},
                       {"theta", json_util::to_json(e.theta)},
                       {"average", e.average},
                       {"excluded", e.excluded},
                       {"diverged", e.diverged},
                       {"divergence_reason", e.divergence_reason},
                       {"extrapolated", e.extrapolated},
                       {"delta", e.delta}});
  }
  return {{"method", r.method}, {"config_hash", r.config_hash}, {"entries", entries}};
}

double number_or(const json& j, double fallback) { return j.is_number() ? j.get<double>() : fallback; }

std::string delta_csv(const EvalReport& r) {
  std::string out = "config_hash,method,label,step,delta\n";
  for (const auto& e : r.entries) {
    for (std::size_t k = 0; k < e.delta.size(); ++k) {
      out += r.config_hash + ',' + r.method + ',' + e.label + ',' + std::to_string(k) + ',' +
             fmt(e.delta[k]) + '\n';
    }
  }
  return out;
}

std::string grid_csv(const RealVector& truth, const RealVector& pred) {
  std::string out = "index,truth,prediction,abs_error\n";
  for (Index i = 0; i < truth.size(); ++i) {
    out += std::to_string(i) + ',' + fmt(truth(i)) + ',' + fmt(pred(i)) + ',' +
           fmt(std::abs(truth(i) - pred(i))) + '\n';
  }
  return out;
}

}  // namespace

std::size_t worker_count() {
  if (const char* env = std::getenv("PIDMD_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    require(end != env && *end == '\0' && v >= 1, "PIDMD_WORKERS must be a positive integer");
    return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

GenerateResult run_generate(const RunConfig& c) {
  if (!c.generator) fail(ErrorKind::InvalidInput, "generate: config has no data.generator block");
  const auto thetas = all_thetas(c);
  const auto sets = generate_sets(c, thetas);
  ensure_dir(c.data_dir);

  GenerateResult result;
  json files = json::array();
  for (const auto& s : sets) {
    const fs::path path = c.data_dir / (s.label + ".pdmd");
    const std::string bytes = encode_snapshot(s);
    write_file_atomic(path, bytes);
    result.files.push_back(path);
    files.push_back({{"label", s.label},
                     {"theta", json_util::to_json(s.theta)},
                     {"file", path.filename().string()},
                     {"fnv1a", fnv1a_hex(bytes)}});
  }
  const json manifest = {{"config_hash", config_hash(c)}, {"files", files}};
  result.manifest = c.data_dir / "manifest.json";
  write_file_atomic(result.manifest, manifest.dump(2) + "\n");
  return result;
}

std::vector<SnapshotSet> load_trajectories(const RunConfig& c, const std::vector<RealVector>& thetas,
                                           Index min_transitions) {
  std::vector<SnapshotSet> out;
  for (const auto& theta : thetas) {
    const fs::path path = c.snapshot_path(theta);
    if (!fs::exists(path)) {
      fail(ErrorKind::InvalidInput, "missing snapshot file " + path.string() + " (run generate first)");
    }
    SnapshotSet s = read_snapshot_file(path);
    require(s.theta.size() == theta.size() && s.theta == theta,
            path.string() + ": stored parameter does not match the config");
    require(s.transitions() >= min_transitions,
            path.string() + ": holds " + std::to_string(s.transitions()) + " transitions, need " +
                std::to_string(min_transitions));
    if (!out.empty()) {
      require(s.state_dim() == out.front().state_dim(), path.string() + ": state dimension differs");
      require(s.dt == out.front().dt, path.string() + ": sampling interval differs");
    }
    out.push_back(std::move(s));
  }
  return out;
}

fs::path model_path(const RunConfig& c, Method method, const RealVector* test_theta) {
  const fs::path dir = c.output_dir / "models";
  if (method == Method::ExactDMD) {
    require(test_theta != nullptr, "model_path: exact DMD models are stored per test parameter");
    return dir / "exact_dmd" / (c.label(*test_theta) + ".pdmdm");
  }
  return dir / (std::string(method_id(method)) + ".pdmdm");
}

TrainResult run_train(const RunConfig& c, Method method) {
  const std::string hash = config_hash(c);
  TrainResult result;
  json log = {{"config_hash", hash}, {"method", std::string(method_id(method))}};
  ensure_dir(c.output_dir / "models");

  if (method == Method::ExactDMD) {
    // The best-case reference: one DMD per test parameter, fitted on that
    // parameter's own data.
    const auto sets = load_trajectories(c, c.test, c.train_snapshots);
    ensure_dir(c.output_dir / "models" / "exact_dmd");
    json ranks = json::array();
    for (std::size_t l = 0; l < sets.size(); ++l) {
      const auto pairs = build_snapshot_pairs(sets[l].window(0, c.train_snapshots + 1));
      DMDModel model = fit_dmd(pairs.X, pairs.Xplus, truncation(c, c.ranks.r), sets[l].dt);
      if (model.rank_deficient) {
        result.warnings.push_back(sets[l].label + ": data rank below requested r; using rank " +
                                  std::to_string(model.rank));
      }
      ranks.push_back(model.rank);
      const fs::path path = model_path(c, method, &c.test[l]);
      write_model_file(path, {std::move(model), hash});
      result.models.push_back(path);
    }
    log["ranks"] = ranks;
  } else {
    std::vector<SnapshotSet> sets = load_trajectories(c, c.training, c.train_snapshots);
    for (auto& s : sets) s = s.window(0, c.train_snapshots + 1);
    AnyModel model;
    if (method == Method::PiDMD) {
      PiDMDOptions opts{truncation(c, c.ranks.r_tilde), truncation(c, c.ranks.r_hat)};
      PiDMDModel m = fit_pidmd(sets, c.param_map, opts);
      result.training_residual = m.training_residual;
      result.warnings = m.warnings;
      log["training_residual"] = m.training_residual;
      log["r_tilde"] = m.rank_tilde;
      log["r_hat"] = m.rank_hat;
      model = std::move(m);
    } else if (method == Method::Stacked) {
      StackedDMDModel m = fit_stacked(sets, truncation(c, c.ranks.r));
      log["rank"] = m.rank();
      model = std::move(m);
    } else {
      RKOIModel m = fit_rkoi(sets, truncation(c, c.ranks.r));
      log["rank"] = m.rank();
      model = std::move(m);
    }
    const fs::path path = model_path(c, method);
    write_model_file(path, {std::move(model), hash});
    result.models.push_back(path);
  }
  log["warnings"] = result.warnings;
  write_file_atomic(c.output_dir / "models" / (std::string(method_id(method)) + ".json"),
                    log.dump(2) + "\n");
  return result;
}

Prediction predict_any(const AnyModel& model, const RealVector& theta, const RealVector& x0,
                       Index steps) {
  return std::visit(
      [&](const auto& m) -> Prediction {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, DMDModel>) {
          return {predict_dmd(m, x0, steps), false, std::nullopt};
        } else if constexpr (std::is_same_v<T, PiDMDModel>) {
          require(x0.size() == m.state_dim(), "predict: x0 length mismatch");
          return {predict_pidmd(m, theta, x0, steps), false, std::nullopt};
        } else {
          BaselinePrediction b;
          if constexpr (std::is_same_v<T, StackedDMDModel>) {
            b = predict_stacked(m, theta, x0, steps);
          } else {
            b = predict_rkoi(m, theta, x0, steps);
          }
          Prediction out{std::move(b.states), b.extrapolated, std::nullopt};
          if (b.divergence) out.divergence = b.divergence->reason;
          return out;
        }
      },
      model);
}

EvaluateResult run_evaluate(const RunConfig& c, Method method) {
  const std::string hash = config_hash(c);
  const std::string id(method_id(method));
  const Index needed = method == Method::ExactDMD ? c.stored_transitions() : c.horizon;
  const auto tests = load_trajectories(c, c.test, needed);

  std::optional<ModelFile> shared;
  if (method != Method::ExactDMD) {
    const fs::path path = model_path(c, method);
    if (!fs::exists(path)) fail(ErrorKind::InvalidInput, "missing model " + path.string() + " (run train first)");
    shared = read_model_file(path);
  }

  const fs::path grid_dir = c.output_dir / "grids" / id;
  ensure_dir(grid_dir);
  const std::size_t count = tests.size();
  std::vector<ThetaReport> entries(count);
  std::vector<std::optional<Incident>> incidents(count);

  parallel_for(count, [&](std::size_t l) {
    const SnapshotSet& s = tests[l];
    std::optional<ModelFile> own;
    if (method == Method::ExactDMD) {
      const fs::path path = model_path(c, method, &c.test[l]);
      if (!fs::exists(path)) fail(ErrorKind::InvalidInput, "missing model " + path.string() + " (run train first)");
      own = read_model_file(path);
    }
    const AnyModel& model = own ? own->model : shared->model;
    const RealMatrix truth = s.states.leftCols(c.horizon + 1);
    const RealVector x0 = truth.col(0);

    Prediction pred;
    try {
      pred = predict_any(model, s.theta, x0, c.horizon);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::InvalidInput) throw;
      pred.divergence = std::string(to_string(e.kind())) + ": " + e.what();
      incidents[l] = Incident{id, s.label, e.kind(), e.what()};
    }
    entries[l] = score_prediction(s.label, s.theta, truth, pred.states, pred.divergence, pred.extrapolated);
    if (pred.divergence && !incidents[l]) {
      incidents[l] = Incident{id, s.label, ErrorKind::DivergenceDetected, *pred.divergence};
    } else if (entries[l].diverged && !incidents[l]) {
      incidents[l] = Incident{id, s.label, ErrorKind::DivergenceDetected, entries[l].divergence_reason};
    }
    if (pred.states.cols() == truth.cols()) {
      write_file_atomic(grid_dir / (s.label + ".csv"),
                        grid_csv(truth.col(c.horizon), pred.states.col(c.horizon)));
    }
  });

  EvaluateResult result;
  result.report = {id, hash, std::move(entries)};
  for (auto& inc : incidents) {
    if (inc) result.incidents.push_back(std::move(*inc));
  }
  const fs::path reports = c.output_dir / "reports";
  ensure_dir(reports);
  write_file_atomic(reports / (id + ".json"), report_json(result.report).dump(2) + "\n");
  write_file_atomic(reports / (id + "_delta.csv"), delta_csv(result.report));
  return result;
}

EvalReport read_report(const fs::path& path) {
  if (!fs::exists(path)) fail(ErrorKind::InvalidInput, "missing report " + path.string() + " (run evaluate first)");
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::exception& e) {
    fail(ErrorKind::InvalidInput, path.string() + ": " + e.what());
  }
  const std::string ctx = path.string();
  EvalReport r;
  r.method = json_util::get<std::string>(j, "method", ctx);
  r.config_hash = json_util::get<std::string>(j, "config_hash", ctx);
  for (const auto& e : j.at("entries")) {
    ThetaReport t;
    t.label = json_util::get<std::string>(e, "label", ctx);
    t.theta = json_util::vector_from_json(e.at("theta"), ctx);
    t.average = number_or(e.at("average"), std::numeric_limits<double>::infinity());
    t.excluded = json_util::get<Index>(e, "excluded", ctx);
    t.diverged = json_util::get<bool>(e, "diverged", ctx);
    t.divergence_reason = json_util::get<std::string>(e, "divergence_reason", ctx);
    t.extrapolated = json_util::get<bool>(e, "extrapolated", ctx);
    for (const auto& d : e.at("delta")) t.delta.push_back(number_or(d, std::numeric_limits<double>::quiet_NaN()));
    r.entries.push_back(std::move(t));
  }
  return r;
}

CompareResult run_compare(const RunConfig& c) {
  const std::string hash = config_hash(c);
  std::vector<EvalReport> reports;
  for (Method m : c.methods) {
    reports.push_back(read_report(c.output_dir / "reports" / (std::string(method_id(m)) + ".json")));
    require(reports.back().config_hash == hash,
            "compare: report for '" + reports.back().method + "' was produced by a different config");
  }

  CompareResult result;
  result.table = compare_methods(reports);

  std::string comparison = "config_hash,method,label,theta,time_averaged_delta,diverged,extrapolated\n";
  for (const auto& r : reports) {
    for (const auto& e : r.entries) {
      comparison += hash + ',' + r.method + ',' + e.label + ',' + theta_csv(e.theta) + ',' +
                    fmt(e.average) + ',' + (e.diverged ? "1" : "0") + ',' + (e.extrapolated ? "1" : "0") +
                    '\n';
    }
  }
  std::string summary = "config_hash,method,count,diverged,min,q1,median,q3,max\n";
  for (const auto& row : result.table.rows) {
    summary += hash + ',' + row.method + ',' + std::to_string(row.count) + ',' + std::to_string(row.diverged) +
               ',' + fmt(row.min) + ',' + fmt(row.q1) + ',' + fmt(row.median) + ',' + fmt(row.q3) + ',' +
               fmt(row.max) + '\n';
  }

  // Scalar parameters are plotted against their value, vectors against
  // their position in the test list.
  std::vector<LineSeries> lines;
  for (const auto& r : reports) {
    LineSeries s{r.method, {}, {}};
    for (std::size_t j = 0; j < r.entries.size(); ++j) {
      const auto& e = r.entries[j];
      s.x.push_back(c.p() == 1 ? e.theta(0) : static_cast<double>(j));
      s.y.push_back(e.diverged ? std::numeric_limits<double>::quiet_NaN() : e.average);
    }
    lines.push_back(std::move(s));
  }

  ensure_dir(c.output_dir);
  const std::vector<std::pair<std::string, std::string>> outputs = {
      {"comparison.csv", comparison},
      {"summary.csv", summary},
      {"boxplot.svg", box_plot_svg(result.table.rows, "Time-averaged residual error")},
      {"error_vs_theta.svg",
       line_plot_svg(lines, "Time-averaged residual error per test parameter",
                     c.p() == 1 ? c.label_prefix : "test index", "time-averaged residual error")}};
  for (const auto& [name, text] : outputs) {
    write_file_atomic(c.output_dir / name, text);
    result.files.push_back(c.output_dir / name);
  }
  return result;
}

}  // namespace pidmd
