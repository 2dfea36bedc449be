#include "byte_codec.hpp"
#include "pidmd/errors.hpp"
#include "pidmd/io.hpp"
#include "pidmd/json_util.hpp"

#include <map>

namespace pidmd {

using nlohmann::json;

std::string_view method_id(Method method) {
  switch (method) {
    case Method::ExactDMD: return "exact_dmd";
    case Method::PiDMD: return "pidmd";
    case Method::Stacked: return "stacked";
    case Method::RKOI: return "rkoi";
  }
  return "unknown";
}

Method method_from_id(std::string_view id) {
  if (id == "exact_dmd") return Method::ExactDMD;
  if (id == "pidmd") return Method::PiDMD;
  if (id == "stacked") return Method::Stacked;
  if (id == "rkoi") return Method::RKOI;
  fail(ErrorKind::InvalidInput, "unknown method '" + std::string(id) + "'");
}

Method ModelFile::method() const {
  return std::visit(
      [](const auto& m) {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, DMDModel>) return Method::ExactDMD;
        else if constexpr (std::is_same_v<M, PiDMDModel>) return Method::PiDMD;
        else if constexpr (std::is_same_v<M, StackedDMDModel>) return Method::Stacked;
        else return Method::RKOI;
      },
      model);
}

namespace {

// Named matrices in a fixed order, plus JSON metadata.
struct Bundle {
  json meta = json::object();
  std::vector<std::pair<std::string, RealMatrix>> matrices;

  void put(const std::string& name, RealMatrix m) { matrices.emplace_back(name, std::move(m)); }
  void put(const std::string& name, const ComplexMatrix& m) {
    put(name + ".re", RealMatrix(m.real()));
    put(name + ".im", RealMatrix(m.imag()));
  }
};

class BundleView {
 public:
  explicit BundleView(std::map<std::string, RealMatrix> matrices) : m_(std::move(matrices)) {}

  const RealMatrix& real(const std::string& name) const {
    auto it = m_.find(name);
    if (it == m_.end()) fail(ErrorKind::InvalidInput, "model file: missing matrix '" + name + "'");
    return it->second;
  }
  ComplexMatrix complex(const std::string& name) const {
    const RealMatrix& re = real(name + ".re");
    const RealMatrix& im = real(name + ".im");
    require(re.rows() == im.rows() && re.cols() == im.cols(),
            "model file: real and imaginary parts of '" + name + "' differ in shape");
    ComplexMatrix out(re.rows(), re.cols());
    out.real() = re;
    out.imag() = im;
    return out;
  }

 private:
  std::map<std::string, RealMatrix> m_;
};

json thetas_json(const std::vector<RealVector>& thetas) {
  json out = json::array();
  for (const auto& t : thetas) out.push_back(json_util::to_json(t));
  return out;
}

std::vector<RealVector> thetas_from(const json& j) {
  std::vector<RealVector> out;
  for (const auto& t : j) out.push_back(json_util::vector_from_json(t, "model thetas"));
  return out;
}

void put_dmd(Bundle& b, const std::string& prefix, const DMDModel& m) {
  b.put(prefix + "Atilde", m.Atilde);
  b.put(prefix + "Phi", m.Phi);
  b.put(prefix + "W", m.W);
  b.put(prefix + "Lambda", ComplexMatrix(m.Lambda));
  b.put(prefix + "Omega", ComplexMatrix(m.Omega));
  b.put(prefix + "U_r", m.U_r);
}

json dmd_meta(const DMDModel& m) {
  return {{"dt", m.dt},
          {"rank", m.rank},
          {"rank_deficient", m.rank_deficient},
          {"discarded_energy", m.discarded_energy},
          {"eig_quality", m.eig_quality}};
}

DMDModel get_dmd(const BundleView& v, const std::string& prefix, const json& meta) {
  DMDModel m;
  m.Atilde = v.real(prefix + "Atilde");
  m.Phi = v.complex(prefix + "Phi");
  m.W = v.complex(prefix + "W");
  m.Lambda = v.complex(prefix + "Lambda");
  m.Omega = v.complex(prefix + "Omega");
  m.U_r = v.real(prefix + "U_r");
  m.dt = meta.at("dt").get<double>();
  m.rank = meta.at("rank").get<Index>();
  m.rank_deficient = meta.at("rank_deficient").get<bool>();
  m.discarded_energy = meta.at("discarded_energy").get<double>();
  m.eig_quality = meta.at("eig_quality").get<double>();
  require(m.Phi.cols() == m.rank && m.Omega.size() == m.rank,
          "model file: DMD mode count does not match rank");
  return m;
}

Bundle to_bundle(const DMDModel& m) {
  Bundle b;
  put_dmd(b, "", m);
  b.meta = dmd_meta(m);
  return b;
}

Bundle to_bundle(const PiDMDModel& m) {
  Bundle b;
  b.put("Atilde", m.Atilde);
  for (std::size_t i = 0; i < m.Btilde.size(); ++i) b.put("Btilde." + std::to_string(i), m.Btilde[i]);
  b.put("U_hat", m.U_hat);
  b.meta = {{"dt", m.dt},
            {"param_map", to_json(m.param_map)},
            {"rank_tilde", m.rank_tilde},
            {"rank_hat", m.rank_hat},
            {"training", {{"labels", m.training.labels}, {"thetas", thetas_json(m.training.thetas)}}},
            {"training_residual", m.training_residual},
            {"psi_rank_deficient", m.psi_rank_deficient},
            {"basis_rank_deficient", m.basis_rank_deficient},
            {"ill_conditioned", m.ill_conditioned},
            {"warnings", m.warnings}};
  return b;
}

Bundle to_bundle(const StackedDMDModel& m) {
  Bundle b;
  put_dmd(b, "global.", m.global);
  for (std::size_t l = 0; l < m.modes.size(); ++l) b.put("modes." + std::to_string(l), m.modes[l]);
  b.meta = {{"global", dmd_meta(m.global)},
            {"labels", m.labels},
            {"thetas", thetas_json(m.thetas)},
            {"interpolation", scheme_id(m.interpolator.scheme())}};
  return b;
}

Bundle to_bundle(const RKOIModel& m) {
  Bundle b;
  b.put("basis", m.basis);
  for (std::size_t l = 0; l < m.operators.size(); ++l) {
    b.put("operator." + std::to_string(l), m.operators[l]);
  }
  b.meta = {{"dt", m.dt},
            {"labels", m.labels},
            {"thetas", thetas_json(m.thetas)},
            {"interpolation", scheme_id(m.interpolator.scheme())}};
  return b;
}

PiDMDModel pidmd_from(const BundleView& v, const json& meta) {
  PiDMDModel m;
  m.param_map = param_map_from_json(meta.at("param_map"));
  m.Atilde = v.real("Atilde");
  for (Index i = 0; i < m.param_map.m(); ++i) m.Btilde.push_back(v.real("Btilde." + std::to_string(i)));
  m.U_hat = v.real("U_hat");
  m.dt = meta.at("dt").get<double>();
  m.rank_tilde = meta.at("rank_tilde").get<Index>();
  m.rank_hat = meta.at("rank_hat").get<Index>();
  m.training.labels = meta.at("training").at("labels").get<std::vector<std::string>>();
  m.training.thetas = thetas_from(meta.at("training").at("thetas"));
  m.training_residual = meta.at("training_residual").get<double>();
  m.psi_rank_deficient = meta.at("psi_rank_deficient").get<bool>();
  m.basis_rank_deficient = meta.at("basis_rank_deficient").get<bool>();
  m.ill_conditioned = meta.at("ill_conditioned").get<bool>();
  m.warnings = meta.at("warnings").get<std::vector<std::string>>();
  for (const auto& b : m.Btilde) {
    require(b.rows() == m.Atilde.rows() && b.cols() == m.Atilde.cols(),
            "model file: B operator shape differs from A");
  }
  require(m.U_hat.rows() == m.Atilde.rows(), "model file: basis row count differs from n");
  return m;
}

StackedDMDModel stacked_from(const BundleView& v, const json& meta) {
  StackedDMDModel m;
  m.global = get_dmd(v, "global.", meta.at("global"));
  m.labels = meta.at("labels").get<std::vector<std::string>>();
  m.thetas = thetas_from(meta.at("thetas"));
  for (std::size_t l = 0; l < m.thetas.size(); ++l) {
    m.modes.push_back(v.complex("modes." + std::to_string(l)));
    require(m.modes.back().cols() == m.global.rank, "model file: mode sets differ in column count");
  }
  m.interpolator = ParameterInterpolator(m.thetas);
  require(scheme_id(m.interpolator.scheme()) == meta.at("interpolation").get<std::string>(),
          "model file: interpolation scheme does not match the parameter dimension");
  return m;
}

RKOIModel rkoi_from(const BundleView& v, const json& meta) {
  RKOIModel m;
  m.basis = v.real("basis");
  m.dt = meta.at("dt").get<double>();
  m.labels = meta.at("labels").get<std::vector<std::string>>();
  m.thetas = thetas_from(meta.at("thetas"));
  for (std::size_t l = 0; l < m.thetas.size(); ++l) {
    m.operators.push_back(v.real("operator." + std::to_string(l)));
    require(m.operators.back().rows() == m.basis.cols() &&
                m.operators.back().cols() == m.basis.cols(),
            "model file: reduced operator shape differs from basis rank");
  }
  m.interpolator = ParameterInterpolator(m.thetas);
  require(scheme_id(m.interpolator.scheme()) == meta.at("interpolation").get<std::string>(),
          "model file: interpolation scheme does not match the parameter dimension");
  return m;
}

}  // namespace

std::string encode_model(const ModelFile& file) {
  const Bundle bundle = std::visit([](const auto& m) { return to_bundle(m); }, file.model);
  json header = {{"method", method_id(file.method())},
                 {"config_hash", file.config_hash},
                 {"meta", bundle.meta}};
  json list = json::array();
  for (const auto& [name, m] : bundle.matrices) {
    require_finite(m, "model matrix " + name);
    list.push_back({{"name", name}, {"rows", m.rows()}, {"cols", m.cols()}});
  }
  header["matrices"] = list;
  const std::string text = header.dump();

  ByteWriter out;
  out.raw(kModelMagic);
  out.raw("L");
  out.u32(kModelFormatVersion);
  out.u64(text.size());
  out.raw(text);
  for (const auto& [name, m] : bundle.matrices) out.doubles(m.data(), m.size());
  return std::move(out).take();
}

ModelFile decode_model(std::string_view bytes) {
  ByteReader in(bytes, "model file");
  in.expect(kModelMagic, "bad magic (not a model file)");
  in.expect("L", "unsupported endianness tag");
  const auto version = in.u32();
  require(version == kModelFormatVersion,
          "model file: unsupported format version " + std::to_string(version));
  json header;
  try {
    header = json::parse(in.str(in.count()));
  } catch (const json::exception& e) {
    fail(ErrorKind::InvalidInput, std::string("model file: malformed header: ") + e.what());
  }

  try {
    std::map<std::string, RealMatrix> matrices;
    for (const auto& entry : header.at("matrices")) {
      const auto rows = entry.at("rows").get<Index>();
      const auto cols = entry.at("cols").get<Index>();
      require(rows >= 0 && cols >= 0, "model file: negative matrix dimension");
      RealMatrix m(rows, cols);
      in.doubles(m.data(), m.size());
      matrices.emplace(entry.at("name").get<std::string>(), std::move(m));
    }
    in.finish();

    const BundleView view(std::move(matrices));
    const json& meta = header.at("meta");
    ModelFile file;
    file.config_hash = header.at("config_hash").get<std::string>();
    switch (method_from_id(header.at("method").get<std::string>())) {
      case Method::ExactDMD: file.model = get_dmd(view, "", meta); break;
      case Method::PiDMD: file.model = pidmd_from(view, meta); break;
      case Method::Stacked: file.model = stacked_from(view, meta); break;
      case Method::RKOI: file.model = rkoi_from(view, meta); break;
    }
    return file;
  } catch (const json::exception& e) {
    fail(ErrorKind::InvalidInput, std::string("model file: malformed metadata: ") + e.what());
  }
}

void write_model_file(const std::filesystem::path& path, const ModelFile& file) {
  write_file_atomic(path, encode_model(file));
}

ModelFile read_model_file(const std::filesystem::path& path) {
  return decode_model(read_file(path));
}

}  // namespace pidmd
