#pragma once

// JSON Lines pattern files and JSON model documents.
//
// Doubles are written in shortest round-trip form, so save -> load -> save is
// byte-identical and a loaded model evaluates bit-for-bit like the one that
// was saved. Non-finite numbers, which only appear in outputs such as a
// log-rank of -inf, are written as the strings "inf", "-inf" and "nan".

#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "setproc/classify.hpp"
#include "setproc/cluster_dp.hpp"
#include "setproc/cluster_em.hpp"
#include "setproc/models.hpp"
#include "setproc/novelty.hpp"
#include "setproc/scenario.hpp"

namespace setproc::io {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;
inline constexpr std::string_view kSchemaName = "setproc-model";

// ---------------------------------------------------------------------------
// Scalars, vectors, matrices
// ---------------------------------------------------------------------------

inline Json num(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

inline double get_num(const Json& j, std::string_view what) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto& s = j.get_ref<const std::string&>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw DataError(std::string(what) + ": expected a number");
}

inline const Json& field(const Json& j, std::string_view key, std::string_view where) {
  if (!j.is_object()) throw DataError(std::string(where) + ": expected an object");
  const auto it = j.find(key);
  if (it == j.end()) throw DataError(std::string(where) + ": missing field '" + std::string(key) + "'");
  return *it;
}

inline double get_num(const Json& j, std::string_view key, std::string_view where) {
  return get_num(field(j, key, where), std::string(where) + "." + std::string(key));
}

inline std::string get_str(const Json& j, std::string_view key, std::string_view where) {
  const auto& v = field(j, key, where);
  if (!v.is_string()) throw DataError(std::string(where) + "." + std::string(key) + ": expected a string");
  return v.get<std::string>();
}

inline long long get_int(const Json& j, std::string_view what) {
  if (!j.is_number_integer()) throw DataError(std::string(what) + ": expected an integer");
  return j.get<long long>();
}

inline Json to_json(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

inline Json to_json(const Vector& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(num(v(i)));
  return a;
}

inline Json to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(num(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline std::vector<double> doubles_from(const Json& j, std::string_view what) {
  if (!j.is_array()) throw DataError(std::string(what) + ": expected an array");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& x : j) out.push_back(get_num(x, what));
  return out;
}

inline Vector vector_from(const Json& j, std::string_view what) {
  const auto v = doubles_from(j, what);
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline Matrix matrix_from(const Json& j, std::string_view what) {
  if (!j.is_array() || j.empty()) throw DataError(std::string(what) + ": expected a non-empty array of rows");
  const std::size_t cols = j.front().is_array() ? j.front().size() : 0;
  Matrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < j.size(); ++r) {
    const auto row = doubles_from(j[r], what);
    if (row.size() != cols) throw DataError(std::string(what) + ": matrix rows differ in length");
    for (std::size_t c = 0; c < cols; ++c) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = row[c];
  }
  return m;
}

// ---------------------------------------------------------------------------
// Pattern records
// ---------------------------------------------------------------------------

struct PatternFile {
  int dim = 0;  // 0 when the file holds no points and declares no dimension
  std::vector<PointPattern> patterns;
  std::vector<std::optional<int>> labels;

  bool fully_labeled() const {
    for (const auto& y : labels)
      if (!y) return false;
    return true;
  }

  std::vector<int> label_values() const {
    std::vector<int> out;
    out.reserve(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (!labels[i]) throw DataError("record " + std::to_string(i + 1) + " has no label");
      out.push_back(*labels[i]);
    }
    return out;
  }
};

// One record. An empty pattern carries "dim" so the file stays
// self-describing when every pattern is empty.
inline Json record_json(const PointPattern& x, std::optional<int> label) {
  Json rec;
  Json pts = Json::array();
  for (std::size_t i = 0; i < x.size(); ++i) {
    Json p = Json::array();
    for (int k = 0; k < x.dim(); ++k) p.push_back(num(x.point(i)(k)));
    pts.push_back(std::move(p));
  }
  rec["points"] = std::move(pts);
  if (x.empty()) rec["dim"] = x.dim();
  if (label) rec["label"] = *label;
  return rec;
}

inline std::string dump_patterns(std::span<const PointPattern> xs, std::span<const std::optional<int>> labels = {}) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    out += record_json(xs[i], i < labels.size() ? labels[i] : std::nullopt).dump();
    out += '\n';
  }
  return out;
}

inline std::string dump_patterns(std::span<const LabeledPattern> data) {
  std::string out;
  for (const auto& lp : data) {
    out += record_json(lp.pattern, lp.label).dump();
    out += '\n';
  }
  return out;
}

// `expected_dim` (if nonzero) pins the dimension, e.g. to a model's.
inline PatternFile parse_patterns(std::istream& in, int expected_dim = 0) {
  PatternFile f;
  f.dim = expected_dim;
  struct Raw {
    std::vector<std::vector<double>> pts;
    std::optional<int> label;
  };
  std::vector<Raw> raws;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = "line " + std::to_string(lineno);
    Json rec;
    try {
      rec = Json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw DataError(where + ": invalid JSON");
    }
    const auto& pts = field(rec, "points", where);
    if (!pts.is_array()) throw DataError(where + ": 'points' must be an array");
    Raw raw;
    for (const auto& p : pts) {
      raw.pts.push_back(doubles_from(p, where + ": point"));
      const int d = static_cast<int>(raw.pts.back().size());
      if (d < 1) throw DataError(where + ": points must have dimension >= 1");
      if (f.dim == 0) f.dim = d;
      if (d != f.dim)
        throw DataError(where + ": point dimension " + std::to_string(d) + " does not match " + std::to_string(f.dim));
    }
    if (const auto it = rec.find("dim"); it != rec.end()) {
      const auto d = get_int(*it, where + ".dim");
      if (d < 1) throw DataError(where + ": dim must be >= 1");
      if (f.dim == 0) f.dim = static_cast<int>(d);
      if (d != f.dim) throw DataError(where + ": declared dim does not match the file's dimension");
    }
    if (const auto it = rec.find("label"); it != rec.end() && !it->is_null()) {
      const auto y = get_int(*it, where + ".label");
      if (y < std::numeric_limits<int>::min() || y > std::numeric_limits<int>::max())
        throw DataError(where + ": label out of range");
      raw.label = static_cast<int>(y);
    }
    raws.push_back(std::move(raw));
  }
  if (!raws.empty() && f.dim == 0) throw DataError("cannot infer the dimension: every pattern is empty and none declares dim");
  for (auto& raw : raws) {
    Matrix m(f.dim, static_cast<Eigen::Index>(raw.pts.size()));
    for (std::size_t i = 0; i < raw.pts.size(); ++i)
      for (int k = 0; k < f.dim; ++k) m(k, static_cast<Eigen::Index>(i)) = raw.pts[i][static_cast<std::size_t>(k)];
    f.patterns.emplace_back(std::move(m));
    f.labels.push_back(raw.label);
  }
  return f;
}

inline PatternFile parse_patterns(std::string_view text, int expected_dim = 0) {
  std::istringstream in{std::string(text)};
  return parse_patterns(in, expected_dim);
}

// ---------------------------------------------------------------------------
// Files
// ---------------------------------------------------------------------------

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open '" + path + "' for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw DataError("write to '" + path + "' failed");
}

inline PatternFile load_patterns(const std::string& path, int expected_dim = 0) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "' for reading");
  try {
    return parse_patterns(in, expected_dim);
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Models
// ---------------------------------------------------------------------------

inline Json to_json(const CardinalityDist& c) {
  Json j;
  if (const auto* p = std::get_if<PoissonCard>(&c)) {
    j["family"] = "poisson";
    j["rate"] = num(p->rate());
  } else {
    j["family"] = "categorical";
    j["probs"] = to_json(std::get<Categorical>(c).probs());
  }
  return j;
}

inline CardinalityDist card_from(const Json& j) {
  const auto fam = get_str(j, "family", "cardinality");
  if (fam == "poisson") return PoissonCard(get_num(j, "rate", "cardinality"));
  if (fam == "categorical") return Categorical(doubles_from(field(j, "probs", "cardinality"), "cardinality.probs"));
  throw DataError("cardinality: unknown family '" + fam + "'");
}

inline Json gaussian_json(const Gaussian& g) {
  Json j;
  j["mean"] = to_json(g.mean());
  j["cov"] = to_json(g.cov());
  return j;
}

inline Gaussian gaussian_from(const Json& j, std::string_view where) {
  return Gaussian(vector_from(field(j, "mean", where), std::string(where) + ".mean"),
                  matrix_from(field(j, "cov", where), std::string(where) + ".cov"));
}

inline Json to_json(const FeatureDensity& f) {
  Json j;
  if (const auto* g = std::get_if<Gaussian>(&f)) {
    j["family"] = "gaussian";
    j["mean"] = to_json(g->mean());
    j["cov"] = to_json(g->cov());
  } else if (const auto* mix = std::get_if<GaussianMixture>(&f)) {
    j["family"] = "gmm";
    j["weights"] = to_json(mix->weights());
    Json comps = Json::array();
    for (const auto& c : mix->components()) comps.push_back(gaussian_json(c));
    j["components"] = std::move(comps);
  } else {
    const auto& box = std::get<UniformBox>(f);
    j["family"] = "uniform";
    j["lower"] = to_json(box.lower());
    j["upper"] = to_json(box.upper());
  }
  return j;
}

inline FeatureDensity feat_from(const Json& j) {
  const auto fam = get_str(j, "family", "features");
  if (fam == "gaussian") return gaussian_from(j, "features");
  if (fam == "gmm") {
    const auto& comps = field(j, "components", "features");
    if (!comps.is_array()) throw DataError("features.components: expected an array");
    std::vector<Gaussian> gs;
    for (const auto& c : comps) gs.push_back(gaussian_from(c, "features.components"));
    return GaussianMixture(doubles_from(field(j, "weights", "features"), "features.weights"), std::move(gs));
  }
  if (fam == "uniform")
    return UniformBox(vector_from(field(j, "lower", "features"), "features.lower"),
                      vector_from(field(j, "upper", "features"), "features.upper"));
  throw DataError("features: unknown family '" + fam + "'");
}

inline Json to_json(const PointProcessModel& m) {
  Json j;
  j["unit_u"] = num(m.unit_u());
  j["cardinality"] = to_json(m.card());
  j["features"] = to_json(m.feat());
  return j;
}

inline PointProcessModel pp_from(const Json& j) {
  return PointProcessModel(card_from(field(j, "cardinality", "model")), feat_from(field(j, "features", "model")),
                           get_num(j, "unit_u", "model"));
}

inline std::string_view pp_kind(const PointProcessModel& m) { return m.is_poisson() ? "poisson-pp" : "iid-cluster"; }

inline std::string_view likelihood_name(LikelihoodMode m) {
  return m == LikelihoodMode::kPointProcess ? "pointprocess" : "naivebayes";
}

inline LikelihoodMode likelihood_from(const std::string& s) {
  if (s == "pointprocess") return LikelihoodMode::kPointProcess;
  if (s == "naivebayes") return LikelihoodMode::kNaiveBayes;
  throw DataError("unknown likelihood mode '" + s + "'");
}

inline std::string_view rank_name(RankMode m) {
  switch (m) {
    case RankMode::kDensity:
      return "density";
    case RankMode::kNaiveBayes:
      return "nb";
    case RankMode::kRanking:
      break;
  }
  return "ranking";
}

inline RankMode rank_from(const std::string& s) {
  if (s == "ranking") return RankMode::kRanking;
  if (s == "density") return RankMode::kDensity;
  if (s == "nb") return RankMode::kNaiveBayes;
  throw DataError("unknown rank mode '" + s + "'");
}

// A classifier together with the external label of each class index.
struct LabeledClassifier {
  Classifier classifier;
  std::vector<int> labels;
};

inline Json to_json(const LabeledClassifier& lc) {
  const auto& c = lc.classifier;
  if (lc.labels.size() != c.num_classes()) throw DataError("classifier label list does not match class count");
  Json j;
  j["likelihood"] = likelihood_name(c.mode());
  j["labels"] = lc.labels;
  j["prior"] = to_json(c.prior());
  Json classes = Json::array();
  for (const auto& m : c.models()) classes.push_back(to_json(m));
  j["classes"] = std::move(classes);
  return j;
}

inline LabeledClassifier classifier_from(const Json& j) {
  const auto& classes = field(j, "classes", "classifier");
  if (!classes.is_array()) throw DataError("classifier.classes: expected an array");
  std::vector<PointProcessModel> models;
  for (const auto& c : classes) models.push_back(pp_from(c));
  std::vector<int> labels;
  const auto& lj = field(j, "labels", "classifier");
  if (!lj.is_array()) throw DataError("classifier.labels: expected an array");
  for (const auto& y : lj) labels.push_back(static_cast<int>(get_int(y, "classifier.labels")));
  Classifier c(doubles_from(field(j, "prior", "classifier"), "classifier.prior"), std::move(models),
               likelihood_from(get_str(j, "likelihood", "classifier")));
  if (labels.size() != c.num_classes()) throw DataError("classifier.labels does not match the class count");
  return {std::move(c), std::move(labels)};
}

inline Json to_json(const FiniteMixture& m) {
  Json j;
  j["weights"] = to_json(m.weights());
  Json comps = Json::array();
  for (const auto& c : m.components()) comps.push_back(to_json(c));
  j["components"] = std::move(comps);
  return j;
}

inline FiniteMixture mixture_from(const Json& j) {
  const auto& comps = field(j, "components", "mixture");
  if (!comps.is_array()) throw DataError("mixture.components: expected an array");
  std::vector<PointProcessModel> models;
  for (const auto& c : comps) models.push_back(pp_from(c));
  return FiniteMixture(doubles_from(field(j, "weights", "mixture"), "mixture.weights"), std::move(models));
}

inline Json to_json(const NoveltyDetector& d) {
  Json j;
  j["rank"] = rank_name(d.mode());
  j["threshold"] = d.threshold() ? num(*d.threshold()) : Json(nullptr);
  j["model"] = to_json(d.model());
  return j;
}

inline NoveltyDetector detector_from(const Json& j) {
  NoveltyDetector d(pp_from(field(j, "model", "detector")), rank_from(get_str(j, "rank", "detector")));
  const auto& t = field(j, "threshold", "detector");
  if (!t.is_null()) d.set_threshold(get_num(t, "detector.threshold"));
  return d;
}

inline Json to_json(const DPHyper& h) {
  Json j;
  j["eta"] = num(h.eta);
  j["alpha"] = num(h.alpha);
  j["beta"] = num(h.beta);
  j["unit_u"] = num(h.unit_u);
  Json niw;
  niw["m"] = to_json(h.niw.m);
  niw["kappa"] = num(h.niw.kappa);
  niw["nu"] = num(h.niw.nu);
  niw["psi"] = to_json(h.niw.psi);
  j["niw"] = std::move(niw);
  return j;
}

inline DPHyper dp_hyper_from(const Json& j) {
  DPHyper h;
  h.eta = get_num(j, "eta", "dp-hyper");
  h.alpha = get_num(j, "alpha", "dp-hyper");
  h.beta = get_num(j, "beta", "dp-hyper");
  h.unit_u = get_num(j, "unit_u", "dp-hyper");
  const auto& niw = field(j, "niw", "dp-hyper");
  h.niw.m = vector_from(field(niw, "m", "dp-hyper.niw"), "dp-hyper.niw.m");
  h.niw.kappa = get_num(niw, "kappa", "dp-hyper.niw");
  h.niw.nu = get_num(niw, "nu", "dp-hyper.niw");
  h.niw.psi = matrix_from(field(niw, "psi", "dp-hyper.niw"), "dp-hyper.niw.psi");
  h.validate();
  return h;
}

// ---------------------------------------------------------------------------
// Model documents
// ---------------------------------------------------------------------------

struct ModelDoc {
  std::string kind;  // iid-cluster | poisson-pp | classifier | mixture | detector | dp-hyper
  Json model;
  Json provenance = Json::object();
};

inline const std::vector<std::string>& model_kinds() {
  static const std::vector<std::string> kinds{"iid-cluster", "poisson-pp", "classifier",
                                              "mixture",     "detector",   "dp-hyper"};
  return kinds;
}

inline std::string dump_model(const ModelDoc& doc) {
  Json j;
  j["schema"] = kSchemaName;
  j["version"] = kSchemaVersion;
  j["kind"] = doc.kind;
  j["model"] = doc.model;
  j["provenance"] = doc.provenance;
  return j.dump(2) + "\n";
}

inline ModelDoc parse_model(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error&) {
    throw DataError("model file is not valid JSON");
  }
  if (get_str(j, "schema", "model file") != kSchemaName) throw DataError("model file: unknown schema");
  const auto version = get_int(field(j, "version", "model file"), "model file.version");
  if (version != kSchemaVersion) throw DataError("model file: unsupported schema version " + std::to_string(version));
  ModelDoc doc;
  doc.kind = get_str(j, "kind", "model file");
  const auto& kinds = model_kinds();
  if (std::find(kinds.begin(), kinds.end(), doc.kind) == kinds.end())
    throw DataError("model file: unknown kind '" + doc.kind + "'");
  doc.model = field(j, "model", "model file");
  if (const auto it = j.find("provenance"); it != j.end()) doc.provenance = *it;
  return doc;
}

inline ModelDoc load_model(const std::string& path) {
  try {
    return parse_model(read_text(path));
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

inline void save_model(const std::string& path, const ModelDoc& doc) { write_text(path, dump_model(doc)); }

inline ModelDoc make_doc(const PointProcessModel& m, Json prov = Json::object()) {
  return {std::string(pp_kind(m)), to_json(m), std::move(prov)};
}
inline ModelDoc make_doc(const LabeledClassifier& c, Json prov = Json::object()) {
  return {"classifier", to_json(c), std::move(prov)};
}
inline ModelDoc make_doc(const FiniteMixture& m, Json prov = Json::object()) {
  return {"mixture", to_json(m), std::move(prov)};
}
inline ModelDoc make_doc(const NoveltyDetector& d, Json prov = Json::object()) {
  return {"detector", to_json(d), std::move(prov)};
}
inline ModelDoc make_doc(const DPHyper& h, Json prov = Json::object()) {
  return {"dp-hyper", to_json(h), std::move(prov)};
}

inline void expect_kind(const ModelDoc& doc, std::initializer_list<std::string_view> kinds) {
  for (auto k : kinds)
    if (doc.kind == k) return;
  std::string list;
  for (auto k : kinds) list += (list.empty() ? "" : "|") + std::string(k);
  throw DataError("model kind '" + doc.kind + "' where " + list + " was expected");
}

inline PointProcessModel as_pp(const ModelDoc& doc) {
  expect_kind(doc, {"iid-cluster", "poisson-pp"});
  auto m = pp_from(doc.model);
  if (pp_kind(m) != doc.kind) throw DataError("model kind does not match its cardinality family");
  return m;
}
inline LabeledClassifier as_classifier(const ModelDoc& doc) {
  expect_kind(doc, {"classifier"});
  return classifier_from(doc.model);
}
inline FiniteMixture as_mixture(const ModelDoc& doc) {
  expect_kind(doc, {"mixture"});
  return mixture_from(doc.model);
}
inline NoveltyDetector as_detector(const ModelDoc& doc) {
  expect_kind(doc, {"detector"});
  return detector_from(doc.model);
}
inline DPHyper as_dp_hyper(const ModelDoc& doc) {
  expect_kind(doc, {"dp-hyper"});
  return dp_hyper_from(doc.model);
}

// Rebuilds the typed object and re-serializes it; equal to the input text for
// any file this module wrote.
inline std::string canonical_model_text(std::string_view text) {
  const auto doc = parse_model(text);
  ModelDoc out{doc.kind, Json(), doc.provenance};
  if (doc.kind == "classifier") out.model = to_json(as_classifier(doc));
  else if (doc.kind == "mixture") out.model = to_json(as_mixture(doc));
  else if (doc.kind == "detector") out.model = to_json(as_detector(doc));
  else if (doc.kind == "dp-hyper") out.model = to_json(as_dp_hyper(doc));
  else out.model = to_json(as_pp(doc));
  return dump_model(out);
}

// ---------------------------------------------------------------------------
// Scenario configs
// ---------------------------------------------------------------------------

inline Json to_json(const ScenarioConfig& cfg) {
  Json j;
  j["name"] = cfg.name;
  j["dim"] = cfg.dim;
  Json comps = Json::array();
  for (const auto& c : cfg.components) {
    Json cj;
    cj["label"] = c.label;
    cj["count"] = c.count;
    cj["model"] = to_json(c.model);
    comps.push_back(std::move(cj));
  }
  j["components"] = std::move(comps);
  return j;
}

inline ScenarioConfig scenario_from(const Json& j) {
  ScenarioConfig cfg;
  if (const auto it = j.find("name"); it != j.end() && it->is_string()) cfg.name = it->get<std::string>();
  cfg.dim = static_cast<int>(get_int(field(j, "dim", "scenario"), "scenario.dim"));
  if (cfg.dim < 1) throw DataError("scenario.dim must be >= 1");
  const auto& comps = field(j, "components", "scenario");
  if (!comps.is_array()) throw DataError("scenario.components: expected an array");
  for (const auto& c : comps) {
    const auto count = get_int(field(c, "count", "scenario.component"), "scenario.component.count");
    if (count < 0) throw DataError("scenario.component.count must be >= 0");
    const auto label = get_int(field(c, "label", "scenario.component"), "scenario.component.label");
    auto model = pp_from(field(c, "model", "scenario.component"));
    if (model.dim() != cfg.dim) throw DataError("scenario component dimension does not match scenario.dim");
    cfg.components.push_back({static_cast<int>(label), std::move(model), static_cast<std::size_t>(count)});
  }
  return cfg;
}

inline ScenarioConfig load_scenario(const std::string& path) {
  try {
    return scenario_from(Json::parse(read_text(path)));
  } catch (const nlohmann::json::parse_error&) {
    throw DataError(path + ": scenario config is not valid JSON");
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

}  // namespace setproc::io
