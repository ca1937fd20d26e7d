// setproc: simulate, train, classify, detect, cluster and evaluate point-pattern
// data from the command line.
//
// Exit codes: 0 ok, 2 usage, 3 data, 4 numerical. Failures print one JSON
// object on stderr: {"error": kind, "code": n, "message": text}.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "setproc/setproc.hpp"

using namespace setproc;
using io::Json;

namespace {

// ---------------------------------------------------------------------------
// Option parsing helpers
// ---------------------------------------------------------------------------

CardFamily parse_card(const std::string& s, std::optional<std::size_t> max_card, double laplace) {
  if (s == "poisson") return PoissonFamily{};
  if (s == "categorical") return CategoricalFamily{max_card, laplace};
  throw UsageError("--card must be poisson or categorical, got '" + s + "'");
}

// "gaussian" or "gmm:J"
FeatFamily parse_feat(const std::string& s) {
  if (s == "gaussian") return GaussianFamily{};
  if (s.rfind("gmm:", 0) == 0) {
    int j = 0;
    try {
      std::size_t used = 0;
      j = std::stoi(s.substr(4), &used);
      if (used != s.size() - 4) j = 0;
    } catch (const std::exception&) {
      j = 0;
    }
    if (j < 1) throw UsageError("--feat gmm:J needs a positive integer J, got '" + s + "'");
    GmmFamily g;
    g.components = j;
    return g;
  }
  throw UsageError("--feat must be gaussian or gmm:J, got '" + s + "'");
}

Json family_json(const CardFamily& card, const FeatFamily& feat) {
  Json j;
  if (const auto* c = std::get_if<CategoricalFamily>(&card)) {
    j["card"] = "categorical";
    j["max_card"] = c->max_card ? Json(*c->max_card) : Json(nullptr);
    j["laplace"] = c->laplace;
  } else {
    j["card"] = "poisson";
  }
  if (const auto* g = std::get_if<GmmFamily>(&feat)) {
    j["feat"] = "gmm";
    j["components"] = g->components;
    j["inner_iters"] = g->inner_iters;
    j["inner_tol"] = g->inner_tol;
    j["restarts"] = g->restarts;
  } else {
    j["feat"] = "gaussian";
  }
  return j;
}

// Maps arbitrary integer labels to dense class indices 0..K-1 in sorted order.
struct LabelMap {
  std::vector<int> labels;
  std::map<int, int> index;

  explicit LabelMap(const std::vector<int>& ys) {
    for (int y : ys) index.emplace(y, 0);
    for (auto& [y, i] : index) {
      i = static_cast<int>(labels.size());
      labels.push_back(y);
    }
  }
};

std::vector<LabeledPattern> dense_labeled(const io::PatternFile& f, const LabelMap& map) {
  const auto ys = f.label_values();
  std::vector<LabeledPattern> out;
  out.reserve(ys.size());
  for (std::size_t i = 0; i < ys.size(); ++i) out.push_back({f.patterns[i], map.index.at(ys[i])});
  return out;
}

io::PatternFile load_nonempty(const std::string& path, int dim = 0) {
  auto f = io::load_patterns(path, dim);
  if (f.patterns.empty()) throw DataError(path + ": no patterns");
  return f;
}

// Plain JSONL records (prediction files); blank lines skipped.
std::vector<Json> load_records(const std::string& path) {
  std::vector<Json> out;
  std::istringstream in(io::read_text(path));
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(Json::parse(line));
    } catch (const nlohmann::json::parse_error&) {
      throw DataError(path + ": line " + std::to_string(lineno) + ": invalid JSON");
    }
  }
  return out;
}

std::string jsonl(const std::vector<Json>& rows) {
  std::string out;
  for (const auto& r : rows) {
    out += r.dump();
    out += '\n';
  }
  return out;
}

double mean_of(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Sample standard deviation; 0 for fewer than two values.
double std_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

struct SimulateArgs {
  std::string scenario, config, out;
  std::optional<std::size_t> count;
  std::uint64_t seed = 0;
  bool list = false;
};

void run_simulate(const SimulateArgs& a) {
  if (a.list) {
    for (const auto& n : scenarios::builtin_names()) std::cout << n << '\n';
    return;
  }
  if (a.scenario.empty() == a.config.empty()) throw UsageError("simulate needs exactly one of --scenario or --config");
  if (a.out.empty()) throw UsageError("simulate needs --out");
  ScenarioConfig cfg = a.config.empty() ? scenarios::builtin(a.scenario, a.count) : io::load_scenario(a.config);
  if (!a.config.empty() && a.count)
    for (auto& c : cfg.components) c.count = *a.count;
  io::write_text(a.out, io::dump_patterns(simulate(cfg, a.seed)));
}

// ---------------------------------------------------------------------------
// train
// ---------------------------------------------------------------------------

struct TrainArgs {
  std::string task = "classify", model = "poisson", card = "poisson", feat = "gaussian", prior = "uniform";
  std::string rank = "ranking", in, out;
  std::optional<std::size_t> max_card;
  double laplace = 1.0, unit_u = 1.0;
  std::optional<double> quantile;
  std::uint64_t seed = 0;
};

void run_train(const TrainArgs& a) {
  FitOptions opts;
  opts.card = parse_card(a.card, a.max_card, a.laplace);
  opts.feat = parse_feat(a.feat);
  opts.seed = a.seed;
  opts.unit_u = a.unit_u;
  const auto data = load_nonempty(a.in);

  Json prov;
  prov["command"] = "train";
  prov["task"] = a.task;
  prov["seed"] = a.seed;
  prov["options"] = family_json(opts.card, opts.feat);
  prov["unit_u"] = a.unit_u;
  prov["patterns"] = data.patterns.size();

  if (a.task == "classify") {
    if (a.model != "poisson" && a.model != "nb") throw UsageError("--model must be poisson or nb");
    if (a.prior != "uniform" && a.prior != "empirical") throw UsageError("--prior must be uniform or empirical");
    const LabelMap map(data.label_values());
    const auto labeled = dense_labeled(data, map);
    const auto mode = a.model == "nb" ? LikelihoodMode::kNaiveBayes : LikelihoodMode::kPointProcess;
    const auto prior = a.prior == "empirical" ? PriorMode::kEmpirical : PriorMode::kUniform;
    prov["model"] = a.model;
    prov["prior"] = a.prior;
    io::LabeledClassifier lc{train_classifier(labeled, opts, prior, mode), map.labels};
    io::save_model(a.out, io::make_doc(lc, prov));
  } else if (a.task == "novelty") {
    NoveltyDetector d(fit_iid_cluster(data.patterns, opts), io::rank_from(a.rank));
    prov["rank"] = a.rank;
    if (a.quantile) {
      fit_threshold(d, data.patterns, *a.quantile);
      prov["quantile"] = *a.quantile;
    }
    io::save_model(a.out, io::make_doc(d, prov));
  } else {
    throw UsageError("--task must be classify or novelty");
  }
}

// ---------------------------------------------------------------------------
// classify
// ---------------------------------------------------------------------------

struct ClassifyArgs {
  std::string model, in, out;
};

void run_classify(const ClassifyArgs& a) {
  const auto lc = io::as_classifier(io::load_model(a.model));
  const auto data = io::load_patterns(a.in, lc.classifier.dim());
  const auto posts = posterior_batch(lc.classifier, data.patterns);
  std::vector<Json> rows;
  rows.reserve(posts.size());
  for (const auto& p : posts) {
    Json r;
    r["label"] = lc.labels[static_cast<std::size_t>(predict(p))];
    r["posterior"] = io::to_json(p.probs);
    r["degenerate"] = p.degenerate;
    rows.push_back(std::move(r));
  }
  io::write_text(a.out, jsonl(rows));
}

// ---------------------------------------------------------------------------
// detect
// ---------------------------------------------------------------------------

struct DetectArgs {
  std::string model, train, in, out, model_out;
  std::optional<std::string> rank;
  double quantile = 0.2;
};

void run_detect(const DetectArgs& a) {
  const auto doc = io::load_model(a.model);
  std::optional<NoveltyDetector> det;
  if (doc.kind == "detector") det.emplace(io::as_detector(doc));
  else det.emplace(io::as_pp(doc));
  if (a.rank) {
    const auto mode = io::rank_from(*a.rank);
    if (mode != det->mode() && det->threshold() && a.train.empty())
      throw UsageError("--rank differs from the stored detector's; pass --train to refit the threshold");
    det->set_mode(mode);
  }
  if (!a.train.empty()) {
    const auto train = load_nonempty(a.train, det->model().dim());
    fit_threshold(*det, train.patterns, a.quantile);
  }
  if (!det->threshold()) throw UsageError("detector has no threshold; pass --train to fit one");
  const double tau = *det->threshold();

  const auto data = io::load_patterns(a.in, det->model().dim());
  const auto ranks = log_rank_batch(*det, data.patterns);
  std::vector<Json> rows;
  rows.reserve(ranks.size());
  for (double r : ranks) {
    Json row;
    row["log_rank"] = io::num(r);
    row["threshold"] = io::num(tau);
    row["novel"] = decide(r, tau) == Decision::kNovel;
    rows.push_back(std::move(row));
  }
  io::write_text(a.out, jsonl(rows));

  if (!a.model_out.empty()) {
    Json prov = doc.provenance;
    prov["rank"] = io::rank_name(det->mode());
    if (!a.train.empty()) prov["quantile"] = a.quantile;
    io::save_model(a.model_out, io::make_doc(*det, prov));
  }
}

// ---------------------------------------------------------------------------
// cluster-em
// ---------------------------------------------------------------------------

struct EmArgs {
  std::size_t k = 3;
  int restarts = 5, max_iters = 200;
  double tol = 1e-7, laplace = 1.0, unit_u = 1.0;
  std::string card = "poisson", feat = "gaussian", in, out, model_out;
  std::optional<std::size_t> max_card;
  std::uint64_t seed = 0;
};

void run_cluster_em(const EmArgs& a) {
  EMOptions opts;
  opts.max_iters = a.max_iters;
  opts.tol = a.tol;
  opts.restarts = a.restarts;
  opts.seed = a.seed;
  opts.component.card = parse_card(a.card, a.max_card, a.laplace);
  opts.component.feat = parse_feat(a.feat);
  opts.component.unit_u = a.unit_u;
  if (a.restarts < 1) throw UsageError("--restarts must be >= 1");
  const auto data = load_nonempty(a.in);
  const auto res = em_fit(data.patterns, a.k, opts);

  std::vector<Json> rows;
  for (int y : res.labels) rows.push_back(Json{{"label", y}});
  io::write_text(a.out, jsonl(rows));

  Json summary;
  summary["loglik"] = io::num(res.trace.back());
  summary["iterations"] = res.iterations;
  summary["converged"] = res.converged;
  summary["restart"] = res.restart;
  summary["reseeds"] = res.reseeds;
  if (!a.model_out.empty()) {
    Json prov;
    prov["command"] = "cluster-em";
    prov["seed"] = a.seed;
    prov["k"] = a.k;
    prov["restarts"] = a.restarts;
    prov["max_iters"] = a.max_iters;
    prov["tol"] = a.tol;
    prov["options"] = family_json(opts.component.card, opts.component.feat);
    prov["unit_u"] = a.unit_u;
    prov["patterns"] = data.patterns.size();
    prov["result"] = summary;
    io::save_model(a.model_out, io::make_doc(res.mixture, prov));
  }
  std::cout << summary.dump() << '\n';
}

// ---------------------------------------------------------------------------
// cluster-dp
// ---------------------------------------------------------------------------

struct DpArgs {
  std::optional<double> eta;
  int burnin = 200, samples = 100, thin = 1;
  std::string in, out, hyper, hyper_out, samples_out;
  std::uint64_t seed = 0;
};

void run_cluster_dp(const DpArgs& a) {
  const auto data = load_nonempty(a.in);
  DPHyper h = a.hyper.empty() ? default_hyper(data.patterns) : io::as_dp_hyper(io::load_model(a.hyper));
  if (a.eta) h.eta = *a.eta;
  if (h.dim() != data.dim) throw DataError("DP hyperparameters have dimension " + std::to_string(h.dim()) +
                                           " but the data has " + std::to_string(data.dim));
  const auto res = run_dp_clustering(data.patterns, h, a.burnin, a.samples, a.thin, a.seed);

  std::vector<Json> rows;
  for (int y : res.point_estimate) rows.push_back(Json{{"label", y}});
  io::write_text(a.out, jsonl(rows));

  if (!a.samples_out.empty()) {
    std::vector<Json> srows;
    for (std::size_t s = 0; s < res.label_samples.size(); ++s) {
      Json r;
      r["score"] = io::num(res.scores[s]);
      r["clusters"] = res.cluster_counts[s];
      r["labels"] = res.label_samples[s];
      srows.push_back(std::move(r));
    }
    io::write_text(a.samples_out, jsonl(srows));
  }
  if (!a.hyper_out.empty()) {
    Json prov;
    prov["command"] = "cluster-dp";
    prov["seed"] = a.seed;
    prov["patterns"] = data.patterns.size();
    io::save_model(a.hyper_out, io::make_doc(h, prov));
  }
  const auto best = std::max_element(res.scores.begin(), res.scores.end()) - res.scores.begin();
  Json summary;
  summary["clusters"] = res.cluster_counts[static_cast<std::size_t>(best)];
  summary["score"] = io::num(res.scores[static_cast<std::size_t>(best)]);
  summary["samples"] = res.label_samples.size();
  std::cout << summary.dump() << '\n';
}

// ---------------------------------------------------------------------------
// eval
// ---------------------------------------------------------------------------

int record_label(const Json& r, const std::string& where) {
  const auto it = r.find("label");
  if (it == r.end() || !it->is_number_integer()) throw DataError(where + ": record has no integer 'label'");
  return it->get<int>();
}

// Novelty truth: an explicit "novel" flag, else label != 0.
bool record_novel(const Json& r, const std::string& where) {
  if (const auto it = r.find("novel"); it != r.end()) {
    if (!it->is_boolean()) throw DataError(where + ": 'novel' must be a boolean");
    return it->get<bool>();
  }
  return record_label(r, where) != 0;
}

Json eval_one(const std::string& task, const std::string& truth_path, const std::string& pred_path) {
  const auto truth = load_records(truth_path);
  const auto pred = load_records(pred_path);
  if (truth.size() != pred.size())
    throw DataError("truth has " + std::to_string(truth.size()) + " records but predictions have " +
                    std::to_string(pred.size()));
  if (truth.empty()) throw DataError(truth_path + ": no records");
  Json m;
  m["n"] = truth.size();
  if (task == "novelty") {
    std::vector<bool> t, p;
    for (const auto& r : truth) t.push_back(record_novel(r, truth_path));
    for (const auto& r : pred) p.push_back(record_novel(r, pred_path));
    const auto s = detection_prf(t, p);
    m["precision"] = s.precision;
    m["recall"] = s.recall;
    m["f1"] = s.f1;
    return m;
  }
  std::vector<int> t, p;
  for (const auto& r : truth) t.push_back(record_label(r, truth_path));
  for (const auto& r : pred) p.push_back(record_label(r, pred_path));
  if (task == "classify") {
    m["accuracy"] = accuracy(t, p);
    const ConfusionMatrix cm(t, p);
    Json counts = Json::array();
    for (std::size_t r = 0; r < cm.rows(); ++r) {
      Json row = Json::array();
      for (std::size_t c = 0; c < cm.cols(); ++c) row.push_back(cm(r, c));
      counts.push_back(std::move(row));
    }
    m["confusion"] = Json{{"truth_labels", cm.row_labels()}, {"pred_labels", cm.col_labels()}, {"counts", counts}};
    return m;
  }
  const auto s = clustering_scores(t, p);
  m["purity"] = s.purity;
  m["nmi"] = s.nmi;
  m["rand"] = s.rand;
  m["pair_f1"] = s.pair_f1;
  return m;
}

std::vector<std::string> scalar_metrics(const std::string& task) {
  if (task == "classify") return {"accuracy"};
  if (task == "novelty") return {"precision", "recall", "f1"};
  return {"purity", "nmi", "rand", "pair_f1"};
}

// Per-fold values plus mean and sample std of every scalar metric.
Json fold_summary(const std::vector<Json>& folds, const std::vector<std::string>& keys) {
  Json mean, sd;
  for (const auto& k : keys) {
    std::vector<double> v;
    for (const auto& f : folds) v.push_back(f.at(k).get<double>());
    mean[k] = mean_of(v);
    sd[k] = std_of(v);
  }
  return Json{{"folds", folds}, {"mean", mean}, {"std", sd}};
}

std::string csv_summary(const Json& report, const std::vector<std::string>& keys) {
  std::string out = "metric,mean,std\n";
  for (const auto& k : keys) {
    const bool folded = report.contains("mean");
    const double m = folded ? report["mean"][k].get<double>() : report[k].get<double>();
    const double s = folded ? report["std"][k].get<double>() : 0.0;
    out += k + "," + Json(m).dump() + "," + Json(s).dump() + "\n";
  }
  return out;
}

struct EvalArgs {
  std::string task = "classify", truth, pred, folds, out, csv;
};

void run_eval(const EvalArgs& a) {
  if (a.task != "classify" && a.task != "novelty" && a.task != "cluster")
    throw UsageError("--task must be classify, novelty or cluster");
  Json report;
  if (!a.folds.empty()) {
    if (!a.truth.empty() || !a.pred.empty()) throw UsageError("--folds replaces --truth/--pred");
    const auto base = std::filesystem::path(a.folds).parent_path();
    Json manifest;
    try {
      manifest = Json::parse(io::read_text(a.folds));
    } catch (const nlohmann::json::parse_error&) {
      throw DataError(a.folds + ": fold manifest is not valid JSON");
    }
    const auto& list = io::field(manifest, "folds", "fold manifest");
    if (!list.is_array() || list.empty()) throw DataError("fold manifest: 'folds' must be a non-empty array");
    auto resolve = [&](const std::string& p) {
      const std::filesystem::path fp(p);
      return (fp.is_absolute() ? fp : base / fp).string();
    };
    std::vector<Json> folds;
    for (const auto& f : list)
      folds.push_back(eval_one(a.task, resolve(io::get_str(f, "truth", "fold")), resolve(io::get_str(f, "pred", "fold"))));
    report = fold_summary(folds, scalar_metrics(a.task));
  } else {
    if (a.truth.empty() || a.pred.empty()) throw UsageError("eval needs --truth and --pred, or --folds");
    report = eval_one(a.task, a.truth, a.pred);
  }
  report["task"] = a.task;
  const auto text = report.dump(2) + "\n";
  if (a.out.empty()) std::cout << text;
  else io::write_text(a.out, text);
  if (!a.csv.empty()) io::write_text(a.csv, csv_summary(report, scalar_metrics(a.task)));
}

// ---------------------------------------------------------------------------
// xval: stratified k-fold cross-validation of the classifiers
// ---------------------------------------------------------------------------

struct XvalArgs {
  int folds = 4;
  std::string model = "both", card = "poisson", feat = "gaussian", prior = "uniform", in, out, csv;
  std::optional<std::size_t> max_card;
  double laplace = 1.0, unit_u = 1.0;
  std::uint64_t seed = 0;
};

// Each class's indices are shuffled and dealt round-robin, so every fold
// holds about 1/F of every class.
std::vector<int> stratified_folds(const std::vector<int>& labels, int F, std::uint64_t seed) {
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
  Rng rng = make_rng(seed, streams::kFolds);
  std::vector<int> fold(labels.size(), 0);
  int next = 0;
  for (auto& [y, idx] : by_class) {
    std::shuffle(idx.begin(), idx.end(), rng);
    for (auto i : idx) {
      fold[i] = next;
      next = (next + 1) % F;
    }
  }
  return fold;
}

void run_xval(const XvalArgs& a) {
  if (a.folds < 2) throw UsageError("--folds must be >= 2");
  std::vector<std::string> models;
  if (a.model == "both") models = {"poisson", "nb"};
  else if (a.model == "poisson" || a.model == "nb") models = {a.model};
  else throw UsageError("--model must be poisson, nb or both");
  if (a.prior != "uniform" && a.prior != "empirical") throw UsageError("--prior must be uniform or empirical");

  FitOptions opts;
  opts.card = parse_card(a.card, a.max_card, a.laplace);
  opts.feat = parse_feat(a.feat);
  opts.unit_u = a.unit_u;
  const auto data = load_nonempty(a.in);
  const LabelMap map(data.label_values());
  const auto labeled = dense_labeled(data, map);
  std::vector<int> ys;
  for (const auto& lp : labeled) ys.push_back(lp.label);
  const auto fold = stratified_folds(ys, a.folds, a.seed);

  Json report;
  report["folds"] = a.folds;
  report["seed"] = a.seed;
  report["options"] = family_json(opts.card, opts.feat);
  Json per_model;
  for (const auto& name : models) {
    std::vector<Json> rows;
    for (int f = 0; f < a.folds; ++f) {
      std::vector<LabeledPattern> train;
      std::vector<PointPattern> test;
      std::vector<int> truth;
      for (std::size_t i = 0; i < labeled.size(); ++i) {
        if (fold[i] == f) {
          test.push_back(labeled[i].pattern);
          truth.push_back(labeled[i].label);
        } else {
          train.push_back(labeled[i]);
        }
      }
      if (test.empty()) throw DataError("fold " + std::to_string(f) + " is empty; use fewer folds");
      FitOptions fo = opts;
      fo.seed = derive_seed(a.seed, static_cast<std::uint64_t>(f));
      const auto clf = train_classifier(train, fo, a.prior == "empirical" ? PriorMode::kEmpirical : PriorMode::kUniform,
                                        name == "nb" ? LikelihoodMode::kNaiveBayes : LikelihoodMode::kPointProcess);
      if (clf.num_classes() != map.labels.size())
        throw DataError("fold " + std::to_string(f) + " leaves a class without training patterns");
      std::vector<int> pred;
      for (const auto& p : posterior_batch(clf, test)) pred.push_back(predict(p));
      rows.push_back(Json{{"fold", f}, {"n", test.size()}, {"accuracy", accuracy(truth, pred)}});
    }
    per_model[name] = fold_summary(rows, {"accuracy"});
  }
  report["models"] = per_model;
  const auto text = report.dump(2) + "\n";
  if (a.out.empty()) std::cout << text;
  else io::write_text(a.out, text);
  if (!a.csv.empty()) {
    std::string csv = "model,mean_accuracy,std_accuracy\n";
    for (const auto& name : models)
      csv += name + "," + per_model[name]["mean"]["accuracy"].dump() + "," + per_model[name]["std"]["accuracy"].dump() + "\n";
    io::write_text(a.csv, csv);
  }
}

// ---------------------------------------------------------------------------
// Error reporting
// ---------------------------------------------------------------------------

int fail(std::string_view kind, int code, std::string_view message) {
  std::cerr << Json{{"error", kind}, {"code", code}, {"message", message}}.dump() << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"setproc: point-process models for point-pattern data"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "sample a labeled dataset from a scenario");
  s->add_option("--scenario", sim.scenario, "built-in scenario name");
  s->add_option("--config", sim.config, "scenario config JSON");
  s->add_option("--count", sim.count, "patterns per component (overrides the scenario)");
  s->add_option("--seed", sim.seed);
  s->add_option("--out", sim.out);
  s->add_flag("--list", sim.list, "print the built-in scenario names");

  TrainArgs tr;
  auto* t = app.add_subcommand("train", "fit a classifier or a novelty detector");
  t->add_option("--task", tr.task)->check(CLI::IsMember({"classify", "novelty"}));
  t->add_option("--model", tr.model)->check(CLI::IsMember({"poisson", "nb"}));
  t->add_option("--card", tr.card);
  t->add_option("--feat", tr.feat);
  t->add_option("--prior", tr.prior)->check(CLI::IsMember({"uniform", "empirical"}));
  t->add_option("--rank", tr.rank)->check(CLI::IsMember({"ranking", "density", "nb"}));
  t->add_option("--quantile", tr.quantile, "novelty: fit the threshold on the training data");
  t->add_option("--max-card", tr.max_card);
  t->add_option("--laplace", tr.laplace);
  t->add_option("--unit-u", tr.unit_u);
  t->add_option("--seed", tr.seed);
  t->add_option("--in", tr.in)->required();
  t->add_option("--out", tr.out)->required();

  ClassifyArgs cl;
  auto* c = app.add_subcommand("classify", "posterior and label per pattern");
  c->add_option("--model", cl.model)->required();
  c->add_option("--in", cl.in)->required();
  c->add_option("--out", cl.out)->required();

  DetectArgs de;
  auto* d = app.add_subcommand("detect", "flag novel patterns");
  d->add_option("--model", de.model)->required();
  d->add_option("--quantile", de.quantile);
  d->add_option("--rank", de.rank)->check(CLI::IsMember({"ranking", "density", "nb"}));
  d->add_option("--train", de.train, "normal patterns used to fit the threshold");
  d->add_option("--in", de.in)->required();
  d->add_option("--out", de.out)->required();
  d->add_option("--model-out", de.model_out);

  EmArgs em;
  auto* e = app.add_subcommand("cluster-em", "finite mixture clustering by EM");
  e->add_option("--k", em.k)->required();
  e->add_option("--restarts", em.restarts);
  e->add_option("--max-iters", em.max_iters);
  e->add_option("--tol", em.tol);
  e->add_option("--card", em.card);
  e->add_option("--feat", em.feat);
  e->add_option("--max-card", em.max_card);
  e->add_option("--laplace", em.laplace);
  e->add_option("--unit-u", em.unit_u);
  e->add_option("--seed", em.seed);
  e->add_option("--in", em.in)->required();
  e->add_option("--out", em.out)->required();
  e->add_option("--model-out", em.model_out);

  DpArgs dp;
  auto* g = app.add_subcommand("cluster-dp", "Dirichlet-process clustering by collapsed Gibbs sampling");
  g->add_option("--eta", dp.eta);
  g->add_option("--burnin", dp.burnin);
  g->add_option("--samples", dp.samples);
  g->add_option("--thin", dp.thin);
  g->add_option("--hyper", dp.hyper, "dp-hyper model file (default: derived from the data)");
  g->add_option("--hyper-out", dp.hyper_out);
  g->add_option("--samples-out", dp.samples_out);
  g->add_option("--seed", dp.seed);
  g->add_option("--in", dp.in)->required();
  g->add_option("--out", dp.out)->required();

  EvalArgs ev;
  auto* v = app.add_subcommand("eval", "score predictions against truth");
  v->add_option("--task", ev.task)->check(CLI::IsMember({"classify", "novelty", "cluster"}));
  v->add_option("--truth", ev.truth);
  v->add_option("--pred", ev.pred);
  v->add_option("--folds", ev.folds, "fold manifest JSON: {\"folds\": [{\"truth\": ..., \"pred\": ...}]}");
  v->add_option("--out", ev.out);
  v->add_option("--csv", ev.csv);

  XvalArgs xv;
  auto* x = app.add_subcommand("xval", "stratified k-fold cross-validation of the classifiers");
  x->add_option("--folds", xv.folds);
  x->add_option("--model", xv.model)->check(CLI::IsMember({"poisson", "nb", "both"}));
  x->add_option("--card", xv.card);
  x->add_option("--feat", xv.feat);
  x->add_option("--prior", xv.prior)->check(CLI::IsMember({"uniform", "empirical"}));
  x->add_option("--max-card", xv.max_card);
  x->add_option("--laplace", xv.laplace);
  x->add_option("--unit-u", xv.unit_u);
  x->add_option("--seed", xv.seed);
  x->add_option("--in", xv.in)->required();
  x->add_option("--out", xv.out);
  x->add_option("--csv", xv.csv);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& h) {
    return app.exit(h);
  } catch (const CLI::CallForAllHelp& h) {
    return app.exit(h);
  } catch (const CLI::ParseError& err) {
    return fail("usage", 2, err.what());
  }

  try {
    if (*s) run_simulate(sim);
    else if (*t) run_train(tr);
    else if (*c) run_classify(cl);
    else if (*d) run_detect(de);
    else if (*e) run_cluster_em(em);
    else if (*g) run_cluster_dp(dp);
    else if (*v) run_eval(ev);
    else if (*x) run_xval(xv);
  } catch (const UsageError& err) {
    return fail("usage", 2, err.what());
  } catch (const NumericalError& err) {
    return fail("numerical", 4, err.what());
  } catch (const Error& err) {
    return fail("data", 3, err.what());
  } catch (const nlohmann::json::exception& err) {
    return fail("data", 3, err.what());
  } catch (const std::exception& err) {
    return fail("internal", 1, err.what());
  }
  return 0;
}
