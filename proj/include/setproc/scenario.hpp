#pragma once

// Simulated datasets in the style of the classification, novelty and
// clustering experiments. Parameter values of the built-ins are
// reconstructions with the stated separation/overlap structure; the exact
// values behind the original figures are not recoverable.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "setproc/core.hpp"
#include "setproc/models.hpp"
#include "setproc/random.hpp"

namespace setproc {

struct ScenarioComponent {
  int label = 0;
  PointProcessModel model;
  std::size_t count = 0;
};

struct ScenarioConfig {
  std::string name;
  int dim = 2;
  std::vector<ScenarioComponent> components;
};

// Each component draws from its own stream, so changing one component's count
// does not perturb the patterns of the others.
inline std::vector<LabeledPattern> simulate(const ScenarioConfig& cfg, std::uint64_t seed) {
  std::vector<LabeledPattern> out;
  const std::uint64_t base = derive_seed(seed, streams::kSimulate);
  for (std::size_t c = 0; c < cfg.components.size(); ++c) {
    const auto& comp = cfg.components[c];
    if (comp.model.dim() != cfg.dim) throw DataError("scenario component " + std::to_string(c) + " has wrong dimension");
    Rng rng = make_rng(base, c);
    for (std::size_t i = 0; i < comp.count; ++i) out.push_back({sample(comp.model, rng), comp.label});
  }
  return out;
}

inline std::vector<PointPattern> patterns_of(std::span<const LabeledPattern> data) {
  std::vector<PointPattern> out;
  out.reserve(data.size());
  for (const auto& lp : data) out.push_back(lp.pattern);
  return out;
}

inline std::vector<int> labels_of(std::span<const LabeledPattern> data) {
  std::vector<int> out;
  out.reserve(data.size());
  for (const auto& lp : data) out.push_back(lp.label);
  return out;
}

namespace scenarios {

inline PointProcessModel poisson_gauss2(double rate, double mx, double my, double var) {
  Vector mean(2);
  mean << mx, my;
  return PointProcessModel(PoissonCard(rate), Gaussian(mean, var * Matrix::Identity(2, 2)));
}

// Classification / clustering scenarios, three classes each.
//  (a) separated in feature, overlapping in cardinality
//  (b) common feature density, separated in cardinality
//  (c) classes 1,2 separated in feature; classes 2,3 only in cardinality
inline ScenarioConfig classify_a(std::size_t per_class = 100) {
  return {"classify-a", 2,
          {{0, poisson_gauss2(15, 0, 0, 1), per_class},
           {1, poisson_gauss2(20, 6, 0, 1), per_class},
           {2, poisson_gauss2(25, 0, 6, 1), per_class}}};
}

inline ScenarioConfig classify_b(std::size_t per_class = 100) {
  return {"classify-b", 2,
          {{0, poisson_gauss2(10, 0, 0, 1), per_class},
           {1, poisson_gauss2(40, 0, 0, 1), per_class},
           {2, poisson_gauss2(90, 0, 0, 1), per_class}}};
}

inline ScenarioConfig classify_c(std::size_t per_class = 100) {
  return {"classify-c", 2,
          {{0, poisson_gauss2(20, 5, 5, 1), per_class},
           {1, poisson_gauss2(20, 0, 0, 1), per_class},
           {2, poisson_gauss2(60, 0, 0, 1), per_class}}};
}

// Novelty scenarios: label 0 is 'normal', label 1 is novel. All share the
// same normal model (cardinalities roughly 20..60).
inline PointProcessModel novelty_normal_model() { return poisson_gauss2(40, 0, 0, 9); }

inline ScenarioConfig novelty_normal(std::size_t count = 300) {
  return {"novelty-normal", 2, {{0, novelty_normal_model(), count}}};
}

//  (a) separated in feature, same cardinality
inline ScenarioConfig novelty_a(std::size_t normal = 100, std::size_t novel = 100) {
  return {"novelty-a", 2, {{0, novelty_normal_model(), normal}, {1, poisson_gauss2(40, 15, 15, 9), novel}}};
}

//  (b) overlapping in feature; half low-, half high-cardinality novelties
inline ScenarioConfig novelty_b(std::size_t normal = 100, std::size_t novel = 100) {
  return {"novelty-b", 2,
          {{0, novelty_normal_model(), normal},
           {1, poisson_gauss2(3, 3, 3, 9), novel / 2},
           {1, poisson_gauss2(90, 3, 3, 9), novel - novel / 2}}};
}

//  (c) (b) without the high-cardinality novelties
inline ScenarioConfig novelty_c(std::size_t normal = 100, std::size_t novel = 100) {
  return {"novelty-c", 2, {{0, novelty_normal_model(), normal}, {1, poisson_gauss2(3, 3, 3, 9), novel}}};
}

inline std::vector<std::string> builtin_names() {
  return {"classify-a", "classify-b", "classify-c", "novelty-normal", "novelty-a", "novelty-b", "novelty-c"};
}

// Built-in by name; `count`, when given, overrides every component's count.
inline ScenarioConfig builtin(const std::string& name, std::optional<std::size_t> count = std::nullopt) {
  ScenarioConfig cfg;
  if (name == "classify-a") cfg = classify_a();
  else if (name == "classify-b") cfg = classify_b();
  else if (name == "classify-c") cfg = classify_c();
  else if (name == "novelty-normal") cfg = novelty_normal();
  else if (name == "novelty-a") cfg = novelty_a();
  else if (name == "novelty-b") cfg = novelty_b();
  else if (name == "novelty-c") cfg = novelty_c();
  else throw UsageError("unknown scenario '" + name + "'");
  if (count)
    for (auto& c : cfg.components) c.count = *count;
  return cfg;
}

}  // namespace scenarios
}  // namespace setproc
