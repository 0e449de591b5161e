// Copyright 2026 The Typelink Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Discrete search for a type system: choose a subset of candidate axes that
// maximizes J. The search algorithms are templates over any SubsetObjective so
// they can be exercised on synthetic fitness functions as well as on J.

#ifndef TYPELINK_SEARCH_HPP_
#define TYPELINK_SEARCH_HPP_

#include <chrono>
#include <cmath>
#include <concepts>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <tuple>
#include <vector>

#include "typelink/base.hpp"
#include "typelink/evalcore.hpp"
#include "typelink/kg.hpp"
#include "typelink/learnability.hpp"
#include "typelink/typesys.hpp"

namespace typelink {

// Sorted, duplicate-free list of pool axis positions.
using AxisSet = std::vector<std::uint32_t>;

inline AxisSet normalized(AxisSet s) {
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

inline AxisSet mask_to_set(const std::vector<std::uint8_t>& mask) {
  AxisSet s;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i]) s.push_back(static_cast<std::uint32_t>(i));
  }
  return s;
}

struct AxisSetHash {
  std::size_t operator()(const AxisSet& s) const noexcept {
    std::uint64_t h = 0x12345;
    for (auto a : s) h = splitmix64(h ^ a);
    return static_cast<std::size_t>(h);
  }
};

// Anything the search algorithms can maximize.
template <typename T>
concept SubsetObjective = requires(T& obj, const T& cobj, std::span<const AxisSet> batch) {
  { cobj.axis_count() } -> std::convertible_to<std::size_t>;
  { obj.evaluate_batch(batch) } -> std::same_as<std::vector<double>>;
  { cobj.evaluations() } -> std::convertible_to<std::size_t>;
};

// ---------------------------------------------------------------------------
// Candidate pool.

enum class Commonness { kChildren, kInlinks };

struct PoolOptions {
  std::vector<std::string> edges = {std::string(edge_kinds::kInstanceOf),
                                    std::string(edge_kinds::kWikipediaCategory)};
  std::size_t max_roots = 150000;
  std::size_t min_members = 1;
  Commonness commonness = Commonness::kChildren;
};

// (root, edge) relations over the most common parents, most common first.
inline std::vector<Relation> enumerate_relations(const KnowledgeGraph& graph, const PoolOptions& options = {}) {
  struct Entry {
    std::size_t score;
    EntityIndex root;
    std::size_t edge_pos;
  };
  std::vector<Entry> entries;
  for (std::size_t k = 0; k < options.edges.size(); ++k) {
    auto kind = graph.find_kind(options.edges[k]);
    if (!kind) continue;
    for (EntityIndex e = 0; e < graph.entity_count(); ++e) {
      std::size_t direct = 0;
      std::size_t inlinks = graph.children(e).size();
      for (const auto& link : graph.children(e)) direct += link.kind == *kind ? 1 : 0;
      if (direct == 0) continue;
      entries.push_back({options.commonness == Commonness::kChildren ? direct : inlinks, e, k});
    }
  }
  std::sort(entries.begin(), entries.end(), [&](const Entry& a, const Entry& b) {
    if (a.score != b.score) return a.score > b.score;
    if (graph.id_at(a.root) != graph.id_at(b.root)) return raw(graph.id_at(a.root)) < raw(graph.id_at(b.root));
    return a.edge_pos < b.edge_pos;
  });
  std::vector<Relation> out;
  for (const auto& e : entries) {
    if (out.size() >= options.max_roots) break;
    Relation r = make_relation(graph.id_at(e.root), options.edges[e.edge_pos]);
    if (member_set(graph, r).count() < options.min_members) continue;
    out.push_back(std::move(r));
  }
  return out;
}

struct PoolAxis {
  Relation relation;
  double learnability = 0.5;
  double learnability_std = 0.0;
};

// Axes surviving the learnability filter, with cached member bitsets.
struct CandidatePool {
  std::vector<PoolAxis> axes;
  std::vector<DynamicBitset> members;

  std::size_t size() const { return axes.size(); }
};

inline CandidatePool build_pool(std::span<const AxisLearnability> scored, const MembershipCache& cache,
                                bool drop_unlearnable = true, std::size_t max_axes = 0) {
  CandidatePool pool;
  std::set<std::string> seen;
  for (const auto& a : scored) {
    if (drop_unlearnable && a.zero) continue;
    if (!seen.insert(relation_key(a.relation)).second) continue;
    if (max_axes != 0 && pool.size() >= max_axes) break;
    pool.axes.push_back({a.relation, a.mean, a.std});
    pool.members.push_back(*cache.get(a.relation));
  }
  return pool;
}

inline TypeSystem pool_system(const CandidatePool& pool, const AxisSet& subset, const KnowledgeGraph& graph) {
  TypeSystem system;
  for (auto a : subset) system.axes.push_back(discovered_axis(graph, pool.axes.at(a).relation));
  return system;
}

// ---------------------------------------------------------------------------
// J over pool subsets, memoized by sorted axis set. Thread-safe.

class PoolObjective {
 public:
  PoolObjective(const CandidatePool& pool, const EvalSet& set, ObjectiveConfig config, unsigned workers = 0)
      : pool_(&pool), index_(set, pool.members), config_(config), workers_(workers) {}

  std::size_t axis_count() const { return pool_->size(); }
  const CandidatePool& pool() const { return *pool_; }
  const ObjectiveConfig& config() const { return config_; }
  Accuracy s_greedy() const { return index_.greedy(); }

  Accuracy s_oracle(const AxisSet& subset) const {
    DynamicBitset selected(pool_->size());
    for (auto a : subset) selected.set(a);
    return index_.accuracy(selected);
  }

  double learnability(const AxisSet& subset) const {
    if (subset.empty()) return 0.0;
    double sum = 0.0;
    for (auto a : subset) sum += pool_->axes[a].learnability;
    return sum / static_cast<double>(subset.size());
  }

  // Accuracy the objective expects from a learned classifier: J + |A| * lambda.
  double expected_accuracy(const AxisSet& subset) const {
    const double greedy = s_greedy().value();
    return (s_oracle(subset).value() - greedy) * learnability(subset) + greedy;
  }

  // Uncached evaluation.
  double compute(const AxisSet& subset) const {
    return objective_j(s_oracle(subset).value(), s_greedy().value(), learnability(subset), subset.size(), config_);
  }

  double evaluate(const AxisSet& subset) { return evaluate_batch(std::span<const AxisSet>(&subset, 1)).front(); }

  // Misses are deduplicated before evaluation, so the evaluation count is
  // the same for any worker count.
  std::vector<double> evaluate_batch(std::span<const AxisSet> batch) {
    std::vector<double> out(batch.size());
    std::vector<AxisSet> misses;
    {
      std::lock_guard<std::mutex> lock(mu_);
      std::unordered_map<AxisSet, bool, AxisSetHash> queued;
      for (const auto& s : batch) {
        if (!memo_.contains(s) && queued.emplace(s, true).second) misses.push_back(s);
      }
    }
    std::vector<double> values(misses.size());
    parallel_for(misses.size(), workers_, [&](std::size_t i) { values[i] = compute(misses[i]); });
    std::lock_guard<std::mutex> lock(mu_);
    for (std::size_t i = 0; i < misses.size(); ++i) {
      if (memo_.emplace(misses[i], values[i]).second) ++evaluations_;
    }
    for (std::size_t i = 0; i < batch.size(); ++i) out[i] = memo_.at(batch[i]);
    return out;
  }

  std::size_t evaluations() const {
    std::lock_guard<std::mutex> lock(mu_);
    return evaluations_;
  }

 private:
  const CandidatePool* pool_;
  OracleIndex index_;
  ObjectiveConfig config_;
  unsigned workers_;
  mutable std::mutex mu_;
  std::unordered_map<AxisSet, double, AxisSetHash> memo_;
  std::size_t evaluations_ = 0;
};

// ---------------------------------------------------------------------------
// Results and configuration.

struct TraceRow {
  std::size_t step = 0;
  double j = 0.0;
  AxisSet best;
};

struct SearchResult {
  AxisSet subset;
  double j = 0.0;
  std::vector<TraceRow> trace;
  std::size_t evaluations = 0;
  std::size_t iterations = 0;
  double seconds = 0.0;
};

enum class SearchMethod { kGreedy, kBeam, kCem, kGa, kRandom };

inline SearchMethod parse_method(std::string_view name) {
  if (name == "greedy") return SearchMethod::kGreedy;
  if (name == "beam") return SearchMethod::kBeam;
  if (name == "cem") return SearchMethod::kCem;
  if (name == "ga") return SearchMethod::kGa;
  if (name == "random") return SearchMethod::kRandom;
  throw Error(ErrorCode::kInvalidArgument, "unknown search method '" + std::string(name) + "'");
}

struct BeamConfig {
  std::size_t width = 1;
  std::size_t max_steps = 0;  // 0 = until no member grows
};

struct CemConfig {
  std::size_t samples = 1000;  // M_CEM
  std::size_t elites = 200;    // N_CEM
  std::optional<double> p_start;
  double expected_size = 50.0;  // p_start = expected_size / |pool| when unset
  double binary_tolerance = 0.02;
  std::size_t max_iterations = 500;
};

struct GaConfig {
  std::size_t generations = 200;
  std::size_t population = 1000;
  double mutation = 0.5;   // per tournament: flip one random gene of the loser
  double crossover = 0.2;  // per gene: loser copies the winner's gene
  std::optional<double> p_init;
  double expected_size = 50.0;
};

struct SearchConfig {
  SearchMethod method = SearchMethod::kGreedy;
  BeamConfig beam;
  CemConfig cem;
  GaConfig ga;
  double lambda = 0.00007;
  std::uint64_t seed = 0;
  std::size_t max_evaluations = 0;  // 0 = unlimited
  std::size_t random_k = 8;
  std::size_t random_trials = 100;
};

namespace detail {

inline double clamp_probability(double p) { return std::min(1.0, std::max(0.0, p)); }

inline double start_probability(std::optional<double> explicit_p, double expected_size, std::size_t n) {
  if (explicit_p) return *explicit_p;
  if (n == 0) return 0.5;
  return std::min(0.5, std::max(1.0 / static_cast<double>(n), expected_size / static_cast<double>(n)));
}

// Higher J first, then smaller subsets, then lexicographic axis ids.
inline bool better(double ja, const AxisSet& a, double jb, const AxisSet& b) {
  if (ja != jb) return ja > jb;
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

inline bool budget_exhausted(std::size_t evaluations, std::size_t max_evaluations) {
  return max_evaluations != 0 && evaluations >= max_evaluations;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Greedy and beam search.

template <SubsetObjective Objective>
SearchResult greedy_beam(Objective& objective, const BeamConfig& config, std::size_t max_evaluations = 0) {
  if (config.width == 0) throw Error(ErrorCode::kInvalidArgument, "beam width must be at least 1");
  const auto start = std::chrono::steady_clock::now();
  const std::size_t n = objective.axis_count();
  struct State {
    AxisSet axes;
    double j;
  };
  const AxisSet empty;
  std::vector<State> beam = {{empty, objective.evaluate_batch(std::span<const AxisSet>(&empty, 1)).front()}};
  State best = beam.front();
  SearchResult result;
  result.trace.push_back({0, best.j, best.axes});
  for (std::size_t step = 1; config.max_steps == 0 || step <= config.max_steps; ++step) {
    if (detail::budget_exhausted(objective.evaluations(), max_evaluations)) break;
    std::vector<AxisSet> proposals;
    std::vector<std::size_t> parent;
    std::unordered_map<AxisSet, bool, AxisSetHash> seen;
    for (std::size_t b = 0; b < beam.size(); ++b) {
      for (std::uint32_t a = 0; a < n; ++a) {
        if (std::binary_search(beam[b].axes.begin(), beam[b].axes.end(), a)) continue;
        AxisSet next = beam[b].axes;
        next.insert(std::upper_bound(next.begin(), next.end(), a), a);
        proposals.push_back(std::move(next));
        parent.push_back(b);
      }
    }
    const std::vector<double> values = objective.evaluate_batch(proposals);
    std::vector<State> grown;
    for (std::size_t i = 0; i < proposals.size(); ++i) {
      if (values[i] <= beam[parent[i]].j) continue;
      if (!seen.emplace(proposals[i], true).second) continue;
      grown.push_back({proposals[i], values[i]});
    }
    if (grown.empty()) break;
    std::sort(grown.begin(), grown.end(),
              [](const State& x, const State& y) { return detail::better(x.j, x.axes, y.j, y.axes); });
    if (grown.size() > config.width) grown.resize(config.width);
    beam = std::move(grown);
    if (detail::better(beam.front().j, beam.front().axes, best.j, best.axes)) best = beam.front();
    result.trace.push_back({step, best.j, best.axes});
    result.iterations = step;
  }
  result.subset = best.axes;
  result.j = best.j;
  result.evaluations = objective.evaluations();
  result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

// ---------------------------------------------------------------------------
// Cross-entropy method.

// Mean of the elite masks.
inline std::vector<double> cem_refit(std::span<const std::vector<std::uint8_t>> elites, std::size_t n) {
  std::vector<double> p(n, 0.0);
  if (elites.empty()) return p;
  for (const auto& mask : elites) {
    for (std::size_t i = 0; i < n; ++i) p[i] += mask[i];
  }
  for (double& v : p) v /= static_cast<double>(elites.size());
  return p;
}

inline bool cem_is_binary(const std::vector<double>& p, double tolerance) {
  return std::all_of(p.begin(), p.end(), [&](double v) { return v <= tolerance || v >= 1.0 - tolerance; });
}

template <SubsetObjective Objective>
SearchResult cem(Objective& objective, const CemConfig& config, std::uint64_t seed, std::size_t max_evaluations = 0) {
  if (config.elites == 0 || config.elites > config.samples) {
    throw Error(ErrorCode::kInvalidArgument, "CEM needs 0 < elites <= samples");
  }
  const auto start = std::chrono::steady_clock::now();
  const std::size_t n = objective.axis_count();
  const double p0 = detail::start_probability(config.p_start, config.expected_size, n);
  if (n > 0 && !(p0 > 0.0 && p0 < 1.0)) throw Error(ErrorCode::kInvalidArgument, "p_start must lie in (0, 1)");
  std::vector<double> p(n, p0);
  SearchResult result;
  AxisSet best_seen;
  double best_seen_j = objective.evaluate_batch(std::span<const AxisSet>(&best_seen, 1)).front();
  for (std::size_t iter = 0; iter < config.max_iterations; ++iter) {
    if (cem_is_binary(p, config.binary_tolerance)) break;
    if (detail::budget_exhausted(objective.evaluations(), max_evaluations)) break;
    std::vector<std::vector<std::uint8_t>> masks(config.samples, std::vector<std::uint8_t>(n, 0));
    std::vector<AxisSet> sets(config.samples);
    for (std::size_t s = 0; s < config.samples; ++s) {
      Rng rng(derive_seed(seed, {iter, s}));
      for (std::size_t i = 0; i < n; ++i) masks[s][i] = rng.bernoulli(p[i]) ? 1 : 0;
      sets[s] = mask_to_set(masks[s]);
    }
    const std::vector<double> values = objective.evaluate_batch(sets);
    std::vector<std::size_t> order(config.samples);
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
    std::vector<std::vector<std::uint8_t>> elites;
    for (std::size_t k = 0; k < config.elites; ++k) elites.push_back(masks[order[k]]);
    p = cem_refit(elites, n);
    if (detail::better(values[order[0]], sets[order[0]], best_seen_j, best_seen)) {
      best_seen = sets[order[0]];
      best_seen_j = values[order[0]];
    }
    result.iterations = iter + 1;
    result.trace.push_back({iter + 1, values[order[0]], sets[order[0]]});
  }
  std::vector<std::uint8_t> final_mask(n, 0);
  for (std::size_t i = 0; i < n; ++i) final_mask[i] = p[i] >= 0.5 ? 1 : 0;
  result.subset = mask_to_set(final_mask);
  result.j = objective.evaluate_batch(std::span<const AxisSet>(&result.subset, 1)).front();
  result.evaluations = objective.evaluations();
  result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

// ---------------------------------------------------------------------------
// Microbial genetic algorithm.

struct GaPopulation {
  std::vector<std::vector<std::uint8_t>> genes;
  std::vector<double> fitness;
};

// One tournament between individuals `a` and `b`; returns the loser index,
// whose genes were rewritten (its fitness is stale until re-evaluated).
inline std::size_t microbial_tournament(GaPopulation& pop, std::size_t a, std::size_t b, const GaConfig& config,
                                        Rng& rng) {
  const std::size_t winner = pop.fitness[a] >= pop.fitness[b] ? a : b;
  const std::size_t loser = winner == a ? b : a;
  auto& lg = pop.genes[loser];
  const auto& wg = pop.genes[winner];
  for (std::size_t i = 0; i < lg.size(); ++i) {
    if (rng.bernoulli(config.crossover)) lg[i] = wg[i];
  }
  if (!lg.empty() && rng.bernoulli(config.mutation)) {
    std::size_t gene = rng.below(lg.size());
    lg[gene] = lg[gene] ? 0 : 1;
  }
  return loser;
}

template <SubsetObjective Objective>
SearchResult ga(Objective& objective, const GaConfig& config, std::uint64_t seed, std::size_t max_evaluations = 0,
                GaPopulation* initial = nullptr) {
  if (config.population < 2) throw Error(ErrorCode::kInvalidArgument, "GA population must be at least 2");
  const auto start = std::chrono::steady_clock::now();
  const std::size_t n = objective.axis_count();
  Rng rng(derive_seed(seed, {0x6a}));
  GaPopulation pop;
  if (initial != nullptr) {
    pop.genes = initial->genes;
  } else {
    const double p0 = detail::start_probability(config.p_init, config.expected_size, n);
    pop.genes.assign(config.population, std::vector<std::uint8_t>(n, 0));
    for (auto& g : pop.genes) {
      for (auto& bit : g) bit = rng.bernoulli(p0) ? 1 : 0;
    }
  }
  std::vector<AxisSet> sets;
  for (const auto& g : pop.genes) sets.push_back(mask_to_set(g));
  pop.fitness = objective.evaluate_batch(sets);
  SearchResult result;
  std::size_t best = 0;
  for (std::size_t i = 1; i < pop.genes.size(); ++i) {
    if (detail::better(pop.fitness[i], sets[i], pop.fitness[best], sets[best])) best = i;
  }
  AxisSet best_set = sets[best];
  double best_j = pop.fitness[best];
  const std::size_t size = pop.genes.size();
  for (std::size_t gen = 0; gen < config.generations; ++gen) {
    if (detail::budget_exhausted(objective.evaluations(), max_evaluations)) break;
    for (std::size_t t = 0; t < size; ++t) {
      std::size_t a = rng.below(size);
      std::size_t b = rng.below(size - 1);
      if (b >= a) ++b;
      std::size_t loser = microbial_tournament(pop, a, b, config, rng);
      AxisSet s = mask_to_set(pop.genes[loser]);
      pop.fitness[loser] = objective.evaluate_batch(std::span<const AxisSet>(&s, 1)).front();
      if (detail::better(pop.fitness[loser], s, best_j, best_set)) {
        best_set = std::move(s);
        best_j = pop.fitness[loser];
      }
    }
    result.iterations = gen + 1;
    result.trace.push_back({gen + 1, best_j, best_set});
  }
  if (initial != nullptr) *initial = pop;
  result.subset = best_set;
  result.j = best_j;
  result.evaluations = objective.evaluations();
  result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

// ---------------------------------------------------------------------------
// Random baseline.

struct RandomBaseline {
  double mean_j = 0.0;
  double std_j = 0.0;
  double mean_accuracy = 0.0;
  double std_accuracy = 0.0;
  double mean_expected = 0.0;
  double std_expected = 0.0;
  std::vector<double> accuracies;  // S_oracle per trial
  std::vector<double> expected;    // expected_accuracy per trial
  std::vector<double> js;
  std::vector<AxisSet> subsets;
};

// Sample mean and standard deviation; exact zero spread for constant input.
inline std::pair<double, double> mean_std(const std::vector<double>& v) {
  if (v.empty()) return {0.0, 0.0};
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  if (std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); })) return {v.front(), 0.0};
  double sq = 0.0;
  for (double x : v) sq += (x - m) * (x - m);
  return {m, v.size() > 1 ? std::sqrt(sq / static_cast<double>(v.size() - 1)) : 0.0};
}

// Uniform k-subsets of the pool (without replacement), one stream per trial.
inline RandomBaseline random_baseline(PoolObjective& objective, std::size_t k, std::size_t trials, std::uint64_t seed) {
  const std::size_t n = objective.axis_count();
  if (k > n) throw Error(ErrorCode::kInvalidArgument, "k exceeds the pool size");
  std::vector<AxisSet> sets(trials);
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng(derive_seed(seed, {t}));
    std::vector<std::uint32_t> all(n);
    for (std::uint32_t i = 0; i < n; ++i) all[i] = i;
    // Partial Fisher-Yates.
    for (std::size_t i = 0; i < k; ++i) std::swap(all[i], all[i + rng.below(n - i)]);
    sets[t] = normalized(AxisSet(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k)));
  }
  const std::vector<double> js = objective.evaluate_batch(sets);
  RandomBaseline out;
  for (const auto& s : sets) {
    out.accuracies.push_back(objective.s_oracle(s).value());
    out.expected.push_back(objective.expected_accuracy(s));
  }
  std::tie(out.mean_j, out.std_j) = mean_std(js);
  out.js = js;
  out.subsets = std::move(sets);
  std::tie(out.mean_accuracy, out.std_accuracy) = mean_std(out.accuracies);
  std::tie(out.mean_expected, out.std_expected) = mean_std(out.expected);
  return out;
}

// Runs the configured method (random is not a search; use random_baseline).
inline SearchResult run_search(PoolObjective& objective, const SearchConfig& config) {
  switch (config.method) {
    case SearchMethod::kGreedy: {
      BeamConfig beam = config.beam;
      beam.width = 1;
      return greedy_beam(objective, beam, config.max_evaluations);
    }
    case SearchMethod::kBeam:
      return greedy_beam(objective, config.beam, config.max_evaluations);
    case SearchMethod::kCem:
      return cem(objective, config.cem, config.seed, config.max_evaluations);
    case SearchMethod::kGa:
      return ga(objective, config.ga, config.seed, config.max_evaluations);
    case SearchMethod::kRandom:
      break;
  }
  throw Error(ErrorCode::kInvalidArgument, "random is a baseline, not a search method");
}

// One lambda per row; each row aggregates one search per seed 0..seeds-1.
struct LambdaSweepRow {
  double lambda = 0.0;
  std::vector<double> accuracy;  // S_oracle of the final subset
  std::vector<double> axes;
  std::vector<double> iterations;
};


inline double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 == 1 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

inline std::vector<LambdaSweepRow> lambda_sweep(const CandidatePool& pool, const EvalSet& set,
                                                std::span<const double> lambdas, std::size_t seeds,
                                                SearchConfig config, unsigned workers = 0) {
  if (seeds == 0) throw Error(ErrorCode::kInvalidArgument, "lambda sweep needs at least one seed");
  std::vector<LambdaSweepRow> rows;
  for (double lambda : lambdas) {
    if (!(lambda >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "lambda must be >= 0");
    LambdaSweepRow row;
    row.lambda = lambda;
    for (std::size_t s = 0; s < seeds; ++s) {
      PoolObjective objective(pool, set, {lambda}, workers);
      config.lambda = lambda;
      config.seed = s;
      const SearchResult r = run_search(objective, config);
      row.accuracy.push_back(objective.s_oracle(r.subset).value());
      row.axes.push_back(static_cast<double>(r.subset.size()));
      row.iterations.push_back(static_cast<double>(r.iterations));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

inline void write_lambda_sweep(std::ostream& out, std::span<const LambdaSweepRow> rows) {
  out << "lambda\taccuracy_mean\taccuracy_std\taxes_mean\taxes_std\titerations_mean\titerations_std\n";
  for (const auto& row : rows) {
    out << format_double(row.lambda);
    for (const auto* v : {&row.accuracy, &row.axes, &row.iterations}) {
      const auto [m, sd] = mean_std(*v);
      out << '\t' << format_double(m) << '\t' << format_double(sd);
    }
    out << '\n';
  }
}

// Trace TSV: step, J, S_oracle, learnability, axes (comma-separated pool positions).
inline void write_trace(std::ostream& out, const SearchResult& result, const PoolObjective& objective) {
  out << "step\tJ\tS_oracle\tlearnability\taxes\n";
  for (const auto& row : result.trace) {
    std::string axes;
    for (std::size_t i = 0; i < row.best.size(); ++i) {
      if (i > 0) axes.push_back(',');
      axes += std::to_string(row.best[i]);
    }
    out << row.step << '\t' << format_double(row.j) << '\t' << format_double(objective.s_oracle(row.best).value())
        << '\t' << format_double(objective.learnability(row.best)) << '\t' << axes << '\n';
  }
}

}  // namespace typelink

#endif  // TYPELINK_SEARCH_HPP_
