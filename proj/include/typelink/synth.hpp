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

// Seeded synthetic worlds: a graph, link statistics and an annotated corpus
// built around K latent binary axes.
//
// Graph layout, for latent axis k:
//   Class_k            members reach it by instance_of, directly or through
//   Sub_k_j            one of its subclass_of children
//   Category_k         noisy wikipedia_category copy of the axis
// plus small random decoy classes with no textual signal.
//
// Every surface form has 1..max_candidates candidate entities with
// Zipf-shaped link counts. For a `disambiguation_fraction` of forms the
// candidates carry pairwise distinct latent vectors, so the latent system
// alone separates them; the remaining forms draw candidates that all share one
// latent vector. Some forms are anaphoric: the generic Class_k is the most
// linked candidate next to a few of its members.
//
// Around each mention the generator emits trigger words reflecting the gold
// entity's latent (and subclass) membership, which makes the latent axes
// learnable from context.

#ifndef TYPELINK_SYNTH_HPP_
#define TYPELINK_SYNTH_HPP_

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "typelink/base.hpp"
#include "typelink/corpus.hpp"
#include "typelink/kg.hpp"
#include "typelink/typesys.hpp"

namespace typelink {

struct SynthConfig {
  std::size_t entities = 400;  // instance entities (classes come on top)
  std::size_t latent_axes = 6;
  std::size_t subclasses_per_axis = 2;
  double member_probability = 0.4;
  double category_recall = 0.7;
  double category_noise = 0.1;
  std::size_t decoy_classes = 40;
  double decoy_min_fraction = 0.01;
  double decoy_max_fraction = 0.05;

  std::size_t surface_forms = 200;
  std::size_t max_candidates = 4;
  double disambiguation_fraction = 0.8;
  double anaphora_fraction = 0.05;
  double multiword_fraction = 0.2;
  double zipf_exponent = 1.0;
  double link_scale = 60.0;

  std::size_t documents = 250;
  std::size_t mentions_per_document = 4;
  std::size_t filler_vocabulary = 300;
  std::size_t filler_min = 3;
  std::size_t filler_max = 8;
  double capitalized_filler = 0.1;
  std::size_t trigger_synonyms = 3;
  double trigger_probability = 0.8;           // per axis the gold entity belongs to
  double negative_trigger_probability = 0.8;  // per axis it does not belong to
  double subclass_trigger_probability = 0.5;
  double trigger_noise = 0.05;
};

// ~500 entities and ~1000 mentions.
inline SynthConfig standard_world_config() { return {}; }

// Many sparse latent classes: separating candidates takes dozens of axes,
// and the relation pool holds several hundred.
inline SynthConfig large_pool_world_config() {
  SynthConfig c;
  c.entities = 1500;
  c.latent_axes = 100;
  c.subclasses_per_axis = 2;
  c.member_probability = 0.04;
  c.decoy_classes = 150;
  c.decoy_min_fraction = 0.02;
  c.decoy_max_fraction = 0.08;
  c.surface_forms = 500;
  c.max_candidates = 8;
  c.trigger_probability = 0.9;
  c.negative_trigger_probability = 0.0;
  return c;
}

struct SyntheticWorld {
  KnowledgeGraph graph;
  LinkStats stats;
  AnnotatedCorpus corpus;
  TypeSystem latent_system;
  std::vector<EntityId> latent_classes;
};

inline void validate_synth_config(const SynthConfig& c) {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw Error(ErrorCode::kInvalidArgument, "inconsistent synthetic config: " + what);
  };
  require(c.entities >= 1 && c.surface_forms >= 1 && c.documents >= 1 && c.mentions_per_document >= 1,
          "sizes must be at least 1");
  require(c.max_candidates >= 1, "max_candidates must be at least 1");
  require(c.latent_axes <= c.entities, "more latent axes than entities");
  require(c.filler_vocabulary >= 1 && c.filler_min <= c.filler_max, "bad filler settings");
  require(c.trigger_synonyms >= 1, "trigger_synonyms must be at least 1");
  for (double p : {c.member_probability, c.category_recall, c.category_noise, c.disambiguation_fraction,
                   c.anaphora_fraction, c.multiword_fraction, c.capitalized_filler, c.trigger_probability, c.negative_trigger_probability,
                   c.subclass_trigger_probability, c.trigger_noise, c.decoy_min_fraction, c.decoy_max_fraction}) {
    require(p >= 0.0 && p <= 1.0, "probabilities must lie in [0, 1]");
  }
  require(c.decoy_min_fraction <= c.decoy_max_fraction, "decoy fraction range is empty");
}

inline SyntheticWorld generate_synthetic_world(std::uint64_t seed, const SynthConfig& config = {}) {
  validate_synth_config(config);
  Rng rng(derive_seed(seed, {0x5e7}));
  SyntheticWorld world;
  KnowledgeGraph& g = world.graph;
  std::uint64_t next_id = 1;
  auto declare = [&](const std::string& label) {
    EntityId id = entity(next_id++);
    g.add_entity(id, label);
    return id;
  };

  const std::size_t K = config.latent_axes;
  std::vector<EntityId> classes, categories;
  std::vector<std::vector<EntityId>> subclasses(K);
  for (std::size_t k = 0; k < K; ++k) {
    classes.push_back(declare("Class_" + std::to_string(k)));
    for (std::size_t j = 0; j < config.subclasses_per_axis; ++j) {
      subclasses[k].push_back(declare("Sub_" + std::to_string(k) + "_" + std::to_string(j)));
      g.add_edge(subclasses[k].back(), edge_kinds::kSubclassOf, classes[k]);
    }
    categories.push_back(declare("Category_" + std::to_string(k)));
  }
  std::vector<EntityId> decoys;
  std::vector<double> decoy_fraction;
  for (std::size_t d = 0; d < config.decoy_classes; ++d) {
    decoys.push_back(declare("Decoy_" + std::to_string(d)));
    decoy_fraction.push_back(rng.uniform(config.decoy_min_fraction, config.decoy_max_fraction));
  }

  // Instance entities with latent vectors and subclass picks.
  const std::size_t n = config.entities;
  std::vector<EntityId> instances;
  std::vector<std::vector<std::uint8_t>> latent(n, std::vector<std::uint8_t>(K, 0));
  std::vector<std::vector<int>> sub_of(n, std::vector<int>(K, -1));  // -1: attached to the class itself
  for (std::size_t i = 0; i < n; ++i) {
    EntityId e = declare("Entity_" + std::to_string(i));
    instances.push_back(e);
    for (std::size_t k = 0; k < K; ++k) {
      const bool member = rng.bernoulli(config.member_probability);
      if (member) {
        latent[i][k] = 1;
        const std::size_t pick = rng.below(config.subclasses_per_axis + 1);
        if (pick == 0) {
          g.add_edge(e, edge_kinds::kInstanceOf, classes[k]);
        } else {
          sub_of[i][k] = static_cast<int>(pick - 1);
          g.add_edge(e, edge_kinds::kInstanceOf, subclasses[k][pick - 1]);
        }
      }
      if (rng.bernoulli(member ? config.category_recall : config.category_noise)) {
        g.add_edge(e, edge_kinds::kWikipediaCategory, categories[k]);
      }
    }
    for (std::size_t d = 0; d < decoys.size(); ++d) {
      if (rng.bernoulli(decoy_fraction[d])) g.add_edge(e, edge_kinds::kInstanceOf, decoys[d]);
    }
  }
  std::map<std::vector<std::uint8_t>, std::vector<std::size_t>> by_vector;
  for (std::size_t i = 0; i < n; ++i) by_vector[latent[i]].push_back(i);

  // Surface forms and their link counts.
  struct Form {
    std::vector<std::string> tokens;
    std::vector<EntityId> entities;
    std::vector<std::uint64_t> counts;
  };
  std::vector<Form> forms;
  auto pick_distinct = [&](std::size_t want, bool need_bit, std::size_t bit) {
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    rng.shuffle(order);
    std::vector<std::size_t> picked;
    std::vector<const std::vector<std::uint8_t>*> used;
    for (std::size_t i : order) {
      if (picked.size() >= want) break;
      if (need_bit && !latent[i][bit]) continue;
      if (std::any_of(used.begin(), used.end(), [&](const auto* v) { return *v == latent[i]; })) continue;
      used.push_back(&latent[i]);
      picked.push_back(i);
    }
    return picked;
  };
  for (std::size_t f = 0; f < config.surface_forms; ++f) {
    Form form;
    const std::string base = "W" + std::to_string(f);
    form.tokens.push_back(base);
    if (rng.bernoulli(config.multiword_fraction)) form.tokens.push_back("V" + std::to_string(f));
    const std::size_t want = 1 + rng.below(config.max_candidates);
    const bool disambiguating = rng.bernoulli(config.disambiguation_fraction);
    const bool anaphoric = K > 0 && want >= 2 && rng.bernoulli(config.anaphora_fraction);
    std::vector<std::size_t> picked;
    if (anaphoric) {
      const std::size_t k = rng.below(K);
      if (disambiguating) {
        picked = pick_distinct(want - 1, true, k);
      } else {
        for (std::size_t i = 0; i < n && picked.size() < want - 1; ++i) {
          if (latent[i][k]) picked.push_back(i);
        }
      }
      form.entities.push_back(classes[k]);
      form.counts.push_back(static_cast<std::uint64_t>(std::llround(config.link_scale * 2.0)));
      for (std::size_t r = 0; r < picked.size(); ++r) {
        form.entities.push_back(instances[picked[r]]);
        const double c = config.link_scale / 3.0 / std::pow(static_cast<double>(r + 1), config.zipf_exponent);
        form.counts.push_back(std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::llround(c * rng.uniform(0.7, 1.3)))));
      }
    } else {
      if (disambiguating || want == 1) {
        picked = pick_distinct(want, false, 0);
      } else {
        const std::size_t anchor = rng.below(n);
        std::vector<std::size_t> bucket = by_vector[latent[anchor]];
        rng.shuffle(bucket);
        picked.assign(bucket.begin(), bucket.begin() + static_cast<std::ptrdiff_t>(std::min(want, bucket.size())));
      }
      for (std::size_t r = 0; r < picked.size(); ++r) {
        form.entities.push_back(instances[picked[r]]);
        const double c = config.link_scale / std::pow(static_cast<double>(r + 1), config.zipf_exponent);
        form.counts.push_back(std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::llround(c * rng.uniform(0.7, 1.3)))));
      }
    }
    std::string mention = join(form.tokens, " ");
    for (std::size_t c = 0; c < form.entities.size(); ++c) world.stats.add(mention, form.entities[c], form.counts[c]);
    forms.push_back(std::move(form));
  }

  // Documents.
  std::map<std::uint64_t, std::size_t> instance_pos;
  for (std::size_t i = 0; i < n; ++i) instance_pos[raw(instances[i])] = i;
  auto filler = [&](std::vector<std::string>& tokens) {
    const std::size_t len = config.filler_min + rng.below(config.filler_max - config.filler_min + 1);
    for (std::size_t t = 0; t < len; ++t) {
      std::string w = "f" + std::to_string(rng.below(config.filler_vocabulary));
      if (rng.bernoulli(config.capitalized_filler)) w[0] = 'F';
      tokens.push_back(std::move(w));
    }
  };
  for (std::size_t d = 0; d < config.documents; ++d) {
    Document doc;
    doc.doc_id = "doc" + std::to_string(d);
    doc.lang = "en";
    filler(doc.tokens);
    for (std::size_t m = 0; m < config.mentions_per_document; ++m) {
      const Form& form = forms[rng.below(forms.size())];
      std::uint64_t total = 0;
      for (auto c : form.counts) total += c;
      std::uint64_t draw = rng.below(total);
      std::size_t gold = 0;
      while (draw >= form.counts[gold]) draw -= form.counts[gold++];
      const EntityId gold_id = form.entities[gold];

      std::vector<std::string> triggers;
      auto it = instance_pos.find(raw(gold_id));
      for (std::size_t k = 0; k < K; ++k) {
        bool member = it != instance_pos.end() && latent[it->second][k];
        if (!rng.bernoulli(member ? config.trigger_probability : config.negative_trigger_probability)) continue;
        if (rng.bernoulli(config.trigger_noise)) member = !member;
        triggers.push_back("t" + std::to_string(k) + (member ? "p" : "n") +
                           std::to_string(rng.below(config.trigger_synonyms)));
        if (it != instance_pos.end() && sub_of[it->second][k] >= 0 &&
            rng.bernoulli(config.subclass_trigger_probability)) {
          triggers.push_back("s" + std::to_string(k) + "_" + std::to_string(sub_of[it->second][k]));
        }
      }
      rng.shuffle(triggers);
      const std::size_t left = triggers.size() / 2;
      for (std::size_t t = 0; t < left; ++t) doc.tokens.push_back(triggers[t]);
      Mention mention;
      mention.start = doc.tokens.size();
      for (const auto& tok : form.tokens) doc.tokens.push_back(tok);
      mention.end = doc.tokens.size();
      mention.gold = gold_id;
      doc.mentions.push_back(mention);
      for (std::size_t t = left; t < triggers.size(); ++t) doc.tokens.push_back(triggers[t]);
      filler(doc.tokens);
    }
    world.corpus.documents.push_back(std::move(doc));
  }

  for (std::size_t k = 0; k < K; ++k) {
    world.latent_system.axes.push_back(discovered_axis(g, make_relation(classes[k], edge_kinds::kInstanceOf)));
  }
  world.latent_classes = classes;
  return world;
}

}  // namespace typelink

#endif  // TYPELINK_SYNTH_HPP_
