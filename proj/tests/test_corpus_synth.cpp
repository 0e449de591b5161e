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

#include <sstream>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "worlds.hpp"

namespace {

using namespace typelink;

TEST(Corpus, JsonlRoundTrip) {
  AnnotatedCorpus c;
  c.documents.push_back(worlds::make_doc("d1", {"the", "jaguar", "ran"}, {worlds::mention(1, 2, 3)}));
  auto m = worlds::mention(0, 1, 4);
  m.candidates = std::vector<EntityId>{entity(4), entity(3)};
  c.documents.push_back(worlds::make_doc("d2", {"Jaguar", "Cars"}, {m}));
  std::ostringstream out;
  write_corpus(out, c);
  std::istringstream in(out.str());
  EXPECT_EQ(read_corpus(in, "corpus.jsonl"), c);
}

TEST(Corpus, RejectsBadSpans) {
  auto overlap = worlds::make_doc("d", {"a", "b", "c"}, {worlds::mention(0, 2, 1), worlds::mention(1, 3, 2)});
  EXPECT_THROW(validate_document(overlap, "d"), Error);
  auto outside = worlds::make_doc("d", {"a"}, {worlds::mention(0, 2, 1)});
  EXPECT_THROW(validate_document(outside, "d"), Error);
  auto empty = worlds::make_doc("d", {"a"}, {worlds::mention(1, 1, 1)});
  EXPECT_THROW(validate_document(empty, "d"), Error);
}

TEST(Corpus, ParseErrorCarriesLine) {
  std::istringstream in("{\"doc_id\":\"a\",\"tokens\":[],\"mentions\":[]}\nnot json\n");
  try {
    read_corpus(in, "c.jsonl");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParse);
    EXPECT_NE(e.path().find("c.jsonl:2"), std::string::npos);
  }
}

TEST(Corpus, SurfaceJoinsTokens) {
  auto d = worlds::make_doc("d", {"San", "Francisco", "bay"}, {worlds::mention(0, 2, 3)});
  EXPECT_EQ(surface(d, d.mentions[0]), "San Francisco");
}

TEST(Corpus, SplitIsDeterministicAndPartitions) {
  auto w = generate_synthetic_world(2, worlds::small_world_config());
  auto a = split_corpus(w.corpus, 0.6, 0.2, 9);
  auto b = split_corpus(w.corpus, 0.6, 0.2, 9);
  EXPECT_EQ(a.train, b.train);
  EXPECT_EQ(a.test, b.test);
  EXPECT_EQ(a.train.documents.size() + a.validation.documents.size() + a.test.documents.size(),
            w.corpus.documents.size());
  EXPECT_EQ(a.train.documents.size(), 36u);
  EXPECT_EQ(a.validation.documents.size(), 12u);
}

TEST(Vocabulary, ReservedTokens) {
  Vocabulary v;
  EXPECT_EQ(v.lookup(std::string(Vocabulary::kPadToken)), Vocabulary::kPad);
  EXPECT_EQ(v.lookup("never-seen"), Vocabulary::kUnk);
  EXPECT_EQ(v.add("x"), 2u);
  EXPECT_EQ(v.add("x"), 2u);
}

TEST(Synth, SameSeedSameWorld) {
  auto a = generate_synthetic_world(4, worlds::small_world_config());
  auto b = generate_synthetic_world(4, worlds::small_world_config());
  EXPECT_TRUE(a.graph == b.graph);
  EXPECT_TRUE(a.stats == b.stats);
  EXPECT_EQ(a.corpus, b.corpus);
  EXPECT_EQ(a.latent_system, b.latent_system);
  auto c = generate_synthetic_world(5, worlds::small_world_config());
  EXPECT_FALSE(a.corpus == c.corpus);
}

TEST(Synth, StandardWorldSize) {
  auto w = generate_synthetic_world(1, standard_world_config());
  EXPECT_GE(w.graph.entity_count(), 400u);
  EXPECT_LE(w.graph.entity_count(), 600u);
  EXPECT_EQ(w.corpus.mention_count(), 1000u);
  for (const auto& doc : w.corpus.documents) validate_document(doc, doc.doc_id);
}

TEST(Synth, FullDisambiguationGivesPerfectOracle) {
  auto cfg = standard_world_config();
  cfg.disambiguation_fraction = 1.0;
  for (std::uint64_t seed : {1, 2, 3}) {
    auto w = generate_synthetic_world(seed, cfg);
    EXPECT_EQ(oracle_accuracy(w.corpus, w.graph, w.latent_system, w.stats).value(), 1.0);
  }
}

TEST(Synth, SingleCandidateWorldIsTrivial) {
  auto cfg = standard_world_config();
  cfg.disambiguation_fraction = 0.0;
  cfg.max_candidates = 1;
  auto w = generate_synthetic_world(1, cfg);
  EXPECT_EQ(s_greedy(EvalSet::build(w.corpus, w.stats, w.graph)).value(), 1.0);
}

TEST(Synth, InvalidConfigRejected) {
  auto cfg = standard_world_config();
  cfg.member_probability = 1.5;
  EXPECT_THROW(generate_synthetic_world(1, cfg), Error);
  cfg = standard_world_config();
  cfg.latent_axes = cfg.entities + 1;
  EXPECT_THROW(generate_synthetic_world(1, cfg), Error);
}

}  // namespace
