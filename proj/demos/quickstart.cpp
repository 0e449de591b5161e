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

// Synthetic world -> learnability pool -> greedy search -> oracle accuracy.

#include <iostream>

#include "typelink/typelink.hpp"

int main() {
  using namespace typelink;
  const SyntheticWorld world = generate_synthetic_world(1, standard_world_config());
  std::cout << world.graph.entity_count() << " entities, " << world.corpus.mention_count() << " mentions\n";

  MembershipCache cache(world.graph);
  const EvalSet set = EvalSet::build(world.corpus, world.stats, world.graph);

  LearnabilityConfig lc;
  lc.workers = 0;
  const auto score = learnability(enumerate_relations(world.graph), world.corpus, cache, lc, 1);
  const CandidatePool pool = build_pool(score.axes, cache);
  std::cout << "pool: " << pool.size() << " learnable relations of " << score.axes.size() << "\n";

  PoolObjective objective(pool, set, {0.00007});
  const SearchResult found = greedy_beam(objective, BeamConfig{1, 0}, 0);
  const TypeSystem system = pool_system(pool, found.subset, world.graph);

  std::cout << "S_greedy " << s_greedy(set).value() << "\n"
            << "S_oracle " << objective.s_oracle(found.subset).value() << " with " << system.axes.size()
            << " axes, J " << found.j << " after " << found.evaluations << " evaluations\n";
  for (const auto& axis : system.axes) std::cout << "  " << axis.name << "\n";
}
