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

// Interactive rule design without HTTP: open a session, try an axis,
// commit it, look at the remaining errors.

#include <iostream>

#include "typelink/typelink.hpp"

int main() {
  using namespace typelink;
  const SyntheticWorld w = generate_synthetic_world(3, standard_world_config());
  DesignService service{DesignService::Options{0.001, false}};
  const std::string id = service.open(make_world(w.graph, w.stats, w.corpus), TypeSystem{}, 0.001).body["id"];

  const auto baseline = service.evaluate(id).body;
  std::cout << "no rules: S_greedy " << baseline["s_greedy"] << ", S_oracle " << baseline["s_oracle"] << "\n";

  const auto candidates = service.relations(id, "Class", 3).body;
  std::cout << "relations matching 'Class': " << candidates["matched"] << "\n";
  for (const auto& r : candidates["relations"]) {
    const auto delta = service.whatif(id, {{"root", r["root"]}, {"edge", r["edge"]}}).body;
    std::cout << "  what if " << r["label"] << " (" << delta["members"] << " members): dS " << delta["delta_s_oracle"]
              << ", dJ " << delta["delta_j"] << "\n";
  }

  TypeSystem one;
  one.axes = {w.latent_system.axes.front()};
  const auto after = service.put_rules(id, serialize_system(one)).body;
  std::cout << "with " << one.axes.front().name << ": S_oracle " << after["s_oracle"] << ", J " << after["j"]
            << ", version " << after["version"] << "\n";

  const auto errors = service.errors(id, "", 0).body;
  std::cout << errors["total"] << " error groups remain\n";
  for (std::size_t i = 0; i < errors["rows"].size() && i < 5; ++i) {
    const auto& row = errors["rows"][i];
    std::cout << "  " << row["gold_type"].dump() << ": " << row["errors"] << "/" << row["mentions"] << " wrong\n";
  }
}
