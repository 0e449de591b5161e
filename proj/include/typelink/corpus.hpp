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

// Tokenized documents with gold mention annotations (corpus.jsonl), and the
// token vocabulary shared by the classifiers.
//
// One document per line:
//   {"doc_id": "d1", "lang": "en", "tokens": ["..."],
//    "mentions": [{"start": 3, "end": 5, "gold": 17, "candidates": [17, 4]}]}
// `candidates` is optional; when absent the candidate set comes from the link
// statistics entry of the mention's surface string (tokens joined by ' ').

#ifndef TYPELINK_CORPUS_HPP_
#define TYPELINK_CORPUS_HPP_

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "typelink/base.hpp"

namespace typelink {

struct Mention {
  std::size_t start = 0;
  std::size_t end = 0;
  EntityId gold{};
  std::optional<std::vector<EntityId>> candidates;

  friend bool operator==(const Mention&, const Mention&) = default;
};

struct Document {
  std::string doc_id;
  std::string lang = "en";
  std::vector<std::string> tokens;
  std::vector<Mention> mentions;

  friend bool operator==(const Document&, const Document&) = default;
};

struct AnnotatedCorpus {
  std::vector<Document> documents;

  std::size_t mention_count() const {
    std::size_t n = 0;
    for (const auto& d : documents) n += d.mentions.size();
    return n;
  }

  friend bool operator==(const AnnotatedCorpus&, const AnnotatedCorpus&) = default;
};

inline std::string surface(const Document& doc, const Mention& m) {
  std::string out;
  for (std::size_t i = m.start; i < m.end; ++i) {
    if (i > m.start) out.push_back(' ');
    out.append(doc.tokens[i]);
  }
  return out;
}

// Spans in bounds, non-empty and non-overlapping.
inline void validate_document(const Document& doc, const std::string& path) {
  std::vector<std::pair<std::size_t, std::size_t>> spans;
  for (std::size_t i = 0; i < doc.mentions.size(); ++i) {
    const Mention& m = doc.mentions[i];
    const std::string mpath = path + ".mentions[" + std::to_string(i) + "]";
    if (m.end <= m.start) throw Error(ErrorCode::kInvalidArgument, "mention end must exceed start", mpath);
    if (m.end > doc.tokens.size()) throw Error(ErrorCode::kInvalidArgument, "mention span out of bounds", mpath);
    spans.emplace_back(m.start, m.end);
  }
  std::sort(spans.begin(), spans.end());
  for (std::size_t i = 1; i < spans.size(); ++i) {
    if (spans[i].first < spans[i - 1].second) {
      throw Error(ErrorCode::kInvalidArgument, "overlapping mentions", path);
    }
  }
}

inline nlohmann::json document_to_json(const Document& doc) {
  nlohmann::json mentions = nlohmann::json::array();
  for (const auto& m : doc.mentions) {
    nlohmann::json jm = {{"start", m.start}, {"end", m.end}, {"gold", raw(m.gold)}};
    if (m.candidates) {
      nlohmann::json c = nlohmann::json::array();
      for (EntityId e : *m.candidates) c.push_back(raw(e));
      jm["candidates"] = std::move(c);
    }
    mentions.push_back(std::move(jm));
  }
  return {{"doc_id", doc.doc_id}, {"lang", doc.lang}, {"tokens", doc.tokens}, {"mentions", std::move(mentions)}};
}

inline Document document_from_json(const nlohmann::json& j, const std::string& path) {
  if (!j.is_object()) throw Error(ErrorCode::kParse, "expected a JSON object", path);
  Document doc;
  try {
    doc.doc_id = j.at("doc_id").get<std::string>();
    if (j.contains("lang")) doc.lang = j.at("lang").get<std::string>();
    doc.tokens = j.at("tokens").get<std::vector<std::string>>();
    for (const auto& jm : j.at("mentions")) {
      Mention m;
      m.start = jm.at("start").get<std::size_t>();
      m.end = jm.at("end").get<std::size_t>();
      m.gold = entity(jm.at("gold").get<std::uint64_t>());
      if (jm.contains("candidates")) {
        std::vector<EntityId> c;
        for (const auto& id : jm.at("candidates")) c.push_back(entity(id.get<std::uint64_t>()));
        m.candidates = std::move(c);
      }
      doc.mentions.push_back(std::move(m));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, e.what(), path);
  }
  validate_document(doc, path);
  return doc;
}

inline AnnotatedCorpus read_corpus(std::istream& in, const std::string& name) {
  AnnotatedCorpus corpus;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string path = name + ":" + std::to_string(lineno);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorCode::kParse, e.what(), path);
    }
    corpus.documents.push_back(document_from_json(j, path));
  }
  return corpus;
}

inline AnnotatedCorpus load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open file", path.string());
  return read_corpus(in, path.string());
}

inline void write_corpus(std::ostream& out, const AnnotatedCorpus& corpus) {
  for (const auto& doc : corpus.documents) out << document_to_json(doc).dump() << '\n';
}

inline void save_corpus(const AnnotatedCorpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write file", path.string());
  write_corpus(out, corpus);
}

struct CorpusSplit {
  AnnotatedCorpus train;
  AnnotatedCorpus validation;
  AnnotatedCorpus test;
};

// Document-level split after a seeded shuffle; each part keeps corpus order.
inline CorpusSplit split_corpus(const AnnotatedCorpus& corpus, double train_fraction, double validation_fraction,
                                std::uint64_t seed) {
  std::vector<std::size_t> order(corpus.documents.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(derive_seed(seed, {0x5b1u}));
  rng.shuffle(order);
  const std::size_t n = order.size();
  const auto n_train = static_cast<std::size_t>(train_fraction * static_cast<double>(n));
  const auto n_valid = static_cast<std::size_t>(validation_fraction * static_cast<double>(n));
  std::vector<int> part(n, 2);
  for (std::size_t i = 0; i < n; ++i) {
    if (i < n_train) {
      part[order[i]] = 0;
    } else if (i < n_train + n_valid) {
      part[order[i]] = 1;
    }
  }
  CorpusSplit split;
  for (std::size_t d = 0; d < n; ++d) {
    auto& target = part[d] == 0 ? split.train : part[d] == 1 ? split.validation : split.test;
    target.documents.push_back(corpus.documents[d]);
  }
  return split;
}

// Token vocabulary with reserved padding and unknown-word ids.
class Vocabulary {
 public:
  static constexpr std::uint32_t kPad = 0;
  static constexpr std::uint32_t kUnk = 1;
  static constexpr std::string_view kPadToken = "<PAD>";
  static constexpr std::string_view kUnkToken = "<UNK>";

  Vocabulary() {
    add(std::string(kPadToken));
    add(std::string(kUnkToken));
  }

  static Vocabulary from_corpus(const AnnotatedCorpus& corpus) {
    Vocabulary v;
    for (const auto& doc : corpus.documents) {
      for (const auto& t : doc.tokens) v.add(t);
    }
    return v;
  }

  std::uint32_t add(const std::string& token) {
    auto [it, inserted] = ids_.emplace(token, static_cast<std::uint32_t>(tokens_.size()));
    if (inserted) tokens_.push_back(token);
    return it->second;
  }

  std::uint32_t lookup(const std::string& token) const {
    auto it = ids_.find(token);
    return it == ids_.end() ? kUnk : it->second;
  }

  std::size_t size() const { return tokens_.size(); }
  const std::vector<std::string>& tokens() const { return tokens_; }

 private:
  std::unordered_map<std::string, std::uint32_t> ids_;
  std::vector<std::string> tokens_;
};

}  // namespace typelink

#endif  // TYPELINK_CORPUS_HPP_
