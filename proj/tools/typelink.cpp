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

// typelink command line.

#include <atomic>
#include <chrono>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "typelink/http.hpp"
#include "typelink/typelink.hpp"

namespace fs = std::filesystem;
using namespace typelink;

namespace {

std::ofstream open_out(const std::string& path) {
  if (fs::path(path).has_parent_path()) fs::create_directories(fs::path(path).parent_path());
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write file", path);
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot read file", path);
  return in;
}

std::vector<double> parse_list(const std::string& text, const std::string& flag) {
  std::vector<double> out;
  for (auto part : split(text, ',')) {
    double v = 0.0;
    if (!parse_number(part, v)) throw Error(ErrorCode::kInvalidArgument, "bad number '" + std::string(part) + "'", flag);
    out.push_back(v);
  }
  return out;
}

struct WorldFlags {
  std::string graph, links, corpus;
};

struct PoolFlags {
  std::string pool;
  std::size_t max_axes = 0;
  bool keep_unlearnable = false;
};

CandidatePool load_pool(const PoolFlags& flags, const MembershipCache& cache) {
  auto in = open_in(flags.pool);
  auto scored = read_learnability_tsv(in, flags.pool);
  for (const auto& a : scored) cache.graph().index_of(a.relation.root);
  return build_pool(scored, cache, !flags.keep_unlearnable, flags.max_axes);
}

std::atomic<bool> g_stop{false};
extern "C" void on_signal(int) { g_stop = true; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Type system discovery and typed entity linking"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  unsigned workers = 0;
  app.add_option("--workers", workers, "worker threads (0 = hardware concurrency)");

  // ingest
  auto* ingest = app.add_subcommand("ingest", "validate TSV inputs and write a normalized world");
  std::string in_entities, in_edges, in_links, ingest_out;
  ingest->add_option("--entities", in_entities, "entities.tsv")->required();
  ingest->add_option("--edges", in_edges, "edges.tsv")->required();
  ingest->add_option("--links", in_links, "links.tsv")->required();
  ingest->add_option("--out", ingest_out, "output directory")->required();

  // synth
  auto* synth = app.add_subcommand("synth", "generate a seeded synthetic world");
  std::uint64_t synth_seed = 1;
  std::string synth_preset = "standard", synth_out;
  double synth_disambiguation = -1.0;
  synth->add_option("--seed", synth_seed);
  synth->add_option("--preset", synth_preset)->check(CLI::IsMember({"standard", "large"}));
  synth->add_option("--disambiguation", synth_disambiguation, "fraction of fully disambiguating surface forms");
  synth->add_option("--out", synth_out, "output directory")->required();

  // simplify
  auto* simp = app.add_subcommand("simplify", "fold anaphoric links into generic parents");
  WorldFlags simp_w;
  std::string simp_out, simp_report, simp_corpus_out;
  simp->add_option("--graph", simp_w.graph)->required();
  simp->add_option("--links", simp_w.links)->required();
  simp->add_option("--out", simp_out, "simplified links.tsv")->required();
  simp->add_option("--report", simp_report, "per-iteration TSV report");
  simp->add_option("--corpus", simp_w.corpus, "corpus whose gold links are rewritten");
  simp->add_option("--corpus-out", simp_corpus_out);

  // learnability
  auto* learn = app.add_subcommand("learnability", "score relations by window-classifier AUC");
  WorldFlags learn_w;
  std::string learn_axes, learn_out;
  std::uint64_t learn_seed = 0;
  LearnabilityConfig learn_cfg;
  PoolOptions learn_pool;
  bool learn_in_sample = false;
  learn->add_option("--corpus", learn_w.corpus)->required();
  learn->add_option("--graph", learn_w.graph)->required();
  learn->add_option("--axes", learn_axes, "type system JSON whose discovered axes are scored (default: all relations)");
  learn->add_option("--out", learn_out, "report.tsv")->required();
  learn->add_option("--seed", learn_seed);
  learn->add_option("--runs", learn_cfg.runs);
  learn->add_option("--lr", learn_cfg.classifier.learning_rate);
  learn->add_option("--max-roots", learn_pool.max_roots);
  learn->add_flag("--in-sample", learn_in_sample, "score AUC on the training windows");

  // search
  auto* search = app.add_subcommand("search", "discrete search for a type system");
  WorldFlags search_w;
  PoolFlags search_pool;
  SearchConfig search_cfg;
  std::string search_method = "greedy", search_out, search_trace;
  search->add_option("--method", search_method)->check(CLI::IsMember({"greedy", "beam", "cem", "ga", "random"}));
  search->add_option("--pool", search_pool.pool, "learnability report TSV")->required();
  search->add_option("--graph", search_w.graph)->required();
  search->add_option("--corpus", search_w.corpus)->required();
  search->add_option("--links", search_w.links)->required();
  search->add_option("--lambda", search_cfg.lambda);
  search->add_option("--seed", search_cfg.seed);
  search->add_option("--out", search_out, "system.json")->required();
  search->add_option("--trace", search_trace, "trace.tsv");
  search->add_option("--beam-width", search_cfg.beam.width);
  search->add_option("--cem-samples", search_cfg.cem.samples);
  search->add_option("--cem-elites", search_cfg.cem.elites);
  search->add_option("--ga-population", search_cfg.ga.population);
  search->add_option("--ga-generations", search_cfg.ga.generations);
  search->add_option("--max-evals", search_cfg.max_evaluations);
  search->add_option("--random-k", search_cfg.random_k);
  search->add_option("--random-trials", search_cfg.random_trials);
  search->add_option("--max-axes", search_pool.max_axes);
  search->add_flag("--keep-unlearnable", search_pool.keep_unlearnable);

  // train
  auto* trainc = app.add_subcommand("train", "train the per-token type classifier");
  WorldFlags train_w;
  std::string train_system, train_out, train_loss;
  TrainConfig train_cfg;
  trainc->add_option("--corpus", train_w.corpus)->required();
  trainc->add_option("--graph", train_w.graph)->required();
  trainc->add_option("--system", train_system)->required();
  trainc->add_option("--out", train_out, "model checkpoint JSON")->required();
  trainc->add_option("--loss", train_loss, "loss curve TSV");
  trainc->add_option("--lr", train_cfg.lr);
  trainc->add_option("--epochs", train_cfg.epochs);
  trainc->add_option("--batch", train_cfg.batch);
  trainc->add_option("--seed", train_cfg.seed);
  trainc->add_option("--dim", train_cfg.shape.dim);
  trainc->add_option("--hidden", train_cfg.shape.hidden);
  trainc->add_option("--radius", train_cfg.shape.radius);
  trainc->add_flag("--affixes", train_cfg.shape.affixes);
  trainc->add_option("--unk", train_cfg.augment.unk);
  trainc->add_option("--decapitalize", train_cfg.augment.decapitalize);
  trainc->add_option("--strip-s", train_cfg.augment.strip_s);

  // predict
  auto* predict = app.add_subcommand("predict", "per-token type beliefs as JSON lines");
  std::string pred_model, pred_corpus, pred_out;
  predict->add_option("--model", pred_model)->required();
  predict->add_option("--corpus", pred_corpus)->required();
  predict->add_option("--out", pred_out)->required();

  // fit
  auto* fit = app.add_subcommand("fit", "grid-fit smoothing parameters on a validation corpus");
  WorldFlags fit_w;
  std::string fit_model, fit_system, fit_out, fit_alphas, fit_betas, fit_pooling = "max";
  fit->add_option("--corpus", fit_w.corpus)->required();
  fit->add_option("--model", fit_model)->required();
  fit->add_option("--system", fit_system)->required();
  fit->add_option("--links", fit_w.links)->required();
  fit->add_option("--graph", fit_w.graph)->required();
  fit->add_option("--out", fit_out, "params.json")->required();
  fit->add_option("--alphas", fit_alphas, "comma-separated alpha grid");
  fit->add_option("--betas", fit_betas, "comma-separated beta grid");
  fit->add_option("--pooling", fit_pooling)->check(CLI::IsMember({"max", "product"}));

  // link
  auto* linkc = app.add_subcommand("link", "link corpus mentions with typed scores");
  WorldFlags link_w;
  std::string link_model, link_system, link_params, link_out, link_pooling = "max";
  bool link_pure_product = false;
  linkc->add_option("--corpus", link_w.corpus)->required();
  linkc->add_option("--model", link_model)->required();
  linkc->add_option("--system", link_system)->required();
  linkc->add_option("--links", link_w.links)->required();
  linkc->add_option("--graph", link_w.graph)->required();
  linkc->add_option("--params", link_params, "smoothing params JSON (default alpha = beta = 0.9)");
  linkc->add_option("--out", link_out, "decisions.jsonl")->required();
  linkc->add_option("--pooling", link_pooling)->check(CLI::IsMember({"max", "product"}));
  linkc->add_flag("--pure-product", link_pure_product, "rank by p_link times the type beliefs (ignores --params)");

  // evaluate
  auto* evalc = app.add_subcommand("evaluate", "oracle statistics of a type system");
  WorldFlags eval_w;
  std::string eval_system;
  double eval_lambda = 0.00007;
  evalc->add_option("--graph", eval_w.graph)->required();
  evalc->add_option("--links", eval_w.links)->required();
  evalc->add_option("--corpus", eval_w.corpus)->required();
  evalc->add_option("--system", eval_system, "type system JSON (default: empty)");
  evalc->add_option("--lambda", eval_lambda);

  // lambda-sweep
  auto* sweep = app.add_subcommand("lambda-sweep", "search over a lambda grid and several seeds");
  WorldFlags sweep_w;
  PoolFlags sweep_pool;
  std::string sweep_lambdas = "0.01,0.001,0.0001,0.00001", sweep_out, sweep_method = "cem";
  std::size_t sweep_seeds = 3;
  SearchConfig sweep_cfg;
  sweep->add_option("--graph", sweep_w.graph)->required();
  sweep->add_option("--links", sweep_w.links)->required();
  sweep->add_option("--corpus", sweep_w.corpus)->required();
  sweep->add_option("--pool", sweep_pool.pool)->required();
  sweep->add_option("--lambdas", sweep_lambdas);
  sweep->add_option("--seeds", sweep_seeds);
  sweep->add_option("--method", sweep_method)->check(CLI::IsMember({"greedy", "beam", "cem", "ga"}));
  sweep->add_option("--cem-samples", sweep_cfg.cem.samples);
  sweep->add_option("--cem-elites", sweep_cfg.cem.elites);
  sweep->add_option("--ga-population", sweep_cfg.ga.population);
  sweep->add_option("--ga-generations", sweep_cfg.ga.generations);
  sweep->add_option("--out", sweep_out, "TSV (default: stdout)");

  // serve
  auto* serve = app.add_subcommand("serve", "HTTP design service");
  std::string serve_host = "127.0.0.1";
  int serve_port = 8080;
  serve->add_option("--host", serve_host);
  serve->add_option("--port", serve_port);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ingest) {
      KnowledgeGraph graph = load_graph(in_entities, in_edges);
      LinkStats stats = load_links(in_links, graph);
      fs::create_directories(ingest_out);
      save_graph(graph, ingest_out);
      save_links(stats, fs::path(ingest_out) / "links.tsv");
      const auto poly = polysemy_stats(stats);
      nlohmann::json out = {{"entities", graph.entity_count()},
                            {"edges", graph.edge_count()},
                            {"mentions", stats.mention_count()},
                            {"mean_senses", poly.mean_senses}};
      std::cout << out.dump() << '\n';
    } else if (*synth) {
      SynthConfig cfg = synth_preset == "large" ? large_pool_world_config() : standard_world_config();
      if (synth_disambiguation >= 0.0) cfg.disambiguation_fraction = synth_disambiguation;
      const auto w = generate_synthetic_world(synth_seed, cfg);
      fs::create_directories(synth_out);
      save_graph(w.graph, synth_out);
      save_links(w.stats, fs::path(synth_out) / "links.tsv");
      save_corpus(w.corpus, fs::path(synth_out) / "corpus.jsonl");
      save_system(w.latent_system, fs::path(synth_out) / "latent_system.json");
      std::cout << nlohmann::json{{"entities", w.graph.entity_count()}, {"mentions", w.corpus.mention_count()}}.dump()
                << '\n';
    } else if (*simp) {
      KnowledgeGraph graph = load_graph(simp_w.graph);
      LinkStats stats = load_links(simp_w.links, graph);
      SimplifyConfig cfg;
      cfg.workers = workers;
      auto [out, report] = simplify(stats, graph, cfg);
      save_links(out, simp_out);
      if (!simp_report.empty()) {
        auto r = open_out(simp_report);
        write_simplification_report(r, report);
      }
      if (!simp_w.corpus.empty()) {
        if (simp_corpus_out.empty()) throw Error(ErrorCode::kInvalidArgument, "--corpus needs --corpus-out");
        AnnotatedCorpus corpus = load_corpus(simp_w.corpus);
        apply_redirects(corpus, report);
        save_corpus(corpus, simp_corpus_out);
      }
      std::cout << nlohmann::json{{"iterations", report.steps.size()},
                                  {"mean_senses_before", report.before.mean_senses},
                                  {"mean_senses_after", report.after.mean_senses}}
                       .dump()
                << '\n';
    } else if (*learn) {
      KnowledgeGraph graph = load_graph(learn_w.graph);
      AnnotatedCorpus corpus = load_corpus(learn_w.corpus);
      MembershipCache cache(graph);
      std::vector<Relation> relations;
      if (!learn_axes.empty()) {
        for (const auto& axis : load_system(learn_axes).axes) {
          if (axis.kind == TypeAxis::Kind::kDiscovered) relations.push_back(axis.relation);
        }
      } else {
        relations = enumerate_relations(graph, learn_pool);
      }
      learn_cfg.held_out = !learn_in_sample;
      learn_cfg.workers = workers;
      const auto score = learnability(relations, corpus, cache, learn_cfg, learn_seed);
      auto out = open_out(learn_out);
      write_learnability_tsv(out, score.axes);
      std::cout << nlohmann::json{{"axes", score.axes.size()}, {"learnability", score.system}}.dump() << '\n';
    } else if (*search) {
      KnowledgeGraph graph = load_graph(search_w.graph);
      LinkStats stats = load_links(search_w.links, graph);
      AnnotatedCorpus corpus = load_corpus(search_w.corpus);
      MembershipCache cache(graph);
      const CandidatePool pool = load_pool(search_pool, cache);
      const EvalSet set = EvalSet::build(corpus, stats, graph);
      PoolObjective objective(pool, set, {search_cfg.lambda}, workers);
      search_cfg.method = parse_method(search_method);
      SearchResult result;
      nlohmann::json summary;
      if (search_cfg.method == SearchMethod::kRandom) {
        const auto rb = random_baseline(objective, search_cfg.random_k, search_cfg.random_trials, search_cfg.seed);
        for (std::size_t t = 0; t < rb.js.size(); ++t) {
          if (t == 0 || detail::better(rb.js[t], rb.subsets[t], result.j, result.subset)) {
            result.subset = rb.subsets[t];
            result.j = rb.js[t];
          }
        }
        result.iterations = rb.js.size();
        summary = {{"random_mean_j", rb.mean_j}, {"random_std_j", rb.std_j},
                   {"random_mean_accuracy", rb.mean_accuracy}, {"random_std_accuracy", rb.std_accuracy}};
      } else {
        if (search_cfg.method == SearchMethod::kBeam && search_cfg.beam.width == 1) search_cfg.beam.width = 8;
        result = run_search(objective, search_cfg);
      }
      save_system(pool_system(pool, result.subset, graph), search_out);
      if (!search_trace.empty()) {
        auto t = open_out(search_trace);
        write_trace(t, result, objective);
      }
      summary["j"] = result.j;
      summary["axes"] = result.subset.size();
      summary["s_oracle"] = objective.s_oracle(result.subset).value();
      summary["s_greedy"] = objective.s_greedy().value();
      summary["evaluations"] = objective.evaluations();
      summary["iterations"] = result.iterations;
      std::cout << summary.dump() << '\n';
    } else if (*trainc) {
      KnowledgeGraph graph = load_graph(train_w.graph);
      AnnotatedCorpus corpus = load_corpus(train_w.corpus);
      const TypeSystem system = load_system(train_system);
      train_cfg.workers = workers;
      const TokenLabeling labeling = label_corpus(corpus, graph, system);
      const TrainResult result = train(corpus, labeling, train_cfg);
      save_model(train_out, result.model);
      if (!train_loss.empty()) {
        auto out = open_out(train_loss);
        out << "step\tloss\n";
        for (std::size_t i = 0; i < result.loss_curve.size(); ++i) {
          out << i + 1 << '\t' << format_double(result.loss_curve[i]) << '\n';
        }
      }
      std::cout << nlohmann::json{{"steps", result.loss_curve.size()},
                                  {"final_loss", result.loss_curve.empty() ? 0.0 : result.loss_curve.back()}}
                       .dump()
                << '\n';
    } else if (*predict) {
      const TokenClassifier model = load_model(pred_model);
      const AnnotatedCorpus corpus = load_corpus(pred_corpus);
      auto out = open_out(pred_out);
      const auto beliefs = corpus_beliefs(model, corpus, workers);
      for (std::size_t d = 0; d < corpus.documents.size(); ++d) {
        out << nlohmann::json{{"doc_id", corpus.documents[d].doc_id}, {"beliefs", beliefs[d]}}.dump() << '\n';
      }
    } else if (*fit) {
      KnowledgeGraph graph = load_graph(fit_w.graph);
      LinkStats stats = load_links(fit_w.links, graph);
      AnnotatedCorpus corpus = load_corpus(fit_w.corpus);
      const TokenClassifier model = load_model(fit_model);
      MembershipCache cache(graph);
      TypeLabeler labeler(cache, load_system(fit_system));
      SmoothingGrid grid;
      if (!fit_alphas.empty()) grid.alpha = parse_list(fit_alphas, "--alphas");
      if (!fit_betas.empty()) grid.beta = parse_list(fit_betas, "--betas");
      const EvalSet set = EvalSet::build(corpus, stats, graph);
      LinkOptions options{parse_pooling(fit_pooling), workers};
      const FitResult r = fit_smoothing(set, corpus_beliefs(model, corpus, workers), labeler, grid, options);
      save_params(fit_out, r.params);
      std::cout << nlohmann::json{{"accuracy", r.accuracy.value()}, {"beta", r.params.beta},
                                  {"alpha", r.params.alpha.empty() ? 0.0 : r.params.alpha.front()}}
                       .dump()
                << '\n';
    } else if (*linkc) {
      KnowledgeGraph graph = load_graph(link_w.graph);
      LinkStats stats = load_links(link_w.links, graph);
      AnnotatedCorpus corpus = load_corpus(link_w.corpus);
      const TokenClassifier model = load_model(link_model);
      MembershipCache cache(graph);
      TypeLabeler labeler(cache, load_system(link_system));
      SmoothingParams params =
          link_params.empty() ? SmoothingParams::defaults(labeler.axis_count()) : load_params(link_params);
      if (link_pure_product) params = SmoothingParams::pure_product(labeler.axis_count());
      const EvalSet set = EvalSet::build(corpus, stats, graph);
      LinkOptions options{parse_pooling(link_pooling), workers};
      const auto decisions = link(set, corpus_beliefs(model, corpus, workers), labeler, params, options);
      auto out = open_out(link_out);
      write_decisions(out, corpus, decisions);
      std::cout << nlohmann::json{{"accuracy", system_accuracy(decision_predictions(decisions), set).value()},
                                  {"s_greedy", s_greedy(set).value()},
                                  {"linkable", set.linkable_count()},
                                  {"unlinkable", set.unlinkable_count()}}
                       .dump()
                << '\n';
    } else if (*evalc) {
      auto world = load_world({eval_w.graph, eval_w.links, eval_w.corpus});
      TypeSystem system;
      if (!eval_system.empty()) system = load_system(eval_system);
      std::cout << evaluation_to_json(evaluate_rules(*world, system, eval_lambda)).dump() << '\n';
    } else if (*sweep) {
      KnowledgeGraph graph = load_graph(sweep_w.graph);
      LinkStats stats = load_links(sweep_w.links, graph);
      AnnotatedCorpus corpus = load_corpus(sweep_w.corpus);
      MembershipCache cache(graph);
      const CandidatePool pool = load_pool(sweep_pool, cache);
      const EvalSet set = EvalSet::build(corpus, stats, graph);
      std::ofstream file;
      if (!sweep_out.empty()) file = open_out(sweep_out);
      std::ostream& out = sweep_out.empty() ? std::cout : file;
      sweep_cfg.method = parse_method(sweep_method);
      const auto lambdas = parse_list(sweep_lambdas, "--lambdas");
      write_lambda_sweep(out, lambda_sweep(pool, set, lambdas, sweep_seeds, sweep_cfg, workers));
    } else if (*serve) {
      DesignService service;
      httplib::Server server;
      register_routes(server, service);
      if (!server.bind_to_port(serve_host, serve_port)) {
        throw Error(ErrorCode::kIo, "cannot bind " + serve_host + ":" + std::to_string(serve_port));
      }
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::thread watcher([&] {
        while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
        server.stop();
      });
      std::cerr << "listening on " << serve_host << ":" << serve_port << '\n';
      server.listen_after_bind();
      g_stop = true;
      watcher.join();
    }
  } catch (const Error& e) {
    std::cerr << "error [" << error_code_name(e.code()) << "]: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
