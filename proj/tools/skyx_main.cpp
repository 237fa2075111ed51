#include <chrono>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "skyx/diversify.hpp"
#include "skyx/evalkit.hpp"
#include "skyx/explain.hpp"
#include "skyx/gnn.hpp"
#include "skyx/graph.hpp"
#include "skyx/io.hpp"
#include "skyx/measures.hpp"
#include "skyx/parallel.hpp"
#include "skyx/skyline.hpp"

namespace {

using nlohmann::ordered_json;
using clock_type = std::chrono::steady_clock;

int log_threshold = 1;  // 0 quiet, 1 info, 2 debug

void log_line(int level, const std::string& msg) {
  if (level > log_threshold) return;
  std::cerr << (level >= 2 ? "[debug] " : "[info] ") << msg << "\n";
}

double ms_between(clock_type::time_point a, clock_type::time_point b) {
  return std::chrono::duration<double, std::milli>(b - a).count();
}

struct Phases {
  double load_ms = 0.0;
  double compute_ms = 0.0;
  double export_ms = 0.0;
};

void write_metrics(const std::string& path, const std::string& command, const Phases& ph,
                   const std::vector<std::pair<std::string, std::string>>& extra) {
  if (path.empty()) return;
  std::ostringstream out;
  out << "key,value\n";
  out << "command," << command << "\n";
  char buf[64];
  auto row = [&](const char* key, double v) {
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    out << key << "," << buf << "\n";
  };
  row("load_ms", ph.load_ms);
  row("compute_ms", ph.compute_ms);
  row("export_ms", ph.export_ms);
  row("total_ms", ph.load_ms + ph.compute_ms + ph.export_ms);
  for (const auto& [k, v] : extra) out << k << "," << v << "\n";
  skyx::write_text_file(path, out.str());
}

std::vector<std::string> split_tokens(const std::string& joined) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(joined);
  while (std::getline(in, cur, ','))
    if (!cur.empty()) out.push_back(cur);
  return out;
}

std::string sidecar_name_for(const std::string& json_path) {
  std::filesystem::path p(json_path);
  std::filesystem::path name = p.filename();
  if (name.extension() == ".json") name.replace_extension(".csv");
  else name += ".csv";
  return name.string();
}

skyx::ConcRef parse_conc_ref(const std::string& token) {
  if (token == "lhop") return skyx::ConcRef::lhop;
  if (token == "graph") return skyx::ConcRef::graph;
  throw skyx::usage_error("unknown conciseness reference '" + token +
                          "' (expected lhop or graph)");
}

// Documents and flags speak source node ids; the library speaks dense ids.
int32_t resolve_node(const skyx::Graph& g, int64_t source_id) {
  if (g.orig_ids.empty()) {
    if (source_id < 0 || source_id >= g.n)
      throw skyx::data_error("node id " + std::to_string(source_id) + " is out of range");
    return static_cast<int32_t>(source_id);
  }
  for (int64_t i = 0; i < g.n; ++i)
    if (g.orig_ids[static_cast<size_t>(i)] == source_id) return static_cast<int32_t>(i);
  throw skyx::data_error("node id " + std::to_string(source_id) +
                         " is not present in the graph");
}

// Shared per-query flags of the explain and batch commands; batch uses them
// as defaults for entries that leave fields out.
struct QueryFlags {
  int k = 3;
  double epsilon = 0.1;
  std::string measures = "fdl+,fdl-,conc";
  std::string strategy = "op";
  std::string conc_ref = "lhop";
  int64_t max_candidates = 5000;
  bool no_prioritize = false;
  std::string prune;  // comma list of measures asserted monotone
  bool diversify = false;
  double alpha = 0.5;

  void attach(CLI::App* cmd) {
    cmd->add_option("--k", k, "explanation size bound");
    cmd->add_option("--epsilon", epsilon, "dominance slack in [0, 1]");
    cmd->add_option("--measures", measures, "comma list of fdl+, fdl-, conc, acc");
    cmd->add_option("--strategy", strategy, "op (peeling) or insert (growth)");
    cmd->add_option("--conc-ref", conc_ref, "conciseness denominator: lhop or graph");
    cmd->add_option("--max-candidates", max_candidates,
                    "verifier call budget per query, 0 = unlimited");
    cmd->add_flag("--no-prioritize", no_prioritize, "spawn in raw edge-id order");
    cmd->add_option("--prune", prune,
                    "comma list of measures asserted monotone; enables early pruning "
                    "once every selected measure is listed");
    cmd->add_flag("--diversify", diversify, "diversified selection instead of skyline");
    cmd->add_option("--alpha", alpha, "diversity: coverage weight in [0, 1]");
  }

  skyx::QueryConfig to_config() const {
    skyx::QueryConfig q;
    q.k = k;
    q.eps = epsilon;
    q.budget = max_candidates;
    q.mode = skyx::parse_explain_mode(strategy);
    q.spec = skyx::make_measure_spec(split_tokens(measures), parse_conc_ref(conc_ref));
    q.prioritize = !no_prioritize;
    std::vector<std::string> prune_tokens = split_tokens(prune);
    if (!prune_tokens.empty()) {
      q.monotone.clear();
      for (const std::string& t : prune_tokens)
        q.monotone.push_back(skyx::parse_measure(t));
      q.prune = true;
    }
    q.alpha = alpha;
    return q;
  }
};

int cmd_explain(const std::string& graph_path, const std::string& model_path, int64_t node,
                const QueryFlags& flags, uint64_t seed, const std::string& out_path,
                const std::string& dot_path, const std::string& metrics_path) {
  auto t0 = clock_type::now();
  skyx::Graph g = skyx::load_graph(graph_path);
  skyx::GnnModel m = skyx::load_model(model_path);
  auto t1 = clock_type::now();

  skyx::QueryConfig q = flags.to_config();
  q.node = resolve_node(g, node);
  q.layers = m.layer_count();

  skyx::ExplainResult res;
  if (flags.diversify)
    res = skyx::dsx(g, m, q);
  else if (q.mode == skyx::ExplainMode::grow)
    res = skyx::asx_insert(g, m, q);
  else
    res = skyx::asx_op(g, m, q);
  auto t2 = clock_type::now();

  std::string sidecar = sidecar_name_for(out_path);
  skyx::write_text_file(out_path, skyx::explanation_to_json("explain", g, q, seed,
                                                            flags.diversify, res, sidecar));
  std::filesystem::path side_full = std::filesystem::path(out_path).parent_path() / sidecar;
  skyx::write_text_file(side_full.string(), skyx::zeta_to_csv(q.spec, res.sg, res.explanation));
  if (!dot_path.empty()) skyx::write_text_file(dot_path, skyx::transition_dot(res.sg));
  auto t3 = clock_type::now();

  log_line(1, "explain: node " + std::to_string(node) + ", members " +
                  std::to_string(res.explanation.size()) + ", ds " +
                  std::to_string(skyx::dominance_power(res.sg, res.explanation)) +
                  ", zeta " + std::to_string(res.sg.zeta.size()) + " -> " + out_path);

  Phases ph{ms_between(t0, t1), ms_between(t1, t2), ms_between(t2, t3)};
  write_metrics(metrics_path, "explain", ph,
                {{"verifier_calls", std::to_string(res.stats.verifier_calls)},
                 {"zeta_size", std::to_string(res.sg.zeta.size())}});
  return 0;
}

int cmd_batch(const std::string& graph_path, const std::string& model_path,
              const std::string& queries_path, const QueryFlags& flags, int threads,
              bool no_share, bool no_cluster, int signature_len, int bands, int rows,
              uint64_t seed, const std::string& out_dir, const std::string& metrics_path) {
  auto t0 = clock_type::now();
  skyx::Graph g = skyx::load_graph(graph_path);
  skyx::GnnModel m = skyx::load_model(model_path);
  skyx::QueryConfig defaults = flags.to_config();
  std::vector<skyx::QueryConfig> queries = skyx::load_queries(queries_path, defaults);
  for (skyx::QueryConfig& q : queries) {
    q.node = resolve_node(g, q.node);
    if (q.layers == 0) q.layers = m.layer_count();
  }
  auto t1 = clock_type::now();

  skyx::ParallelConfig pc;
  pc.threads = threads;
  pc.clustering = !no_cluster;
  pc.sharing = !no_share;
  pc.signature_len = signature_len;
  pc.bands = bands;
  pc.rows = rows;
  pc.seed = seed;
  pc.diversified = flags.diversify;

  skyx::BatchResult br = skyx::para_sx(g, m, queries, pc);
  auto t2 = clock_type::now();

  std::filesystem::create_directories(out_dir);
  std::vector<std::string> files(queries.size());
  for (size_t i = 0; i < queries.size(); ++i) {
    if (!br.outcomes[i].ok) continue;
    int32_t dense = br.outcomes[i].node;
    long long src = g.orig_ids.empty() || dense < 0
                        ? dense
                        : static_cast<long long>(g.orig_ids[static_cast<size_t>(dense)]);
    char name[64];
    std::snprintf(name, sizeof(name), "q%04zu_n%lld.json", i, src);
    files[i] = name;
    std::filesystem::path full = std::filesystem::path(out_dir) / name;
    std::string sidecar = sidecar_name_for(full.string());
    skyx::write_text_file(full.string(),
                          skyx::explanation_to_json("batch", g, queries[i], seed,
                                                    pc.diversified, br.outcomes[i].result,
                                                    sidecar));
    std::filesystem::path side_full = full.parent_path() / sidecar;
    skyx::write_text_file(side_full.string(),
                          skyx::zeta_to_csv(queries[i].spec, br.outcomes[i].result.sg,
                                            br.outcomes[i].result.explanation));
  }
  std::filesystem::path summary = std::filesystem::path(out_dir) / "batch.json";
  skyx::write_text_file(summary.string(), skyx::batch_to_json(g, pc, seed, queries, br, files));
  auto t3 = clock_type::now();

  log_line(1, "batch: " + std::to_string(queries.size()) + " queries, " +
                  std::to_string(br.stats.failed) + " failed, " +
                  std::to_string(br.stats.clusters) + " clusters -> " + summary.string());

  Phases ph{ms_between(t0, t1), ms_between(t1, t2), ms_between(t2, t3)};
  write_metrics(metrics_path, "batch", ph,
                {{"queries", std::to_string(queries.size())},
                 {"failed", std::to_string(br.stats.failed)},
                 {"threads", std::to_string(threads)}});
  return 0;
}

int cmd_gen(const std::string& kind, uint64_t seed, int height, int motifs,
            int64_t target_edges, int base_nodes, int attach, const std::string& out_path,
            const std::string& metrics_path) {
  auto t0 = clock_type::now();
  skyx::Graph g;
  ordered_json prov;
  prov["kind"] = kind;
  prov["seed"] = seed;
  if (kind == "tree-cycles") {
    g = skyx::gen_tree_cycles(height, motifs, seed, target_edges);
    prov["height"] = height;
    prov["motifs"] = motifs;
    prov["target_edges"] = target_edges;
  } else if (kind == "ba-shapes") {
    g = skyx::gen_ba_shapes(base_nodes, motifs, attach, seed);
    prov["base_nodes"] = base_nodes;
    prov["motifs"] = motifs;
    prov["attach"] = attach;
  } else {
    throw skyx::usage_error("unknown kind '" + kind +
                            "' (expected tree-cycles or ba-shapes)");
  }
  auto t1 = clock_type::now();
  skyx::save_graph(g, out_path, prov.dump());
  auto t2 = clock_type::now();

  log_line(1, "gen: " + kind + " with " + std::to_string(g.n) + " nodes, " +
                  std::to_string(g.edge_count()) + " edges -> " + out_path);
  Phases ph{0.0, ms_between(t0, t1), ms_between(t1, t2)};
  write_metrics(metrics_path, "gen", ph,
                {{"nodes", std::to_string(g.n)}, {"edges", std::to_string(g.edge_count())}});
  return 0;
}

int cmd_train(const std::string& graph_path, int hidden, int layers, int epochs, double lr,
              uint64_t seed, const std::string& out_path, const std::string& metrics_path) {
  auto t0 = clock_type::now();
  skyx::Graph g = skyx::load_graph(graph_path);
  auto t1 = clock_type::now();

  std::vector<int32_t> mask;
  for (int64_t v = 0; v < g.n; ++v)
    if (g.labels[static_cast<size_t>(v)] >= 0) mask.push_back(static_cast<int32_t>(v));

  skyx::TrainConfig cfg;
  cfg.hidden = hidden;
  cfg.layers = layers;
  cfg.epochs = epochs;
  cfg.lr = lr;
  cfg.seed = seed;
  skyx::GnnModel m = skyx::train_gcn(g, mask, cfg);
  double acc = skyx::training_accuracy(m, g, mask);
  auto t2 = clock_type::now();

  ordered_json prov;
  prov["seed"] = seed;
  prov["hidden"] = hidden;
  prov["layers"] = layers;
  prov["epochs"] = epochs;
  prov["lr"] = lr;
  prov["graph_nodes"] = g.n;
  prov["train_nodes"] = mask.size();
  prov["train_accuracy"] = acc;
  skyx::save_model(m, out_path, prov.dump());
  auto t3 = clock_type::now();

  log_line(1, "train: accuracy " + skyx::format_f17(acc) + " on " +
                  std::to_string(mask.size()) + " nodes -> " + out_path);
  Phases ph{ms_between(t0, t1), ms_between(t1, t2), ms_between(t2, t3)};
  write_metrics(metrics_path, "train", ph, {{"train_accuracy", skyx::format_f17(acc)}});
  return 0;
}

int cmd_oracle(const std::string& graph_path, const std::string& model_path, int64_t node_src,
               int k, const std::string& objective, double epsilon, double alpha,
               const std::string& measures, const std::string& conc_ref, int max_edges,
               uint64_t seed, const std::string& out_path, const std::string& metrics_path) {
  auto t0 = clock_type::now();
  skyx::Graph g = skyx::load_graph(graph_path);
  skyx::GnnModel m = skyx::load_model(model_path);
  int32_t node = resolve_node(g, node_src);
  auto t1 = clock_type::now();

  skyx::OracleObjective obj;
  if (objective == "ds") obj = skyx::OracleObjective::ds;
  else if (objective == "divs") obj = skyx::OracleObjective::divs;
  else throw skyx::usage_error("unknown objective '" + objective + "' (expected ds or divs)");

  skyx::MeasureSpec spec =
      skyx::make_measure_spec(split_tokens(measures), parse_conc_ref(conc_ref));
  int layers = m.layer_count();
  skyx::Subgraph lhop = skyx::l_hop_subgraph(g, node, layers);
  int64_t lhop_nodes = static_cast<int64_t>(lhop.node_ids().size());

  std::vector<skyx::OracleCandidate> space =
      skyx::brute_force_space(g, m, node, layers, spec, max_edges);
  skyx::StateGraph sg = skyx::oracle_state_graph(space, epsilon, k, lhop_nodes);
  skyx::OracleBest best = skyx::brute_force_optimal(sg, k, obj, alpha);
  auto t2 = clock_type::now();

  auto oid = [&](int32_t v) {
    return g.orig_ids.empty() ? static_cast<int64_t>(v) : g.orig_ids[static_cast<size_t>(v)];
  };
  ordered_json doc;
  doc["command"] = "oracle";
  ordered_json cfg;
  cfg["seed"] = seed;
  cfg["node"] = node_src;
  cfg["k"] = k;
  cfg["epsilon"] = epsilon;
  cfg["objective"] = objective;
  cfg["alpha"] = alpha;
  ordered_json mtoks = ordered_json::array();
  for (skyx::Measure mm : spec.measures) mtoks.push_back(skyx::measure_token(mm));
  cfg["measures"] = std::move(mtoks);
  cfg["conciseness_reference"] = conc_ref;
  cfg["layers"] = layers;
  cfg["max_edges"] = max_edges;
  cfg["graph_nodes"] = g.n;
  cfg["graph_edges"] = g.edge_count();
  doc["config"] = std::move(cfg);
  ordered_json sp;
  sp["size"] = space.size();
  sp["lhop_nodes"] = lhop_nodes;
  sp["lhop_edges"] = lhop.edge_ids.size();
  doc["space"] = std::move(sp);
  ordered_json bj;
  bj["score"] = best.score;
  ordered_json members = ordered_json::array();
  for (uint32_t id : best.members) {
    const skyx::State& st = sg.at(id);
    ordered_json mem;
    mem["state"] = id;
    ordered_json pairs = ordered_json::array();
    for (uint32_t eid : st.edges) {
      auto [u, v] = g.edges[eid];
      pairs.push_back(ordered_json::array({oid(u), oid(v)}));
    }
    mem["edges"] = std::move(pairs);
    mem["phi"] = st.phi;
    members.push_back(std::move(mem));
  }
  bj["members"] = std::move(members);
  doc["best"] = std::move(bj);
  std::string text = doc.dump(2) + "\n";
  if (out_path.empty()) std::cout << text;
  else skyx::write_text_file(out_path, text);
  auto t3 = clock_type::now();

  log_line(1, "oracle: space " + std::to_string(space.size()) + ", best " +
                  skyx::format_f17(best.score) + " with " +
                  std::to_string(best.members.size()) + " members");
  Phases ph{ms_between(t0, t1), ms_between(t1, t2), ms_between(t2, t3)};
  write_metrics(metrics_path, "oracle", ph, {{"space_size", std::to_string(space.size())}});
  return 0;
}

int cmd_eval(const std::vector<std::string>& explanation_paths, const std::string& qi,
             int k, const std::string& out_path, const std::string& metrics_path) {
  auto t0 = clock_type::now();
  std::vector<std::string> selected = split_tokens(qi);
  if (selected.empty()) throw skyx::usage_error("--qi needs at least one of ipf, igd, ms");
  bool want_ipf = false, want_igd = false, want_ms = false;
  for (const std::string& s : selected) {
    if (s == "ipf") want_ipf = true;
    else if (s == "igd") want_igd = true;
    else if (s == "ms") want_ms = true;
    else throw skyx::usage_error("unknown quality indicator '" + s + "'");
  }

  std::vector<skyx::ExportedRun> runs;
  for (const std::string& p : explanation_paths) runs.push_back(skyx::load_exported_run(p));
  for (const skyx::ExportedRun& r : runs) {
    if (r.measure_tokens != runs[0].measure_tokens)
      throw skyx::data_error("explanation documents use different measure sets");
    if (r.member_phi.empty())
      throw skyx::data_error("empty explanation cannot be scored");
  }
  auto t1 = clock_type::now();

  std::ostringstream out;
  out << "file";
  if (want_ipf) out << ",nipf";
  if (want_igd) out << ",nigd";
  if (want_ms)
    for (const std::string& tok : runs[0].measure_tokens) out << ",nms:" << tok;
  out << "\n";
  for (size_t i = 0; i < runs.size(); ++i) {
    out << explanation_paths[i];
    if (want_ipf) out << ',' << skyx::format_f17(skyx::nipf(runs[i].member_phi));
    if (want_igd)
      out << ',' << skyx::format_f17(skyx::nigd(runs[i].member_phi, runs[i].zeta_phi, k));
    if (want_ms) {
      skyx::MeasureVector ms = skyx::nms(runs[i].member_phi, runs[i].zeta_phi);
      for (double x : ms) out << ',' << skyx::format_f17(x);
    }
    out << "\n";
  }
  skyx::write_text_file(out_path, out.str());
  auto t2 = clock_type::now();

  log_line(1, "eval: " + std::to_string(runs.size()) + " documents -> " + out_path);
  Phases ph{ms_between(t0, t1), ms_between(t1, t2), 0.0};
  write_metrics(metrics_path, "eval", ph, {{"documents", std::to_string(runs.size())}});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"skyline explanations for GNN node classification"};
  app.require_subcommand(1);

  uint64_t seed = 1;
  std::string log_level = "info";
  std::string metrics_path;
  app.add_option("--seed", seed, "master seed for every random choice (default 1)");
  app.add_option("--log-level", log_level, "quiet, info or debug");
  app.add_option("--metrics-out", metrics_path, "write wall-clock timings to this CSV");

  // explain
  auto* explain = app.add_subcommand("explain", "explain one node's prediction");
  std::string graph_path, model_path, out_path, dot_path;
  int64_t node = -1;
  QueryFlags flags;
  explain->add_option("--graph", graph_path, "graph JSON")->required();
  explain->add_option("--model", model_path, "model JSON")->required();
  explain->add_option("--node", node, "anchored node id (source id space)")->required();
  flags.attach(explain);
  explain->add_option("--out", out_path, "output JSON path")->required();
  explain->add_option("--dot", dot_path, "also dump the transition DAG here");

  // batch
  auto* batch = app.add_subcommand("batch", "run a query batch in parallel");
  std::string queries_path, out_dir;
  int threads = 1, signature_len = 64, bands = 16, rows = 4;
  bool no_share = false, no_cluster = false;
  QueryFlags batch_flags;
  batch->add_option("--graph", graph_path, "graph JSON")->required();
  batch->add_option("--model", model_path, "model JSON")->required();
  batch->add_option("--queries", queries_path, "queries JSON")->required();
  batch->add_option("--threads", threads, "worker thread count");
  batch->add_flag("--no-share", no_share, "disable per-thread estimate sharing");
  batch->add_flag("--no-cluster", no_cluster, "disable similarity clustering");
  batch->add_option("--signature-len", signature_len, "MinHash signature length");
  batch->add_option("--bands", bands, "LSH bands");
  batch->add_option("--rows", rows, "LSH rows per band");
  batch_flags.attach(batch);
  batch->add_option("--out", out_dir, "output directory")->required();

  // gen
  auto* gen = app.add_subcommand("gen", "generate a synthetic labeled graph");
  std::string kind;
  int height = 8, motifs = 80, base_nodes = 300, attach = 5;
  int64_t target_edges = 0;
  gen->add_option("--kind", kind, "tree-cycles or ba-shapes")->required();
  gen->add_option("--height", height, "tree-cycles: balanced tree height");
  gen->add_option("--motifs", motifs, "motif count");
  gen->add_option("--target-edges", target_edges,
                  "tree-cycles: pad with noise edges up to this total");
  gen->add_option("--base-nodes", base_nodes, "ba-shapes: base graph size");
  gen->add_option("--attach", attach, "ba-shapes: edges per new base node");
  gen->add_option("--out", out_path, "output JSON path")->required();

  // train
  auto* train = app.add_subcommand("train", "train a GCN on a labeled graph");
  int hidden = 16, layers = 2, epochs = 200;
  double lr = 0.02;
  train->add_option("--graph", graph_path, "graph JSON")->required();
  train->add_option("--hidden", hidden, "hidden width");
  train->add_option("--layers", layers, "layer count");
  train->add_option("--epochs", epochs, "training epochs");
  train->add_option("--lr", lr, "learning rate");
  train->add_option("--out", out_path, "output model JSON path")->required();

  // oracle
  auto* oracle = app.add_subcommand("oracle", "exhaustive desk-scale reference answer");
  int oracle_k = 1, max_edges = 14;
  std::string objective = "ds";
  double epsilon = 0.1, alpha = 0.5;
  std::string measures = "fdl+,fdl-,conc", conc_ref = "lhop";
  oracle->add_option("--graph", graph_path, "graph JSON")->required();
  oracle->add_option("--model", model_path, "model JSON")->required();
  oracle->add_option("--node", node, "anchored node id (source id space)")->required();
  oracle->add_option("--k", oracle_k, "subset size bound (max 3)")->required();
  oracle->add_option("--objective", objective, "ds or divs")->required();
  oracle->add_option("--epsilon", epsilon, "dominance slack");
  oracle->add_option("--alpha", alpha, "diversity coverage weight");
  oracle->add_option("--measures", measures, "comma list of measures");
  oracle->add_option("--conc-ref", conc_ref, "conciseness denominator: lhop or graph");
  oracle->add_option("--max-edges", max_edges, "neighborhood edge cap (max 14)");
  oracle->add_option("--out", out_path, "output JSON path (default stdout)");

  // eval
  auto* eval = app.add_subcommand("eval", "score exported explanations");
  std::vector<std::string> explanation_paths;
  std::string qi = "ipf,igd,ms";
  int eval_k = 1;
  eval->add_option("--explanations", explanation_paths, "exported explanation JSONs")
      ->required()
      ->expected(-1);
  eval->add_option("--qi", qi, "comma list of ipf, igd, ms");
  eval->add_option("--k", eval_k, "reference depth for igd");
  eval->add_option("--out", out_path, "output report CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  if (log_level == "quiet") log_threshold = 0;
  else if (log_level == "info") log_threshold = 1;
  else if (log_level == "debug") log_threshold = 2;
  else {
    std::cerr << "unknown log level '" << log_level << "' (expected quiet, info, debug)\n";
    return 1;
  }

  try {
    if (app.got_subcommand(explain))
      return cmd_explain(graph_path, model_path, node, flags, seed, out_path, dot_path,
                         metrics_path);
    if (app.got_subcommand(batch))
      return cmd_batch(graph_path, model_path, queries_path, batch_flags, threads, no_share,
                       no_cluster, signature_len, bands, rows, seed, out_dir, metrics_path);
    if (app.got_subcommand(gen))
      return cmd_gen(kind, seed, height, motifs, target_edges, base_nodes, attach, out_path,
                     metrics_path);
    if (app.got_subcommand(train))
      return cmd_train(graph_path, hidden, layers, epochs, lr, seed, out_path, metrics_path);
    if (app.got_subcommand(oracle))
      return cmd_oracle(graph_path, model_path, node, oracle_k, objective, epsilon, alpha,
                        measures, conc_ref, max_edges, seed, out_path, metrics_path);
    if (app.got_subcommand(eval))
      return cmd_eval(explanation_paths, qi, eval_k, out_path, metrics_path);
    std::cerr << "no subcommand selected\n";
    return 1;
  } catch (const skyx::usage_error& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const skyx::data_error& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
