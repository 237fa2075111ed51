#include "skyx/io.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "skyx/diversify.hpp"

namespace skyx {

using nlohmann::json;
using ordered = nlohmann::ordered_json;

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw data_error("cannot read file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw data_error("cannot write file: " + path);
  out << text;
  if (!out) throw data_error("write failed: " + path);
}

std::string format_f17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

namespace {

json parse_json(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw data_error(origin + ": " + e.what());
  }
}

std::string dump(const ordered& doc) { return doc.dump(2) + "\n"; }

}  // namespace

Graph graph_from_json(const std::string& text, const std::string& origin) {
  json doc = parse_json(text, origin);
  try {
    if (!doc.is_object() || !doc.contains("nodes") || !doc.contains("edges"))
      throw data_error(origin + ": expected an object with 'nodes' and 'edges'");
    const json& nodes = doc["nodes"];
    const json& edges = doc["edges"];
    if (!nodes.is_array() || nodes.empty())
      throw data_error(origin + ": 'nodes' must be a non-empty array");
    if (!edges.is_array()) throw data_error(origin + ": 'edges' must be an array");

    int64_t n = static_cast<int64_t>(nodes.size());
    std::vector<int64_t> orig_ids(static_cast<size_t>(n));
    std::vector<std::vector<double>> features(static_cast<size_t>(n));
    std::vector<int32_t> labels(static_cast<size_t>(n), -1);
    std::vector<uint8_t> gt(static_cast<size_t>(n), 0);
    std::unordered_map<int64_t, int32_t> id_to_dense;
    id_to_dense.reserve(static_cast<size_t>(n) * 2);

    for (int64_t i = 0; i < n; ++i) {
      const json& nd = nodes[static_cast<size_t>(i)];
      if (!nd.is_object())
        throw data_error(origin + ": node " + std::to_string(i) + " is not an object");
      int64_t id = nd.contains("id") ? nd["id"].get<int64_t>() : i;
      if (!id_to_dense.emplace(id, static_cast<int32_t>(i)).second)
        throw data_error(origin + ": duplicate node id " + std::to_string(id));
      orig_ids[static_cast<size_t>(i)] = id;
      if (nd.contains("features"))
        features[static_cast<size_t>(i)] = nd["features"].get<std::vector<double>>();
      if (nd.contains("label")) labels[static_cast<size_t>(i)] = nd["label"].get<int32_t>();
      if (nd.contains("gt")) gt[static_cast<size_t>(i)] = nd["gt"].get<bool>() ? 1 : 0;
    }
    size_t dim = features[0].size();
    for (int64_t i = 0; i < n; ++i)
      if (features[static_cast<size_t>(i)].size() != dim)
        throw data_error(origin + ": node " + std::to_string(orig_ids[static_cast<size_t>(i)]) +
                         " has a feature vector of different length");

    std::vector<std::pair<int32_t, int32_t>> edge_list;
    edge_list.reserve(edges.size());
    for (size_t e = 0; e < edges.size(); ++e) {
      const json& pr = edges[e];
      if (!pr.is_array() || pr.size() != 2)
        throw data_error(origin + ": edge " + std::to_string(e) + " must be a [u, v] pair");
      int64_t u = pr[0].get<int64_t>(), v = pr[1].get<int64_t>();
      auto iu = id_to_dense.find(u), iv = id_to_dense.find(v);
      if (iu == id_to_dense.end() || iv == id_to_dense.end())
        throw data_error(origin + ": edge " + std::to_string(e) +
                         " references an unknown node id");
      edge_list.emplace_back(iu->second, iv->second);
    }

    Graph g = make_graph(n, std::move(edge_list));
    g.orig_ids = std::move(orig_ids);
    g.features = std::move(features);
    g.labels = std::move(labels);
    g.gt = std::move(gt);
    return g;
  } catch (const json::exception& e) {
    throw data_error(origin + ": " + e.what());
  }
}

std::string graph_to_json(const Graph& g, const std::string& provenance) {
  ordered doc;
  if (!provenance.empty())
    doc["generator"] = parse_json(provenance, "generator provenance");
  ordered nodes = ordered::array();
  for (int64_t i = 0; i < g.n; ++i) {
    ordered nd;
    nd["id"] = g.orig_ids.empty() ? i : g.orig_ids[static_cast<size_t>(i)];
    nd["features"] = g.features[static_cast<size_t>(i)];
    nd["label"] = g.labels[static_cast<size_t>(i)];
    nd["gt"] = g.gt[static_cast<size_t>(i)] != 0;
    nodes.push_back(std::move(nd));
  }
  doc["nodes"] = std::move(nodes);
  ordered edges = ordered::array();
  auto oid = [&](int32_t v) {
    return g.orig_ids.empty() ? static_cast<int64_t>(v) : g.orig_ids[static_cast<size_t>(v)];
  };
  for (auto [u, v] : g.edges) edges.push_back(ordered::array({oid(u), oid(v)}));
  doc["edges"] = std::move(edges);
  return dump(doc);
}

Graph load_graph(const std::string& path) {
  return graph_from_json(read_text_file(path), path);
}

void save_graph(const Graph& g, const std::string& path, const std::string& provenance) {
  write_text_file(path, graph_to_json(g, provenance));
}

GnnModel model_from_json(const std::string& text, const std::string& origin) {
  json doc = parse_json(text, origin);
  try {
    if (!doc.is_object() || !doc.contains("L") || !doc.contains("layers"))
      throw data_error(origin + ": expected an object with 'L' and 'layers'");
    std::string act = doc.value("activation", std::string("relu"));
    if (act != "relu")
      throw data_error(origin + ": unsupported activation '" + act + "' (only relu)");
    int layer_count = doc["L"].get<int>();
    const json& layers = doc["layers"];
    if (!layers.is_array() || static_cast<int>(layers.size()) != layer_count)
      throw data_error(origin + ": 'L' must match the number of layer blocks");

    GnnModel m;
    for (const json& layer : layers) {
      int rows = layer.at("rows").get<int>();
      int cols = layer.at("cols").get<int>();
      std::vector<double> data = layer.at("data").get<std::vector<double>>();
      if (rows < 1 || cols < 1 ||
          data.size() != static_cast<size_t>(rows) * static_cast<size_t>(cols))
        throw data_error(origin + ": layer data does not match rows*cols");
      Eigen::MatrixXd w(rows, cols);
      for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
          w(r, c) = data[static_cast<size_t>(r) * static_cast<size_t>(cols) +
                         static_cast<size_t>(c)];
      m.weights.push_back(std::move(w));
    }
    validate_model(m);
    return m;
  } catch (const json::exception& e) {
    throw data_error(origin + ": " + e.what());
  }
}

std::string model_to_json(const GnnModel& m, const std::string& provenance) {
  ordered doc;
  if (!provenance.empty())
    doc["trainer"] = parse_json(provenance, "trainer provenance");
  doc["L"] = m.layer_count();
  doc["activation"] = "relu";
  ordered layers = ordered::array();
  for (const Eigen::MatrixXd& w : m.weights) {
    ordered layer;
    layer["rows"] = static_cast<int>(w.rows());
    layer["cols"] = static_cast<int>(w.cols());
    std::vector<double> data;
    data.reserve(static_cast<size_t>(w.size()));
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) data.push_back(w(r, c));
    layer["data"] = std::move(data);
    layers.push_back(std::move(layer));
  }
  doc["layers"] = std::move(layers);
  return dump(doc);
}

GnnModel load_model(const std::string& path) {
  return model_from_json(read_text_file(path), path);
}

void save_model(const GnnModel& m, const std::string& path, const std::string& provenance) {
  write_text_file(path, model_to_json(m, provenance));
}

namespace {

QueryConfig query_from_entry(const json& entry, const QueryConfig& defaults,
                             const std::string& origin, size_t index) {
  if (!entry.is_object())
    throw data_error(origin + ": query " + std::to_string(index) + " is not an object");
  if (!entry.contains("node"))
    throw data_error(origin + ": query " + std::to_string(index) + " lacks 'node'");
  QueryConfig q = defaults;
  q.node = entry["node"].get<int32_t>();
  if (entry.contains("k")) q.k = entry["k"].get<int>();
  if (entry.contains("epsilon")) q.eps = entry["epsilon"].get<double>();
  if (entry.contains("budget")) q.budget = entry["budget"].get<int64_t>();
  if (entry.contains("alpha")) q.alpha = entry["alpha"].get<double>();
  if (entry.contains("strategy"))
    q.mode = parse_explain_mode(entry["strategy"].get<std::string>());
  if (entry.contains("measures")) {
    std::vector<std::string> tokens = entry["measures"].get<std::vector<std::string>>();
    q.spec = make_measure_spec(tokens, defaults.spec.conc_ref);
  }
  if (entry.contains("conciseness_reference")) {
    std::string ref = entry["conciseness_reference"].get<std::string>();
    if (ref == "lhop")
      q.spec.conc_ref = ConcRef::lhop;
    else if (ref == "graph")
      q.spec.conc_ref = ConcRef::graph;
    else
      throw data_error(origin + ": unknown conciseness reference '" + ref + "'");
  }
  if (entry.contains("prioritize")) q.prioritize = entry["prioritize"].get<bool>();
  if (entry.contains("prune")) {
    std::vector<std::string> tokens = entry["prune"].get<std::vector<std::string>>();
    q.monotone.clear();
    for (const std::string& t : tokens) q.monotone.push_back(parse_measure(t));
    q.prune = !q.monotone.empty();
  }
  return q;
}

}  // namespace

std::vector<QueryConfig> queries_from_json(const std::string& text, const QueryConfig& defaults,
                                           const std::string& origin) {
  json doc = parse_json(text, origin);
  try {
    if (!doc.is_array() || doc.empty())
      throw data_error(origin + ": expected a non-empty array of query objects");
    std::vector<QueryConfig> out;
    out.reserve(doc.size());
    for (size_t i = 0; i < doc.size(); ++i)
      out.push_back(query_from_entry(doc[i], defaults, origin, i));
    return out;
  } catch (const json::exception& e) {
    throw data_error(origin + ": " + e.what());
  }
}

std::vector<QueryConfig> load_queries(const std::string& path, const QueryConfig& defaults) {
  return queries_from_json(read_text_file(path), defaults, path);
}

namespace {

int64_t source_id(const Graph& g, int32_t v) {
  if (v < 0 || g.orig_ids.empty()) return v;
  return g.orig_ids[static_cast<size_t>(v)];
}

ordered config_block(const Graph& g, const QueryConfig& q, uint64_t seed, bool diversified) {
  ordered cfg;
  cfg["seed"] = seed;
  cfg["node"] = source_id(g, q.node);
  cfg["k"] = q.k;
  cfg["epsilon"] = q.eps;
  ordered measures = ordered::array();
  for (Measure m : q.spec.measures) measures.push_back(measure_token(m));
  cfg["measures"] = std::move(measures);
  cfg["conciseness_reference"] = q.spec.conc_ref == ConcRef::lhop ? "lhop" : "graph";
  cfg["budget"] = q.budget;
  cfg["layers"] = q.layers;
  cfg["strategy"] = explain_mode_token(q.mode);
  cfg["prioritize"] = q.prioritize;
  ordered prune = ordered::array();
  if (q.prune)
    for (Measure m : q.monotone) prune.push_back(measure_token(m));
  cfg["prune"] = std::move(prune);
  cfg["diversified"] = diversified;
  cfg["alpha"] = q.alpha;
  cfg["graph_nodes"] = g.n;
  cfg["graph_edges"] = g.edge_count();
  return cfg;
}

ordered raw_block(const MeasureSpec& spec, const RawMeasures& raw) {
  ordered r;
  r["factual"] = raw.factual;
  r["counterfactual"] = raw.counterfactual;
  for (Measure m : spec.measures) {
    std::optional<double> v;
    switch (m) {
      case Measure::fdl_plus: v = raw.fdl_plus; break;
      case Measure::fdl_minus: v = raw.fdl_minus; break;
      case Measure::conc: v = raw.conc; break;
      case Measure::acc: v = raw.acc; break;
    }
    if (v) r[measure_token(m)] = *v;
  }
  return r;
}

}  // namespace

std::string explanation_to_json(const std::string& command, const Graph& g,
                                const QueryConfig& q, uint64_t seed, bool diversified,
                                const ExplainResult& r, const std::string& sidecar_name) {
  auto oid = [&](int32_t v) {
    return g.orig_ids.empty() ? static_cast<int64_t>(v) : g.orig_ids[static_cast<size_t>(v)];
  };

  ordered doc;
  doc["command"] = command;
  doc["config"] = config_block(g, q, seed, diversified);

  ordered meta;
  meta["zeta_size"] = r.sg.zeta.size();
  meta["eps_frontier_size"] = r.sg.frontier_eps.size();
  meta["plain_frontier_size"] = r.sg.frontier_plain.size();
  meta["verifier_calls"] = r.stats.verifier_calls;
  meta["verified"] = r.stats.verified;
  meta["rejected"] = r.stats.rejected;
  meta["skipped_illegal"] = r.stats.skipped_illegal;
  meta["pruned"] = r.stats.pruned_count;
  meta["rounds"] = r.stats.rounds;
  meta["commits"] = r.stats.commits;
  meta["budget_exhausted"] = r.stats.budget_exhausted;
  meta["stopped_by_updater"] = r.stats.stopped_by_updater;
  meta["zero_embedding_seen"] = r.stats.zero_embedding_seen;
  meta["timings"] = "recorded through --metrics-out; kept out of this document "
                    "so identical runs match byte for byte";
  meta["sidecar"] = sidecar_name;
  doc["metadata"] = std::move(meta);

  ordered summary;
  summary["members"] = r.explanation.size();
  summary["ds"] = dominance_power(r.sg, r.explanation);
  summary["divs"] = div_s(r.sg, r.explanation, q.alpha);
  doc["summary"] = std::move(summary);

  ordered members = ordered::array();
  for (uint32_t id : r.explanation) {
    const State& st = r.sg.at(id);
    ordered mem;
    mem["state"] = st.id;
    mem["zeta_index"] = st.zeta_index;
    mem["verified_kind"] = verified_kind_token(st.kind);
    mem["edge_ids"] = st.edges;
    ordered edge_pairs = ordered::array();
    for (uint32_t eid : st.edges) {
      auto [u, v] = g.edges[eid];
      edge_pairs.push_back(ordered::array({oid(u), oid(v)}));
    }
    mem["edges"] = std::move(edge_pairs);
    ordered node_ids = ordered::array();
    for (int32_t v : st.nodes) node_ids.push_back(oid(v));
    mem["nodes"] = std::move(node_ids);
    mem["phi"] = st.phi;
    mem["raw"] = raw_block(q.spec, st.raw);
    mem["ds"] = st.ds;
    members.push_back(std::move(mem));
  }
  doc["members"] = std::move(members);
  return dump(doc);
}

std::string zeta_to_csv(const MeasureSpec& spec, const StateGraph& sg,
                        const std::vector<uint32_t>& explanation) {
  auto contains = [](const std::vector<uint32_t>& ids, uint32_t id) {
    return std::find(ids.begin(), ids.end(), id) != ids.end();
  };
  std::ostringstream out;
  out << "zeta_index,state";
  for (Measure m : spec.measures) out << ",phi:" << measure_token(m);
  out << ",eps_frontier,plain_frontier,explanation\n";
  for (size_t i = 0; i < sg.zeta.size(); ++i) {
    uint32_t id = sg.zeta[i];
    const State& st = sg.at(id);
    out << i << ',' << id;
    for (double x : st.phi) out << ',' << format_f17(x);
    out << ',' << (contains(sg.frontier_eps, id) ? 1 : 0) << ','
        << (contains(sg.frontier_plain, id) ? 1 : 0) << ','
        << (contains(explanation, id) ? 1 : 0) << '\n';
  }
  return out.str();
}

std::string transition_dot(const StateGraph& sg) {
  std::ostringstream out;
  out << "digraph zeta {\n  rankdir=LR;\n";
  for (const State& st : sg.states) {
    out << "  s" << st.id << " [label=\"s" << st.id;
    if (st.verified()) out << "\\nz" << st.zeta_index << " " << verified_kind_token(st.kind);
    out << "\\n|E|=" << st.edges.size() << "\"";
    if (st.is_root) out << " shape=box";
    out << "];\n";
  }
  for (const State& st : sg.states)
    if (st.parent != no_state)
      out << "  s" << st.parent << " -> s" << st.id << " [label=\""
          << (st.edit_insert ? '+' : '-') << 'e' << st.edit_edge << "\"];\n";
  out << "}\n";
  return out.str();
}

std::string batch_to_json(const Graph& g, const ParallelConfig& pc, uint64_t seed,
                          const std::vector<QueryConfig>& queries, const BatchResult& br,
                          const std::vector<std::string>& files) {
  ordered doc;
  doc["command"] = "batch";
  ordered cfg;
  cfg["seed"] = seed;
  cfg["threads"] = pc.threads;
  cfg["clustering"] = pc.clustering;
  cfg["sharing"] = pc.sharing;
  cfg["signature_len"] = pc.signature_len;
  cfg["bands"] = pc.bands;
  cfg["rows"] = pc.rows;
  cfg["diversified"] = pc.diversified;
  cfg["graph_nodes"] = g.n;
  cfg["graph_edges"] = g.edge_count();
  doc["config"] = std::move(cfg);

  ordered stats;
  stats["clusters"] = br.stats.clusters;
  stats["failed"] = br.stats.failed;
  stats["thread_queries"] = br.stats.thread_queries;
  stats["thread_cost"] = br.stats.thread_cost;
  stats["timings"] = "recorded through --metrics-out; kept out of this document "
                     "so identical runs match byte for byte";
  doc["stats"] = std::move(stats);

  ordered rows = ordered::array();
  for (size_t i = 0; i < br.outcomes.size(); ++i) {
    const QueryOutcome& o = br.outcomes[i];
    ordered row;
    row["index"] = i;
    row["node"] = source_id(g, o.node);
    row["k"] = queries[i].k;
    row["epsilon"] = queries[i].eps;
    row["strategy"] = explain_mode_token(queries[i].mode);
    row["ok"] = o.ok;
    if (!o.ok) row["error"] = o.error;
    if (i < files.size() && !files[i].empty()) row["file"] = files[i];
    rows.push_back(std::move(row));
  }
  doc["queries"] = std::move(rows);
  return dump(doc);
}

ExportedRun load_exported_run(const std::string& json_path) {
  json doc = parse_json(read_text_file(json_path), json_path);
  ExportedRun run;
  try {
    run.measure_tokens = doc.at("config").at("measures").get<std::vector<std::string>>();
    for (const json& mem : doc.at("members"))
      run.member_phi.push_back(mem.at("phi").get<MeasureVector>());
    std::string sidecar = doc.at("metadata").at("sidecar").get<std::string>();
    run.sidecar_path =
        (std::filesystem::path(json_path).parent_path() / sidecar).string();
  } catch (const json::exception& e) {
    throw data_error(json_path + ": " + e.what());
  }

  std::string csv = read_text_file(run.sidecar_path);
  std::istringstream lines(csv);
  std::string line;
  if (!std::getline(lines, line))
    throw data_error(run.sidecar_path + ": empty coordinate sidecar");
  std::vector<std::string> header;
  {
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) header.push_back(cell);
  }
  std::vector<size_t> phi_cols;
  for (const std::string& tok : run.measure_tokens) {
    auto it = std::find(header.begin(), header.end(), "phi:" + tok);
    if (it == header.end())
      throw data_error(run.sidecar_path + ": missing coordinate column for " + tok);
    phi_cols.push_back(static_cast<size_t>(it - header.begin()));
  }
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::istringstream cs(line);
    std::string cell;
    while (std::getline(cs, cell, ',')) cells.push_back(cell);
    if (cells.size() != header.size())
      throw data_error(run.sidecar_path + ": ragged csv row");
    MeasureVector phi;
    phi.reserve(phi_cols.size());
    for (size_t c : phi_cols) phi.push_back(std::strtod(cells[c].c_str(), nullptr));
    run.zeta_phi.push_back(std::move(phi));
  }
  return run;
}

}  // namespace skyx
