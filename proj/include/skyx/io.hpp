#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "skyx/explain.hpp"
#include "skyx/gnn.hpp"
#include "skyx/graph.hpp"
#include "skyx/parallel.hpp"

namespace skyx {

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

/// Shortest round-trip decimal for a double (17 significant digits).
std::string format_f17(double x);

/// Graph document: {"nodes": [{"id", "features", "label", "gt"}], "edges":
/// [[u, v], ...]} with edges referring to source ids. Unknown keys are
/// ignored so generated documents may carry extra provenance blocks.
Graph graph_from_json(const std::string& text, const std::string& origin);
std::string graph_to_json(const Graph& g, const std::string& provenance = "");
Graph load_graph(const std::string& path);
void save_graph(const Graph& g, const std::string& path, const std::string& provenance = "");

/// Model document: {"L", "activation": "relu", "layers": [{"rows", "cols",
/// "data" row-major}]}.
GnnModel model_from_json(const std::string& text, const std::string& origin);
std::string model_to_json(const GnnModel& m, const std::string& provenance = "");
GnnModel load_model(const std::string& path);
void save_model(const GnnModel& m, const std::string& path,
                const std::string& provenance = "");

/// Query list document: array of {"node", "k", "epsilon", "measures",
/// "strategy", "budget", "alpha", "prioritize", "prune"}; absent fields fall
/// back to `defaults`.
std::vector<QueryConfig> queries_from_json(const std::string& text, const QueryConfig& defaults,
                                           const std::string& origin);
std::vector<QueryConfig> load_queries(const std::string& path, const QueryConfig& defaults);

/// One query run as a self-describing document: effective configuration,
/// run counters, the maintained explanation with per-member structure and
/// coordinates, and the sidecar file name holding the verified stream.
/// Deterministic byte-for-byte for a fixed command and seed; wall-clock
/// timings are exported separately through the metrics CSV.
std::string explanation_to_json(const std::string& command, const Graph& g,
                                const QueryConfig& q, uint64_t seed, bool diversified,
                                const ExplainResult& r, const std::string& sidecar_name);

/// Verified-stream coordinates, one row per state in arrival order, measure
/// columns at 17 significant digits plus frontier/membership flags.
std::string zeta_to_csv(const MeasureSpec& spec, const StateGraph& sg,
                        const std::vector<uint32_t>& explanation);

/// Transition DAG in DOT form for debugging.
std::string transition_dot(const StateGraph& sg);

/// Batch summary document: batch configuration, partition statistics, and
/// per-query status rows pointing at the per-query documents.
std::string batch_to_json(const Graph& g, const ParallelConfig& pc, uint64_t seed,
                          const std::vector<QueryConfig>& queries, const BatchResult& br,
                          const std::vector<std::string>& files);

/// Parsed member/space coordinates of an exported explanation document plus
/// its sidecar, for the quality-indicator commands.
struct ExportedRun {
  std::vector<std::string> measure_tokens;
  std::vector<MeasureVector> member_phi;
  std::vector<MeasureVector> zeta_phi;
  std::string sidecar_path;  // resolved against the document's directory
};
ExportedRun load_exported_run(const std::string& json_path);

}  // namespace skyx
